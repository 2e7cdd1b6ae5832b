#include "gaugekit/integrate.hpp"

#include <random>

namespace gaugekit {

ValueWithError riemann_sum(const FnSpec& f, const TaggedPartition& p)
{
    ValueWithError total = ValueWithError::exact_value(0);
    for (const auto& [tag, cell] : p.items()) total = total + scale(f(tag), cell.length());
    total.by_convention = false;
    return total;
}

std::uint64_t row_seed(std::uint64_t seed, std::size_t row)
{
    // splitmix64 step; independent of the standard library's seeding.
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (row + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

HkReport hk_estimate(const FnSpec& f, const Rat& a, const Rat& b, const GaugeFamily& family, const HkOptions& options)
{
    if (options.schedule.empty()) throw std::invalid_argument("hk_estimate: empty schedule");
    const bool reversed = b < a;
    const Iv domain = reversed ? Iv(b, a) : Iv(a, b);

    HkReport report;
    report.a = a;
    report.b = b;
    report.seed = options.seed;
    report.tolerance = options.tolerance;

    for (std::size_t r = 0; r < options.schedule.size(); ++r) {
        const Rat& eps = options.schedule[r];
        Gauge g = family(eps);
        HkRow row{eps, g.name(), {}, 0, 0, 0};
        std::mt19937_64 rng(row_seed(options.seed, r));
        unsigned samples = std::max(1u, options.samples);
        for (unsigned s = 0; s < samples; ++s) {
            CousinOptions co;
            co.max_depth = options.max_depth;
            co.rng = s == 0 ? nullptr : &rng;
            auto p = cousin_partition(domain, g, co);
            ValueWithError v = riemann_sum(f, p);
            if (reversed) v = scale(v, Rat(-1));
            if (row.sums.empty() || v.lower() < row.min) row.min = v.lower();
            if (row.sums.empty() || v.upper() > row.max) row.max = v.upper();
            row.sums.push_back(std::move(v));
        }
        row.spread = row.max - row.min;
        report.rows.push_back(std::move(row));
    }
    report.converged = report.rows.back().spread <= options.tolerance;
    return report;
}

}  // namespace gaugekit
