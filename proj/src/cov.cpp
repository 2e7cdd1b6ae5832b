#include "gaugekit/cov.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace gaugekit {

namespace {

const GeneratedSet& reflected()
{
    static const GeneratedSet d = GeneratedSet::reflected_cantor();
    return d;
}

const GeneratedSet& ternary()
{
    static const GeneratedSet c = GeneratedSet::ternary_cantor();
    return c;
}

const GeneratedSet& svc()
{
    static const GeneratedSet s = GeneratedSet::svc();
    return s;
}

// F for f ≡ k when no antiderivative was declared.
std::optional<FnSpec> implied_antiderivative(const CovInstance& inst)
{
    if (inst.F) return inst.F;
    if (inst.f.affine && sgn(inst.f.affine->slope) == 0) return *constant_fn(inst.f.affine->intercept).antideriv;
    return std::nullopt;
}

CovInstance substitution(std::string name, FnSpec g, Iv domain, PointSet b, std::function<bool(const Iv&)> expected)
{
    CovInstance inst;
    inst.name = std::move(name);
    inst.f = constant_fn(Rat(1));
    inst.F = identity_fn();
    inst.g = std::move(g);
    inst.domain = std::move(domain);
    inst.B = std::move(b);
    inst.b_gauge = default_b_gauge(outer_composite(inst), inst.B);
    inst.expected_holds = std::move(expected);
    return inst;
}

}  // namespace

GaugeFamily default_b_gauge(const FnSpec& fg, const PointSet& b)
{
    if (b.kind() == PointSet::Kind::generated) {
        Gauge g = gauge_dist_complement(*b.generated_set());
        return [g](const Rat&) { return g; };
    }
    return [fg, b](const Rat& eps) {
        Rat count = std::max<std::size_t>(1, b.points().size());
        return Gauge(
            "failure_points:" + b.name() + "@" + to_string(eps),
            [fg, b, eps, count](const Rat& x) -> Rat {
                if (!b.contains(x)) return Rat(1);
                if (!fg.dini) throw UnsupportedInstance(fg.name + ": no Dini certificate at failure point");
                auto band = fg.dini->band(x);
                auto eta = fg.dini->eta(x);
                if (!band || !eta) throw UnsupportedInstance(fg.name + ": no Dini band at " + to_string(x));
                return rat_min(*eta, Rat(eps / (4 * (1 + *band) * count)));
            },
            [b](const Iv& cell) { return b.witnesses_in(cell); });
    };
}

FnSpec outer_composite(const CovInstance& inst)
{
    auto F = implied_antiderivative(inst);
    if (!F) throw UnsupportedInstance(inst.name + ": no antiderivative for the outer function");
    return compose(*F, inst.g);
}

FnSpec cov_integrand(const CovInstance& inst)
{
    FnSpec h;
    h.name = "(" + inst.f.name + "∘" + inst.g.name + ")·h";
    h.domain = inst.domain;
    h.exact_on_rationals = inst.f.exact_on_rationals && inst.g.exact_on_rationals;
    h.eval = [f = inst.f, g = inst.g, b = inst.B](const Rat& x, unsigned bits) {
        if (b.contains(x)) return ValueWithError::convention_zero();
        auto u = g(x, bits);
        if (!u.exact()) throw UnsupportedInstance("cov integrand: inexact inner value at " + to_string(x));
        return f(u.value, bits) * g.derivative_at(x, bits);
    };
    return h;
}

Gauge cov_gauge(const CovInstance& inst, const Iv& interval, const Rat& eps)
{
    FnSpec fg = outer_composite(inst);
    Gauge on_b = inst.b_gauge(eps);
    Rat len = interval.length();
    Rat slope = sgn(len) > 0 ? Rat(eps / (2 * len)) : eps;
    return Gauge(
        "cov:" + inst.name + "@" + to_string(eps),
        [fg, on_b, b = inst.B, slope](const Rat& x) -> Rat {
            if (b.contains(x)) return on_b.radius(x);
            auto eta = fg.modulus_at(x, slope);
            if (!eta) throw UnsupportedInstance(fg.name + ": no modulus at " + to_string(x));
            return rat_min(*eta, Rat(1));
        },
        [on_b](const Iv& cell) { return on_b.suggest(cell); });
}

std::string_view to_string(CovVerdict v)
{
    switch (v) {
    case CovVerdict::holds_evidence: return "holds-evidence";
    case CovVerdict::fails: return "fails";
    case CovVerdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

std::vector<std::string> cov_instance_names()
{
    return {"identity-one", "square-sub", "abs-kink", "cantorabs", "cantorabs-unit", "cantor-ftc"};
}

std::optional<CovInstance> cov_instance(std::string_view name)
{
    auto always = [](const Iv&) { return true; };
    if (name == "identity-one") return substitution("identity-one", identity_fn(), Iv(0, 1), PointSet::empty(), always);
    if (name == "square-sub") return substitution("square-sub", square_fn(), Iv(0, 1), PointSet::empty(), always);
    if (name == "abs-kink") {
        auto inst = substitution("abs-kink", abs_fn(), Iv(-1, 1), PointSet::finite({Rat(0)}), always);
        inst.split_points = {Rat(0)};
        return inst;
    }
    auto level_set = [](Rat (*fn)(const Rat&)) {
        return [fn](const Iv& w) { return fn(w.lo()) == fn(w.hi()); };
    };
    if (name == "cantorabs" || name == "cantorabs-unit") {
        Iv domain = name == "cantorabs" ? Iv(-1, 1) : Iv(0, 1);
        auto inst = substitution(std::string(name), cantor_abs_spec(), domain, PointSet::generated(reflected()),
                                 level_set(&cantor_abs));
        inst.split_points = {Rat(0)};
        return inst;
    }
    if (name == "cantor-ftc")
        return substitution("cantor-ftc", cantor_fn_spec(), Iv(0, 1), PointSet::generated(ternary()),
                            level_set(&cantor_fn));
    return std::nullopt;
}

CovReport cov_check(const CovInstance& inst, const Iv& interval, const CovOptions& options)
{
    if (!inst.domain.contains(interval))
        throw DomainError(inst.name + ": " + to_string(interval) + " is not inside " + to_string(inst.domain));
    if (options.schedule.empty()) throw std::invalid_argument("cov_check: empty schedule");

    CovReport report;
    report.instance = inst.name;
    report.interval = interval;
    report.seed = options.seed;
    if (inst.expected_holds) report.expected_holds = inst.expected_holds(interval);

    auto ga = inst.g(interval.lo()), gb = inst.g(interval.hi());
    if (inst.F) {
        report.lhs = (*inst.F)(gb.value) - (*inst.F)(ga.value);
    } else {
        if (!ga.exact() || !gb.exact()) throw UnsupportedInstance(inst.name + ": inexact range endpoints");
        HkOptions ho;
        ho.schedule = options.schedule;
        ho.samples = options.samples;
        ho.seed = options.seed;
        ho.max_depth = options.max_depth;
        auto hk = hk_estimate(
            inst.f, ga.value, gb.value, [](const Rat& eps) { return Gauge::constant(eps); }, ho);
        const auto& last = hk.rows.back();
        report.lhs = {midpoint(last.min, last.max), Rat(last.spread / 2), false};
        report.lhs_closed_form = false;
    }

    FnSpec integrand = cov_integrand(inst);
    for (std::size_t r = 0; r < options.schedule.size(); ++r) {
        const Rat& eps = options.schedule[r];
        Gauge gauge = cov_gauge(inst, interval, eps);
        CovRow row{eps, gauge.name(), {}, 0, 0, true};
        std::mt19937_64 rng(row_seed(options.seed, r));
        for (unsigned s = 0; s < std::max(1u, options.samples); ++s) {
            CousinOptions co;
            co.max_depth = options.max_depth;
            co.rng = s == 0 ? nullptr : &rng;
            auto p = cousin_partition(interval, gauge, co);
            ValueWithError sum = riemann_sum(integrand, p);
            ValueWithError gap = abs(sum - report.lhs);
            if (row.sums.empty() || gap.upper() > row.max_discrepancy) row.max_discrepancy = gap.upper();
            Rat lo = rat_max(gap.lower(), Rat(0));
            if (row.sums.empty() || lo < row.min_discrepancy) row.min_discrepancy = lo;
            row.sums.push_back(sum);
            if (r + 1 == options.schedule.size() && s == 0) report.witness = std::move(p);
        }
        row.pass = row.max_discrepancy < eps;
        report.rows.push_back(std::move(row));
    }

    const auto& last = report.rows.back();
    if (std::all_of(report.rows.begin(), report.rows.end(), [](const CovRow& r) { return r.pass; }))
        report.verdict = CovVerdict::holds_evidence;
    else if (last.min_discrepancy >= last.eps)
        report.verdict = CovVerdict::fails;
    else
        report.verdict = CovVerdict::inconclusive;

    VariationOptions vo;
    vo.schedule = options.schedule;
    vo.samples = options.samples;
    vo.seed = options.seed;
    vo.mode = VariationMode::ncv;
    vo.max_depth = options.max_depth;
    report.ncv_on_b = test_negligible_variation(
        outer_composite(inst), inst.B.restricted_to(interval),
        [&inst, interval](const Rat& eps) { return cov_gauge(inst, interval, eps); }, interval, vo);
    bool ncv_holds = report.ncv_on_b->verdict != VariationVerdict::refuted;
    report.channels_agree = report.verdict != CovVerdict::inconclusive &&
                            (report.verdict == CovVerdict::holds_evidence) == ncv_holds;
    return report;
}

CovInstance ftc_instance(const FnSpec& g, const Iv& domain, std::optional<GaugeFamily> b_gauge)
{
    CovInstance inst;
    inst.name = "ftc:" + g.name;
    inst.f = constant_fn(Rat(1));
    inst.F = identity_fn();
    inst.g = g;
    inst.domain = domain;
    inst.B = g.failure_set;
    inst.b_gauge = b_gauge ? *b_gauge : default_b_gauge(outer_composite(inst), inst.B);
    return inst;
}

CovReport ftc_check(const FnSpec& g, const Iv& domain, const CovOptions& options, std::optional<GaugeFamily> b_gauge)
{
    return cov_check(ftc_instance(g, domain, std::move(b_gauge)), domain, options);
}

std::vector<Iv> default_scan_grid(const CovInstance& inst, unsigned level)
{
    std::vector<Rat> cuts;
    Rat step = inst.domain.length() / pow2(level);
    for (unsigned long i = 0; i <= (1ul << level); ++i) cuts.push_back(inst.domain.lo() + step * i);
    std::vector<Iv> grid;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) grid.emplace_back(cuts[i], cuts[i + 1]);
    for (const auto& p : inst.split_points) {
        if (!inst.domain.interior_contains(p)) continue;
        grid.emplace_back(inst.domain.lo(), p);
        grid.emplace_back(p, inst.domain.hi());
    }
    grid.push_back(inst.domain);
    std::vector<Iv> unique;
    for (auto& w : grid)
        if (std::find(unique.begin(), unique.end(), w) == unique.end()) unique.push_back(std::move(w));
    return unique;
}

CovScanReport cov_scan_all_subintervals(const CovInstance& inst, const std::vector<Iv>& grid,
                                        const CovOptions& options)
{
    CovScanReport out;
    out.instance = inst.name;
    out.all_hold = true;
    for (const auto& w : grid) {
        auto r = cov_check(inst, w, options);
        if (r.verdict != CovVerdict::holds_evidence) out.all_hold = false;
        out.entries.push_back(std::move(r));
    }

    VariationOptions vo;
    vo.schedule = options.schedule;
    vo.samples = options.samples;
    vo.seed = options.seed;
    vo.mode = VariationMode::nv;
    vo.max_depth = options.max_depth;
    FnSpec fg = outer_composite(inst);
    out.nv_on_b = test_negligible_variation(
        fg, inst.B, [&inst](const Rat& eps) { return cov_gauge(inst, inst.domain, eps); }, inst.domain, vo);

    PointSet zero_set = PointSet::predicate("{g'=0}\\B", [g = inst.g, b = inst.B](const Rat& x) {
        if (!g.in_domain(x) || b.contains(x) || !g.deriv) return false;
        auto d = g.derivative_at(x);
        return d.exact() && sgn(d.value) == 0;
    });
    Rat len = inst.domain.length();
    out.nv_on_zero_derivative_set = test_negligible_variation(
        fg, zero_set,
        [&](const Rat& eps) {
            // B's points carry radius 1 here; they are offered as tags so
            // cells can close around them.
            Gauge z = gauge_from_zero_derivative(fg, zero_set, eps, len);
            return Gauge(z.name(), [z](const Rat& x) { return z.radius(x); },
                         [b = inst.B](const Iv& cell) { return b.witnesses_in(cell); });
        },
        inst.domain, vo);

    bool nv_evidence = out.nv_on_b.verdict == VariationVerdict::nv_evidence;
    out.nv_refuted = !out.all_hold || !nv_evidence;
    out.channels_agree = out.all_hold == nv_evidence;
    return out;
}

SvcCheck svc_composition_check(unsigned n, const Rat& x, unsigned precision_bits)
{
    if (n < 1) throw std::invalid_argument("svc_composition_check: n must be at least 1");
    const GeneratedSet& s = svc();
    if (!s.base().contains(x) || !s.member(x))
        throw DomainError("svc_composition_check: " + to_string(x) + " is not in S", x);

    SvcCheck out;
    out.n = n;
    out.x = x;
    auto cell = s.cell_at_depth(x, n);
    if (!cell) throw std::logic_error("svc_composition_check: member without a depth-n cell");
    out.y = cell->mid();
    out.gap_half_length = svc_dist_fn(out.y);

    // |y - x| >= G(y) = 2^{-2n-3}, so these bits keep the quotient error
    // below 2^-64.
    unsigned bits = precision_bits ? precision_bits : 2 * n + 3 + 64;
    static const FnSpec fg = compose(quartic_root_spec(), svc_dist_spec());
    ValueWithError num = abs(fg(out.y, bits) - fg(x, bits));
    out.quotient = scale(num, Rat(1 / rat_abs(Rat(out.y - x))));
    out.bound_fourth_power = pow2(2 * static_cast<long>(n) - 3);
    out.bound = std::pow(2.0, (2.0 * n - 3.0) / 4.0);
    Rat q = out.quotient.lower();
    out.ok = sgn(q) > 0 && q * q * q * q > out.bound_fourth_power;
    return out;
}

}  // namespace gaugekit
