#include "gaugekit/partition.hpp"

#include <algorithm>

namespace gaugekit {

std::string_view rule_name(PartitionRule rule)
{
    switch (rule) {
    case PartitionRule::empty: return "empty";
    case PartitionRule::unsorted: return "unsorted";
    case PartitionRule::tag_outside_cell: return "tag_outside_cell";
    case PartitionRule::cell_outside_domain: return "cell_outside_domain";
    case PartitionRule::interiors_overlap: return "interiors_overlap";
    case PartitionRule::gap_between_cells: return "gap_between_cells";
    case PartitionRule::does_not_cover_domain: return "does_not_cover_domain";
    }
    return "unknown";
}

ValidationReport validate_partition(const TaggedPartition& p)
{
    ValidationReport report;
    auto flag = [&](std::size_t i, PartitionRule rule, std::string detail) {
        report.violations.push_back({i, rule, std::move(detail)});
    };

    const auto& items = p.items();
    if (items.empty()) {
        flag(0, PartitionRule::empty, "partition has no items");
        return report;
    }

    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& [tag, cell] = items[i];
        if (!cell.contains(tag))
            flag(i, PartitionRule::tag_outside_cell, "tag " + to_string(tag) + " not in " + to_string(cell));
        if (!p.domain().contains(cell))
            flag(i, PartitionRule::cell_outside_domain, to_string(cell) + " leaves " + to_string(p.domain()));
        if (i == 0) continue;
        const Iv& prev = items[i - 1].cell;
        if (cell.lo() < prev.lo()) {
            flag(i, PartitionRule::unsorted, "cell " + to_string(cell) + " starts before its predecessor");
        } else if (cell.lo() < prev.hi()) {
            flag(i, PartitionRule::interiors_overlap, to_string(prev) + " and " + to_string(cell));
        } else if (prev.hi() < cell.lo()) {
            flag(i, PartitionRule::gap_between_cells,
                 "uncovered (" + to_string(prev.hi()) + ", " + to_string(cell.lo()) + ")");
        }
    }

    if (items.front().cell.lo() != p.domain().lo())
        flag(0, PartitionRule::does_not_cover_domain, "first cell starts at " + to_string(items.front().cell.lo()));
    if (items.back().cell.hi() != p.domain().hi())
        flag(items.size() - 1, PartitionRule::does_not_cover_domain,
             "last cell ends at " + to_string(items.back().cell.hi()));
    return report;
}

Gauge::Gauge(std::string name, RadiusFn radius, SuggestFn suggest)
    : name_(std::move(name)), radius_(std::move(radius)), suggest_(std::move(suggest))
{
    if (!radius_) throw std::invalid_argument("Gauge: missing radius function");
}

Rat Gauge::radius(const Rat& x) const
{
    Rat r;
    try {
        r = radius_(x);
    } catch (const InvalidGauge&) {
        throw;
    } catch (const UnsupportedInstance&) {
        throw;
    } catch (const std::exception& e) {
        throw InvalidGauge("gauge '" + name_ + "' failed at " + to_string(x) + ": " + e.what());
    }
    if (sgn(r) <= 0)
        throw InvalidGauge("gauge '" + name_ + "' has non-positive radius " + to_string(r) + " at " + to_string(x));
    return r;
}

std::vector<Rat> Gauge::suggest(const Iv& cell) const
{
    if (!suggest_) return {};
    std::vector<Rat> out;
    for (auto& x : suggest_(cell))
        if (cell.contains(x)) out.push_back(std::move(x));
    return out;
}

Gauge Gauge::constant(const Rat& r)
{
    return Gauge("const:" + to_string(r), [r](const Rat&) { return r; });
}

Gauge gauge_min(const Gauge& a, const Gauge& b)
{
    return Gauge(
        "min(" + a.name() + "," + b.name() + ")",
        [a, b](const Rat& x) { return rat_min(a.radius(x), b.radius(x)); },
        [a, b](const Iv& cell) {
            auto out = a.suggest(cell);
            for (auto& x : b.suggest(cell)) out.push_back(std::move(x));
            return out;
        });
}

bool fits(const Gauge& g, const Rat& tag, const Iv& cell)
{
    if (!cell.contains(tag)) return false;
    Rat r = g.radius(tag);
    return tag - r < cell.lo() && cell.hi() < tag + r;
}

bool is_subordinate(const TaggedPartition& p, const Gauge& g)
{
    return std::all_of(p.items().begin(), p.items().end(),
                       [&](const TaggedItem& item) { return fits(g, item.tag, item.cell); });
}

std::size_t draw_index(std::mt19937_64& rng, std::size_t n)
{
    if (n <= 1) return 0;
    // Rejection sampling keeps the draw uniform.
    const std::uint64_t range = n;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t v;
    do v = rng();
    while (v >= limit);
    return static_cast<std::size_t>(v % range);
}

double draw_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

namespace {

struct CousinBuilder {
    const Gauge& gauge;
    const CousinOptions& opt;
    std::vector<TaggedItem> out;

    std::vector<Rat> candidates(const Iv& cell) const
    {
        std::vector<Rat> c = gauge.suggest(cell);
        for (const Rat* x : {&cell.lo(), &cell.hi()}) c.push_back(*x);
        c.push_back(cell.mid());
        std::vector<Rat> unique;
        for (auto& x : c)
            if (std::find(unique.begin(), unique.end(), x) == unique.end()) unique.push_back(std::move(x));
        return unique;
    }

    void build(const Iv& cell, unsigned depth, unsigned extra)
    {
        std::vector<Rat> accepted;
        for (auto& x : candidates(cell)) {
            if (fits(gauge, x, cell)) {
                accepted.push_back(std::move(x));
                if (!opt.rng) break;
            }
        }

        if (!accepted.empty()) {
            bool split_anyway = opt.rng && depth < opt.max_depth && extra < opt.max_extra_depth &&
                                sgn(cell.length()) > 0 && draw_unit(*opt.rng) < opt.split_probability;
            if (!split_anyway) {
                std::size_t pick = opt.rng ? draw_index(*opt.rng, accepted.size()) : 0;
                out.push_back({std::move(accepted[pick]), cell});
                return;
            }
            ++extra;
        }

        if (depth >= opt.max_depth)
            throw PartitionFailure("cousin_partition: no acceptable tag for " + to_string(cell) + " after " +
                                       std::to_string(opt.max_depth) + " bisections under gauge '" +
                                       gauge.name() + "'",
                                   cell);
        Rat m = cell.mid();
        build(Iv(cell.lo(), m), depth + 1, extra);
        build(Iv(m, cell.hi()), depth + 1, extra);
    }
};

}  // namespace

TaggedPartition cousin_partition(const Iv& domain, const Gauge& g, const CousinOptions& options)
{
    CousinBuilder builder{g, options, {}};
    if (sgn(domain.length()) == 0) {
        // A point domain: the degenerate cell fits any positive radius.
        builder.out.push_back({domain.lo(), domain});
    } else {
        builder.build(domain, 0, 0);
    }
    return TaggedPartition(domain, std::move(builder.out));
}

TaggedPartition merge_partitions(std::span<const TaggedPartition> parts)
{
    if (parts.empty()) throw MergeError("merge_partitions: nothing to merge");
    std::vector<TaggedItem> items;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) {
            const Rat& prev_hi = parts[i - 1].domain().hi();
            const Rat& lo = parts[i].domain().lo();
            if (prev_hi < lo)
                throw MergeError("merge_partitions: gap between " + to_string(parts[i - 1].domain()) + " and " +
                                 to_string(parts[i].domain()));
            if (lo < prev_hi)
                throw MergeError("merge_partitions: overlap between " + to_string(parts[i - 1].domain()) + " and " +
                                 to_string(parts[i].domain()));
        }
        items.insert(items.end(), parts[i].items().begin(), parts[i].items().end());
    }
    return TaggedPartition(Iv(parts.front().domain().lo(), parts.back().domain().hi()), std::move(items));
}

}  // namespace gaugekit
