#pragma once

#include "gaugekit/rational.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace gaugekit {

struct TaggedItem {
    Rat tag;
    Iv cell;
};

// Finite list of (tag, cell) pairs over a domain. Construction does not
// validate; call validate_partition for a report.
class TaggedPartition {
public:
    TaggedPartition(Iv domain, std::vector<TaggedItem> items)
        : domain_(std::move(domain)), items_(std::move(items)) {}

    const Iv& domain() const noexcept { return domain_; }
    const std::vector<TaggedItem>& items() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }

private:
    Iv domain_;
    std::vector<TaggedItem> items_;
};

enum class PartitionRule {
    empty,
    unsorted,
    tag_outside_cell,
    cell_outside_domain,
    interiors_overlap,
    gap_between_cells,
    does_not_cover_domain,
};

std::string_view rule_name(PartitionRule rule);

struct PartitionViolation {
    std::size_t index;
    PartitionRule rule;
    std::string detail;
};

struct ValidationReport {
    std::vector<PartitionViolation> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_partition(const TaggedPartition& p);

// A strictly positive radius function plus a tag oracle. The oracle lists
// candidate tags for a cell; Cousin construction tries them before the
// default candidates (endpoints, then midpoint).
class Gauge {
public:
    using RadiusFn = std::function<Rat(const Rat&)>;
    using SuggestFn = std::function<std::vector<Rat>(const Iv&)>;

    Gauge(std::string name, RadiusFn radius, SuggestFn suggest = {});

    // Throws InvalidGauge when the radius is not positive or cannot be
    // evaluated. UnsupportedInstance (a missing certificate) passes through.
    Rat radius(const Rat& x) const;

    // Oracle candidates restricted to the cell.
    std::vector<Rat> suggest(const Iv& cell) const;

    const std::string& name() const noexcept { return name_; }

    static Gauge constant(const Rat& r);

private:
    std::string name_;
    RadiusFn radius_;
    SuggestFn suggest_;
};

// Pointwise minimum. Suggestions of both operands are kept, left first.
Gauge gauge_min(const Gauge& a, const Gauge& b);

// cell ⊆ (tag - r, tag + r) with r = radius(tag).
bool fits(const Gauge& g, const Rat& tag, const Iv& cell);

// True iff every cell sits strictly inside the radius ball of its tag.
bool is_subordinate(const TaggedPartition& p, const Gauge& g);

struct CousinOptions {
    unsigned max_depth = 64;
    // When set, candidate order is shuffled among the accepted tags and
    // acceptable cells are sometimes bisected anyway, producing a different
    // subordinate partition per draw.
    std::mt19937_64* rng = nullptr;
    double split_probability = 0.3;
    unsigned max_extra_depth = 6;
};

// Constructive Cousin lemma by midpoint bisection. Throws PartitionFailure
// carrying the smallest cell that could not be tagged within max_depth.
TaggedPartition cousin_partition(const Iv& domain, const Gauge& g, const CousinOptions& options = {});

// Concatenates partitions whose domains abut in order. Throws MergeError on
// a gap or overlap between consecutive domains.
TaggedPartition merge_partitions(std::span<const TaggedPartition> parts);

// Uniform index draw from mt19937_64 output; the standard distributions are
// implementation-defined and would break cross-platform seed replay.
std::size_t draw_index(std::mt19937_64& rng, std::size_t n);
double draw_unit(std::mt19937_64& rng);

}  // namespace gaugekit
