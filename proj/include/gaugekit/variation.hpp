#pragma once

#include "gaugekit/funcs.hpp"
#include "gaugekit/integrate.hpp"
#include "gaugekit/partition.hpp"
#include "gaugekit/sets.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gaugekit {

// Σ_{tag ∈ E} |Δf| and |Σ_{tag ∈ E} Δf| with Δf = f(hi) - f(lo).
// signed_abs <= abs_sum always.
struct VariationSums {
    ValueWithError abs_sum;
    ValueWithError signed_abs;
    std::size_t tags_in_set = 0;
};

VariationSums variation_sums(const FnSpec& f, const TaggedPartition& p, const PointSet& e);

// Radius 1 on the set, dist(x, set) off it. Suggests the set point nearest
// the cell midpoint when the cell meets the set, else the midpoint.
Gauge gauge_dist_complement(const GeneratedSet& set);

// Zero-derivative gauge: on E the radius is the certified η with
// |f(y) - f(x)| <= ε |y - x| / domain_length, off E it is 1. Then every
// E-tagged cell has |Δf| <= ε |cell| / domain_length. Throws
// UnsupportedInstance when f has no modulus or f'(x) != 0 at a queried x ∈ E.
Gauge gauge_from_zero_derivative(const FnSpec& f, const PointSet& e, const Rat& eps, const Rat& domain_length);

// Measure bound a cover of the band-n points must stay under.
Rat dini_cover_bound(const Rat& eps, unsigned band);

// Dini-band gauge on a null set Z: for x ∈ Z with band n the radius is
// min(η₁(x), dist(x, complement of cover n)), and 1 off Z. Every cover is
// checked against dini_cover_bound exactly at construction (throws
// std::invalid_argument). Throws UnsupportedInstance when f has no Dini
// certificate, the band has no cover, or the cover misses x.
Gauge gauge_from_dini(const FnSpec& f, const PointSet& z, const std::map<unsigned, OpenCover>& covers, const Rat& eps);

enum class VariationMode { nv, ncv };
enum class VariationVerdict { nv_evidence, ncv_only_evidence, refuted };

std::string_view to_string(VariationMode mode);
std::string_view to_string(VariationVerdict verdict);

struct VariationRow {
    Rat eps;
    std::string gauge_name;
    unsigned partitions_tried = 0;
    Rat max_abs_sum;     // largest upper bound
    Rat max_signed_abs;  // largest upper bound
    bool pass_nv = false;
    bool pass_ncv = false;
};

struct VariationWitness {
    Rat eps;
    std::string gauge_name;
    TaggedPartition partition;
    VariationSums sums;
};

struct VariationReport {
    std::string function;
    std::string set;
    Iv domain{0, 0};
    VariationMode mode = VariationMode::nv;
    std::uint64_t seed = 0;
    std::vector<VariationRow> rows;
    VariationVerdict verdict = VariationVerdict::refuted;
    // First failing partition for the tested criterion.
    std::optional<VariationWitness> witness;
};

struct VariationOptions {
    std::vector<Rat> schedule;
    unsigned samples = 8;
    std::uint64_t seed = 0;
    VariationMode mode = VariationMode::nv;
    unsigned max_depth = 64;
};

// Pass at ε means the upper bound of the sum is < ε on every sample. In nv
// mode the verdict is nv_evidence or refuted; in ncv mode a failed absolute
// criterion with a passing signed one gives ncv_only_evidence.
VariationReport test_negligible_variation(const FnSpec& f, const PointSet& e, const GaugeFamily& builder,
                                          const Iv& domain, const VariationOptions& options);

struct AdversaryStrategy {
    enum class Kind { split_at, per_cell_repartition, greedy_sign } kind = Kind::split_at;
    std::vector<Rat> points;  // split_at only

    static AdversaryStrategy split_at(std::vector<Rat> points) { return {Kind::split_at, std::move(points)}; }
    static AdversaryStrategy per_cell() { return {Kind::per_cell_repartition, {}}; }
    static AdversaryStrategy greedy_sign() { return {Kind::greedy_sign, {}}; }
};

// Parses "split:p1,p2", "per-cell", "greedy-sign".
AdversaryStrategy parse_strategy(std::string_view text);
std::string to_string(const AdversaryStrategy& s);

struct AdversarialResult {
    TaggedPartition witness;
    VariationSums sums;
    std::string strategy;
};

// Builds a partition of `domain` subordinate to δ that tries to make the
// E-tagged variation large. Throws PartitionFailure with the strategy named
// when no subordinate partition can be built.
AdversarialResult adversarial_variation(const FnSpec& f, const PointSet& e, const Gauge& delta, const Iv& domain,
                                        const AdversaryStrategy& strategy, unsigned max_depth = 64);

struct ScanEntry {
    Iv window;
    VariationReport report;
};

struct NcvScanReport {
    std::vector<ScanEntry> entries;
    // Some window refuted NCV on E ∩ window, so NV on E is refuted.
    bool nv_refuted = false;
};

// NCV test of f on E ∩ [α,β] over [α,β] for every window of the grid.
NcvScanReport subinterval_ncv_scan(const FnSpec& f, const PointSet& e, const GaugeFamily& builder,
                                   const std::vector<Iv>& grid, const VariationOptions& options);

struct DiniEstimate {
    // max over the grid of |g(x±h) - g(x)| / h; the reported value is the
    // quotient with the largest certified lower bound.
    ValueWithError estimate;
    std::optional<Rat> best_h;
    std::vector<std::string> notes;  // skipped grid points
};

DiniEstimate dini_upper_estimate(const FnSpec& g, const Rat& x, const std::vector<Rat>& h_grid);

// Σ over cells of the oscillation bound of g. Cells are realize(depth) for a
// generated E and [p - 2^-depth, p + 2^-depth] (clipped to g's domain) for a
// finite E. Throws UnsupportedInstance without an oscillation certificate.
Rat image_measure_bound(const FnSpec& g, const PointSet& e, unsigned depth);

}  // namespace gaugekit
