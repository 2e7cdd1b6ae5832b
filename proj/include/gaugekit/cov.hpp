#pragma once

#include "gaugekit/funcs.hpp"
#include "gaugekit/integrate.hpp"
#include "gaugekit/variation.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gaugekit {

// Substitution instance: F(g(β)) - F(g(α)) = ∫_α^β f(g(s)) h(s) ds with
// h = g' off B and h = 0 on B.
struct CovInstance {
    std::string name;
    FnSpec f;
    std::optional<FnSpec> F;  // antiderivative of f; nullopt: integrate f numerically
    FnSpec g;
    Iv domain{0, 0};
    PointSet B;
    // Gauge used at points of B.
    GaugeFamily b_gauge;
    // Declared outcome on a subinterval.
    std::function<bool(const Iv&)> expected_holds;
    // Split points a subinterval scan should honour.
    std::vector<Rat> split_points;
};

// Default gauge on a failure set B for the composite Fg = F∘g.
// Generated B: dist-to-complement, independent of ε. Finite B: radius
// min(η₁(p), ε / (4 (1 + band(p)) |B|)) from Fg's Dini certificate, so the
// B-tagged cells carry total |ΔFg| < ε; B's points are the suggested tags.
GaugeFamily default_b_gauge(const FnSpec& fg, const PointSet& b);

// Registered instances: identity-one, square-sub, abs-kink, cantorabs,
// cantorabs-unit, cantor-ftc.
std::vector<std::string> cov_instance_names();
std::optional<CovInstance> cov_instance(std::string_view name);

enum class CovVerdict { holds_evidence, fails, inconclusive };
std::string_view to_string(CovVerdict v);

struct CovRow {
    Rat eps;
    std::string gauge_name;
    std::vector<ValueWithError> sums;
    Rat max_discrepancy;  // largest upper bound of |sum - LHS|
    Rat min_discrepancy;  // smallest lower bound of |sum - LHS|
    bool pass = false;    // max_discrepancy < eps
};

struct CovReport {
    std::string instance;
    Iv interval{0, 0};
    std::uint64_t seed = 0;
    ValueWithError lhs;
    bool lhs_closed_form = true;
    std::vector<CovRow> rows;
    CovVerdict verdict = CovVerdict::inconclusive;
    // NCV of F∘g on B ∩ [α,β]; agrees when holds <=> not refuted.
    std::optional<VariationReport> ncv_on_b;
    bool channels_agree = false;
    std::optional<bool> expected_holds;
    // A partition from the smallest ε for the report's witness file.
    std::optional<TaggedPartition> witness;
};

struct CovOptions {
    std::vector<Rat> schedule;
    unsigned samples = 8;
    std::uint64_t seed = 0;
    unsigned max_depth = 64;
};

// F∘g, the function whose conditional variation on B decides the instance.
FnSpec outer_composite(const CovInstance& inst);

// f(g(s)) h(s), with exact 0 flagged as convention on B.
FnSpec cov_integrand(const CovInstance& inst);

// Gauge of the substitution proof at tolerance ε on [α,β]: off B the
// linearization modulus of F∘g at slope ε / (2(β-α)), capped at 1; on B the
// instance's B gauge.
Gauge cov_gauge(const CovInstance& inst, const Iv& interval, const Rat& eps);

// holds_evidence: every sum within ε of the LHS at every ε. fails: at the
// smallest ε every sum is certified at least ε away. Otherwise inconclusive.
CovReport cov_check(const CovInstance& inst, const Iv& interval, const CovOptions& options);

// cov_check of f ≡ 1, F = identity, B = g's failure set.
CovReport ftc_check(const FnSpec& g, const Iv& domain, const CovOptions& options,
                    std::optional<GaugeFamily> b_gauge = std::nullopt);

// Builds the instance ftc_check runs.
CovInstance ftc_instance(const FnSpec& g, const Iv& domain, std::optional<GaugeFamily> b_gauge = std::nullopt);

struct CovScanReport {
    std::string instance;
    std::vector<CovReport> entries;
    bool all_hold = false;
    // Absolute criterion of F∘g on B over the instance domain.
    VariationReport nv_on_b;
    // Equivalent reformulation: NV on {s ∉ B : g'(s) = 0}.
    VariationReport nv_on_zero_derivative_set;
    bool nv_refuted = false;       // by the scan or by the direct NV run
    bool channels_agree = false;   // all_hold <=> NV evidence on B
};

CovScanReport cov_scan_all_subintervals(const CovInstance& inst, const std::vector<Iv>& grid,
                                        const CovOptions& options);

// Dyadic cells of the instance domain at the given level, the whole domain,
// and the two sides of every declared split point.
std::vector<Iv> default_scan_grid(const CovInstance& inst, unsigned level = 1);

struct SvcCheck {
    unsigned n = 0;
    Rat x;
    Rat y;                  // center of a removed interval near x
    Rat gap_half_length;    // G(y)
    ValueWithError quotient;  // |F(G(y)) - F(G(x))| / |y - x|
    Rat bound_fourth_power;   // 2^{2n-3}
    double bound = 0;         // 2^{(2n-3)/4}
    bool ok = false;          // certified quotient.lower()^4 > bound_fourth_power
};

// For x ∈ S: y is the midpoint of the depth-n surviving interval holding x,
// which is the center of the removed interval of length 4^{-(n+1)}.
SvcCheck svc_composition_check(unsigned n, const Rat& x, unsigned precision_bits = 0);

}  // namespace gaugekit
