#pragma once

#include "gaugekit/funcs.hpp"
#include "gaugekit/partition.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace gaugekit {

// Σ f(tag)·|cell| with error Σ |cell|·err(f(tag)); exact when every value is.
ValueWithError riemann_sum(const FnSpec& f, const TaggedPartition& p);

using GaugeFamily = std::function<Gauge(const Rat& eps)>;

struct HkOptions {
    std::vector<Rat> schedule;
    unsigned samples = 8;
    std::uint64_t seed = 0;
    Rat tolerance = 0;
    unsigned max_depth = 64;
};

struct HkRow {
    Rat eps;
    std::string gauge_name;
    std::vector<ValueWithError> sums;
    Rat min;     // smallest lower bound over the sums
    Rat max;     // largest upper bound over the sums
    Rat spread;  // max - min
};

// Sampled evidence only: finitely many subordinate partitions per ε.
struct HkReport {
    Rat a, b;
    std::uint64_t seed = 0;
    Rat tolerance;
    std::vector<HkRow> rows;
    bool converged = false;  // spread of the final row <= tolerance
};

// Sample 0 of every ε is the deterministic Cousin partition; the others are
// randomized under a generator seeded from (seed, row). With a > b the
// estimate runs on [b, a] and every sum is negated.
HkReport hk_estimate(const FnSpec& f, const Rat& a, const Rat& b, const GaugeFamily& family, const HkOptions& options);

// Seeds the generator for row `row` of a sampled run.
std::uint64_t row_seed(std::uint64_t seed, std::size_t row);

}  // namespace gaugekit
