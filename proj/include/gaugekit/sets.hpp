#pragma once

#include "gaugekit/rational.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gaugekit {

enum class SetKind { ternary_cantor, reflected_cantor, svc };

struct ComponentRef {
    Iv interval;  // the open component (lo, hi); endpoints belong to the set
    unsigned depth_created;
};

struct DistanceResult {
    Rat lower;
    Rat upper;
    bool exact;
    // Set points realizing `upper` (one, or two on a tie).
    std::vector<Rat> nearest;

    const Rat& value() const { return upper; }
};

inline constexpr unsigned kDefaultDistanceCap = 200;

// Cantor-type set generated by removing one centered open interval from
// every surviving closed interval at each depth. All surviving intervals at
// a given depth have the same length, so the construction is determined by
// the length sequence L_n:
//   ternary_cantor   on [0,1]:  L_n = 3^-n
//   svc              on [0,1]:  L_n = (L_{n-1} - 4^-n) / 2
// reflected_cantor is C ∪ (-C) on [-1,1], answered through the ternary set.
class GeneratedSet {
public:
    static GeneratedSet ternary_cantor();
    static GeneratedSet reflected_cantor();
    static GeneratedSet svc();

    SetKind kind() const noexcept { return kind_; }
    const Iv& base() const noexcept { return base_; }
    const std::string& name() const noexcept { return name_; }

    // Surviving closed intervals after `depth` removal steps, sorted and
    // pairwise disjoint. Touching intervals of the reflected set are merged.
    // Memoized.
    std::shared_ptr<const std::vector<Iv>> realize(unsigned depth) const;

    // Exact total length of realize(depth).
    Rat measure_at(unsigned depth) const;

    // Exact membership in the limit set. Throws DomainError outside base().
    // Ternary kinds always resolve. For svc, non-members resolve at the
    // removed interval holding them and members resolve when their address
    // is finite or eventually periodic; a rational of S whose address stays
    // aperiodic through decision_depth() raises UndecidedMembership.
    bool member(const Rat& x) const;

    // Depth to which member() and complement_component() descend.
    unsigned decision_depth() const;

    // Distance from x to the limit set. Exact unless the descent for x runs
    // past `depth_cap` without resolving, in which case [lower, upper] is a
    // certified bracket and exact == false.
    DistanceResult distance(const Rat& x, unsigned depth_cap = kDefaultDistanceCap) const;

    // Maximal open interval around x missing the set. Throws DomainError if
    // x is in the set or outside base().
    ComponentRef complement_component(const Rat& x) const;

    // Surviving depth-n interval containing x, if x survives to depth n.
    std::optional<Iv> cell_at_depth(const Rat& x, unsigned depth) const;

    // Length of each surviving interval at depth n (ternary/svc kinds).
    Rat cell_length(unsigned depth) const;

    // Binary address digits of x (0 = left child, 1 = right child) down the
    // construction tree, together with how the walk ended. Used to evaluate
    // the Cantor function without a second digit expansion.
    struct Descent {
        enum class End { endpoint_left, endpoint_right, gap, cycle, capped } end;
        unsigned depth = 0;             // depth of the last surviving interval
        std::vector<unsigned char> bits;
        std::optional<Iv> cell;         // last surviving interval
        std::optional<Iv> gap;          // removed interval, when end == gap
        unsigned cycle_start = 0;       // when end == cycle: bits repeat from here
    };
    // Only for ternary_cantor and svc; x must lie in base().
    Descent descend(const Rat& x, unsigned depth_cap) const;

private:
    struct Cache;
    GeneratedSet(SetKind kind, Iv base, std::string name);
    Descent descend_svc(const Rat& x, unsigned depth_cap) const;

    SetKind kind_;
    Iv base_;
    std::string name_;
    std::shared_ptr<Cache> cache_;
};

// A subset of the rationals with exact membership, used for the sets E in
// variation sums and for derivative failure sets.
class PointSet {
public:
    enum class Kind { empty, finite, generated, predicate, composite };

    using Contains = std::function<bool(const Rat&)>;
    using Witnesses = std::function<std::vector<Rat>(const Iv&)>;

    static PointSet empty();
    static PointSet finite(std::vector<Rat> points);
    static PointSet generated(GeneratedSet set);
    // Null set given by an exact predicate whose nullity is certified by the
    // caller; `witnesses` may list members inside a cell.
    static PointSet predicate(std::string name, Contains contains, Witnesses witnesses = {});

    bool contains(const Rat& x) const;

    // Members of the set inside the cell, nearest the cell midpoint first.
    // Empty if the cell misses the set or no witness is known.
    std::vector<Rat> witnesses_in(const Iv& cell) const;

    PointSet restricted_to(const Iv& window) const;  // E ∩ [α,β]
    PointSet unite(const PointSet& other) const;

    Kind kind() const noexcept { return kind_; }
    std::string_view kind_name() const;
    const std::string& name() const noexcept { return name_; }
    const std::optional<GeneratedSet>& generated_set() const noexcept { return generated_; }
    const std::vector<Rat>& points() const noexcept { return points_; }

private:
    Kind kind_ = Kind::empty;
    std::string name_ = "empty";
    std::vector<Rat> points_;
    std::optional<GeneratedSet> generated_;
    Contains contains_;
    Witnesses witnesses_;
};

// Finite union of open intervals; the covers C_n of the Dini-band gauge.
class OpenCover {
public:
    explicit OpenCover(std::vector<Iv> intervals);  // each (lo, hi) is read as open

    const std::vector<Iv>& intervals() const noexcept { return intervals_; }
    Rat measure() const;  // exact measure of the union
    bool contains(const Rat& x) const;
    // dist(x, complement); 0 when x is outside the cover.
    Rat distance_to_complement(const Rat& x) const;

    // realize(depth) of a generated set, each interval widened by `pad` on
    // both sides.
    static OpenCover fattened(const GeneratedSet& set, unsigned depth, const Rat& pad);
    // Open intervals (p - pad, p + pad) around finitely many points.
    static OpenCover around_points(const std::vector<Rat>& points, const Rat& pad);

private:
    std::vector<Iv> intervals_;  // merged, sorted
};

std::string to_string(SetKind kind);
std::optional<GeneratedSet> generated_set_by_name(std::string_view name);

}  // namespace gaugekit
