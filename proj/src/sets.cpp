#include "gaugekit/sets.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace gaugekit {

namespace {

// Ternary digits of a rational are eventually periodic with period bounded
// by the multiplicative order of 3 modulo the denominator; this only guards
// against runaway inputs.
constexpr unsigned kTernaryMembershipCap = 1u << 16;
// SVC addresses are checked for a periodic tail up to this depth.
constexpr unsigned kSvcMembershipCap = 2048;
constexpr unsigned kSvcMaxPeriod = 64;

}  // namespace

struct GeneratedSet::Cache {
    std::mutex mutex;
    std::vector<Rat> lengths;  // L_0, L_1, ...
    std::map<unsigned, std::shared_ptr<const std::vector<Iv>>> realizations;
};

GeneratedSet::GeneratedSet(SetKind kind, Iv base, std::string name)
    : kind_(kind), base_(std::move(base)), name_(std::move(name)), cache_(std::make_shared<Cache>())
{
}

GeneratedSet GeneratedSet::ternary_cantor() { return GeneratedSet(SetKind::ternary_cantor, Iv(0, 1), "C"); }
GeneratedSet GeneratedSet::reflected_cantor() { return GeneratedSet(SetKind::reflected_cantor, Iv(-1, 1), "D"); }
GeneratedSet GeneratedSet::svc() { return GeneratedSet(SetKind::svc, Iv(0, 1), "S"); }

std::string to_string(SetKind kind)
{
    switch (kind) {
    case SetKind::ternary_cantor: return "ternary_cantor";
    case SetKind::reflected_cantor: return "reflected_cantor";
    case SetKind::svc: return "svc";
    }
    return "unknown";
}

std::optional<GeneratedSet> generated_set_by_name(std::string_view name)
{
    if (name == "C" || name == "cantor" || name == "ternary_cantor") return GeneratedSet::ternary_cantor();
    if (name == "D" || name == "reflected_cantor") return GeneratedSet::reflected_cantor();
    if (name == "S" || name == "svc") return GeneratedSet::svc();
    return std::nullopt;
}

namespace {

const GeneratedSet& shared_ternary()
{
    static const GeneratedSet c = GeneratedSet::ternary_cantor();
    return c;
}

}  // namespace

Rat GeneratedSet::cell_length(unsigned depth) const
{
    if (kind_ == SetKind::reflected_cantor) return shared_ternary().cell_length(depth);
    std::lock_guard lock(cache_->mutex);
    auto& L = cache_->lengths;
    if (L.empty()) L.push_back(base_.length());
    while (L.size() <= depth) {
        unsigned n = static_cast<unsigned>(L.size());
        if (kind_ == SetKind::svc)
            // remove a centered open interval of length 4^-n
            L.push_back(Rat((L.back() - pow2(-2 * static_cast<long>(n))) / 2));
        else
            L.push_back(Rat(L.back() / 3));
    }
    return L[depth];
}

std::shared_ptr<const std::vector<Iv>> GeneratedSet::realize(unsigned depth) const
{
    {
        std::lock_guard lock(cache_->mutex);
        if (auto it = cache_->realizations.find(depth); it != cache_->realizations.end()) return it->second;
    }

    std::vector<Iv> cells;
    if (kind_ == SetKind::reflected_cantor) {
        const auto& c = *shared_ternary().realize(depth);
        cells.reserve(2 * c.size());
        for (auto it = c.rbegin(); it != c.rend(); ++it) cells.emplace_back(Rat(-it->hi()), Rat(-it->lo()));
        // [-L, 0] and [0, L] touch at 0
        Rat inner_hi = c.front().hi();
        cells.back() = Iv(cells.back().lo(), inner_hi);
        cells.insert(cells.end(), c.begin() + 1, c.end());
    } else {
        std::vector<Rat> lefts{base_.lo()};
        for (unsigned n = 0; n < depth; ++n) {
            Rat shift = cell_length(n) - cell_length(n + 1);
            std::vector<Rat> next;
            next.reserve(2 * lefts.size());
            for (const auto& a : lefts) {
                next.push_back(a);
                next.push_back(Rat(a + shift));
            }
            lefts = std::move(next);
        }
        Rat L = cell_length(depth);
        cells.reserve(lefts.size());
        for (auto& a : lefts) cells.emplace_back(a, Rat(a + L));
    }

    auto result = std::make_shared<const std::vector<Iv>>(std::move(cells));
    std::lock_guard lock(cache_->mutex);
    return cache_->realizations.emplace(depth, std::move(result)).first->second;
}

Rat GeneratedSet::measure_at(unsigned depth) const
{
    Rat count = pow2(depth);
    if (kind_ == SetKind::reflected_cantor) count *= 2;
    return Rat(count * cell_length(depth));
}

namespace {

// Σ_{i>=0} b_{i mod P} r^i for the periodic block b.
Rat periodic_series(const std::vector<unsigned char>& bits, std::size_t from, std::size_t period, const Rat& r)
{
    Rat sum = 0, power = 1;
    for (std::size_t i = 0; i < period; ++i) {
        if (bits[from + i]) sum += power;
        power *= r;
    }
    return Rat(sum / (1 - power));
}

}  // namespace

GeneratedSet::Descent GeneratedSet::descend(const Rat& x, unsigned depth_cap) const
{
    if (kind_ == SetKind::reflected_cantor)
        throw std::logic_error("descend: reflected set has no single construction tree");
    if (!base_.contains(x)) throw DomainError("descend: " + to_string(x) + " outside " + to_string(base_), x);
    if (kind_ == SetKind::svc) return descend_svc(x, depth_cap);

    Descent d;
    Rat a = base_.lo();
    std::map<Rat, unsigned> seen;  // normalized position -> depth

    for (unsigned n = 0;; ++n) {
        Rat L = cell_length(n);
        d.depth = n;
        d.cell = Iv(a, Rat(a + L));
        if (x == a) {
            d.end = Descent::End::endpoint_left;
            return d;
        }
        if (x == a + L) {
            d.end = Descent::End::endpoint_right;
            return d;
        }
        Rat t = (x - a) / L;
        auto [it, fresh] = seen.emplace(std::move(t), n);
        if (!fresh) {
            d.end = Descent::End::cycle;
            d.cycle_start = it->second;
            return d;
        }
        if (n >= depth_cap) {
            d.end = Descent::End::capped;
            return d;
        }

        Rat L1 = cell_length(n + 1);
        Rat left_hi = a + L1;
        Rat right_lo = a + L - L1;
        if (x <= left_hi) {
            d.bits.push_back(0);
        } else if (x >= right_lo) {
            d.bits.push_back(1);
            a = right_lo;
        } else {
            d.end = Descent::End::gap;
            d.gap = Iv(left_hi, right_lo);
            return d;
        }
    }
}

// SVC in integers. With x = p/q, the depth-n cell is
//   [A_n, A_n + 2^n + 1] / 2^{2n+1}
// and N_n = p 2^{2n+1} - q A_n is x's offset in the cell scaled by q 2^{2n+1}.
// The left child ends at (4 A_n + 2^{n+1} + 1) / 2^{2n+3}, the right child
// starts at (4 A_n + 2^{n+1} + 3) / 2^{2n+3}.
GeneratedSet::Descent GeneratedSet::descend_svc(const Rat& x, unsigned depth_cap) const
{
    const mpz_class& p = x.get_num();
    const mpz_class& q = x.get_den();
    auto dyadic = [](const mpz_class& num, unsigned shift) {
        Rat r(num, mpz_class(1) << shift);
        r.canonicalize();
        return r;
    };

    Descent d;
    std::vector<mpz_class> lefts;  // A_n
    mpz_class A = 0, N = p * 2, pow = 1;  // pow = 2^n
    for (unsigned n = 0;; ++n, pow <<= 1) {
        d.depth = n;
        lefts.push_back(A);
        const unsigned shift = 2 * n + 1;
        auto cell = [&] { return Iv(dyadic(A, shift), dyadic(mpz_class(A + pow + 1), shift)); };
        if (sgn(N) == 0) {
            d.cell = cell();
            d.end = Descent::End::endpoint_left;
            return d;
        }
        if (N == q * (pow + 1)) {
            d.cell = cell();
            d.end = Descent::End::endpoint_right;
            return d;
        }

        // An eventually periodic address: the last 2P digits repeat and the
        // periodic continuation from depth m lands exactly on x.
        for (std::size_t P = 1; P <= kSvcMaxPeriod && 2 * P <= n; ++P) {
            if (!std::equal(d.bits.end() - 2 * P, d.bits.end() - P, d.bits.end() - P)) continue;
            std::size_t m = n - P;
            // right-branch shift at step k -> k+1 is 2^{-k-2} + 3 * 2^{-2k-3}
            Rat tail = pow2(-static_cast<long>(m) - 2) * periodic_series(d.bits, m, P, Rat(1, 2)) +
                       3 * pow2(-2 * static_cast<long>(m) - 3) * periodic_series(d.bits, m, P, Rat(1, 4));
            if (dyadic(lefts[m], static_cast<unsigned>(2 * m + 1)) + tail == x) {
                d.cell = cell();
                d.end = Descent::End::cycle;
                d.cycle_start = static_cast<unsigned>(m);
                return d;
            }
        }

        if (n >= depth_cap) {
            d.cell = cell();
            d.end = Descent::End::capped;
            return d;
        }

        mpz_class four_n = N << 2;
        mpz_class left_edge = 2 * pow + 1, right_edge = 2 * pow + 3;
        if (four_n <= q * left_edge) {
            d.bits.push_back(0);
            N = four_n;
            A <<= 2;
        } else if (four_n >= q * right_edge) {
            d.bits.push_back(1);
            N = four_n - q * right_edge;
            A = (A << 2) + right_edge;
        } else {
            d.cell = cell();
            d.end = Descent::End::gap;
            d.gap = Iv(dyadic(mpz_class((A << 2) + left_edge), shift + 2),
                       dyadic(mpz_class((A << 2) + right_edge), shift + 2));
            return d;
        }
    }
}

unsigned GeneratedSet::decision_depth() const
{
    return kind_ == SetKind::svc ? kSvcMembershipCap : kTernaryMembershipCap;
}

bool GeneratedSet::member(const Rat& x) const
{
    if (!base_.contains(x)) throw DomainError("member: " + to_string(x) + " outside " + to_string(base_), x);
    if (kind_ == SetKind::reflected_cantor) return shared_ternary().member(rat_abs(x));

    unsigned cap = decision_depth();
    auto d = descend(x, cap);
    switch (d.end) {
    case Descent::End::gap: return false;
    case Descent::End::capped:
        throw UndecidedMembership("member: address of " + to_string(x) + " in " + name_ +
                                  " shows no periodic tail within depth " + std::to_string(cap));
    default: return true;
    }
}

DistanceResult GeneratedSet::distance(const Rat& x, unsigned depth_cap) const
{
    if (x < base_.lo()) return {Rat(base_.lo() - x), Rat(base_.lo() - x), true, {base_.lo()}};
    if (x > base_.hi()) return {Rat(x - base_.hi()), Rat(x - base_.hi()), true, {base_.hi()}};

    if (kind_ == SetKind::reflected_cantor) {
        // D is symmetric and 0 ∈ C ∩ (-C), so dist(x, D) = dist(|x|, C).
        auto r = shared_ternary().distance(rat_abs(x), depth_cap);
        if (sgn(x) < 0)
            for (auto& p : r.nearest) p = -p;
        return r;
    }

    auto d = descend(x, depth_cap);
    switch (d.end) {
    case Descent::End::gap: {
        Rat left = x - d.gap->lo();
        Rat right = d.gap->hi() - x;
        if (left < right) return {left, left, true, {d.gap->lo()}};
        if (right < left) return {right, right, true, {d.gap->hi()}};
        return {left, left, true, {d.gap->lo(), d.gap->hi()}};
    }
    case Descent::End::capped: {
        // x survives to depth_cap: the set meets the cell at its endpoints.
        Rat left = x - d.cell->lo();
        Rat right = d.cell->hi() - x;
        bool left_nearer = left <= right;
        return {Rat(0), left_nearer ? left : right, false, {left_nearer ? d.cell->lo() : d.cell->hi()}};
    }
    default: return {Rat(0), Rat(0), true, {x}};
    }
}

ComponentRef GeneratedSet::complement_component(const Rat& x) const
{
    if (!base_.contains(x))
        throw DomainError("complement_component: " + to_string(x) + " outside " + to_string(base_), x);
    if (kind_ == SetKind::reflected_cantor) {
        if (sgn(x) == 0) throw DomainError("complement_component: 0 is in D", x);
        auto c = shared_ternary().complement_component(rat_abs(x));
        if (sgn(x) > 0) return c;
        return {Iv(Rat(-c.interval.hi()), Rat(-c.interval.lo())), c.depth_created};
    }
    unsigned cap = decision_depth();
    auto d = descend(x, cap);
    if (d.end == Descent::End::gap) return {*d.gap, d.depth + 1};
    if (d.end == Descent::End::capped)
        throw UndecidedMembership("complement_component: membership of " + to_string(x) + " undecided");
    throw DomainError("complement_component: " + to_string(x) + " is in " + name_, x);
}

std::optional<Iv> GeneratedSet::cell_at_depth(const Rat& x, unsigned depth) const
{
    if (!base_.contains(x)) return std::nullopt;
    if (kind_ == SetKind::reflected_cantor) {
        auto c = shared_ternary().cell_at_depth(rat_abs(x), depth);
        if (!c) return std::nullopt;
        if (sgn(c->lo()) == 0) return Iv(Rat(-c->hi()), c->hi());  // merged central cell
        if (sgn(x) > 0) return c;
        return Iv(Rat(-c->hi()), Rat(-c->lo()));
    }
    Rat a = base_.lo();
    for (unsigned n = 0; n < depth; ++n) {
        Rat L = cell_length(n), L1 = cell_length(n + 1);
        if (x <= a + L1) continue;
        if (x >= a + L - L1) {
            a += L - L1;
            continue;
        }
        return std::nullopt;
    }
    return Iv(a, Rat(a + cell_length(depth)));
}

// ---------------------------------------------------------------- PointSet

PointSet PointSet::empty() { return PointSet{}; }

namespace {

void sort_by_distance(std::vector<Rat>& pts, const Rat& m)
{
    std::stable_sort(pts.begin(), pts.end(),
                     [&](const Rat& p, const Rat& q) { return rat_abs(Rat(p - m)) < rat_abs(Rat(q - m)); });
}

}  // namespace

PointSet PointSet::finite(std::vector<Rat> points)
{
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    PointSet s;
    s.kind_ = points.empty() ? Kind::empty : Kind::finite;
    s.name_ = "{";
    for (std::size_t i = 0; i < points.size(); ++i) s.name_ += (i ? "," : "") + to_string(points[i]);
    s.name_ += "}";
    s.points_ = std::move(points);
    return s;
}

PointSet PointSet::generated(GeneratedSet set)
{
    PointSet s;
    s.kind_ = Kind::generated;
    s.name_ = set.name();
    s.generated_ = std::move(set);
    return s;
}

PointSet PointSet::predicate(std::string name, Contains contains, Witnesses witnesses)
{
    PointSet s;
    s.kind_ = Kind::predicate;
    s.name_ = std::move(name);
    s.contains_ = std::move(contains);
    s.witnesses_ = std::move(witnesses);
    return s;
}

bool PointSet::contains(const Rat& x) const
{
    switch (kind_) {
    case Kind::empty: return false;
    case Kind::finite: return std::binary_search(points_.begin(), points_.end(), x);
    case Kind::generated: return generated_->base().contains(x) && generated_->member(x);
    case Kind::predicate:
    case Kind::composite: return contains_(x);
    }
    return false;
}

std::vector<Rat> PointSet::witnesses_in(const Iv& cell) const
{
    std::vector<Rat> out;
    switch (kind_) {
    case Kind::empty: break;
    case Kind::finite:
        for (const auto& p : points_)
            if (cell.contains(p)) out.push_back(p);
        sort_by_distance(out, cell.mid());
        break;
    case Kind::generated: {
        // If the cell meets the set, the set point nearest the midpoint is
        // within half a cell length of it, hence inside the cell.
        Rat m = cell.mid();
        auto d = generated_->distance(m);
        if (d.upper <= cell.length() / 2)
            for (const auto& p : d.nearest)
                if (cell.contains(p)) out.push_back(p);
        break;
    }
    case Kind::predicate:
    case Kind::composite:
        if (witnesses_) {
            for (auto& p : witnesses_(cell))
                if (cell.contains(p) && contains(p)) out.push_back(std::move(p));
            sort_by_distance(out, cell.mid());
        }
        break;
    }
    return out;
}

PointSet PointSet::restricted_to(const Iv& window) const
{
    if (kind_ == Kind::empty) return *this;
    if (kind_ == Kind::finite) {
        std::vector<Rat> kept;
        for (const auto& p : points_)
            if (window.contains(p)) kept.push_back(p);
        return finite(std::move(kept));
    }
    PointSet base = *this;
    PointSet s;
    s.kind_ = Kind::composite;
    s.name_ = name_ + "∩" + to_string(window);
    s.contains_ = [base, window](const Rat& x) { return window.contains(x) && base.contains(x); };
    s.witnesses_ = [base, window](const Iv& cell) {
        auto clipped = cell.intersect(window);
        return clipped ? base.witnesses_in(*clipped) : std::vector<Rat>{};
    };
    return s;
}

PointSet PointSet::unite(const PointSet& other) const
{
    if (kind_ == Kind::empty) return other;
    if (other.kind_ == Kind::empty) return *this;
    if (kind_ == Kind::finite && other.kind_ == Kind::finite) {
        auto pts = points_;
        pts.insert(pts.end(), other.points_.begin(), other.points_.end());
        return finite(std::move(pts));
    }
    PointSet a = *this, b = other;
    PointSet s;
    s.kind_ = Kind::composite;
    s.name_ = name_ + "∪" + other.name_;
    s.contains_ = [a, b](const Rat& x) { return a.contains(x) || b.contains(x); };
    s.witnesses_ = [a, b](const Iv& cell) {
        auto out = a.witnesses_in(cell);
        for (auto& p : b.witnesses_in(cell)) out.push_back(std::move(p));
        return out;
    };
    return s;
}

std::string_view PointSet::kind_name() const
{
    switch (kind_) {
    case Kind::empty: return "empty";
    case Kind::finite: return "finite";
    case Kind::generated: return "generated";
    case Kind::predicate: return "null_set_with_certificate";
    case Kind::composite: return "composite";
    }
    return "unknown";
}

// --------------------------------------------------------------- OpenCover

OpenCover::OpenCover(std::vector<Iv> intervals)
{
    std::sort(intervals.begin(), intervals.end(), [](const Iv& a, const Iv& b) { return a.lo() < b.lo(); });
    for (auto& iv : intervals) {
        if (sgn(iv.length()) == 0) continue;  // (x, x) is empty
        if (!intervals_.empty() && iv.lo() < intervals_.back().hi()) {
            if (intervals_.back().hi() < iv.hi()) intervals_.back() = Iv(intervals_.back().lo(), iv.hi());
        } else {
            intervals_.push_back(std::move(iv));
        }
    }
}

Rat OpenCover::measure() const
{
    Rat total = 0;
    for (const auto& iv : intervals_) total += iv.length();
    return total;
}

bool OpenCover::contains(const Rat& x) const
{
    return std::any_of(intervals_.begin(), intervals_.end(), [&](const Iv& iv) { return iv.interior_contains(x); });
}

Rat OpenCover::distance_to_complement(const Rat& x) const
{
    for (const auto& iv : intervals_)
        if (iv.interior_contains(x)) return rat_min(Rat(x - iv.lo()), Rat(iv.hi() - x));
    return 0;
}

OpenCover OpenCover::fattened(const GeneratedSet& set, unsigned depth, const Rat& pad)
{
    std::vector<Iv> out;
    for (const auto& iv : *set.realize(depth)) out.emplace_back(Rat(iv.lo() - pad), Rat(iv.hi() + pad));
    return OpenCover(std::move(out));
}

OpenCover OpenCover::around_points(const std::vector<Rat>& points, const Rat& pad)
{
    std::vector<Iv> out;
    for (const auto& p : points) out.emplace_back(Rat(p - pad), Rat(p + pad));
    return OpenCover(std::move(out));
}

}  // namespace gaugekit
