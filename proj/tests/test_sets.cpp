#include "gaugekit/sets.hpp"

#include "gen.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>

using namespace gaugekit;

namespace {

Rat q(long n, long d = 1) { return make_rat(n, d); }

std::vector<Iv> ivs(std::initializer_list<std::pair<Rat, Rat>> list)
{
    std::vector<Iv> out;
    for (const auto& [a, b] : list) out.emplace_back(a, b);
    return out;
}

// Greedy base-3 digits: x ∈ C iff no digit 1 appears, except a last 1 after
// which the expansion terminates (…1 = …0222…).
bool ternary_oracle(const Rat& x)
{
    if (x == 1) return true;
    mpz_class num = x.get_num(), den = x.get_den();
    std::map<mpz_class, int> seen;
    while (num != 0) {
        if (seen.count(num)) return true;
        seen[num] = 1;
        num *= 3;
        mpz_class digit = num / den;
        num -= digit * den;
        if (digit == 1) return num == 0;
    }
    return true;
}

bool in_realization(const std::vector<Iv>& cells, const Rat& x)
{
    auto it = std::upper_bound(cells.begin(), cells.end(), x, [](const Rat& v, const Iv& c) { return v < c.lo(); });
    return it != cells.begin() && std::prev(it)->contains(x);
}

// dist(x, realize(n)) <= dist(x, set) <= distance to the nearest endpoint.
std::pair<Rat, Rat> distance_bracket(const std::vector<Iv>& cells, const Rat& x)
{
    Rat lower = 10, upper = 10;
    for (const auto& c : cells) {
        Rat d = c.contains(x) ? Rat(0) : rat_min(rat_abs(Rat(x - c.lo())), rat_abs(Rat(x - c.hi())));
        lower = rat_min(lower, d);
        upper = rat_min(upper, rat_min(rat_abs(Rat(x - c.lo())), rat_abs(Rat(x - c.hi()))));
    }
    return {lower, upper};
}

}  // namespace

TEST_CASE("realize examples")
{
    auto s = GeneratedSet::svc();
    CHECK(*s.realize(0) == ivs({{q(0), q(1)}}));
    CHECK(*s.realize(1) == ivs({{q(0), q(3, 8)}, {q(5, 8), q(1)}}));
    auto c = GeneratedSet::ternary_cantor();
    CHECK(*c.realize(2) == ivs({{q(0), q(1, 9)}, {q(2, 9), q(1, 3)}, {q(2, 3), q(7, 9)}, {q(8, 9), q(1)}}));

    // D merges the two central cells, which touch at 0
    auto d = GeneratedSet::reflected_cantor();
    CHECK(*d.realize(1) == ivs({{q(-1), q(-2, 3)}, {q(-1, 3), q(1, 3)}, {q(2, 3), q(1)}}));
}

TEST_CASE("svc removes a centered interval of length 4^-n at step n")
{
    auto s = GeneratedSet::svc();
    for (unsigned n = 1; n <= 8; ++n) {
        auto prev = s.realize(n - 1);
        auto next = s.realize(n);
        REQUIRE(next->size() == 2 * prev->size());
        for (std::size_t i = 0; i < prev->size(); ++i) {
            const Iv& parent = (*prev)[i];
            const Iv& l = (*next)[2 * i];
            const Iv& r = (*next)[2 * i + 1];
            CHECK(l.lo() == parent.lo());
            CHECK(r.hi() == parent.hi());
            CHECK(r.lo() - l.hi() == pow2(-2 * static_cast<long>(n)));
            CHECK(l.hi() + r.lo() == parent.lo() + parent.hi());
        }
    }
}

TEST_CASE("measure_at")
{
    auto s = GeneratedSet::svc();
    CHECK(s.measure_at(1) == q(3, 4));
    CHECK(s.measure_at(10) == q(1, 2) + q(1, 2048));
    for (unsigned n = 0; n <= 30; ++n) CHECK(s.measure_at(n) == q(1, 2) + pow2(-static_cast<long>(n) - 1));
    // the sum of realized lengths agrees
    for (unsigned n = 0; n <= 12; ++n) {
        Rat total = 0;
        for (const auto& c : *s.realize(n)) total += c.length();
        CHECK(total == s.measure_at(n));
    }
    auto c = GeneratedSet::ternary_cantor();
    for (unsigned n = 0; n <= 20; ++n) CHECK(c.measure_at(n) == pow_int(q(2, 3), n));
    auto d = GeneratedSet::reflected_cantor();
    CHECK(d.measure_at(3) == 2 * pow_int(q(2, 3), 3));
}

TEST_CASE("member examples")
{
    auto c = GeneratedSet::ternary_cantor();
    CHECK(c.member(q(1, 4)));
    CHECK_FALSE(c.member(q(1, 2)));
    CHECK(c.member(q(1, 3)));
    CHECK(c.member(q(3, 4)));
    CHECK_THROWS_AS(c.member(q(2)), DomainError);
    auto d = GeneratedSet::reflected_cantor();
    CHECK(d.member(q(-1)));
    CHECK(d.member(q(-1, 4)));
    CHECK_FALSE(d.member(q(-1, 2)));
    auto s = GeneratedSet::svc();
    CHECK(s.member(q(0)));
    CHECK(s.member(q(3, 8)));
    CHECK_FALSE(s.member(q(1, 2)));
    CHECK(s.member(q(11, 15)));
    // an aperiodic address: survives every level without resolving
    CHECK_THROWS_AS(s.member(q(15, 139)), UndecidedMembership);
    CHECK(s.cell_at_depth(q(15, 139), 200));
}

TEST_CASE("distance examples")
{
    auto c = GeneratedSet::ternary_cantor();
    CHECK(c.distance(q(1, 2)).value() == q(1, 6));
    CHECK(c.distance(q(1, 2)).exact);
    auto d = GeneratedSet::reflected_cantor();
    CHECK(d.distance(q(1, 2)).value() == q(1, 6));
    CHECK(d.distance(q(-1, 2)).value() == q(1, 6));
    auto s = GeneratedSet::svc();
    for (const auto& cell : *s.realize(14)) {
        CHECK(s.distance(cell.lo()).value() == 0);
        CHECK(s.distance(cell.hi()).value() == 0);
    }
    CHECK(s.distance(q(1, 2)).value() == q(1, 8));
    CHECK(s.distance(q(7, 16)).value() == q(1, 16));
}

TEST_CASE("distance past the cap is a certified bracket")
{
    auto s = GeneratedSet::svc();
    // 11/15 has address 10 1010...; the period shows at depth 4
    auto r = s.distance(q(11, 15), 3);
    CHECK_FALSE(r.exact);
    CHECK(r.lower == 0);
    CHECK(r.upper > 0);
    CHECK(s.distance(q(11, 15)).exact);
    CHECK(s.distance(q(11, 15)).value() == 0);
}

TEST_CASE("complement_component examples")
{
    auto c = GeneratedSet::ternary_cantor();
    CHECK(c.complement_component(q(1, 2)).interval == Iv(q(1, 3), q(2, 3)));
    CHECK(c.complement_component(q(1, 2)).depth_created == 1);
    CHECK_THROWS_AS(c.complement_component(q(1, 4)), DomainError);
    auto s = GeneratedSet::svc();
    CHECK(s.complement_component(q(1, 2)).interval == Iv(q(3, 8), q(5, 8)));
    auto d = GeneratedSet::reflected_cantor();
    CHECK(d.complement_component(q(-1, 2)).interval == Iv(q(-2, 3), q(-1, 3)));
}

TEST_CASE("property: realizations are nested")
{
    for (auto set : {GeneratedSet::ternary_cantor(), GeneratedSet::svc(), GeneratedSet::reflected_cantor()}) {
        for (unsigned n = 0; n < 10; ++n) {
            auto outer = set.realize(n);
            for (const auto& cell : *set.realize(n + 1)) {
                bool inside = std::any_of(outer->begin(), outer->end(), [&](const Iv& o) { return o.contains(cell); });
                CHECK(inside);
            }
        }
    }
}

TEST_CASE("property: ternary membership matches the digit oracle")
{
    auto c = GeneratedSet::ternary_cantor();
    std::mt19937_64 rng(1);
    for (int t = 0; t < 2000; ++t) {
        Rat x = gen::rational(rng, q(0), q(1), 500);
        CHECK(c.member(x) == ternary_oracle(x));
    }
    for (long den : {3, 9, 27, 81, 4, 10, 13, 40, 80})
        for (long num = 0; num <= den; ++num) CHECK(c.member(q(num, den)) == ternary_oracle(q(num, den)));
}

TEST_CASE("property: membership agrees with every finite realization")
{
    std::mt19937_64 rng(2);
    for (auto set : {GeneratedSet::ternary_cantor(), GeneratedSet::svc(), GeneratedSet::reflected_cantor()}) {
        std::vector<std::shared_ptr<const std::vector<Iv>>> levels;
        for (unsigned n = 0; n <= 14; ++n) levels.push_back(set.realize(n));
        for (int t = 0; t < 300; ++t) {
            Rat x = gen::rational(rng, set.base().lo(), set.base().hi(), 300);
            auto member = gen::decided_member(set, x);
            bool survives = std::all_of(levels.begin(), levels.end(), [&](const auto& l) { return in_realization(*l, x); });
            if (!member) {
                // only points of S with an aperiodic address stay undecided
                CHECK(set.kind() == SetKind::svc);
                CHECK(survives);
                continue;
            }
            if (*member) CHECK(survives);
            if (!survives) CHECK_FALSE(*member);
        }
        // endpoints persist into the limit set
        for (const auto& cell : *levels.back()) {
            CHECK(set.member(cell.lo()));
            CHECK(set.member(cell.hi()));
        }
    }
}

TEST_CASE("property: svc members survive to depth 40")
{
    auto s = GeneratedSet::svc();
    auto deep = s.realize(20);
    std::mt19937_64 rng(3);
    int members = 0, undecided = 0;
    for (int t = 0; t < 400; ++t) {
        Rat x = gen::rational(rng, q(0), q(1), 200);
        auto member = gen::decided_member(s, x);
        if (member && !*member) continue;
        if (member) ++members;
        else ++undecided;
        for (unsigned n = 0; n <= 40; ++n) {
            auto cell = s.cell_at_depth(x, n);
            REQUIRE(cell);
            CHECK(cell->length() == s.cell_length(n));
        }
        CHECK(in_realization(*deep, x));
    }
    CHECK(members > 0);
    CHECK(undecided > 0);
}

TEST_CASE("property: exact distance lies in the realization bracket")
{
    std::mt19937_64 rng(4);
    for (auto set : {GeneratedSet::ternary_cantor(), GeneratedSet::svc(), GeneratedSet::reflected_cantor()}) {
        auto cells = set.realize(12);
        for (int t = 0; t < 200; ++t) {
            Rat x = gen::rational(rng, set.base().lo(), set.base().hi(), 400);
            auto d = set.distance(x);
            auto [lo, hi] = distance_bracket(*cells, x);
            if (!d.exact) {
                // capped descent: x survives to the cap, so the set is within
                // one cell length of x
                CHECK(set.kind() == SetKind::svc);
                CHECK(d.lower == 0);
                CHECK(lo == 0);
                CHECK(d.upper <= set.cell_length(kDefaultDistanceCap));
                continue;
            }
            CHECK(lo <= d.value());
            CHECK(d.value() <= hi);
            for (const auto& p : d.nearest) {
                CHECK(set.member(p));
                CHECK(rat_abs(Rat(x - p)) == d.value());
            }
        }
    }
}

TEST_CASE("property: distance is 1-Lipschitz")
{
    std::mt19937_64 rng(5);
    for (auto set : {GeneratedSet::ternary_cantor(), GeneratedSet::svc(), GeneratedSet::reflected_cantor()}) {
        for (int t = 0; t < 300; ++t) {
            Rat x = gen::rational(rng, set.base().lo(), set.base().hi(), 300);
            Rat y = gen::rational(rng, set.base().lo(), set.base().hi(), 300);
            auto dx = set.distance(x), dy = set.distance(y);
            CHECK(dx.lower - dy.upper <= rat_abs(Rat(x - y)));
            CHECK(dy.lower - dx.upper <= rat_abs(Rat(x - y)));
        }
    }
}

TEST_CASE("property: D is symmetric")
{
    auto d = GeneratedSet::reflected_cantor();
    std::mt19937_64 rng(6);
    for (int t = 0; t < 500; ++t) {
        Rat x = gen::rational(rng, q(0), q(1), 300);
        CHECK(d.member(x) == d.member(-x));
        CHECK(d.distance(x).value() == d.distance(-x).value());
    }
}

TEST_CASE("property: complement components miss the set and end on it")
{
    std::mt19937_64 rng(7);
    for (auto set : {GeneratedSet::ternary_cantor(), GeneratedSet::svc(), GeneratedSet::reflected_cantor()}) {
        for (int t = 0; t < 200; ++t) {
            Rat x = gen::rational(rng, set.base().lo(), set.base().hi(), 300);
            auto member = gen::decided_member(set, x);
            if (!member) {
                CHECK_THROWS_AS(set.complement_component(x), UndecidedMembership);
                continue;
            }
            if (*member) continue;
            auto comp = set.complement_component(x);
            CHECK(comp.interval.interior_contains(x));
            CHECK(set.member(comp.interval.lo()));
            CHECK(set.member(comp.interval.hi()));
            CHECK_FALSE(set.member(comp.interval.mid()));
            CHECK(set.distance(x).value() ==
                  rat_min(Rat(x - comp.interval.lo()), Rat(comp.interval.hi() - x)));
        }
    }
}

TEST_CASE("point sets")
{
    auto c = PointSet::generated(GeneratedSet::ternary_cantor());
    auto w = c.witnesses_in(Iv(q(3, 10), q(4, 10)));
    REQUIRE_FALSE(w.empty());
    CHECK(Iv(q(1, 3), q(4, 10)).contains(w.front()));
    CHECK(GeneratedSet::ternary_cantor().member(w.front()));
    CHECK(c.witnesses_in(Iv(q(4, 10), q(6, 10))).empty());
    CHECK_FALSE(c.contains(q(2)));

    auto f = PointSet::finite({q(1, 2), q(0), q(1, 2)});
    CHECK(f.contains(q(1, 2)));
    CHECK(f.points().size() == 2);
    CHECK(f.restricted_to(Iv(q(1, 4), 1)).points().size() == 1);

    auto restricted = c.restricted_to(Iv(q(1, 2), 1));
    CHECK(restricted.contains(q(3, 4)));
    CHECK_FALSE(restricted.contains(q(1, 4)));
    CHECK(restricted.witnesses_in(Iv(q(2, 10), q(6, 10))).empty());
    CHECK(restricted.kind_name() == "composite");

    auto u = f.unite(c);
    CHECK(u.contains(q(1, 2)));
    CHECK(u.contains(q(1, 4)));
    CHECK_FALSE(u.contains(q(1, 5) + q(1, 3)));
    CHECK(PointSet::empty().witnesses_in(Iv(0, 1)).empty());
}

TEST_CASE("open covers")
{
    OpenCover cover({Iv(0, q(1, 2)), Iv(q(1, 4), 1), Iv(2, 3)});
    CHECK(cover.measure() == 2);
    CHECK(cover.contains(q(1, 2)));
    CHECK_FALSE(cover.contains(q(0)));
    CHECK(cover.distance_to_complement(q(1, 2)) == q(1, 2));
    CHECK(cover.distance_to_complement(q(3, 2)) == 0);

    auto fat = OpenCover::fattened(GeneratedSet::ternary_cantor(), 2, q(1, 100));
    CHECK(fat.measure() == q(4, 9) + q(8, 100));
    auto pts = OpenCover::around_points({q(1, 2)}, q(1, 8));
    CHECK(pts.distance_to_complement(q(1, 2)) == q(1, 8));
}

TEST_CASE("realizations are memoized and shared")
{
    auto s = GeneratedSet::svc();
    auto a = s.realize(9);
    auto b = s.realize(9);
    CHECK(a.get() == b.get());
    auto copy = s;
    CHECK(copy.realize(9).get() == a.get());
}

TEST_CASE("set names")
{
    CHECK(generated_set_by_name("C")->kind() == SetKind::ternary_cantor);
    CHECK(generated_set_by_name("D")->kind() == SetKind::reflected_cantor);
    CHECK(generated_set_by_name("svc")->kind() == SetKind::svc);
    CHECK_FALSE(generated_set_by_name("Q"));
}
