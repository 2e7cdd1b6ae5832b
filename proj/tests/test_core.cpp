#include "gaugekit/funcs.hpp"
#include "gaugekit/integrate.hpp"
#include "gaugekit/partition.hpp"
#include "gaugekit/rational.hpp"
#include "gaugekit/sets.hpp"
#include "gaugekit/variation.hpp"

#include "gen.hpp"

#include <doctest.h>

using namespace gaugekit;

namespace {

Rat q(long n, long d = 1) { return make_rat(n, d); }

TaggedPartition two_cells() { return TaggedPartition(Iv(0, 1), {{q(1, 4), Iv(0, q(1, 2))}, {q(3, 4), Iv(q(1, 2), 1)}}); }

bool has_rule(const ValidationReport& r, PartitionRule rule)
{
    for (const auto& v : r.violations)
        if (v.rule == rule) return true;
    return false;
}

}  // namespace

TEST_CASE("rationals parse exactly and print as num/den")
{
    CHECK(parse_rat("3/6") == q(1, 2));
    CHECK(parse_rat("-2") == q(-2));
    CHECK(parse_rat("0.125") == q(1, 8));
    CHECK(parse_rat("1e-3") == q(1, 1000));
    CHECK(parse_rat("-2.5E2") == q(-250));
    CHECK(to_string(q(2)) == "2/1");
    CHECK(to_string(q(-3, 9)) == "-1/3");
    CHECK_THROWS_AS(parse_rat("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rat("abc"), std::invalid_argument);
    CHECK(from_double(0.1) != q(1, 10));
    CHECK(pow2(-3) == q(1, 8));
}

TEST_CASE("intervals reject reversed endpoints")
{
    CHECK_THROWS_AS(Iv(1, 0), std::invalid_argument);
    Iv a(0, 1);
    CHECK(a.length() == 1);
    CHECK(a.intersect(Iv(2, 3)) == std::nullopt);
    CHECK(*a.intersect(Iv(q(1, 2), 3)) == Iv(q(1, 2), 1));
}

TEST_CASE("error bounds propagate through arithmetic")
{
    ValueWithError a{q(1), q(1, 10)}, b{q(2), q(1, 100)};
    auto s = a + b;
    CHECK(s.value == 3);
    CHECK(s.abs_error_bound == q(11, 100));
    auto p = a * b;
    // |ab - a'b'| <= |a| eb + |b| ea + ea eb
    CHECK(p.abs_error_bound >= q(1, 100) + q(2, 10));
    CHECK(ValueWithError::exact_value(q(5)).exact());
}

TEST_CASE("validate_partition")
{
    CHECK(validate_partition(two_cells()).ok());

    TaggedPartition overlap(Iv(0, 1), {{q(1, 4), Iv(0, q(3, 4))}, {q(3, 4), Iv(q(1, 2), 1)}});
    auto r = validate_partition(overlap);
    CHECK(has_rule(r, PartitionRule::interiors_overlap));
    CHECK(r.violations.front().index == 1);

    TaggedPartition short_cover(Iv(0, 1), {{q(0), Iv(0, q(1, 2))}});
    CHECK(has_rule(validate_partition(short_cover), PartitionRule::does_not_cover_domain));

    TaggedPartition bad_tag(Iv(0, 1), {{q(2), Iv(0, 1)}});
    CHECK(has_rule(validate_partition(bad_tag), PartitionRule::tag_outside_cell));

    TaggedPartition gap(Iv(0, 1), {{q(0), Iv(0, q(1, 3))}, {q(1), Iv(q(2, 3), 1)}});
    CHECK(has_rule(validate_partition(gap), PartitionRule::gap_between_cells));

    CHECK(has_rule(validate_partition(TaggedPartition(Iv(0, 1), {})), PartitionRule::empty));
}

TEST_CASE("is_subordinate uses strict containment")
{
    TaggedPartition one(Iv(0, 1), {{q(1, 2), Iv(0, 1)}});
    CHECK(is_subordinate(one, Gauge::constant(q(1))));
    CHECK_FALSE(is_subordinate(one, Gauge::constant(q(1, 4))));
    // radius exactly half the cell: the closed cell is not inside the open ball
    CHECK_FALSE(is_subordinate(one, Gauge::constant(q(1, 2))));

    Gauge bad("bad", [](const Rat&) { return Rat(0); });
    CHECK_THROWS_AS(is_subordinate(one, bad), InvalidGauge);
    Gauge throwing("throwing", [](const Rat& x) -> Rat { throw DomainError("nope", x); });
    CHECK_THROWS_AS(is_subordinate(one, throwing), InvalidGauge);
}

TEST_CASE("a cell crossing D with an off-D tag is not subordinate to the distance gauge")
{
    Gauge delta_d = gauge_dist_complement(GeneratedSet::reflected_cantor());
    // tag 1/2 has radius dist(1/2, D) = 1/6; the cell reaches 1/3 ∈ D
    Rat tag = q(1, 2);
    Iv cell(q(3, 10), q(1, 2));
    CHECK(delta_d.radius(tag) == q(1, 6));
    CHECK(tag - delta_d.radius(tag) == q(1, 3));
    TaggedPartition p(Iv(q(3, 10), q(1, 2)), {{tag, cell}});
    CHECK_FALSE(is_subordinate(p, delta_d));
}

TEST_CASE("riemann_sum examples")
{
    CHECK(riemann_sum(identity_fn(), two_cells()).value == q(1, 2));
    CHECK(riemann_sum(identity_fn(), two_cells()).exact());

    // f = x^2, four uniform cells with left tags; oracle (0 + 1 + 4 + 9) / 16 / 4
    std::vector<TaggedItem> items;
    for (long i = 0; i < 4; ++i) items.push_back({q(i, 4), Iv(q(i, 4), q(i + 1, 4))});
    CHECK(riemann_sum(square_fn(), TaggedPartition(Iv(0, 1), items)).value == q(7, 32));

    std::mt19937_64 rng(11);
    for (int t = 0; t < 50; ++t) {
        Iv d = gen::interval(rng);
        CousinOptions o;
        o.rng = &rng;
        auto p = cousin_partition(d, gen::piecewise_gauge(rng, d), o);
        CHECK(riemann_sum(constant_fn(q(1)), p).value == d.length());
    }
}

TEST_CASE("inexact values carry their bound into the sum")
{
    TaggedPartition p(Iv(0, 2), {{q(2), Iv(0, 2)}});
    auto s = riemann_sum(quartic_root_spec(), p);
    CHECK_FALSE(s.exact());
    CHECK(s.abs_error_bound <= 2 * pow2(-64));
}

TEST_CASE("cousin_partition examples")
{
    auto p = cousin_partition(Iv(0, 1), Gauge::constant(q(1)));
    REQUIRE(p.size() == 1);
    CHECK(p.items()[0].tag == q(1, 2));
    CHECK(p.items()[0].cell == Iv(0, 1));

    Gauge shrinking("shrinking", [](const Rat& x) { return sgn(x) == 0 ? q(1, 4) : x; });
    auto s = cousin_partition(Iv(0, 1), shrinking);
    CHECK(validate_partition(s).ok());
    CHECK(is_subordinate(s, shrinking));
    const auto& first = s.items().front();
    CHECK(first.cell.lo() == 0);
    CHECK(first.tag == 0);
    CHECK(first.cell.length() <= q(1, 4));

    // every cell meeting D carries a tag in D
    GeneratedSet d = GeneratedSet::reflected_cantor();
    Gauge delta_d = gauge_dist_complement(d);
    auto pd = cousin_partition(Iv(-1, 1), delta_d);
    CHECK(validate_partition(pd).ok());
    CHECK(is_subordinate(pd, delta_d));
    for (const auto& [tag, cell] : pd.items()) {
        bool meets = sgn(d.distance(cell.mid()).value() - cell.length() / 2) <= 0;
        if (meets) CHECK(d.member(tag));
    }
}

TEST_CASE("cousin_partition reports the stuck cell")
{
    // radius vanishes at 1/3 and no candidate ever lands on 1/3
    Gauge vanishing("vanishing", [](const Rat& x) {
        Rat d = rat_abs(Rat(x - q(1, 3)));
        return sgn(d) == 0 ? q(1) : d;
    });
    CousinOptions o;
    o.max_depth = 12;
    try {
        cousin_partition(Iv(0, 1), vanishing, o);
        FAIL("expected PartitionFailure");
    } catch (const PartitionFailure& e) {
        CHECK(e.cell.contains(q(1, 3)));
        CHECK(e.cell.length() == pow2(-12));
    }
}

TEST_CASE("merge_partitions")
{
    Gauge g = Gauge::constant(q(1, 3));
    auto left = cousin_partition(Iv(-1, 0), g);
    auto right = cousin_partition(Iv(0, 1), g);
    std::vector<TaggedPartition> parts{left, right};
    auto m = merge_partitions(parts);
    CHECK(m.domain() == Iv(-1, 1));
    CHECK(validate_partition(m).ok());
    CHECK(is_subordinate(m, g));

    std::vector<TaggedPartition> single{left};
    auto same = merge_partitions(single);
    CHECK(same.size() == left.size());
    CHECK(same.domain() == left.domain());

    std::vector<TaggedPartition> gapped{cousin_partition(Iv(0, q(1, 3)), g), cousin_partition(Iv(q(2, 3), 1), g)};
    CHECK_THROWS_AS(merge_partitions(gapped), MergeError);
    std::vector<TaggedPartition> overlapping{cousin_partition(Iv(0, q(2, 3)), g), cousin_partition(Iv(q(1, 3), 1), g)};
    CHECK_THROWS_AS(merge_partitions(overlapping), MergeError);
}

TEST_CASE("hk_estimate examples")
{
    HkOptions o;
    o.schedule = {q(1, 2), q(1, 8)};
    o.samples = 6;
    o.seed = 3;
    auto one = hk_estimate(constant_fn(q(1)), q(0), q(2), [](const Rat& e) { return Gauge::constant(e); }, o);
    for (const auto& row : one.rows)
        for (const auto& s : row.sums) CHECK(s.value == 2);
    CHECK(one.converged);

    // f = x with the constant gauge ε: cells have length < 2ε, so each sum
    // lies between the left and right endpoint sums, which are within ε of 1/2
    o.schedule = {q(1, 10), q(1, 100), q(1, 1000)};
    auto lin = hk_estimate(identity_fn(), q(0), q(1), [](const Rat& e) { return Gauge::constant(e); }, o);
    for (const auto& row : lin.rows)
        for (const auto& s : row.sums) CHECK(rat_abs(Rat(s.value - q(1, 2))) < row.eps);

    auto zero = hk_estimate(cantor_deriv_spec(), q(0), q(1), [](const Rat& e) { return Gauge::constant(e); }, o);
    for (const auto& row : zero.rows)
        for (const auto& s : row.sums) CHECK(s.value == 0);
}

TEST_CASE("hk_estimate is reproducible under a seed")
{
    HkOptions o;
    o.schedule = {q(1, 10)};
    o.samples = 5;
    o.seed = 99;
    auto fam = [](const Rat& e) { return Gauge::constant(e); };
    auto a = hk_estimate(square_fn(), q(0), q(1), fam, o);
    auto b = hk_estimate(square_fn(), q(0), q(1), fam, o);
    REQUIRE(a.rows[0].sums.size() == b.rows[0].sums.size());
    for (std::size_t i = 0; i < a.rows[0].sums.size(); ++i) CHECK(a.rows[0].sums[i].value == b.rows[0].sums[i].value);
    // randomized samples differ from the deterministic one
    bool varied = false;
    for (const auto& s : a.rows[0].sums) varied = varied || s.value != a.rows[0].sums[0].value;
    CHECK(varied);
}

TEST_CASE("property: cousin partitions are valid and subordinate")
{
    std::mt19937_64 rng(20240611);
    for (int t = 0; t < 400; ++t) {
        Iv d = gen::interval(rng);
        Gauge g = gen::piecewise_gauge(rng, d);
        CousinOptions o;
        if (t % 2) o.rng = &rng;
        auto p = cousin_partition(d, g, o);
        REQUIRE(validate_partition(p).ok());
        REQUIRE(is_subordinate(p, g));
    }
}

TEST_CASE("property: riemann_sum is additive over merges")
{
    std::mt19937_64 rng(7);
    for (int t = 0; t < 60; ++t) {
        Iv d = gen::interval(rng);
        Rat cut = gen::rational(rng, d.lo(), d.hi());
        if (cut == d.lo() || cut == d.hi()) continue;
        CousinOptions o;
        o.rng = &rng;
        std::vector<TaggedPartition> parts{cousin_partition(Iv(d.lo(), cut), gen::piecewise_gauge(rng, d), o),
                                           cousin_partition(Iv(cut, d.hi()), gen::piecewise_gauge(rng, d), o)};
        auto m = merge_partitions(parts);
        CHECK(riemann_sum(square_fn(), m).value ==
              riemann_sum(square_fn(), parts[0]).value + riemann_sum(square_fn(), parts[1]).value);
    }
}

TEST_CASE("property: riemann_sum is linear at a fixed partition")
{
    std::mt19937_64 rng(8);
    for (int t = 0; t < 60; ++t) {
        Iv d = gen::interval(rng);
        CousinOptions o;
        o.rng = &rng;
        auto p = cousin_partition(d, gen::piecewise_gauge(rng, d), o);
        Rat alpha = gen::rational(rng, q(-3), q(3)), beta = gen::rational(rng, q(-3), q(3));
        auto combo = linear_combination(alpha, square_fn(), beta, abs_fn());
        CHECK(riemann_sum(combo, p).value ==
              alpha * riemann_sum(square_fn(), p).value + beta * riemann_sum(abs_fn(), p).value);
    }
}

TEST_CASE("property: reversed orientation negates the estimate")
{
    std::mt19937_64 rng(9);
    auto fam = [](const Rat& e) { return Gauge::constant(e); };
    for (int t = 0; t < 10; ++t) {
        Iv d = gen::interval(rng);
        HkOptions o;
        o.schedule = {q(1, 4), q(1, 16)};
        o.samples = 4;
        o.seed = static_cast<std::uint64_t>(t);
        auto fwd = hk_estimate(square_fn(), d.lo(), d.hi(), fam, o);
        auto rev = hk_estimate(square_fn(), d.hi(), d.lo(), fam, o);
        for (std::size_t r = 0; r < fwd.rows.size(); ++r) {
            for (std::size_t s = 0; s < fwd.rows[r].sums.size(); ++s)
                CHECK(rev.rows[r].sums[s].value == -fwd.rows[r].sums[s].value);
            CHECK(rev.rows[r].min == -fwd.rows[r].max);
        }
    }
}

TEST_CASE("property: subordination passes to larger gauges")
{
    std::mt19937_64 rng(10);
    for (int t = 0; t < 100; ++t) {
        Iv d = gen::interval(rng);
        Gauge small = gen::piecewise_gauge(rng, d);
        Rat extra = gen::positive(rng);
        Gauge large("larger", [small, extra](const Rat& x) { return Rat(small.radius(x) + extra); });
        CousinOptions o;
        o.rng = &rng;
        auto p = cousin_partition(d, small, o);
        CHECK(is_subordinate(p, large));
    }
}
