#include "gaugekit/cov.hpp"

#include "gen.hpp"

#include <doctest.h>

#include <cmath>

using namespace gaugekit;

namespace {

Rat q(long n, long d = 1) { return make_rat(n, d); }

CovOptions opts(std::uint64_t seed = 0, unsigned samples = 6)
{
    CovOptions o;
    o.schedule = {q(1, 10), q(1, 100)};
    o.samples = samples;
    o.seed = seed;
    return o;
}

CovInstance named(std::string_view name)
{
    auto inst = cov_instance(name);
    REQUIRE(inst);
    return *inst;
}

}  // namespace

TEST_CASE("ftc_check examples")
{
    auto sq = ftc_check(square_fn(), Iv(0, 1), opts());
    CHECK(sq.lhs.value == 1);
    CHECK(sq.lhs_closed_form);
    CHECK(sq.verdict == CovVerdict::holds_evidence);
    CHECK(sq.channels_agree);

    auto c = ftc_check(cantor_fn_spec(), Iv(0, 1), opts());
    CHECK(c.lhs.value == 1);
    CHECK(c.verdict == CovVerdict::fails);
    for (const auto& row : c.rows)
        for (const auto& s : row.sums) CHECK(s.value == 0);
    REQUIRE(c.ncv_on_b);
    CHECK(c.ncv_on_b->verdict == VariationVerdict::refuted);
    CHECK(c.channels_agree);

    auto ca = ftc_check(cantor_abs_spec(), Iv(-1, 1), opts());
    CHECK(ca.lhs.value == 0);
    CHECK(ca.verdict == CovVerdict::holds_evidence);
    for (const auto& row : ca.rows)
        for (const auto& s : row.sums) CHECK(s.value == 0);
    REQUIRE(ca.ncv_on_b);
    CHECK(ca.ncv_on_b->verdict != VariationVerdict::refuted);
}

TEST_CASE("cov_check examples")
{
    auto id = cov_check(named("identity-one"), Iv(q(1, 4), q(3, 4)), opts());
    CHECK(id.lhs.value == q(1, 2));
    CHECK(id.verdict == CovVerdict::holds_evidence);
    for (const auto& row : id.rows)
        for (const auto& s : row.sums) CHECK(s.value == q(1, 2));

    auto sq = cov_check(named("square-sub"), Iv(0, 1), opts(3));
    CHECK(sq.verdict == CovVerdict::holds_evidence);
    CHECK(sq.expected_holds == std::optional<bool>(true));

    auto kink = cov_check(named("abs-kink"), Iv(-1, 1), opts(4));
    CHECK(kink.verdict == CovVerdict::holds_evidence);
    CHECK(kink.channels_agree);

    auto whole = cov_check(named("cantorabs"), Iv(-1, 1), opts());
    CHECK(whole.verdict == CovVerdict::holds_evidence);
    CHECK(whole.channels_agree);

    auto unit = cov_check(named("cantorabs-unit"), Iv(0, 1), opts());
    CHECK(unit.verdict == CovVerdict::fails);
    CHECK(unit.lhs.value == 1);
    REQUIRE(unit.ncv_on_b);
    CHECK(unit.ncv_on_b->verdict == VariationVerdict::refuted);
    CHECK(unit.channels_agree);
    CHECK(unit.expected_holds == std::optional<bool>(false));
    CHECK(unit.witness);

    CHECK_FALSE(cov_instance("no-such-instance"));
    CHECK_THROWS(cov_check(named("cantorabs"), Iv(-2, 1), opts()));
}

TEST_CASE("instance catalog")
{
    auto names = cov_instance_names();
    for (const char* n : {"identity-one", "square-sub", "abs-kink", "cantorabs", "cantorabs-unit", "cantor-ftc"})
        CHECK(std::find(names.begin(), names.end(), n) != names.end());
    for (const auto& n : names) CHECK(cov_instance(n));
    auto ca = named("cantorabs");
    CHECK(ca.expected_holds(Iv(-1, 1)));
    CHECK_FALSE(ca.expected_holds(Iv(0, 1)));
    CHECK(ca.expected_holds(Iv(q(-1, 3), q(1, 3))));
    CHECK(ca.expected_holds(Iv(q(1, 3), q(2, 3))));
}

TEST_CASE("default_scan_grid")
{
    auto grid = default_scan_grid(named("abs-kink"), 1);
    CHECK(std::find(grid.begin(), grid.end(), Iv(-1, 1)) != grid.end());
    CHECK(std::find(grid.begin(), grid.end(), Iv(-1, 0)) != grid.end());
    CHECK(std::find(grid.begin(), grid.end(), Iv(0, 1)) != grid.end());
    for (const auto& w : grid) CHECK(Iv(-1, 1).contains(w));
}

TEST_CASE("cov_scan_all_subintervals examples")
{
    auto grid = std::vector<Iv>{Iv(-1, 1), Iv(-1, 0), Iv(0, 1)};
    auto ca = cov_scan_all_subintervals(named("cantorabs"), grid, opts(1, 4));
    REQUIRE(ca.entries.size() == 3);
    CHECK(ca.entries[0].verdict == CovVerdict::holds_evidence);
    CHECK(ca.entries[1].verdict == CovVerdict::fails);
    CHECK(ca.entries[2].verdict == CovVerdict::fails);
    CHECK_FALSE(ca.all_hold);
    CHECK(ca.nv_refuted);
    CHECK(ca.channels_agree);

    auto kink = cov_scan_all_subintervals(named("abs-kink"), default_scan_grid(named("abs-kink"), 2), opts(2, 4));
    CHECK(kink.all_hold);
    CHECK_FALSE(kink.nv_refuted);
    CHECK(kink.nv_on_b.verdict == VariationVerdict::nv_evidence);
    CHECK(kink.channels_agree);

    auto id = cov_scan_all_subintervals(named("identity-one"), default_scan_grid(named("identity-one"), 2),
                                        opts(3, 3));
    CHECK(id.entries.size() >= 4);
    CHECK(id.all_hold);
    CHECK(id.channels_agree);
}

TEST_CASE("svc_composition_check examples")
{
    auto two = svc_composition_check(2, q(0));
    CHECK(two.ok);
    CHECK(two.bound_fourth_power == 2);
    CHECK(two.gap_half_length == pow2(-7));
    CHECK(two.y == GeneratedSet::svc().cell_at_depth(q(0), 2)->mid());
    Rat lo = two.quotient.lower();
    CHECK(lo * lo * lo * lo > 2);

    auto s = GeneratedSet::svc();
    auto cells = s.realize(12);
    Rat x = (*cells)[cells->size() / 3].lo();
    REQUIRE(s.member(x));
    auto ten = svc_composition_check(10, x);
    CHECK(ten.ok);
    CHECK(ten.bound_fourth_power == pow2(17));
    CHECK(ten.quotient.lower() > from_double(19.0));
    CHECK(std::abs(ten.bound - std::pow(2.0, 17.0 / 4)) < 1e-9);

    CHECK_THROWS(svc_composition_check(3, q(1, 2)));
}

TEST_CASE("property: bound grows by sqrt 2 per level")
{
    for (unsigned n = 2; n < 14; ++n) {
        auto a = svc_composition_check(n, q(0));
        auto b = svc_composition_check(n + 1, q(0));
        CHECK(b.bound_fourth_power == 4 * a.bound_fourth_power);
        CHECK(std::abs(b.bound / a.bound - std::sqrt(2.0)) < 1e-12);
        CHECK(a.ok);
    }
}

TEST_CASE("property: svc check on sampled points of S")
{
    auto s = GeneratedSet::svc();
    auto cells = s.realize(8);
    std::mt19937_64 rng(11);
    for (int t = 0; t < 12; ++t) {
        const Iv& c = (*cells)[draw_index(rng, cells->size())];
        Rat x = draw_index(rng, 2) ? c.lo() : c.hi();
        unsigned n = 2 + static_cast<unsigned>(draw_index(rng, 5));
        auto r = svc_composition_check(n, x);
        CHECK(r.ok);
        CHECK(rat_abs(Rat(r.y - x)) <= s.cell_length(n));
    }
}

TEST_CASE("property: ftc is the substitution instance with f = 1 and F = identity")
{
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        auto f = ftc_check(square_fn(), Iv(0, 1), opts(seed, 4));
        auto c = cov_check(named("square-sub"), Iv(0, 1), opts(seed, 4));
        CHECK(f.lhs.value == c.lhs.value);
        REQUIRE(f.rows.size() == c.rows.size());
        for (std::size_t r = 0; r < f.rows.size(); ++r) {
            REQUIRE(f.rows[r].sums.size() == c.rows[r].sums.size());
            for (std::size_t i = 0; i < f.rows[r].sums.size(); ++i)
                CHECK(f.rows[r].sums[i].value == c.rows[r].sums[i].value);
        }
    }
}

TEST_CASE("property: B-tagged cells contribute nothing to the integrand sum")
{
    auto inst = named("cantorabs");
    FnSpec h = cov_integrand(inst);
    std::mt19937_64 rng(12);
    for (int t = 0; t < 10; ++t) {
        CousinOptions o;
        o.rng = &rng;
        Gauge g = cov_gauge(inst, Iv(-1, 1), q(1, 50));
        auto p = cousin_partition(Iv(-1, 1), g, o);
        REQUIRE(is_subordinate(p, g));
        Rat full = 0, off_b = 0;
        for (const auto& [tag, cell] : p.items()) {
            auto v = h(tag);
            if (inst.B.contains(tag)) {
                CHECK(v.value == 0);
                CHECK(v.by_convention);
            }
            full += v.value * cell.length();
            if (!inst.B.contains(tag)) off_b += v.value * cell.length();
        }
        CHECK(full == off_b);
        CHECK(full == riemann_sum(h, p).value);
    }
}

TEST_CASE("property: verdicts agree across channels on random windows")
{
    std::mt19937_64 rng(13);
    auto inst = named("cantorabs");
    auto d = GeneratedSet::reflected_cantor();
    auto cells = d.realize(2);
    for (int t = 0; t < 6; ++t) {
        // window endpoints at points of D keep the expected outcome decidable
        Rat a = (*cells)[draw_index(rng, cells->size())].lo();
        Rat b = (*cells)[draw_index(rng, cells->size())].hi();
        if (!(a < b)) continue;
        Iv w(a, b);
        auto r = cov_check(inst, w, opts(t, 3));
        bool expect = inst.expected_holds(w);
        CHECK(r.channels_agree);
        CHECK((r.verdict == CovVerdict::holds_evidence) == expect);
        CHECK((r.verdict == CovVerdict::fails) == !expect);
    }
}
