#include "gaugekit/funcs.hpp"

#include <algorithm>

namespace gaugekit {

namespace {

constexpr unsigned kCantorDescentCap = 1u << 16;

const GeneratedSet& cantor_set()
{
    static const GeneratedSet c = GeneratedSet::ternary_cantor();
    return c;
}

const GeneratedSet& reflected_set()
{
    static const GeneratedSet d = GeneratedSet::reflected_cantor();
    return d;
}

const GeneratedSet& svc_set()
{
    static const GeneratedSet s = GeneratedSet::svc();
    return s;
}

EvalFn exact(std::function<Rat(const Rat&)> fn)
{
    return [fn = std::move(fn)](const Rat& x, unsigned) { return ValueWithError::exact_value(fn(x)); };
}

Rat floor_rat(const Rat& q)
{
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return Rat(f);
}

// Exact distance even when the default descent cap is not enough.
Rat exact_distance(const GeneratedSet& set, const Rat& x)
{
    auto d = set.distance(x);
    if (!d.exact) d = set.distance(x, set.decision_depth());
    if (!d.exact)
        throw UndecidedMembership("distance to " + set.name() + " at " + to_string(x) + " did not resolve");
    return d.value();
}

// η for a function that is constant on each complement component of a set.
ModulusFn locally_constant_off(const GeneratedSet& set)
{
    return [&set](const Rat& x, const Rat&) -> std::optional<Rat> {
        Rat d = exact_distance(set, x);
        if (sgn(d) == 0) return std::nullopt;
        return rat_min(d, Rat(1));
    };
}

FnSpec::Affine affine(long slope, long intercept = 0) { return {Rat(slope), Rat(intercept)}; }

}  // namespace

// ------------------------------------------------------------------ FnSpec

ValueWithError FnSpec::operator()(const Rat& x, unsigned precision_bits) const
{
    if (!in_domain(x))
        throw DomainError(name + ": " + to_string(x) + " outside domain " + to_string(*domain), x);
    return eval(x, precision_bits);
}

ValueWithError FnSpec::derivative_at(const Rat& x, unsigned precision_bits) const
{
    if (!in_domain(x))
        throw DomainError(name + "': " + to_string(x) + " outside domain " + to_string(*domain), x);
    if (failure_set.contains(x)) return ValueWithError::convention_zero();
    if (!deriv) throw UnsupportedInstance(name + ": no derivative metadata");
    return deriv(x, precision_bits);
}

std::optional<Rat> FnSpec::modulus_at(const Rat& x, const Rat& slope) const
{
    if (!modulus) return std::nullopt;
    auto eta = modulus(x, slope);
    if (eta && sgn(*eta) <= 0) return std::nullopt;
    return eta;
}

// --------------------------------------------------------- special functions

Rat cantor_fn(const Rat& x)
{
    if (x < 0 || x > 1) throw DomainError("cantor_fn: " + to_string(x) + " outside [0,1]", x);
    auto d = cantor_set().descend(x, kCantorDescentCap);
    using End = GeneratedSet::Descent::End;

    // Ternary address digit k (0 left, 2 right) contributes bit k to the
    // binary value: c(x) = Σ b_k 2^{-(k+1)}.
    auto prefix = [&](std::size_t upto) {
        Rat v = 0;
        for (std::size_t k = 0; k < upto; ++k)
            if (d.bits[k]) v += pow2(-static_cast<long>(k) - 1);
        return v;
    };

    switch (d.end) {
    case End::endpoint_left: return prefix(d.depth);
    case End::endpoint_right: return Rat(prefix(d.depth) + pow2(-static_cast<long>(d.depth)));
    case End::gap: return Rat(prefix(d.depth) + pow2(-static_cast<long>(d.depth) - 1));
    case End::cycle: {
        std::size_t m = d.cycle_start, period = d.depth - m;
        Rat block = 0;
        for (std::size_t j = 0; j < period; ++j)
            if (d.bits[m + j]) block += pow2(-static_cast<long>(j) - 1);
        return Rat(prefix(m) + pow2(-static_cast<long>(m)) * block / (1 - pow2(-static_cast<long>(period))));
    }
    case End::capped: break;
    }
    throw UndecidedMembership("cantor_fn: ternary expansion of " + to_string(x) + " did not resolve");
}

Rat cantor_abs(const Rat& x)
{
    if (x < -1 || x > 1) throw DomainError("cantor_abs: " + to_string(x) + " outside [-1,1]", x);
    return cantor_fn(rat_abs(x));
}

Rat svc_dist_fn(const Rat& x)
{
    if (x < 0 || x > 1) throw DomainError("svc_dist_fn: " + to_string(x) + " outside [0,1]", x);
    return exact_distance(svc_set(), x);
}

ValueWithError quartic_root(const Rat& x, unsigned precision_bits)
{
    if (sgn(x) < 0) throw DomainError("quartic_root: negative argument " + to_string(x), x);
    mpz_class rn, rd;
    bool num_exact = mpz_root(rn.get_mpz_t(), x.get_num_mpz_t(), 4) != 0;
    bool den_exact = mpz_root(rd.get_mpz_t(), x.get_den_mpz_t(), 4) != 0;
    if (num_exact && den_exact) return ValueWithError::exact_value(make_rat(rn, rd));

    // r = floor((x 2^{4p})^{1/4}) gives r 2^-p <= x^{1/4} < (r+1) 2^-p.
    mpz_class scaled = x.get_num() << (4 * precision_bits);
    mpz_fdiv_q(scaled.get_mpz_t(), scaled.get_mpz_t(), x.get_den_mpz_t());
    mpz_class r;
    mpz_root(r.get_mpz_t(), scaled.get_mpz_t(), 4);
    Rat step = pow2(-static_cast<long>(precision_bits));
    return {Rat(Rat(r) * step), step, false};
}

// ----------------------------------------------------------- catalog entries

FnSpec constant_fn(const Rat& k)
{
    FnSpec f;
    f.name = "const:" + to_string(k);
    f.eval = exact([k](const Rat&) { return k; });
    f.deriv = exact([](const Rat&) { return Rat(0); });
    f.modulus = [](const Rat&, const Rat&) -> std::optional<Rat> { return Rat(1); };
    f.oscillation = [](const Iv&) -> std::optional<Rat> { return Rat(0); };
    f.dini = DiniCertificate{[](const Rat&) -> std::optional<unsigned> { return 0u; },
                             [](const Rat&) -> std::optional<Rat> { return Rat(1); }};
    f.monotone = Monotonicity::nondecreasing;
    f.affine = FnSpec::Affine{Rat(0), k};

    FnSpec F;  // k x
    F.name = "linear:" + to_string(k);
    F.eval = exact([k](const Rat& x) { return Rat(k * x); });
    F.deriv = exact([k](const Rat&) { return k; });
    F.modulus = [](const Rat&, const Rat&) -> std::optional<Rat> { return Rat(1); };
    F.oscillation = [k](const Iv& c) -> std::optional<Rat> { return Rat(rat_abs(k) * c.length()); };
    F.monotone = sgn(k) >= 0 ? Monotonicity::nondecreasing : Monotonicity::nonincreasing;
    F.affine = FnSpec::Affine{k, Rat(0)};
    f.antideriv = std::make_shared<const FnSpec>(std::move(F));
    return f;
}

FnSpec identity_fn()
{
    FnSpec f;
    f.name = "identity";
    f.eval = exact([](const Rat& x) { return x; });
    f.deriv = exact([](const Rat&) { return Rat(1); });
    f.modulus = [](const Rat&, const Rat&) -> std::optional<Rat> { return Rat(1); };
    f.oscillation = [](const Iv& c) -> std::optional<Rat> { return c.length(); };
    f.dini = DiniCertificate{[](const Rat&) -> std::optional<unsigned> { return 1u; },
                             [](const Rat&) -> std::optional<Rat> { return Rat(1); }};
    f.monotone = Monotonicity::nondecreasing;
    f.affine = affine(1);
    return f;
}

FnSpec square_fn()
{
    FnSpec f;
    f.name = "square";
    f.eval = exact([](const Rat& x) { return Rat(x * x); });
    f.deriv = exact([](const Rat& x) { return Rat(2 * x); });
    // |y^2 - x^2 - 2x(y-x)| = (y-x)^2 <= s|y-x| iff |y-x| <= s
    f.modulus = [](const Rat&, const Rat& s) -> std::optional<Rat> { return s; };
    f.oscillation = [](const Iv& c) -> std::optional<Rat> {
        Rat a = c.lo() * c.lo(), b = c.hi() * c.hi();
        if (c.contains(Rat(0))) return rat_max(a, b);
        return rat_abs(Rat(b - a));
    };
    // |y^2 - x^2| = |y + x||y - x| and |y + x| <= 2|x| + |y - x|
    f.dini = DiniCertificate{
        [](const Rat& x) -> std::optional<unsigned> { return floor_rat(Rat(2 * rat_abs(x))).get_num().get_ui(); },
        [](const Rat& x) -> std::optional<Rat> {
            Rat two_x = 2 * rat_abs(x);
            return Rat(1 + floor_rat(two_x) - two_x);
        }};
    return f;
}

FnSpec double_fn()
{
    FnSpec f;
    f.name = "double";
    f.eval = exact([](const Rat& x) { return Rat(2 * x); });
    f.deriv = exact([](const Rat&) { return Rat(2); });
    f.modulus = [](const Rat&, const Rat&) -> std::optional<Rat> { return Rat(1); };
    f.oscillation = [](const Iv& c) -> std::optional<Rat> { return Rat(2 * c.length()); };
    f.dini = DiniCertificate{[](const Rat&) -> std::optional<unsigned> { return 2u; },
                             [](const Rat&) -> std::optional<Rat> { return Rat(1); }};
    f.monotone = Monotonicity::nondecreasing;
    f.affine = affine(2);
    f.antideriv = std::make_shared<const FnSpec>(square_fn());
    return f;
}

FnSpec abs_fn()
{
    FnSpec f;
    f.name = "abs";
    f.eval = exact([](const Rat& x) { return rat_abs(x); });
    f.deriv = exact([](const Rat& x) { return Rat(sgn(x)); });
    f.failure_set = PointSet::finite({Rat(0)});
    f.modulus = [](const Rat& x, const Rat&) -> std::optional<Rat> {
        if (sgn(x) == 0) return std::nullopt;
        return rat_abs(x);
    };
    f.oscillation = [](const Iv& c) -> std::optional<Rat> {
        Rat a = rat_abs(c.lo()), b = rat_abs(c.hi());
        if (c.contains(Rat(0))) return rat_max(a, b);
        return rat_abs(Rat(b - a));
    };
    f.dini = DiniCertificate{[](const Rat&) -> std::optional<unsigned> { return 1u; },
                             [](const Rat&) -> std::optional<Rat> { return Rat(1); }};
    return f;
}

FnSpec sign_fn()
{
    FnSpec f;
    f.name = "sign";
    f.eval = [](const Rat& x, unsigned) {
        if (sgn(x) == 0) return ValueWithError::convention_zero();
        return ValueWithError::exact_value(Rat(sgn(x)));
    };
    f.deriv = exact([](const Rat&) { return Rat(0); });
    f.failure_set = PointSet::finite({Rat(0)});
    f.modulus = [](const Rat& x, const Rat&) -> std::optional<Rat> {
        if (sgn(x) == 0) return std::nullopt;
        return rat_abs(x);
    };
    f.oscillation = [](const Iv& c) -> std::optional<Rat> {
        int lo = sgn(c.lo()), hi = sgn(c.hi());
        return Rat(hi - lo);
    };
    f.dini = DiniCertificate{[](const Rat& x) -> std::optional<unsigned> {
                                 if (sgn(x) == 0) return std::nullopt;
                                 return 0u;
                             },
                             [](const Rat& x) -> std::optional<Rat> {
                                 if (sgn(x) == 0) return std::nullopt;
                                 return rat_abs(x);
                             }};
    f.monotone = Monotonicity::nondecreasing;
    f.antideriv = std::make_shared<const FnSpec>(abs_fn());
    return f;
}

FnSpec cantor_fn_spec()
{
    FnSpec f;
    f.name = "cantor_fn";
    f.domain = Iv(0, 1);
    f.eval = exact([](const Rat& x) { return cantor_fn(x); });
    f.deriv = exact([](const Rat&) { return Rat(0); });
    f.failure_set = PointSet::generated(cantor_set());
    f.modulus = locally_constant_off(cantor_set());
    f.monotone = Monotonicity::nondecreasing;
    f.oscillation = [](const Iv& c) -> std::optional<Rat> { return Rat(cantor_fn(c.hi()) - cantor_fn(c.lo())); };
    f.dini = DiniCertificate{[](const Rat& x) -> std::optional<unsigned> {
                                 if (cantor_set().member(x)) return std::nullopt;
                                 return 0u;
                             },
                             [](const Rat& x) -> std::optional<Rat> {
                                 Rat d = exact_distance(cantor_set(), x);
                                 if (sgn(d) == 0) return std::nullopt;
                                 return d;
                             }};
    return f;
}

FnSpec cantor_deriv_spec()
{
    FnSpec f = derivative_spec(cantor_fn_spec());
    f.name = "cantor_deriv";
    f.deriv = exact([](const Rat&) { return Rat(0); });
    f.modulus = locally_constant_off(cantor_set());
    f.oscillation = [](const Iv&) -> std::optional<Rat> { return Rat(0); };
    f.affine = FnSpec::Affine{Rat(0), Rat(0)};  // identically 0 under the convention
    f.antideriv = std::make_shared<const FnSpec>(constant_fn(Rat(0)));
    return f;
}

FnSpec cantor_abs_spec()
{
    FnSpec f;
    f.name = "cantor_abs";
    f.domain = Iv(-1, 1);
    f.eval = exact([](const Rat& x) { return cantor_abs(x); });
    f.deriv = exact([](const Rat&) { return Rat(0); });
    f.failure_set = PointSet::generated(reflected_set());
    f.modulus = locally_constant_off(reflected_set());
    f.oscillation = [](const Iv& c) -> std::optional<Rat> {
        Rat a = cantor_abs(c.lo()), b = cantor_abs(c.hi());
        if (c.contains(Rat(0))) return rat_max(a, b);
        return rat_abs(Rat(b - a));
    };
    f.dini = DiniCertificate{[](const Rat& x) -> std::optional<unsigned> {
                                 if (reflected_set().member(x)) return std::nullopt;
                                 return 0u;
                             },
                             [](const Rat& x) -> std::optional<Rat> {
                                 Rat d = exact_distance(reflected_set(), x);
                                 if (sgn(d) == 0) return std::nullopt;
                                 return d;
                             }};
    return f;
}

FnSpec cantor_abs_deriv_spec()
{
    FnSpec f = derivative_spec(cantor_abs_spec());
    f.name = "cantor_abs_deriv";
    f.deriv = exact([](const Rat&) { return Rat(0); });
    f.modulus = locally_constant_off(reflected_set());
    f.oscillation = [](const Iv&) -> std::optional<Rat> { return Rat(0); };
    f.affine = FnSpec::Affine{Rat(0), Rat(0)};
    f.antideriv = std::make_shared<const FnSpec>(constant_fn(Rat(0)));
    return f;
}

FnSpec svc_dist_spec()
{
    FnSpec f;
    f.name = "svc_dist_fn";
    f.domain = Iv(0, 1);
    // Exact except at points of S whose address stays aperiodic through the
    // decision depth; there the distance is bracketed by [0, upper].
    f.exact_on_rationals = false;
    f.eval = [](const Rat& x, unsigned) {
        if (x < 0 || x > 1) throw DomainError("svc_dist_fn: " + to_string(x) + " outside [0,1]", x);
        auto d = svc_set().distance(x);
        if (!d.exact) d = svc_set().distance(x, svc_set().decision_depth());
        if (d.exact) return ValueWithError::exact_value(d.value());
        Rat half = (d.upper - d.lower) / 2;
        return ValueWithError{Rat(d.lower + half), half, false};
    };

    // Off S, G is a tent over each removed interval: slope +1 left of the
    // center, -1 right of it. It fails to be differentiable at the tent
    // corners; on S itself no derivative is claimed.
    auto tent = [](const Rat& x) -> std::optional<ComponentRef> {
        if (svc_set().member(x)) return std::nullopt;
        return svc_set().complement_component(x);
    };
    f.failure_set = PointSet::predicate(
        "S∪{gap centers}",
        [tent](const Rat& x) {
            if (x < 0 || x > 1) return false;
            auto c = tent(x);
            return !c || c->interval.mid() == x;
        },
        [](const Iv& cell) { return PointSet::generated(svc_set()).witnesses_in(cell); });
    f.deriv = [tent](const Rat& x, unsigned) {
        auto c = tent(x);
        return ValueWithError::exact_value(Rat(x < c->interval.mid() ? 1 : -1));
    };
    f.modulus = [tent](const Rat& x, const Rat&) -> std::optional<Rat> {
        std::optional<ComponentRef> c;
        try {
            c = tent(x);
        } catch (const UndecidedMembership&) {
            return std::nullopt;
        }
        if (!c) return std::nullopt;
        Rat m = c->interval.mid();
        if (x == m) return std::nullopt;
        return x < m ? rat_min(Rat(x - c->interval.lo()), Rat(m - x)) : rat_min(Rat(x - m), Rat(c->interval.hi() - x));
    };
    // G is 1-Lipschitz.
    f.oscillation = [](const Iv& c) -> std::optional<Rat> { return c.length(); };
    f.dini = DiniCertificate{[](const Rat&) -> std::optional<unsigned> { return 1u; },
                             [](const Rat&) -> std::optional<Rat> { return Rat(1); }};
    return f;
}

FnSpec quartic_root_spec()
{
    FnSpec f;
    f.name = "quartic_root";
    f.exact_on_rationals = false;
    f.eval = [](const Rat& x, unsigned bits) { return quartic_root(x, bits); };
    f.failure_set = PointSet::finite({Rat(0)});
    // F'(x) = 1 / (4 r^3), r = x^{1/4} in [v, v + e]
    f.deriv = [](const Rat& x, unsigned bits) {
        for (;; bits *= 2) {
            auto r = quartic_root(x, bits);
            if (sgn(r.value) == 0) continue;
            Rat hi = r.upper();
            Rat d_hi = 1 / (4 * r.value * r.value * r.value);
            Rat d_lo = 1 / (4 * hi * hi * hi);
            return ValueWithError{Rat((d_hi + d_lo) / 2), Rat((d_hi - d_lo) / 2), false};
        }
    };
    // Taylor remainder with |F''(u)| = (3/16) u^{-7/4} on [x/2, 3x/2];
    // (x/2)^{7/4} >= min((x/2)^2, 1) keeps the radius rational.
    f.modulus = [](const Rat& x, const Rat& s) -> std::optional<Rat> {
        if (sgn(x) <= 0) return std::nullopt;
        Rat half = x / 2;
        Rat lower_pow = half <= 1 ? Rat(half * half) : Rat(1);
        return rat_min(half, Rat(s * Rat(32, 3) * lower_pow));
    };
    f.monotone = Monotonicity::nondecreasing;
    f.oscillation = [](const Iv& c) -> std::optional<Rat> {
        if (sgn(c.lo()) < 0) return std::nullopt;
        auto lo = quartic_root(c.lo()), hi = quartic_root(c.hi());
        return Rat(hi.upper() - lo.lower());
    };
    return f;
}

// --------------------------------------------------------------- combinators

FnSpec compose(const FnSpec& outer, const FnSpec& inner)
{
    FnSpec f;
    f.name = outer.name + "∘" + inner.name;
    f.domain = inner.domain;
    f.exact_on_rationals = outer.exact_on_rationals && inner.exact_on_rationals;

    auto outer_at = [outer, inner_name = inner.name](const Rat& x, const Rat& u, unsigned bits) {
        try {
            return outer(u, bits);
        } catch (const DomainError& e) {
            throw DomainError("compose: " + inner_name + "(" + to_string(x) + ") = " + to_string(u) +
                                  " leaves the domain of " + outer.name,
                              x);
        }
    };

    f.eval = [outer, inner, outer_at](const Rat& x, unsigned bits) {
        auto v = inner(x, bits);
        if (v.exact()) return outer_at(x, v.value, bits);
        if (outer.monotone == Monotonicity::none)
            throw UnsupportedInstance("compose: inexact inner value needs a monotone outer function");
        auto a = outer_at(x, v.lower(), bits), b = outer_at(x, v.upper(), bits);
        Rat lo = rat_min(a.lower(), b.lower()), hi = rat_max(a.upper(), b.upper());
        return ValueWithError{midpoint(lo, hi), Rat((hi - lo) / 2), false};
    };

    if (outer.failure_set.kind() == PointSet::Kind::empty) {
        f.failure_set = inner.failure_set;
    } else {
        auto outer_fail = outer.failure_set;
        auto inner_fail = inner.failure_set;
        f.failure_set = PointSet::predicate(
            inner_fail.name() + "∪" + inner.name + "⁻¹(" + outer_fail.name() + ")",
            [inner, inner_fail, outer_fail](const Rat& x) {
                if (inner_fail.contains(x)) return true;
                auto v = inner(x);
                if (!v.exact()) throw UnsupportedInstance("compose: failure set needs exact inner values");
                return outer_fail.contains(v.value);
            },
            [inner_fail](const Iv& cell) { return inner_fail.witnesses_in(cell); });
    }

    if (outer.deriv && inner.deriv) {
        f.deriv = [outer, inner](const Rat& x, unsigned bits) {
            auto v = inner(x, bits);
            if (!v.exact()) throw UnsupportedInstance("compose: chain rule needs exact inner values");
            return outer.derivative_at(v.value, bits) * inner.derivative_at(x, bits);
        };
    }

    if (outer.affine) {
        Rat k = rat_abs(outer.affine->slope);
        if (inner.modulus)
            f.modulus = [inner, k](const Rat& x, const Rat& s) -> std::optional<Rat> {
                if (sgn(k) == 0) return Rat(1);
                return inner.modulus_at(x, Rat(s / k));
            };
        if (inner.oscillation)
            f.oscillation = [inner, k](const Iv& c) -> std::optional<Rat> {
                auto o = inner.oscillation(c);
                if (!o) return std::nullopt;
                return Rat(*o * k);
            };
        if (inner.dini) {
            // |k(g(y) - g(x))| <= |k|(1 + band)|y - x| <= (1 + band')|y - x|
            auto band = inner.dini->band;
            f.dini = DiniCertificate{[band, k](const Rat& x) -> std::optional<unsigned> {
                                         auto b = band(x);
                                         if (!b) return std::nullopt;
                                         Rat bound = k * (1 + *b);
                                         mpz_class c;
                                         mpz_cdiv_q(c.get_mpz_t(), bound.get_num_mpz_t(), bound.get_den_mpz_t());
                                         return c <= 1 ? 0u : static_cast<unsigned>(c.get_ui() - 1);
                                     },
                                     inner.dini->eta};
        }
        if (inner.affine)
            f.affine = FnSpec::Affine{Rat(outer.affine->slope * inner.affine->slope),
                                      Rat(outer.affine->slope * inner.affine->intercept + outer.affine->intercept)};
        f.monotone = sgn(outer.affine->slope) >= 0 ? inner.monotone
                     : inner.monotone == Monotonicity::nondecreasing ? Monotonicity::nonincreasing
                     : inner.monotone == Monotonicity::nonincreasing ? Monotonicity::nondecreasing
                                                                     : Monotonicity::none;
    } else if (outer.monotone != Monotonicity::none && inner.monotone != Monotonicity::none) {
        f.monotone = outer.monotone == inner.monotone ? Monotonicity::nondecreasing : Monotonicity::nonincreasing;
    }
    return f;
}

FnSpec product(const FnSpec& f, const FnSpec& g)
{
    FnSpec p;
    p.name = f.name + "·" + g.name;
    if (f.domain && g.domain) {
        auto d = f.domain->intersect(*g.domain);
        if (!d) throw DomainError("product: disjoint domains");
        p.domain = *d;
    } else {
        p.domain = f.domain ? f.domain : g.domain;
    }
    p.exact_on_rationals = f.exact_on_rationals && g.exact_on_rationals;
    p.eval = [f, g](const Rat& x, unsigned bits) { return f(x, bits) * g(x, bits); };
    p.failure_set = f.failure_set.unite(g.failure_set);
    if (f.deriv && g.deriv)
        p.deriv = [f, g](const Rat& x, unsigned bits) {
            return f.derivative_at(x, bits) * g(x, bits) + f(x, bits) * g.derivative_at(x, bits);
        };

    auto scaled_by_constant = [](const FnSpec& k, const FnSpec& other, FnSpec& out) {
        if (!k.affine || sgn(k.affine->slope) != 0) return false;
        Rat c = rat_abs(k.affine->intercept);
        if (other.modulus)
            out.modulus = [other, c](const Rat& x, const Rat& s) -> std::optional<Rat> {
                if (sgn(c) == 0) return Rat(1);
                return other.modulus_at(x, Rat(s / c));
            };
        if (other.oscillation)
            out.oscillation = [other, c](const Iv& cell) -> std::optional<Rat> {
                auto o = other.oscillation(cell);
                if (!o) return std::nullopt;
                return Rat(*o * c);
            };
        if (other.affine)
            out.affine = FnSpec::Affine{Rat(other.affine->slope * k.affine->intercept),
                                        Rat(other.affine->intercept * k.affine->intercept)};
        return true;
    };
    if (!scaled_by_constant(g, f, p)) scaled_by_constant(f, g, p);
    return p;
}

FnSpec linear_combination(const Rat& alpha, const FnSpec& f, const Rat& beta, const FnSpec& g)
{
    FnSpec h;
    h.name = to_string(alpha) + "*" + f.name + "+" + to_string(beta) + "*" + g.name;
    if (f.domain && g.domain) {
        auto d = f.domain->intersect(*g.domain);
        if (!d) throw DomainError("linear_combination: disjoint domains");
        h.domain = *d;
    } else {
        h.domain = f.domain ? f.domain : g.domain;
    }
    h.exact_on_rationals = f.exact_on_rationals && g.exact_on_rationals;
    h.eval = [=](const Rat& x, unsigned bits) { return scale(f(x, bits), alpha) + scale(g(x, bits), beta); };
    h.failure_set = f.failure_set.unite(g.failure_set);
    if (f.deriv && g.deriv)
        h.deriv = [=](const Rat& x, unsigned bits) {
            return scale(f.derivative_at(x, bits), alpha) + scale(g.derivative_at(x, bits), beta);
        };
    if (f.modulus && g.modulus)
        h.modulus = [=](const Rat& x, const Rat& s) -> std::optional<Rat> {
            // split the slope budget evenly between the two terms
            auto part = [&](const FnSpec& fn, const Rat& coef) -> std::optional<Rat> {
                if (sgn(coef) == 0) return Rat(1);
                return fn.modulus_at(x, Rat(s / (2 * rat_abs(coef))));
            };
            auto a = part(f, alpha), b = part(g, beta);
            if (!a || !b) return std::nullopt;
            return rat_min(*a, *b);
        };
    if (f.oscillation && g.oscillation)
        h.oscillation = [=](const Iv& c) -> std::optional<Rat> {
            auto a = f.oscillation(c), b = g.oscillation(c);
            if (!a || !b) return std::nullopt;
            return Rat(rat_abs(alpha) * *a + rat_abs(beta) * *b);
        };
    if (f.affine && g.affine)
        h.affine = FnSpec::Affine{Rat(alpha * f.affine->slope + beta * g.affine->slope),
                                  Rat(alpha * f.affine->intercept + beta * g.affine->intercept)};
    return h;
}

FnSpec derivative_spec(const FnSpec& f)
{
    if (!f.deriv) throw UnsupportedInstance(f.name + ": no derivative metadata");
    FnSpec d;
    d.name = f.name + "'";
    d.domain = f.domain;
    d.exact_on_rationals = f.exact_on_rationals;
    d.eval = [f](const Rat& x, unsigned bits) { return f.derivative_at(x, bits); };
    // where the convention value was substituted
    d.failure_set = f.failure_set;
    return d;
}

// ------------------------------------------------------------------ Catalog

const Catalog& Catalog::instance()
{
    static const Catalog c;
    return c;
}

Catalog::Catalog()
{
    auto add = [this](std::string name, FnSpec f) {
        f.name = name;
        entries_.emplace(std::move(name), std::move(f));
    };
    add("identity", identity_fn());
    add("linear", identity_fn());
    add("one", constant_fn(Rat(1)));
    add("zero", constant_fn(Rat(0)));
    add("square", square_fn());
    add("double", double_fn());
    add("abs", abs_fn());
    add("sign", sign_fn());
    add("cantor_fn", cantor_fn_spec());
    add("cantor_deriv", cantor_deriv_spec());
    add("cantor_abs", cantor_abs_spec());
    add("cantor_abs_deriv", cantor_abs_deriv_spec());
    add("svc_dist_fn", svc_dist_spec());
    add("quartic_root", quartic_root_spec());
    add("F∘G", compose(quartic_root_spec(), svc_dist_spec()));
    add("quartic_svc_dist", compose(quartic_root_spec(), svc_dist_spec()));
}

const FnSpec* Catalog::find(std::string_view name) const
{
    auto it = entries_.find(name);
    return it == entries_.end() ? nullptr : &it->second;
}

const FnSpec& Catalog::at(std::string_view name) const
{
    if (const FnSpec* f = find(name)) return *f;
    throw std::out_of_range("unknown catalog function '" + std::string(name) + "'");
}

std::vector<std::string> Catalog::names() const
{
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_) out.push_back(k);
    return out;
}

}  // namespace gaugekit
