#pragma once

#include "gaugekit/rational.hpp"
#include "gaugekit/sets.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

namespace gaugekit {

inline constexpr unsigned kDefaultPrecisionBits = 64;

using FailureSetDescriptor = PointSet;

// Evaluator: value at x with a certified error bound, given a precision
// request in bits (ignored by exact functions).
using EvalFn = std::function<ValueWithError(const Rat& x, unsigned precision_bits)>;

// Linearization modulus. modulus(x, s) = η > 0 certifies
//   |f(y) - f(x) - f'(x)(y - x)| <= s |y - x|   whenever |y - x| <= η
// (and y in the domain). nullopt where no certificate exists. Where
// f'(x) = 0 this is exactly the zero-derivative modulus
//   |f(y) - f(x)| <= s |y - x|.
using ModulusFn = std::function<std::optional<Rat>(const Rat& x, const Rat& slope)>;

// Upper bound on sup f - inf f over a closed cell.
using OscillationFn = std::function<std::optional<Rat>(const Iv& cell)>;

// Dini-band certificate: band(x) is an integer with band(x) >= floor of the
// upper Dini derivative at x, and eta(x) > 0 certifies
//   |f(y) - f(x)| <= (1 + band(x)) |y - x|   for |y - x| <= eta(x).
struct DiniCertificate {
    std::function<std::optional<unsigned>(const Rat&)> band;
    std::function<std::optional<Rat>(const Rat&)> eta;
};

enum class Monotonicity { none, nondecreasing, nonincreasing };

// A catalog function. Plain value type; every member is immutable after
// construction and evaluation is pure.
struct FnSpec {
    std::string name;
    std::optional<Iv> domain;  // nullopt: defined on all rationals
    bool exact_on_rationals = true;
    EvalFn eval;
    EvalFn deriv;  // defined off failure_set; may be empty
    FailureSetDescriptor failure_set;
    ModulusFn modulus;
    OscillationFn oscillation;
    std::optional<DiniCertificate> dini;
    Monotonicity monotone = Monotonicity::none;
    struct Affine {
        Rat slope;
        Rat intercept;
    };
    std::optional<Affine> affine;  // set when f(x) = slope x + intercept
    std::shared_ptr<const FnSpec> antideriv;

    bool in_domain(const Rat& x) const { return !domain || domain->contains(x); }

    // Evaluate, throwing DomainError with the witness outside the domain.
    ValueWithError operator()(const Rat& x, unsigned precision_bits = kDefaultPrecisionBits) const;

    // Derivative with the convention that it is 0 where it does not exist:
    // on failure_set the result is an exact 0 flagged by_convention.
    ValueWithError derivative_at(const Rat& x, unsigned precision_bits = kDefaultPrecisionBits) const;

    std::optional<Rat> modulus_at(const Rat& x, const Rat& slope) const;
};

// --- exact special functions -------------------------------------------

// Cantor-Lebesgue function on [0,1], exact on rationals.
Rat cantor_fn(const Rat& x);
// c(|x|) on [-1,1].
Rat cantor_abs(const Rat& x);
// dist(x, S) for the Smith-Volterra-Cantor set S, x in [0,1].
Rat svc_dist_fn(const Rat& x);
// x^{1/4} with a certified bound: the true root lies in
// [value, value + abs_error_bound] and abs_error_bound <= 2^-precision_bits.
// Exact when x is the fourth power of a rational.
ValueWithError quartic_root(const Rat& x, unsigned precision_bits = kDefaultPrecisionBits);

// --- catalog functions ----------------------------------------------------

FnSpec constant_fn(const Rat& k);
FnSpec identity_fn();
FnSpec square_fn();
FnSpec double_fn();  // 2x
FnSpec abs_fn();
FnSpec sign_fn();  // derivative of abs, convention 0 at 0
FnSpec cantor_fn_spec();
FnSpec cantor_deriv_spec();
FnSpec cantor_abs_spec();
FnSpec cantor_abs_deriv_spec();
FnSpec svc_dist_spec();
FnSpec quartic_root_spec();

// outer ∘ inner. Range violations surface at evaluation time as DomainError
// carrying the offending point. The derivative is populated only where the
// chain rule is certified by both constituents.
FnSpec compose(const FnSpec& outer, const FnSpec& inner);
FnSpec product(const FnSpec& f, const FnSpec& g);
// alpha f + beta g
FnSpec linear_combination(const Rat& alpha, const FnSpec& f, const Rat& beta, const FnSpec& g);
// The function x -> f'(x), with value 0 on f.failure_set.
FnSpec derivative_spec(const FnSpec& f);

class Catalog {
public:
    static const Catalog& instance();

    const FnSpec* find(std::string_view name) const;
    const FnSpec& at(std::string_view name) const;  // throws std::out_of_range
    std::vector<std::string> names() const;

private:
    Catalog();
    std::map<std::string, FnSpec, std::less<>> entries_;
};

}  // namespace gaugekit
