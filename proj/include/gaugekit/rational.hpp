#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gaugekit {

// Exact rational scalar. GMP keeps every arithmetic result canonical
// (den > 0, gcd(|num|, den) = 1); values built by hand go through make_rat
// or parse_rat, which canonicalize.
//
// NOTE: gmpxx uses expression templates, so `auto x = a + b;` is a lazy
// expression. Always spell the type out as Rat.
using Rat = mpq_class;

Rat make_rat(long num, long den = 1);
Rat make_rat(const mpz_class& num, const mpz_class& den);

// Accepts "num/den", integers, decimals ("0.125") and scientific notation
// ("1e-3"). Decimal forms are converted exactly, never through a double.
Rat parse_rat(std::string_view text);

// Always "num/den", also for integers ("2/1").
std::string to_string(const Rat& q);

double to_double(const Rat& q);

// Exact binary value of a finite double.
Rat from_double(double d);

// 2^k for any integer k.
Rat pow2(long k);
Rat pow_int(const Rat& base, long exponent);

Rat midpoint(const Rat& a, const Rat& b);
Rat rat_min(const Rat& a, const Rat& b);
Rat rat_max(const Rat& a, const Rat& b);
Rat rat_abs(const Rat& a);

// Closed interval [lo, hi] with exact endpoints, lo <= hi.
class Iv {
public:
    Iv(Rat lo, Rat hi);

    const Rat& lo() const noexcept { return lo_; }
    const Rat& hi() const noexcept { return hi_; }
    Rat length() const { return hi_ - lo_; }
    Rat mid() const { return midpoint(lo_, hi_); }

    bool contains(const Rat& x) const { return lo_ <= x && x <= hi_; }
    bool interior_contains(const Rat& x) const { return lo_ < x && x < hi_; }
    bool contains(const Iv& other) const { return lo_ <= other.lo_ && other.hi_ <= hi_; }
    bool intersects(const Iv& other) const { return lo_ <= other.hi_ && other.lo_ <= hi_; }

    // Intersection of two closed intervals, empty when disjoint.
    std::optional<Iv> intersect(const Iv& other) const;

    friend bool operator==(const Iv& a, const Iv& b) { return a.lo_ == b.lo_ && a.hi_ == b.hi_; }

private:
    Rat lo_;
    Rat hi_;
};

std::string to_string(const Iv& iv);

// A value together with a one-sided worst-case bound on its absolute error:
// the true value lies in [value - abs_error_bound, value + abs_error_bound].
// by_convention marks derivative values taken as 0 where the derivative
// does not exist.
struct ValueWithError {
    Rat value;
    Rat abs_error_bound;
    bool by_convention = false;

    bool exact() const { return sgn(abs_error_bound) == 0; }
    Rat lower() const { return value - abs_error_bound; }
    Rat upper() const { return value + abs_error_bound; }

    static ValueWithError exact_value(Rat v) { return {std::move(v), Rat(0), false}; }
    static ValueWithError convention_zero() { return {Rat(0), Rat(0), true}; }
};

ValueWithError operator+(const ValueWithError& a, const ValueWithError& b);
ValueWithError operator-(const ValueWithError& a, const ValueWithError& b);
ValueWithError operator*(const ValueWithError& a, const ValueWithError& b);
ValueWithError scale(const ValueWithError& a, const Rat& k);
ValueWithError abs(const ValueWithError& a);

// Error hierarchy. Violations that are data (partition validation) are not
// exceptions; everything here signals that an operation could not proceed.
struct DomainError : std::domain_error {
    DomainError(const std::string& what, std::optional<Rat> witness = std::nullopt)
        : std::domain_error(what), witness(std::move(witness)) {}
    std::optional<Rat> witness;
};

struct InvalidGauge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PartitionFailure : std::runtime_error {
    PartitionFailure(const std::string& what, Iv smallest_unaccepted)
        : std::runtime_error(what), cell(std::move(smallest_unaccepted)) {}
    Iv cell;
};

struct MergeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnsupportedInstance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UndecidedMembership : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace gaugekit
