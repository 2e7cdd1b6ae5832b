#include "gaugekit/rational.hpp"

#include <cctype>
#include <cmath>

namespace gaugekit {

Rat make_rat(long num, long den)
{
    if (den == 0) throw std::invalid_argument("make_rat: zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

Rat make_rat(const mpz_class& num, const mpz_class& den)
{
    if (den == 0) throw std::invalid_argument("make_rat: zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

namespace {

mpz_class parse_integer(std::string_view s, std::string_view whole)
{
    if (s.empty()) throw std::invalid_argument("parse_rat: malformed number '" + std::string(whole) + "'");
    std::size_t i = 0;
    if (s[0] == '+' || s[0] == '-') i = 1;
    if (i == s.size()) throw std::invalid_argument("parse_rat: malformed number '" + std::string(whole) + "'");
    for (std::size_t k = i; k < s.size(); ++k)
        if (!std::isdigit(static_cast<unsigned char>(s[k])))
            throw std::invalid_argument("parse_rat: malformed number '" + std::string(whole) + "'");
    std::string digits(s[0] == '+' ? s.substr(1) : s);
    return mpz_class(digits, 10);
}

Rat parse_decimal(std::string_view s, std::string_view whole)
{
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        exponent = parse_integer(s.substr(e + 1), whole).get_si();
        s = s.substr(0, e);
    }
    bool negative = false;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
        negative = s[0] == '-';
        s = s.substr(1);
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_point = false;
    for (char c : s) {
        if (c == '.') {
            if (seen_point) throw std::invalid_argument("parse_rat: malformed number '" + std::string(whole) + "'");
            seen_point = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            if (seen_point) ++frac_digits;
        } else {
            throw std::invalid_argument("parse_rat: malformed number '" + std::string(whole) + "'");
        }
    }
    if (digits.empty()) throw std::invalid_argument("parse_rat: malformed number '" + std::string(whole) + "'");
    Rat q{mpz_class(digits, 10)};
    long shift = exponent - frac_digits;
    mpz_class ten_pow;
    mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
    if (shift >= 0)
        q *= ten_pow;
    else
        q /= ten_pow;
    if (negative) q = -q;
    return q;
}

}  // namespace

Rat parse_rat(std::string_view text)
{
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        mpz_class num = parse_integer(text.substr(0, slash), text);
        mpz_class den = parse_integer(text.substr(slash + 1), text);
        if (den == 0) throw std::invalid_argument("parse_rat: zero denominator in '" + std::string(text) + "'");
        return make_rat(num, den);
    }
    return parse_decimal(text, text);
}

std::string to_string(const Rat& q)
{
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

double to_double(const Rat& q) { return q.get_d(); }

Rat from_double(double d)
{
    if (!std::isfinite(d)) throw std::invalid_argument("from_double: non-finite value");
    Rat q(d);  // mpq_set_d is exact
    return q;
}

Rat pow2(long k)
{
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(k < 0 ? -k : k));
    if (k >= 0) return Rat(p);
    return make_rat(mpz_class(1), p);
}

Rat pow_int(const Rat& base, long exponent)
{
    if (exponent < 0) {
        if (base == 0) throw std::domain_error("pow_int: zero to a negative power");
        return pow_int(Rat(1) / base, -exponent);
    }
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(exponent));
    mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(exponent));
    return make_rat(num, den);
}

Rat midpoint(const Rat& a, const Rat& b) { return Rat((a + b) / 2); }
Rat rat_min(const Rat& a, const Rat& b) { return a < b ? a : b; }
Rat rat_max(const Rat& a, const Rat& b) { return a < b ? b : a; }
Rat rat_abs(const Rat& a) { return sgn(a) < 0 ? Rat(-a) : a; }

Iv::Iv(Rat lo, Rat hi) : lo_(std::move(lo)), hi_(std::move(hi))
{
    if (hi_ < lo_) throw std::invalid_argument("Iv: lo > hi in [" + to_string(lo_) + ", " + to_string(hi_) + "]");
}

std::optional<Iv> Iv::intersect(const Iv& other) const
{
    Rat lo = rat_max(lo_, other.lo_);
    Rat hi = rat_min(hi_, other.hi_);
    if (hi < lo) return std::nullopt;
    return Iv(std::move(lo), std::move(hi));
}

std::string to_string(const Iv& iv) { return "[" + to_string(iv.lo()) + ", " + to_string(iv.hi()) + "]"; }

ValueWithError operator+(const ValueWithError& a, const ValueWithError& b)
{
    return {Rat(a.value + b.value), Rat(a.abs_error_bound + b.abs_error_bound), false};
}

ValueWithError operator-(const ValueWithError& a, const ValueWithError& b)
{
    return {Rat(a.value - b.value), Rat(a.abs_error_bound + b.abs_error_bound), false};
}

ValueWithError operator*(const ValueWithError& a, const ValueWithError& b)
{
    // |xy - ab| <= |a| eb + |b| ea + ea eb
    Rat err = rat_abs(a.value) * b.abs_error_bound + rat_abs(b.value) * a.abs_error_bound +
              a.abs_error_bound * b.abs_error_bound;
    return {Rat(a.value * b.value), std::move(err), false};
}

ValueWithError scale(const ValueWithError& a, const Rat& k)
{
    return {Rat(a.value * k), Rat(a.abs_error_bound * rat_abs(k)), a.by_convention};
}

ValueWithError abs(const ValueWithError& a) { return {rat_abs(a.value), a.abs_error_bound, a.by_convention}; }

}  // namespace gaugekit
