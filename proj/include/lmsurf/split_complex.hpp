#pragma once

// Double (split-complex) numbers a + jb with j^2 = 1.
//
// Every element splits along the idempotents e+ = (1+j)/2 and e- = (1-j)/2 as
// z = p e+ + q e-, where p = a + b and q = a - b are the null coordinates. In that
// basis multiplication is componentwise, which is what the rest of the library
// leans on: holomorphic functions of a double variable are pairs of independent
// real functions of p and q.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "errors.hpp"

namespace lmsurf {

struct NullCoords {
    double p;
    double q;
};

class SplitComplex {
public:
    constexpr SplitComplex() = default;
    // Implicit on purpose: real scalars embed into the algebra.
    constexpr SplitComplex(double re, double im = 0.0) : re_(re), im_(im) {}

    static constexpr SplitComplex from_null(double p, double q) { return {0.5 * (p + q), 0.5 * (p - q)}; }

    constexpr double re() const { return re_; }
    constexpr double im() const { return im_; }
    constexpr NullCoords to_null() const { return {re_ + im_, re_ - im_}; }
    constexpr double p() const { return re_ + im_; }
    constexpr double q() const { return re_ - im_; }

    constexpr SplitComplex conj() const { return {re_, -im_}; }
    // |z|^2 = z conj(z) = re^2 - im^2; negative off the light cone's "timelike" side.
    constexpr double norm2() const { return re_ * re_ - im_ * im_; }

    constexpr SplitComplex operator-() const { return {-re_, -im_}; }

    constexpr SplitComplex& operator+=(const SplitComplex& o)
    {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    constexpr SplitComplex& operator-=(const SplitComplex& o)
    {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    constexpr SplitComplex& operator*=(const SplitComplex& o)
    {
        const double r = re_ * o.re_ + im_ * o.im_;
        im_ = re_ * o.im_ + im_ * o.re_;
        re_ = r;
        return *this;
    }
    SplitComplex& operator/=(const SplitComplex& o);

    friend constexpr SplitComplex operator+(SplitComplex a, const SplitComplex& b) { return a += b; }
    friend constexpr SplitComplex operator-(SplitComplex a, const SplitComplex& b) { return a -= b; }
    friend constexpr SplitComplex operator*(SplitComplex a, const SplitComplex& b) { return a *= b; }
    friend SplitComplex operator/(SplitComplex a, const SplitComplex& b) { return a /= b; }
    friend constexpr bool operator==(const SplitComplex&, const SplitComplex&) = default;

private:
    double re_ = 0.0;
    double im_ = 0.0;
};

inline constexpr SplitComplex j_unit{0.0, 1.0};
inline constexpr SplitComplex e_plus{0.5, 0.5};
inline constexpr SplitComplex e_minus{0.5, -0.5};

// Null-cone proximity threshold: a number is treated as a zero divisor when its
// smaller null component is below this fraction of max(1, larger component).
inline constexpr double null_epsilon = 1e-12;

inline bool is_invertible(const SplitComplex& z)
{
    const double ap = std::abs(z.p());
    const double aq = std::abs(z.q());
    const double scale = std::max(1.0, std::max(ap, aq));
    return std::min(ap, aq) > null_epsilon * scale && std::isfinite(ap) && std::isfinite(aq);
}

inline SplitComplex& SplitComplex::operator/=(const SplitComplex& o)
{
    if (!is_invertible(o)) {
        throw ZeroDivisor("division by a zero divisor (|b|^2 = " + std::to_string(o.norm2()) + ")");
    }
    if (o.im() == 0.0) {
        // Real divisor: exact componentwise, keeps z / 1 == z bit for bit.
        re_ /= o.re();
        im_ /= o.re();
        return *this;
    }
    *this = from_null(p() / o.p(), q() / o.q());
    return *this;
}

inline SplitComplex inverse(const SplitComplex& z) { return SplitComplex{1.0} / z; }

inline SplitComplex exp(const SplitComplex& z) { return SplitComplex::from_null(std::exp(z.p()), std::exp(z.q())); }

// Principal square root: both null components non-negative.
inline SplitComplex sqrt(const SplitComplex& z)
{
    const double p = z.p();
    const double q = z.q();
    const double tol = null_epsilon * std::max(1.0, std::max(std::abs(p), std::abs(q)));
    if (p < -tol || q < -tol || std::isnan(p) || std::isnan(q)) {
        throw NoSquareRoot("no principal square root: null coordinates (" + std::to_string(p) + ", " +
                           std::to_string(q) + ")");
    }
    return SplitComplex::from_null(std::sqrt(std::max(p, 0.0)), std::sqrt(std::max(q, 0.0)));
}

// All square roots +-sqrt(p) e+ +- sqrt(q) e-, without duplicates. Empty when a
// null component is negative.
inline std::vector<SplitComplex> sqrt_all(const SplitComplex& z)
{
    SplitComplex principal;
    try {
        principal = sqrt(z);
    }
    catch (const NoSquareRoot&) {
        return {};
    }
    std::vector<SplitComplex> roots;
    for (double sp : {1.0, -1.0}) {
        for (double sq : {1.0, -1.0}) {
            const SplitComplex r = SplitComplex::from_null(sp * principal.p(), sq * principal.q());
            if (std::find(roots.begin(), roots.end(), r) == roots.end()) {
                roots.push_back(r);
            }
        }
    }
    return roots;
}

inline SplitComplex pow(const SplitComplex& z, int n)
{
    if (n < 0) {
        return inverse(pow(z, -n));
    }
    SplitComplex result{1.0};
    SplitComplex base = z;
    for (unsigned e = static_cast<unsigned>(n); e != 0; e >>= 1) {
        if (e & 1U) {
            result *= base;
        }
        base *= base;
    }
    return result;
}

// Largest absolute null component; a convenient size measure for tolerances.
inline double null_abs(const SplitComplex& z) { return std::max(std::abs(z.p()), std::abs(z.q())); }

// Shortest decimal text that reads back to exactly the same double.
inline std::string format_double(double x)
{
    if (x == 0.0) {
        return "0";
    }
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

// Literal syntax: "a", "a+bJ", "a-bJ", "bJ".
inline std::string to_string(const SplitComplex& z)
{
    if (z.im() == 0.0) {
        return format_double(z.re());
    }
    if (z.re() == 0.0) {
        return format_double(z.im()) + "J";
    }
    std::string out = format_double(z.re());
    out += z.im() < 0.0 ? "-" : "+";
    out += format_double(std::abs(z.im()));
    out += "J";
    return out;
}

namespace detail {

inline bool parse_real(std::string_view text, double& out)
{
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    if (text.empty()) {
        return false;
    }
    const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc{} && res.ptr == text.data() + text.size();
}

} // namespace detail

// Inverse of to_string; also accepts a leading sign and lower-case j.
inline SplitComplex parse_split_complex(std::string_view text)
{
    std::string s;
    for (char c : text) {
        if (c != ' ' && c != '\t') {
            s.push_back(c);
        }
    }
    const auto fail = [&]() -> SplitComplex {
        throw SyntaxError("malformed double-number literal '" + std::string(text) + "'", 0, {"a", "a+bJ", "bJ"});
    };
    if (s.empty()) {
        return fail();
    }
    const bool has_j = s.back() == 'j' || s.back() == 'J';
    if (!has_j) {
        double re = 0.0;
        if (!detail::parse_real(s, re)) {
            return fail();
        }
        return {re, 0.0};
    }
    s.pop_back();
    // Split at the last sign that is not the leading sign and not an exponent sign.
    std::size_t split = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    double re = 0.0;
    double im = 0.0;
    std::string im_text = split == std::string::npos ? s : s.substr(split);
    if (split != std::string::npos && !detail::parse_real(s.substr(0, split), re)) {
        return fail();
    }
    if (im_text.empty() || im_text == "+" || im_text == "-") {
        im_text += "1";
    }
    if (!detail::parse_real(im_text, im)) {
        return fail();
    }
    return {re, im};
}

} // namespace lmsurf
