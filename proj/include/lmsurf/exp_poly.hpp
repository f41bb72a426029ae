#pragma once

// Exponential polynomials sum_k c_k z^{n_k} e^{lambda_k z}: the fragment of the
// expression grammar that is closed under integration (up to the z^-1 term).

#include <cmath>
#include <map>
#include <optional>
#include <tuple>
#include <utility>

#include "expr.hpp"
#include "split_complex.hpp"

namespace lmsurf {

class ExpPoly {
public:
    struct Key {
        int n = 0;
        SplitComplex lambda;

        friend bool operator<(const Key& a, const Key& b)
        {
            return std::make_tuple(a.lambda.re(), a.lambda.im(), a.n) <
                   std::make_tuple(b.lambda.re(), b.lambda.im(), b.n);
        }
    };

    using Terms = std::map<Key, SplitComplex>;

    ExpPoly() = default;
    static ExpPoly constant(const SplitComplex& c) { return monomial(c, 0, 0.0); }
    static ExpPoly monomial(const SplitComplex& c, int n, const SplitComplex& lambda)
    {
        ExpPoly out;
        out.add_term({n, lambda}, c);
        return out;
    }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_single_term() const { return terms_.size() == 1; }

    std::optional<SplitComplex> as_constant() const
    {
        if (terms_.empty()) {
            return SplitComplex{0.0};
        }
        if (terms_.size() == 1 && terms_.begin()->first.n == 0 && terms_.begin()->first.lambda == SplitComplex{0.0}) {
            return terms_.begin()->second;
        }
        return std::nullopt;
    }

    // Highest power of z among exponential-free terms, or nullopt if any exponential remains.
    std::optional<int> polynomial_degree() const
    {
        int deg = 0;
        for (const auto& [k, c] : terms_) {
            if (!(k.lambda == SplitComplex{0.0}) || k.n < 0) {
                return std::nullopt;
            }
            deg = std::max(deg, k.n);
        }
        return deg;
    }

    void add_term(const Key& k, const SplitComplex& c)
    {
        if (c == SplitComplex{0.0}) {
            return;
        }
        auto [it, inserted] = terms_.try_emplace(k, c);
        if (!inserted) {
            it->second += c;
            if (it->second == SplitComplex{0.0}) {
                terms_.erase(it);
            }
        }
    }

    // Drops coefficients that are negligible against the largest one.
    ExpPoly pruned(double rel_tol = 1e-15) const
    {
        double scale = 0.0;
        for (const auto& [k, c] : terms_) {
            scale = std::max(scale, null_abs(c));
        }
        ExpPoly out;
        for (const auto& [k, c] : terms_) {
            if (null_abs(c) > rel_tol * scale) {
                out.terms_.emplace(k, c);
            }
        }
        return out;
    }

    friend ExpPoly operator+(ExpPoly a, const ExpPoly& b)
    {
        for (const auto& [k, c] : b.terms_) {
            a.add_term(k, c);
        }
        return a;
    }
    friend ExpPoly operator-(const ExpPoly& a) { return a.scaled(-1.0); }
    friend ExpPoly operator-(const ExpPoly& a, const ExpPoly& b) { return a + (-b); }
    friend ExpPoly operator*(const ExpPoly& a, const ExpPoly& b)
    {
        ExpPoly out;
        for (const auto& [ka, ca] : a.terms_) {
            for (const auto& [kb, cb] : b.terms_) {
                out.add_term({ka.n + kb.n, ka.lambda + kb.lambda}, ca * cb);
            }
        }
        return out;
    }

    ExpPoly scaled(const SplitComplex& s) const
    {
        ExpPoly out;
        for (const auto& [k, c] : terms_) {
            out.add_term(k, c * s);
        }
        return out;
    }

    HoloExpr to_expr() const;

private:
    Terms terms_;
};

namespace detail {

inline constexpr std::size_t exp_poly_max_terms = 256;

inline std::optional<ExpPoly> normalize(const HoloExpr& e)
{
    using K = HoloExpr::Kind;
    switch (e.kind()) {
    case K::Constant:
        return ExpPoly::constant(e.value());
    case K::Variable:
        return ExpPoly::monomial(1.0, 1, 0.0);
    case K::Add:
    case K::Sub: {
        auto a = normalize(e.lhs());
        auto b = a ? normalize(e.rhs()) : std::nullopt;
        if (!b) {
            return std::nullopt;
        }
        return e.kind() == K::Add ? *a + *b : *a - *b;
    }
    case K::Neg: {
        auto a = normalize(e.arg());
        return a ? std::optional<ExpPoly>(-*a) : std::nullopt;
    }
    case K::Mul: {
        auto a = normalize(e.lhs());
        auto b = a ? normalize(e.rhs()) : std::nullopt;
        if (!b || a->terms().size() * b->terms().size() > exp_poly_max_terms) {
            return std::nullopt;
        }
        return *a * *b;
    }
    case K::Div: {
        auto a = normalize(e.lhs());
        auto b = a ? normalize(e.rhs()) : std::nullopt;
        if (!b || !b->is_single_term()) {
            return std::nullopt;
        }
        const auto& [k, c] = *b->terms().begin();
        if (!is_invertible(c)) {
            return std::nullopt;
        }
        return *a * ExpPoly::monomial(inverse(c), -k.n, -k.lambda);
    }
    case K::Pow: {
        auto a = normalize(e.lhs());
        if (!a) {
            return std::nullopt;
        }
        int n = e.exponent();
        if (n < 0) {
            if (!a->is_single_term()) {
                return std::nullopt;
            }
            const auto& [k, c] = *a->terms().begin();
            if (!is_invertible(c)) {
                return std::nullopt;
            }
            a = ExpPoly::monomial(inverse(c), -k.n, -k.lambda);
            n = -n;
        }
        ExpPoly out = ExpPoly::constant(1.0);
        for (int i = 0; i < n; ++i) {
            if (out.terms().size() * a->terms().size() > exp_poly_max_terms) {
                return std::nullopt;
            }
            out = out * *a;
        }
        return out;
    }
    case K::Exp: {
        // exp(a + lambda z) only.
        auto a = normalize(e.arg());
        if (!a) {
            return std::nullopt;
        }
        SplitComplex shift{0.0};
        SplitComplex lambda{0.0};
        for (const auto& [k, c] : a->terms()) {
            if (!(k.lambda == SplitComplex{0.0}) || k.n < 0 || k.n > 1) {
                return std::nullopt;
            }
            (k.n == 0 ? shift : lambda) = c;
        }
        return ExpPoly::monomial(exp(shift), 0, lambda);
    }
    case K::Sqrt: {
        auto a = normalize(e.arg());
        if (!a) {
            return std::nullopt;
        }
        auto c = a->as_constant();
        if (!c || c->p() < 0.0 || c->q() < 0.0) {
            return std::nullopt;
        }
        return ExpPoly::constant(sqrt(*c));
    }
    }
    return std::nullopt;
}

inline HoloExpr term_expr(const SplitComplex& c, int n, const SplitComplex& lambda)
{
    HoloExpr out = cst(c);
    if (n == 1) {
        out = out * var_z();
    }
    else if (n != 0) {
        out = out * pow(var_z(), n);
    }
    if (!(lambda == SplitComplex{0.0})) {
        out = out * exp(cst(lambda) * var_z());
    }
    return simplify(out);
}

} // namespace detail

inline HoloExpr ExpPoly::to_expr() const
{
    if (terms_.empty()) {
        return cst(0.0);
    }
    // Descending powers read more naturally ("z^3 + 2*z + 1").
    std::optional<HoloExpr> out;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const HoloExpr t = detail::term_expr(it->second, it->first.n, it->first.lambda);
        out = out ? *out + t : t;
    }
    return simplify(*out);
}

// Normal form of e as an exponential polynomial, if e lies in that fragment.
inline std::optional<ExpPoly> to_exp_poly(const HoloExpr& e) { return detail::normalize(simplify(e)); }

inline std::optional<HoloExpr> antiderivative(const HoloExpr& e)
{
    auto poly = to_exp_poly(e);
    if (!poly) {
        return std::nullopt;
    }
    ExpPoly result;
    for (const auto& [k, c] : poly->terms()) {
        if (k.lambda == SplitComplex{0.0}) {
            if (k.n == -1) {
                return std::nullopt;
            }
            result.add_term({k.n + 1, 0.0}, c / SplitComplex{static_cast<double>(k.n + 1)});
            continue;
        }
        if (k.n < 0 || !is_invertible(k.lambda)) {
            return std::nullopt;
        }
        // int z^n e^{lz} = e^{lz} sum_k (-1)^k n!/(n-k)! z^{n-k} / l^{k+1}
        const SplitComplex inv_l = inverse(k.lambda);
        SplitComplex factor = c * inv_l;
        for (int i = 0; i <= k.n; ++i) {
            result.add_term({k.n - i, k.lambda}, factor);
            factor = factor * SplitComplex{-static_cast<double>(k.n - i)} * inv_l;
        }
    }
    return result.to_expr();
}

} // namespace lmsurf
