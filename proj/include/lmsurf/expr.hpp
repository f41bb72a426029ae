#pragma once

// Immutable expression trees for holomorphic functions of one double variable.
//
// The grammar is closed under differentiation: constants, the variable z, the
// four arithmetic operations, integer powers, exp and sqrt. Nodes are shared and
// never mutated, so a HoloExpr can be evaluated concurrently without locking.

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "errors.hpp"
#include "split_complex.hpp"

namespace lmsurf {

struct Rect {
    double u_min = 0.0;
    double u_max = 0.0;
    double v_min = 0.0;
    double v_max = 0.0;

    bool contains(double u, double v) const { return u >= u_min && u <= u_max && v >= v_min && v <= v_max; }
    SplitComplex center() const { return {0.5 * (u_min + u_max), 0.5 * (v_min + v_max)}; }
};

enum class NullBranch { Plus, Minus };

class HoloExpr {
public:
    enum class Kind : std::uint8_t { Constant, Variable, Add, Sub, Mul, Div, Neg, Pow, Exp, Sqrt };

    HoloExpr() : HoloExpr(constant(0.0)) {}

    static HoloExpr constant(const SplitComplex& c)
    {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Constant;
        n->value = c;
        return HoloExpr(std::move(n));
    }

    static HoloExpr variable()
    {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Variable;
        return HoloExpr(std::move(n));
    }

    static HoloExpr binary(Kind kind, const HoloExpr& lhs, const HoloExpr& rhs)
    {
        auto n = std::make_shared<Node>();
        n->kind = kind;
        n->lhs = lhs.node_;
        n->rhs = rhs.node_;
        return HoloExpr(std::move(n));
    }

    static HoloExpr unary(Kind kind, const HoloExpr& arg)
    {
        auto n = std::make_shared<Node>();
        n->kind = kind;
        n->lhs = arg.node_;
        return HoloExpr(std::move(n));
    }

    static HoloExpr power(const HoloExpr& base, int exponent)
    {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Pow;
        n->lhs = base.node_;
        n->exponent = exponent;
        return HoloExpr(std::move(n));
    }

    Kind kind() const { return node_->kind; }
    const SplitComplex& value() const { return node_->value; }
    int exponent() const { return node_->exponent; }
    HoloExpr lhs() const { return HoloExpr(node_->lhs); }
    HoloExpr rhs() const { return HoloExpr(node_->rhs); }
    HoloExpr arg() const { return HoloExpr(node_->lhs); }

    bool is_constant() const { return kind() == Kind::Constant; }
    bool is_constant(const SplitComplex& c) const { return is_constant() && value() == c; }

    const std::optional<Rect>& domain_hint() const { return domain_hint_; }
    HoloExpr with_domain_hint(const Rect& r) const
    {
        HoloExpr copy = *this;
        copy.domain_hint_ = r;
        return copy;
    }

    bool same_node(const HoloExpr& o) const { return node_ == o.node_; }

private:
    struct Node {
        Kind kind = Kind::Constant;
        SplitComplex value;
        int exponent = 0;
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;
    };

    explicit HoloExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    std::shared_ptr<const Node> node_;
    std::optional<Rect> domain_hint_;
};

inline HoloExpr operator+(const HoloExpr& a, const HoloExpr& b) { return HoloExpr::binary(HoloExpr::Kind::Add, a, b); }
inline HoloExpr operator-(const HoloExpr& a, const HoloExpr& b) { return HoloExpr::binary(HoloExpr::Kind::Sub, a, b); }
inline HoloExpr operator*(const HoloExpr& a, const HoloExpr& b) { return HoloExpr::binary(HoloExpr::Kind::Mul, a, b); }
inline HoloExpr operator/(const HoloExpr& a, const HoloExpr& b) { return HoloExpr::binary(HoloExpr::Kind::Div, a, b); }
inline HoloExpr operator-(const HoloExpr& a) { return HoloExpr::unary(HoloExpr::Kind::Neg, a); }
inline HoloExpr pow(const HoloExpr& a, int n) { return HoloExpr::power(a, n); }
inline HoloExpr exp(const HoloExpr& a) { return HoloExpr::unary(HoloExpr::Kind::Exp, a); }
inline HoloExpr sqrt(const HoloExpr& a) { return HoloExpr::unary(HoloExpr::Kind::Sqrt, a); }
inline HoloExpr cst(const SplitComplex& c) { return HoloExpr::constant(c); }
inline HoloExpr var_z() { return HoloExpr::variable(); }

inline bool structurally_equal(const HoloExpr& a, const HoloExpr& b)
{
    using K = HoloExpr::Kind;
    if (a.same_node(b)) {
        return true;
    }
    if (a.kind() != b.kind()) {
        return false;
    }
    switch (a.kind()) {
    case K::Constant:
        return a.value() == b.value();
    case K::Variable:
        return true;
    case K::Add:
    case K::Sub:
    case K::Mul:
    case K::Div:
        return structurally_equal(a.lhs(), b.lhs()) && structurally_equal(a.rhs(), b.rhs());
    case K::Pow:
        return a.exponent() == b.exponent() && structurally_equal(a.lhs(), b.lhs());
    case K::Neg:
    case K::Exp:
    case K::Sqrt:
        return structurally_equal(a.arg(), b.arg());
    }
    return false;
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline int precedence(const HoloExpr& e)
{
    using K = HoloExpr::Kind;
    switch (e.kind()) {
    case K::Add:
    case K::Sub:
        return 1;
    case K::Mul:
    case K::Div:
        return 2;
    case K::Neg:
        return 3;
    case K::Pow:
        return 4;
    case K::Constant: {
        const SplitComplex& c = e.value();
        const bool plain_real = c.im() == 0.0 && !std::signbit(c.re());
        const bool plain_imag = c.re() == 0.0 && !std::signbit(c.im()) && c.im() != 0.0;
        return plain_real || plain_imag ? 5 : 0;
    }
    default:
        return 5;
    }
}

inline std::string print_node(const HoloExpr& e, const std::string& var);

inline std::string print_child(const HoloExpr& child, int min_prec, const std::string& var)
{
    const std::string s = print_node(child, var);
    return precedence(child) >= min_prec ? s : "(" + s + ")";
}

inline std::string print_node(const HoloExpr& e, const std::string& var)
{
    using K = HoloExpr::Kind;
    switch (e.kind()) {
    case K::Constant:
        return to_string(e.value());
    case K::Variable:
        return var;
    case K::Add:
        return print_child(e.lhs(), 1, var) + " + " +
               (e.rhs().kind() == K::Neg ? "(" + print_node(e.rhs(), var) + ")" : print_child(e.rhs(), 2, var));
    case K::Sub:
        return print_child(e.lhs(), 1, var) + " - " +
               (e.rhs().kind() == K::Neg ? "(" + print_node(e.rhs(), var) + ")" : print_child(e.rhs(), 2, var));
    case K::Mul:
        return print_child(e.lhs(), 2, var) + "*" + print_child(e.rhs(), 3, var);
    case K::Div:
        return print_child(e.lhs(), 2, var) + "/" + print_child(e.rhs(), 3, var);
    case K::Neg:
        return "-" + print_child(e.arg(), 3, var);
    case K::Pow:
        return print_child(e.lhs(), 5, var) + "^" + std::to_string(e.exponent());
    case K::Exp:
        return "exp(" + print_node(e.arg(), var) + ")";
    case K::Sqrt:
        return "sqrt(" + print_node(e.arg(), var) + ")";
    }
    return {};
}

} // namespace detail

// Text that parses back to a structurally identical tree (for parsed trees);
// `var` renames the variable for display only.
inline std::string to_string(const HoloExpr& e, const std::string& var = "z") { return detail::print_node(e, var); }

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

template <class Fn>
auto with_context(const HoloExpr& node, Fn&& fn) -> decltype(fn())
{
    try {
        return fn();
    }
    catch (const ZeroDivisor& err) {
        throw ZeroDivisor(std::string(err.what()) + " in '" + to_string(node) + "'");
    }
    catch (const NoSquareRoot& err) {
        throw NoSquareRoot(std::string(err.what()) + " in '" + to_string(node) + "'");
    }
}

} // namespace detail

inline SplitComplex eval(const HoloExpr& e, const SplitComplex& z)
{
    using K = HoloExpr::Kind;
    switch (e.kind()) {
    case K::Constant:
        return e.value();
    case K::Variable:
        return z;
    case K::Add:
        return eval(e.lhs(), z) + eval(e.rhs(), z);
    case K::Sub:
        return eval(e.lhs(), z) - eval(e.rhs(), z);
    case K::Mul:
        return eval(e.lhs(), z) * eval(e.rhs(), z);
    case K::Div: {
        const SplitComplex num = eval(e.lhs(), z);
        const SplitComplex den = eval(e.rhs(), z);
        return detail::with_context(e, [&] { return num / den; });
    }
    case K::Neg:
        return -eval(e.arg(), z);
    case K::Pow: {
        const SplitComplex base = eval(e.lhs(), z);
        return detail::with_context(e, [&] { return pow(base, e.exponent()); });
    }
    case K::Exp:
        return exp(eval(e.arg(), z));
    case K::Sqrt: {
        const SplitComplex a = eval(e.arg(), z);
        return detail::with_context(e, [&] { return sqrt(a); });
    }
    }
    return {};
}

// The real function induced on one null coordinate: eval(F, p e+ + q e-) equals
// eval_branch(F, p, Plus) e+ + eval_branch(F, q, Minus) e-.
inline double eval_branch(const HoloExpr& e, double x, NullBranch branch)
{
    using K = HoloExpr::Kind;
    const auto pick = [branch](const SplitComplex& c) { return branch == NullBranch::Plus ? c.p() : c.q(); };
    switch (e.kind()) {
    case K::Constant:
        return pick(e.value());
    case K::Variable:
        return x;
    case K::Add:
        return eval_branch(e.lhs(), x, branch) + eval_branch(e.rhs(), x, branch);
    case K::Sub:
        return eval_branch(e.lhs(), x, branch) - eval_branch(e.rhs(), x, branch);
    case K::Mul:
        return eval_branch(e.lhs(), x, branch) * eval_branch(e.rhs(), x, branch);
    case K::Div: {
        const double num = eval_branch(e.lhs(), x, branch);
        const double den = eval_branch(e.rhs(), x, branch);
        if (std::abs(den) <= null_epsilon * std::max(1.0, std::abs(num)) || !std::isfinite(den)) {
            throw ZeroDivisor("division by zero null component in '" + to_string(e) + "'");
        }
        return num / den;
    }
    case K::Neg:
        return -eval_branch(e.arg(), x, branch);
    case K::Pow: {
        const double base = eval_branch(e.lhs(), x, branch);
        if (e.exponent() < 0 && std::abs(base) <= null_epsilon) {
            throw ZeroDivisor("negative power of zero null component in '" + to_string(e) + "'");
        }
        return std::pow(base, e.exponent());
    }
    case K::Exp:
        return std::exp(eval_branch(e.arg(), x, branch));
    case K::Sqrt: {
        const double a = eval_branch(e.arg(), x, branch);
        if (a < -null_epsilon * std::max(1.0, std::abs(a)) || std::isnan(a)) {
            throw NoSquareRoot("negative null component under sqrt in '" + to_string(e) + "'");
        }
        return std::sqrt(std::max(a, 0.0));
    }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Simplification, substitution, differentiation

// Local rewrites only: constant folding and the 0/1 identities. Not a CAS.
inline HoloExpr simplify(const HoloExpr& e)
{
    using K = HoloExpr::Kind;
    const SplitComplex zero{0.0};
    const SplitComplex one{1.0};
    switch (e.kind()) {
    case K::Constant:
    case K::Variable:
        return e;
    case K::Add: {
        const HoloExpr a = simplify(e.lhs());
        const HoloExpr b = simplify(e.rhs());
        if (a.is_constant() && b.is_constant()) {
            return cst(a.value() + b.value());
        }
        if (a.is_constant(zero)) {
            return b;
        }
        if (b.is_constant(zero)) {
            return a;
        }
        if (b.kind() == K::Neg) {
            return a - b.arg();
        }
        return a + b;
    }
    case K::Sub: {
        const HoloExpr a = simplify(e.lhs());
        const HoloExpr b = simplify(e.rhs());
        if (a.is_constant() && b.is_constant()) {
            return cst(a.value() - b.value());
        }
        if (b.is_constant(zero)) {
            return a;
        }
        if (a.is_constant(zero)) {
            return simplify(-b);
        }
        return a - b;
    }
    case K::Mul: {
        HoloExpr a = simplify(e.lhs());
        HoloExpr b = simplify(e.rhs());
        if (b.is_constant() && !a.is_constant()) {
            std::swap(a, b);
        }
        if (a.is_constant() && b.is_constant()) {
            return cst(a.value() * b.value());
        }
        if (a.is_constant(zero)) {
            return cst(zero);
        }
        if (a.is_constant(one)) {
            return b;
        }
        if (a.is_constant(-one)) {
            return simplify(-b);
        }
        if (a.is_constant() && b.kind() == K::Mul && b.lhs().is_constant()) {
            return simplify(cst(a.value() * b.lhs().value()) * b.rhs());
        }
        if (a.is_constant() && b.kind() == K::Neg) {
            return simplify(cst(-a.value()) * b.arg());
        }
        return a * b;
    }
    case K::Div: {
        const HoloExpr a = simplify(e.lhs());
        const HoloExpr b = simplify(e.rhs());
        if (b.is_constant(one)) {
            return a;
        }
        if (a.is_constant() && b.is_constant() && is_invertible(b.value())) {
            return cst(a.value() / b.value());
        }
        if (b.is_constant() && is_invertible(b.value())) {
            return simplify(cst(inverse(b.value())) * a);
        }
        if (a.is_constant(zero)) {
            return cst(zero);
        }
        return a / b;
    }
    case K::Neg: {
        const HoloExpr a = simplify(e.arg());
        if (a.is_constant()) {
            return cst(-a.value());
        }
        if (a.kind() == K::Neg) {
            return a.arg();
        }
        if (a.kind() == K::Mul && a.lhs().is_constant()) {
            return simplify(cst(-a.lhs().value()) * a.rhs());
        }
        return -a;
    }
    case K::Pow: {
        const HoloExpr a = simplify(e.lhs());
        if (e.exponent() == 0) {
            return cst(one);
        }
        if (e.exponent() == 1) {
            return a;
        }
        if (a.is_constant() && (e.exponent() > 0 || is_invertible(a.value()))) {
            return cst(pow(a.value(), e.exponent()));
        }
        if (a.kind() == K::Pow) {
            return simplify(pow(a.lhs(), a.exponent() * e.exponent()));
        }
        return pow(a, e.exponent());
    }
    case K::Exp: {
        const HoloExpr a = simplify(e.arg());
        if (a.is_constant()) {
            return cst(exp(a.value()));
        }
        return exp(a);
    }
    case K::Sqrt: {
        const HoloExpr a = simplify(e.arg());
        if (a.is_constant()) {
            const NullCoords nc = a.value().to_null();
            if (nc.p >= 0.0 && nc.q >= 0.0) {
                return cst(sqrt(a.value()));
            }
        }
        return sqrt(a);
    }
    }
    return e;
}

// F(w(z)): every occurrence of the variable replaced by `inner`.
inline HoloExpr substitute(const HoloExpr& e, const HoloExpr& inner)
{
    using K = HoloExpr::Kind;
    switch (e.kind()) {
    case K::Constant:
        return e;
    case K::Variable:
        return inner;
    case K::Add:
    case K::Sub:
    case K::Mul:
    case K::Div:
        return HoloExpr::binary(e.kind(), substitute(e.lhs(), inner), substitute(e.rhs(), inner));
    case K::Pow:
        return pow(substitute(e.lhs(), inner), e.exponent());
    case K::Neg:
    case K::Exp:
    case K::Sqrt:
        return HoloExpr::unary(e.kind(), substitute(e.arg(), inner));
    }
    return e;
}

namespace detail {

inline HoloExpr derive(const HoloExpr& e)
{
    using K = HoloExpr::Kind;
    switch (e.kind()) {
    case K::Constant:
        return cst(0.0);
    case K::Variable:
        return cst(1.0);
    case K::Add:
        return derive(e.lhs()) + derive(e.rhs());
    case K::Sub:
        return derive(e.lhs()) - derive(e.rhs());
    case K::Mul:
        return derive(e.lhs()) * e.rhs() + e.lhs() * derive(e.rhs());
    case K::Div:
        return (derive(e.lhs()) * e.rhs() - e.lhs() * derive(e.rhs())) / pow(e.rhs(), 2);
    case K::Neg:
        return -derive(e.arg());
    case K::Pow:
        return cst(static_cast<double>(e.exponent())) * pow(e.lhs(), e.exponent() - 1) * derive(e.lhs());
    case K::Exp:
        return e * derive(e.arg());
    case K::Sqrt:
        return derive(e.arg()) / (cst(2.0) * e);
    }
    return cst(0.0);
}

} // namespace detail

inline HoloExpr derivative(const HoloExpr& e) { return simplify(detail::derive(simplify(e))); }

} // namespace lmsurf
