#pragma once

// Polynomials: real univariate (null components), double-number univariate
// (curves), and real bivariate (parametrizations x(u, v)).

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "expr.hpp"
#include "split_complex.hpp"
#include "weierstrass.hpp"

namespace lmsurf {

// ---------------------------------------------------------------------------
// Real univariate, coefficients low to high.

class RealPoly {
public:
    RealPoly() = default;
    explicit RealPoly(std::vector<double> c) : c_(std::move(c)) { trim(); }

    const std::vector<double>& coeffs() const { return c_; }
    double operator[](std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
    bool is_zero() const { return c_.empty(); }
    double lead() const { return c_.empty() ? 0.0 : c_.back(); }
    double max_abs() const
    {
        double m = 0.0;
        for (double x : c_) {
            m = std::max(m, std::abs(x));
        }
        return m;
    }

    double operator()(double x) const
    {
        double r = 0.0;
        for (std::size_t k = c_.size(); k-- > 0;) {
            r = r * x + c_[k];
        }
        return r;
    }

    // Drops coefficients with |c| <= tol.
    RealPoly pruned(double tol) const
    {
        std::vector<double> c = c_;
        for (double& x : c) {
            if (std::abs(x) <= tol) {
                x = 0.0;
            }
        }
        return RealPoly(std::move(c));
    }

    friend RealPoly operator+(const RealPoly& a, const RealPoly& b)
    {
        std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
        for (std::size_t k = 0; k < c.size(); ++k) {
            c[k] = a[k] + b[k];
        }
        return RealPoly(std::move(c));
    }
    friend RealPoly operator-(const RealPoly& a, const RealPoly& b) { return a + (-1.0) * b; }
    friend RealPoly operator*(double s, const RealPoly& a)
    {
        std::vector<double> c = a.c_;
        for (double& x : c) {
            x *= s;
        }
        return RealPoly(std::move(c));
    }
    friend RealPoly operator*(const RealPoly& a, const RealPoly& b)
    {
        if (a.is_zero() || b.is_zero()) {
            return {};
        }
        std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            for (std::size_t k = 0; k < b.c_.size(); ++k) {
                c[i + k] += a.c_[i] * b.c_[k];
            }
        }
        return RealPoly(std::move(c));
    }

private:
    void trim()
    {
        while (!c_.empty() && c_.back() == 0.0) {
            c_.pop_back();
        }
    }

    std::vector<double> c_;
};

// Quotient and remainder; remainder coefficients below tol are dropped.
inline std::pair<RealPoly, RealPoly> divmod(const RealPoly& a, const RealPoly& b, double tol)
{
    if (b.is_zero()) {
        throw ZeroDivisor("polynomial division by zero");
    }
    std::vector<double> r = a.coeffs();
    const int db = b.degree();
    std::vector<double> q(static_cast<std::size_t>(std::max(0, a.degree() - db + 1)), 0.0);
    for (int k = a.degree() - db; k >= 0; --k) {
        const double t = r[static_cast<std::size_t>(k + db)] / b.lead();
        q[static_cast<std::size_t>(k)] = t;
        for (int i = 0; i <= db; ++i) {
            r[static_cast<std::size_t>(k + i)] -= t * b[static_cast<std::size_t>(i)];
        }
        r[static_cast<std::size_t>(k + db)] = 0.0;
    }
    return {RealPoly(std::move(q)), RealPoly(std::move(r)).pruned(tol)};
}

// Monic greatest common divisor (Euclid with a coefficient tolerance).
inline RealPoly gcd(RealPoly a, RealPoly b, double tol)
{
    a = a.pruned(tol);
    b = b.pruned(tol);
    while (!b.is_zero()) {
        RealPoly r = divmod(a, b, tol * std::max(1.0, a.max_abs())).second;
        a = std::move(b);
        b = std::move(r);
    }
    if (a.is_zero()) {
        return a;
    }
    return (1.0 / a.lead()) * a;
}

// ---------------------------------------------------------------------------
// Double-number univariate, coefficients low to high.

class DPoly {
public:
    DPoly() = default;
    explicit DPoly(std::vector<SplitComplex> c) : c_(std::move(c)) { trim(); }

    static DPoly from_null(const RealPoly& plus, const RealPoly& minus)
    {
        std::vector<SplitComplex> c(static_cast<std::size_t>(std::max(plus.degree(), minus.degree()) + 1));
        for (std::size_t k = 0; k < c.size(); ++k) {
            c[k] = SplitComplex::from_null(plus[k], minus[k]);
        }
        return DPoly(std::move(c));
    }

    const std::vector<SplitComplex>& coeffs() const { return c_; }
    SplitComplex operator[](std::size_t k) const { return k < c_.size() ? c_[k] : SplitComplex{}; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }

    RealPoly null_component(NullBranch b) const
    {
        std::vector<double> c(c_.size());
        for (std::size_t k = 0; k < c_.size(); ++k) {
            c[k] = b == NullBranch::Plus ? c_[k].p() : c_[k].q();
        }
        return RealPoly(std::move(c));
    }

    double max_abs() const
    {
        double m = 0.0;
        for (const auto& x : c_) {
            m = std::max(m, null_abs(x));
        }
        return m;
    }

    DPoly pruned(double tol) const
    {
        return from_null(null_component(NullBranch::Plus).pruned(tol), null_component(NullBranch::Minus).pruned(tol));
    }

    SplitComplex operator()(const SplitComplex& z) const
    {
        SplitComplex r;
        for (std::size_t k = c_.size(); k-- > 0;) {
            r = r * z + c_[k];
        }
        return r;
    }

    DPoly derivative() const
    {
        std::vector<SplitComplex> c;
        for (std::size_t k = 1; k < c_.size(); ++k) {
            c.push_back(static_cast<double>(k) * c_[k]);
        }
        return DPoly(std::move(c));
    }

    // Antiderivative vanishing at 0.
    DPoly integral() const
    {
        std::vector<SplitComplex> c(c_.size() + 1);
        for (std::size_t k = 0; k < c_.size(); ++k) {
            c[k + 1] = c_[k] / static_cast<double>(k + 1);
        }
        return DPoly(std::move(c));
    }

    friend DPoly operator+(const DPoly& a, const DPoly& b)
    {
        std::vector<SplitComplex> c(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t k = 0; k < c.size(); ++k) {
            c[k] = a[k] + b[k];
        }
        return DPoly(std::move(c));
    }
    friend DPoly operator*(const SplitComplex& s, const DPoly& a)
    {
        std::vector<SplitComplex> c = a.c_;
        for (auto& x : c) {
            x = s * x;
        }
        return DPoly(std::move(c));
    }
    friend DPoly operator-(const DPoly& a, const DPoly& b) { return a + SplitComplex(-1.0) * b; }
    friend DPoly operator*(const DPoly& a, const DPoly& b)
    {
        if (a.is_zero() || b.is_zero()) {
            return {};
        }
        std::vector<SplitComplex> c(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            for (std::size_t k = 0; k < b.c_.size(); ++k) {
                c[i + k] += a.c_[i] * b.c_[k];
            }
        }
        return DPoly(std::move(c));
    }

    HoloExpr to_expr() const
    {
        HoloExpr e = cst(0.0);
        for (std::size_t k = c_.size(); k-- > 0;) {
            if (c_[k] == SplitComplex{}) {
                continue;
            }
            HoloExpr term = k == 0 ? cst(c_[k]) : cst(c_[k]) * (k == 1 ? var_z() : pow(var_z(), static_cast<int>(k)));
            e = e + term;
        }
        return simplify(e);
    }

private:
    void trim()
    {
        while (!c_.empty() && c_.back() == SplitComplex{}) {
            c_.pop_back();
        }
    }

    std::vector<SplitComplex> c_;
};

// ---------------------------------------------------------------------------
// Real bivariate: (i, j) -> coefficient of u^i v^j.

class Poly2 {
public:
    using Monomial = std::pair<int, int>;

    Poly2() = default;
    static Poly2 constant(double c) { return Poly2().add(0, 0, c); }
    static Poly2 u() { return Poly2().add(1, 0, 1.0); }
    static Poly2 v() { return Poly2().add(0, 1, 1.0); }

    Poly2& add(int i, int j, double c)
    {
        if (i < 0 || j < 0) {
            throw InvalidParams("negative exponent in polynomial");
        }
        if (c != 0.0) {
            double& slot = c_[{i, j}];
            slot += c;
            if (slot == 0.0) {
                c_.erase({i, j});
            }
        }
        return *this;
    }

    const std::map<Monomial, double>& terms() const { return c_; }
    double coeff(int i, int j) const
    {
        const auto it = c_.find({i, j});
        return it == c_.end() ? 0.0 : it->second;
    }
    bool is_zero() const { return c_.empty(); }
    int degree() const
    {
        int d = -1;
        for (const auto& [m, c] : c_) {
            d = std::max(d, m.first + m.second);
        }
        return d;
    }
    double max_abs() const
    {
        double m = 0.0;
        for (const auto& [k, c] : c_) {
            m = std::max(m, std::abs(c));
        }
        return m;
    }

    Poly2 pruned(double tol) const
    {
        Poly2 out;
        for (const auto& [m, c] : c_) {
            if (std::abs(c) > tol) {
                out.add(m.first, m.second, c);
            }
        }
        return out;
    }

    double operator()(double u, double v) const
    {
        double r = 0.0;
        for (const auto& [m, c] : c_) {
            r += c * std::pow(u, m.first) * std::pow(v, m.second);
        }
        return r;
    }

    Poly2 du() const
    {
        Poly2 out;
        for (const auto& [m, c] : c_) {
            if (m.first > 0) {
                out.add(m.first - 1, m.second, c * m.first);
            }
        }
        return out;
    }
    Poly2 dv() const
    {
        Poly2 out;
        for (const auto& [m, c] : c_) {
            if (m.second > 0) {
                out.add(m.first, m.second - 1, c * m.second);
            }
        }
        return out;
    }

    friend Poly2 operator+(Poly2 a, const Poly2& b)
    {
        for (const auto& [m, c] : b.c_) {
            a.add(m.first, m.second, c);
        }
        return a;
    }
    friend Poly2 operator*(double s, const Poly2& a)
    {
        Poly2 out;
        for (const auto& [m, c] : a.c_) {
            out.add(m.first, m.second, s * c);
        }
        return out;
    }
    friend Poly2 operator-(const Poly2& a, const Poly2& b) { return a + (-1.0) * b; }
    friend Poly2 operator*(const Poly2& a, const Poly2& b)
    {
        Poly2 out;
        for (const auto& [ma, ca] : a.c_) {
            for (const auto& [mb, cb] : b.c_) {
                out.add(ma.first + mb.first, ma.second + mb.second, ca * cb);
            }
        }
        return out;
    }

private:
    std::map<Monomial, double> c_;
};

using Poly3 = std::array<Poly2, 3>;

// Real and imaginary parts of p(u + jv) as polynomials in (u, v).
inline std::pair<Poly2, Poly2> split_parts(const DPoly& p)
{
    Poly2 re, im;
    // (u + jv)^n = sum_k C(n,k) u^(n-k) v^k j^k, j^k = 1 for even k.
    for (int n = 0; n <= p.degree(); ++n) {
        const SplitComplex c = p[static_cast<std::size_t>(n)];
        double binom = 1.0;
        for (int k = 0; k <= n; ++k) {
            // c * binom * j^k u^(n-k) v^k
            const SplitComplex t = k % 2 == 0 ? c : c * j_unit;
            re.add(n - k, k, binom * t.re());
            im.add(n - k, k, binom * t.im());
            binom = binom * (n - k) / (k + 1);
        }
    }
    return {re, im};
}

inline Poly2 minkowski_inner(const Poly3& a, const Poly3& b) { return (-1.0) * (a[0] * b[0]) + a[1] * b[1] + a[2] * b[2]; }

// x = (x1, x2, x3), each of total degree <= 3.
struct CubicParametrization {
    Poly3 x;

    int degree() const { return std::max({x[0].degree(), x[1].degree(), x[2].degree()}); }
    double max_abs() const { return std::max({x[0].max_abs(), x[1].max_abs(), x[2].max_abs()}); }
    Vec3 operator()(double u, double v) const { return {x[0](u, v), x[1](u, v), x[2](u, v)}; }

    void validate() const
    {
        for (const auto& p : x) {
            if (p.degree() > 3) {
                throw InvalidParams("parametrization component of degree " + std::to_string(p.degree()) +
                                    " (at most 3 allowed)");
            }
        }
    }
};

// Part of the curve integral of three double polynomials.
inline CubicParametrization parametrization_from_curve(const std::array<DPoly, 3>& dpsi, Part part = Part::Real)
{
    CubicParametrization out;
    for (std::size_t k = 0; k < 3; ++k) {
        const auto [re, im] = split_parts(dpsi[k].integral());
        out.x[k] = part == Part::Real ? re : im;
    }
    return out;
}

// M x + t applied coefficientwise.
inline CubicParametrization transformed(const CubicParametrization& c, const Mat3& M, const Vec3& t = {0, 0, 0},
                                        double scale = 1.0)
{
    CubicParametrization out;
    for (int r = 0; r < 3; ++r) {
        Poly2 p = Poly2::constant(t[static_cast<std::size_t>(r)]);
        for (int k = 0; k < 3; ++k) {
            p = p + (scale * M[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)]) * c.x[static_cast<std::size_t>(k)];
        }
        out.x[static_cast<std::size_t>(r)] = p;
    }
    return out;
}

// Least-squares fit of a cubic to the valid points of a patch.
inline CubicParametrization fit_cubic(const SurfacePatch& patch)
{
    std::vector<std::pair<int, int>> mono;
    for (int d = 0; d <= 3; ++d) {
        for (int i = d; i >= 0; --i) {
            mono.emplace_back(i, d - i);
        }
    }
    const std::size_t n = mono.size();
    // Centre and scale the parameters for conditioning, then expand back.
    const double uc = 0.5 * (patch.domain.u_min + patch.domain.u_max);
    const double vc = 0.5 * (patch.domain.v_min + patch.domain.v_max);
    const double s = std::max({0.5 * (patch.domain.u_max - patch.domain.u_min),
                               0.5 * (patch.domain.v_max - patch.domain.v_min), 1e-300});
    std::vector<std::vector<double>> ata(n, std::vector<double>(n, 0.0));
    std::array<std::vector<double>, 3> atb;
    atb.fill(std::vector<double>(n, 0.0));
    std::size_t used = 0;
    for (int j = 0; j < patch.grid.nv; ++j) {
        for (int i = 0; i < patch.grid.nu; ++i) {
            if (!patch.is_valid(i, j)) {
                continue;
            }
            ++used;
            const double a = (patch.u_at(i) - uc) / s, b = (patch.v_at(j) - vc) / s;
            std::vector<double> row(n);
            for (std::size_t k = 0; k < n; ++k) {
                row[k] = std::pow(a, mono[k].first) * std::pow(b, mono[k].second);
            }
            const Vec3 p = patch.point(i, j);
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t c = 0; c < n; ++c) {
                    ata[r][c] += row[r] * row[c];
                }
                for (std::size_t q = 0; q < 3; ++q) {
                    atb[q][r] += row[r] * p[q];
                }
            }
        }
    }
    if (used < n) {
        throw InvalidParams("cubic fit needs at least 10 valid samples");
    }
    CubicParametrization out;
    for (std::size_t q = 0; q < 3; ++q) {
        std::vector<std::vector<double>> m = ata;
        std::vector<double> rhs = atb[q];
        for (std::size_t c = 0; c < n; ++c) {
            std::size_t piv = c;
            for (std::size_t r = c + 1; r < n; ++r) {
                if (std::abs(m[r][c]) > std::abs(m[piv][c])) {
                    piv = r;
                }
            }
            std::swap(m[c], m[piv]);
            std::swap(rhs[c], rhs[piv]);
            if (std::abs(m[c][c]) < 1e-14) {
                throw InvalidParams("cubic fit is rank deficient");
            }
            for (std::size_t r = c + 1; r < n; ++r) {
                const double k = m[r][c] / m[c][c];
                for (std::size_t c2 = c; c2 < n; ++c2) {
                    m[r][c2] -= k * m[c][c2];
                }
                rhs[r] -= k * rhs[c];
            }
        }
        std::vector<double> sol(n);
        for (std::size_t r = n; r-- > 0;) {
            double acc = rhs[r];
            for (std::size_t c = r + 1; c < n; ++c) {
                acc -= m[r][c] * sol[c];
            }
            sol[r] = acc / m[r][r];
        }
        // p(a, b) with a = (u - uc)/s, b = (v - vc)/s.
        const Poly2 a = (1.0 / s) * (Poly2::u() - Poly2::constant(uc));
        const Poly2 b = (1.0 / s) * (Poly2::v() - Poly2::constant(vc));
        Poly2 p;
        for (std::size_t k = 0; k < n; ++k) {
            Poly2 term = Poly2::constant(sol[k]);
            for (int e = 0; e < mono[k].first; ++e) {
                term = term * a;
            }
            for (int e = 0; e < mono[k].second; ++e) {
                term = term * b;
            }
            p = p + term;
        }
        out.x[q] = p;
    }
    return out;
}

} // namespace lmsurf
