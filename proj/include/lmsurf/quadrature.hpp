#pragma once

// Adaptive Gauss-Kronrod quadrature and straight-segment path integrals over D.

#include <array>
#include <cmath>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "errors.hpp"
#include "exp_poly.hpp"
#include "expr.hpp"

namespace lmsurf {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    int max_subdivisions = 10000;
};

namespace detail {

// 15-point Kronrod abscissae (non-negative half) and weights, with the embedded
// 7-point Gauss weights at the odd-indexed abscissae.
inline constexpr std::array<double, 8> gk15_x{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> gk15_wk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> g7_w{0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                            0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
    friend bool operator<(const Panel& x, const Panel& y) { return x.error < y.error; }
};

template <class Fn>
Panel gk15(Fn& fn, double a, double b)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = fn(c);
    double kron = gk15_wk[7] * fc;
    double gauss = g7_w[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * gk15_x[static_cast<std::size_t>(i)];
        const double s = fn(c - dx) + fn(c + dx);
        kron += gk15_wk[static_cast<std::size_t>(i)] * s;
        if (i % 2 == 1) {
            gauss += g7_w[static_cast<std::size_t>(i / 2)] * s;
        }
    }
    return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

} // namespace detail

// Integral of a real function over [a,b] (a > b allowed) to absolute tolerance.
template <class Fn>
double integrate_gk15(Fn&& fn, double a, double b, const QuadratureOptions& opt = {})
{
    if (a == b) {
        return 0.0;
    }
    std::priority_queue<detail::Panel> panels;
    detail::Panel first = detail::gk15(fn, a, b);
    double total = first.value;
    double error = first.error;
    panels.push(first);
    int splits = 0;
    while (error > opt.abs_tol) {
        if (!std::isfinite(total) || !std::isfinite(error)) {
            throw DomainError("integrand is not finite on [" + format_double(a) + ", " + format_double(b) + "]");
        }
        if (splits >= opt.max_subdivisions) {
            throw DomainError("quadrature did not converge on [" + format_double(a) + ", " + format_double(b) +
                              "] (error estimate " + format_double(error) + ")");
        }
        const detail::Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const detail::Panel left = detail::gk15(fn, worst.a, mid);
        const detail::Panel right = detail::gk15(fn, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++splits;
        if (splits % 64 == 0) {
            // Refresh the running sums to stop cancellation drift.
            auto copy = panels;
            total = 0.0;
            error = 0.0;
            while (!copy.empty()) {
                total += copy.top().value;
                error += copy.top().error;
                copy.pop();
            }
        }
    }
    if (!std::isfinite(total)) {
        throw DomainError("integrand is not finite on [" + format_double(a) + ", " + format_double(b) + "]");
    }
    return total;
}

// Integral of F along the straight segment z0 -> z1, done null coordinate by null
// coordinate. Evaluation failures inside the segment surface as DomainError.
inline SplitComplex integrate_numeric(const HoloExpr& f, const SplitComplex& z0, const SplitComplex& z1,
                                      const QuadratureOptions& opt = {})
{
    const auto branch_integral = [&](NullBranch br, double a, double b) {
        auto fn = [&](double x) { return eval_branch(f, x, br); };
        try {
            return integrate_gk15(fn, a, b, opt);
        }
        catch (const ZeroDivisor& err) {
            throw DomainError(std::string("singularity on integration segment: ") + err.what());
        }
        catch (const NoSquareRoot& err) {
            throw DomainError(std::string("integrand undefined on integration segment: ") + err.what());
        }
    };
    const double ip = branch_integral(NullBranch::Plus, z0.p(), z1.p());
    const double iq = branch_integral(NullBranch::Minus, z0.q(), z1.q());
    return SplitComplex::from_null(ip, iq);
}

// Straight-segment integral that prefers a symbolic antiderivative.
class PathIntegrator {
public:
    explicit PathIntegrator(HoloExpr integrand, QuadratureOptions opt = {})
        : integrand_(std::move(integrand)), antiderivative_(lmsurf::antiderivative(integrand_)), opt_(opt)
    {
        if (auto poly = to_exp_poly(integrand_)) {
            for (const auto& [k, c] : poly->terms()) {
                pole_at_origin_ = pole_at_origin_ || k.n < 0;
            }
        }
    }

    bool symbolic() const { return antiderivative_.has_value(); }
    const std::optional<HoloExpr>& primitive() const { return antiderivative_; }
    const HoloExpr& integrand() const { return integrand_; }

    SplitComplex operator()(const SplitComplex& z0, const SplitComplex& z1) const
    {
        if (antiderivative_) {
            // A primitive happily jumps over a pole; refuse segments that cross one.
            if (pole_at_origin_ && (z0.p() * z1.p() <= 0.0 || z0.q() * z1.q() <= 0.0)) {
                throw DomainError("integration segment meets the pole at a null line through 0");
            }
            try {
                return eval(*antiderivative_, z1) - eval(*antiderivative_, z0);
            }
            catch (const ZeroDivisor& err) {
                throw DomainError(std::string("antiderivative undefined: ") + err.what());
            }
            catch (const NoSquareRoot& err) {
                throw DomainError(std::string("antiderivative undefined: ") + err.what());
            }
        }
        return integrate_numeric(integrand_, z0, z1, opt_);
    }

private:
    HoloExpr integrand_;
    std::optional<HoloExpr> antiderivative_;
    QuadratureOptions opt_;
    bool pole_at_origin_ = false;
};

inline SplitComplex integrate_path(const HoloExpr& f, const SplitComplex& z0, const SplitComplex& z1,
                                   double tol = 1e-10)
{
    QuadratureOptions opt;
    opt.abs_tol = tol;
    return PathIntegrator(f, opt)(z0, z1);
}

} // namespace lmsurf
