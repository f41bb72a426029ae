#pragma once

// Dormand-Prince 5(4) for scalar autonomous-or-not ODEs y' = F(t, y), with a
// cubic Hermite dense output built from the accepted steps.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "split_complex.hpp"

namespace lmsurf {

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 1e-3;
    double h_max = 2.5e-3;
    double h_min = 1e-14;
    int max_steps = 2000000;
};

// Piecewise cubic Hermite interpolant through (t_i, y_i, y'_i), t strictly increasing.
class DenseTrajectory {
public:
    DenseTrajectory() = default;
    DenseTrajectory(std::vector<double> t, std::vector<double> y, std::vector<double> dy)
        : t_(std::move(t)), y_(std::move(y)), dy_(std::move(dy))
    {
    }

    double t_min() const { return t_.front(); }
    double t_max() const { return t_.back(); }
    std::size_t size() const { return t_.size(); }
    const std::vector<double>& times() const { return t_; }

    bool covers(double t) const { return !t_.empty() && t >= t_.front() && t <= t_.back(); }

    double value(double t) const { return eval(t, 0); }
    double derivative(double t) const { return eval(t, 1); }

private:
    double eval(double t, int order) const
    {
        if (!covers(t)) {
            throw DomainError("dense output queried at " + format_double(t) + " outside [" + format_double(t_min()) +
                              ", " + format_double(t_max()) + "]");
        }
        if (t_.size() == 1) {
            return order == 0 ? y_[0] : dy_[0];
        }
        auto it = std::upper_bound(t_.begin(), t_.end(), t);
        std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - t_.begin()) - 1));
        i = std::min(i, t_.size() - 2);
        const double h = t_[i + 1] - t_[i];
        const double s = (t - t_[i]) / h;
        const double y0 = y_[i];
        const double y1 = y_[i + 1];
        const double m0 = dy_[i] * h;
        const double m1 = dy_[i + 1] * h;
        if (order == 0) {
            const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
            const double h10 = s * (1 - s) * (1 - s);
            const double h01 = s * s * (3 - 2 * s);
            const double h11 = s * s * (s - 1);
            return h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
        }
        const double d00 = 6 * s * s - 6 * s;
        const double d10 = 3 * s * s - 4 * s + 1;
        const double d01 = -d00;
        const double d11 = 3 * s * s - 2 * s;
        return (d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1) / h;
    }

    std::vector<double> t_;
    std::vector<double> y_;
    std::vector<double> dy_;
};

namespace detail {

// One-directional integration from t0 to t1 (either order). Returns samples in
// the order visited.
inline void dopri_sweep(const std::function<double(double, double)>& rhs, double t0, double y0, double t1,
                        const OdeOptions& opt, std::vector<double>& ts, std::vector<double>& ys,
                        std::vector<double>& dys)
{
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                     e7 = -1.0 / 40;

    double t = t0;
    double y = y0;
    double k1 = rhs(t, y);
    ts.push_back(t);
    ys.push_back(y);
    dys.push_back(k1);
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    double h = std::min(opt.h_init, opt.h_max);
    int steps = 0;
    while (dir * (t1 - t) > 0.0) {
        if (++steps > opt.max_steps) {
            throw StepFailure("ODE solver exceeded the step budget");
        }
        if (h < opt.h_min) {
            throw StepFailure("ODE step size underflow near t = " + format_double(t));
        }
        const bool last = h >= dir * (t1 - t);
        const double step = last ? t1 - t : dir * h;
        const double k2 = rhs(t + c2 * step, y + step * (a21 * k1));
        const double k3 = rhs(t + c3 * step, y + step * (a31 * k1 + a32 * k2));
        const double k4 = rhs(t + c4 * step, y + step * (a41 * k1 + a42 * k2 + a43 * k3));
        const double k5 = rhs(t + c5 * step, y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const double k6 = rhs(t + step, y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const double y_new = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const double k7 = rhs(t + step, y_new);
        const double err_abs = std::abs(step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
        const double scale = opt.atol + opt.rtol * std::max(std::abs(y), std::abs(y_new));
        const double err = err_abs / scale;
        if (!std::isfinite(err)) {
            h *= 0.25;
            continue;
        }
        if (err <= 1.0) {
            t = last ? t1 : t + step;
            y = y_new;
            k1 = k7;
            ts.push_back(t);
            ys.push_back(y);
            dys.push_back(k1);
        }
        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h = std::min(opt.h_max, std::abs(step) * (err <= 1.0 ? factor : std::min(factor, 1.0)));
    }
}

} // namespace detail

// Solves y' = rhs(t, y), y(t0) = y0 on [t_lo, t_hi] (t0 inside), sweeping both ways.
// rhs may throw; BranchError and friends propagate unchanged.
inline DenseTrajectory solve_ode(const std::function<double(double, double)>& rhs, double t0, double y0, double t_lo,
                                 double t_hi, const OdeOptions& opt = {})
{
    if (!(t_lo <= t0 && t0 <= t_hi)) {
        throw InvalidParams("initial time must lie inside the solve interval");
    }
    std::vector<double> tb, yb, db;
    std::vector<double> tf, yf, df;
    detail::dopri_sweep(rhs, t0, y0, t_lo, opt, tb, yb, db);
    detail::dopri_sweep(rhs, t0, y0, t_hi, opt, tf, yf, df);
    std::vector<double> t, y, dy;
    t.reserve(tb.size() + tf.size());
    for (std::size_t i = tb.size(); i-- > 1;) {
        t.push_back(tb[i]);
        y.push_back(yb[i]);
        dy.push_back(db[i]);
    }
    t.insert(t.end(), tf.begin(), tf.end());
    y.insert(y.end(), yf.begin(), yf.end());
    dy.insert(dy.end(), df.begin(), df.end());
    return DenseTrajectory(std::move(t), std::move(y), std::move(dy));
}

} // namespace lmsurf
