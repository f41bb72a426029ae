#pragma once

// Scalar fields over (u, v) rectangles and the canonical-parameter gauge
// u = eps*u' + A, v = eps*v' + B acting on them.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "expr.hpp"
#include "weierstrass.hpp"

namespace lmsurf {

inline constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

// Samples on a lattice plus, optionally, the function they came from. The
// evaluator returns NaN where the field is undefined.
struct ScalarField {
    Rect domain;
    GridSpec grid;
    double hu = 0.0;
    double hv = 0.0;
    std::vector<double> values;  // index i + nu*j, NaN = undefined
    std::function<double(double, double)> evaluator;

    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i + grid.nu * j); }
    double u_at(int i) const { return domain.u_min + i * hu; }
    double v_at(int j) const { return domain.v_min + j * hv; }
    double at(int i, int j) const { return values[index(i, j)]; }

    // Field value at an arbitrary point: the evaluator when present, otherwise
    // the sample at a lattice node (NaN off the lattice).
    double value(double u, double v) const
    {
        if (evaluator) {
            return evaluator(u, v);
        }
        const double fi = (u - domain.u_min) / hu;
        const double fj = (v - domain.v_min) / hv;
        const double ri = std::round(fi);
        const double rj = std::round(fj);
        if (std::abs(fi - ri) > 1e-6 || std::abs(fj - rj) > 1e-6 || ri < 0 || rj < 0 || ri > grid.nu - 1 ||
            rj > grid.nv - 1) {
            return nan_value;
        }
        return at(static_cast<int>(ri), static_cast<int>(rj));
    }
};

inline ScalarField sample_field(std::function<double(double, double)> fn, const Rect& domain, const GridSpec& grid,
                                bool keep_evaluator = true)
{
    check_grid(domain, grid);
    ScalarField field;
    field.domain = domain;
    field.grid = grid;
    field.hu = (domain.u_max - domain.u_min) / (grid.nu - 1);
    field.hv = (domain.v_max - domain.v_min) / (grid.nv - 1);
    field.values.resize(static_cast<std::size_t>(grid.nu) * static_cast<std::size_t>(grid.nv));
    for (int j = 0; j < grid.nv; ++j) {
        for (int i = 0; i < grid.nu; ++i) {
            double value = nan_value;
            try {
                value = fn(field.u_at(i), field.v_at(j));
            }
            catch (const Error&) {
            }
            field.values[field.index(i, j)] = value;
        }
    }
    if (keep_evaluator) {
        field.evaluator = [fn = std::move(fn)](double u, double v) {
            try {
                return fn(u, v);
            }
            catch (const Error&) {
                return nan_value;
            }
        };
    }
    return field;
}

struct CanonicalGauge {
    int eps = 1;
    double A = 0.0;
    double B = 0.0;

    static CanonicalGauge identity() { return {}; }

    // (u, v) for gauged coordinates (u', v').
    std::pair<double, double> operator()(double ub, double vb) const { return {eps * ub + A, eps * vb + B}; }

    friend bool operator==(const CanonicalGauge&, const CanonicalGauge&) = default;
};

// apply(compose(g2, g1), X) == apply(g2, apply(g1, X)).
inline CanonicalGauge compose(const CanonicalGauge& g2, const CanonicalGauge& g1)
{
    return {g1.eps * g2.eps, g1.eps * g2.A + g1.A, g1.eps * g2.B + g1.B};
}

inline CanonicalGauge inverse(const CanonicalGauge& g) { return {g.eps, -g.eps * g.A, -g.eps * g.B}; }

namespace detail {

// Gauged domain: the set of (u', v') whose image lies in `domain`.
inline Rect gauged_domain(const CanonicalGauge& g, const Rect& domain)
{
    if (g.eps == 1) {
        return {domain.u_min - g.A, domain.u_max - g.A, domain.v_min - g.B, domain.v_max - g.B};
    }
    return {g.A - domain.u_max, g.A - domain.u_min, g.B - domain.v_max, g.B - domain.v_min};
}

inline std::pair<int, int> gauged_node(const CanonicalGauge& g, const GridSpec& grid, int i, int j)
{
    return g.eps == 1 ? std::pair{i, j} : std::pair{grid.nu - 1 - i, grid.nv - 1 - j};
}

} // namespace detail

// Xbar(u', v') = X(eps u' + A, eps v' + B). Samples are reindexed, never interpolated.
inline ScalarField apply_gauge(const CanonicalGauge& g, const ScalarField& field)
{
    ScalarField out = field;
    out.domain = detail::gauged_domain(g, field.domain);
    for (int j = 0; j < field.grid.nv; ++j) {
        for (int i = 0; i < field.grid.nu; ++i) {
            const auto [si, sj] = detail::gauged_node(g, field.grid, i, j);
            out.values[out.index(i, j)] = field.at(si, sj);
        }
    }
    if (field.evaluator) {
        out.evaluator = [g, fn = field.evaluator](double u, double v) {
            const auto [uu, vv] = g(u, v);
            return fn(uu, vv);
        };
    }
    return out;
}

inline SurfacePatch apply_gauge(const CanonicalGauge& g, const SurfacePatch& patch)
{
    SurfacePatch out = patch;
    out.domain = detail::gauged_domain(g, patch.domain);
    for (int j = 0; j < patch.grid.nv; ++j) {
        for (int i = 0; i < patch.grid.nu; ++i) {
            const auto [si, sj] = detail::gauged_node(g, patch.grid, i, j);
            out.points[out.index(i, j)] = patch.point(si, sj);
            out.valid[out.index(i, j)] = patch.valid[patch.index(si, sj)];
        }
    }
    if (patch.jet) {
        out.jet = [g, fn = patch.jet](double u, double v) {
            const auto [uu, vv] = g(u, v);
            Jet jet = fn(uu, vv);
            const double e = g.eps;
            jet.xu = e * jet.xu;
            jet.xv = e * jet.xv;
            return jet;
        };
    }
    return out;
}

} // namespace lmsurf
