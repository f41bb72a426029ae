#pragma once

// Minimal timelike surfaces as real or imaginary parts of null curves
//
//   General:   Psi'(z) = (-f(1+g^2)/2, j f(1-g^2)/2, f g)
//   Canonical: Psi'(z) = (-(1+g^2)/(2g'), j(1-g^2)/(2g'), g/g')
//
// integrated from a base point z0 over rectangular (u, v) domains, z = u + jv.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "expr.hpp"
#include "minkowski.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "split_complex.hpp"

namespace lmsurf {

enum class Part { Real, Imaginary };

inline std::string to_string(Part p) { return p == Part::Real ? "real" : "imag"; }

struct GridSpec {
    int nu = 3;
    int nv = 3;
};

class GeneratingData {
public:
    enum class Kind { General, Canonical };

    static GeneratingData general(const HoloExpr& f, const HoloExpr& g, const SplitComplex& z0 = 0.0,
                                  Part part = Part::Real)
    {
        return GeneratingData(Kind::General, f, g, z0, part);
    }

    static GeneratingData canonical(const HoloExpr& g, const SplitComplex& z0 = 0.0, Part part = Part::Real)
    {
        return GeneratingData(Kind::Canonical, cst(1.0) / derivative(g), g, z0, part);
    }

    Kind kind() const { return kind_; }
    // For canonical data f is the implied 1/g'.
    const HoloExpr& f() const { return cache_->f; }
    const HoloExpr& g() const { return cache_->g; }
    const HoloExpr& g_prime() const { return cache_->g_prime; }
    const SplitComplex& base_point() const { return z0_; }
    Part part() const { return part_; }

    GeneratingData with_part(Part p) const
    {
        GeneratingData out = *this;
        out.part_ = p;
        return out;
    }
    GeneratingData with_base_point(const SplitComplex& z0) const
    {
        GeneratingData out = *this;
        out.z0_ = z0;
        return out;
    }

    // Symbolic Psi' and Psi'' components.
    const std::array<HoloExpr, 3>& integrand() const { return cache_->phi; }
    const std::array<HoloExpr, 3>& integrand_derivative() const { return cache_->dphi; }

private:
    struct Cache {
        HoloExpr f;
        HoloExpr g;
        HoloExpr g_prime;
        std::array<HoloExpr, 3> phi;
        std::array<HoloExpr, 3> dphi;
    };

    GeneratingData(Kind kind, const HoloExpr& f, const HoloExpr& g, const SplitComplex& z0, Part part)
        : kind_(kind), z0_(z0), part_(part)
    {
        auto c = std::make_shared<Cache>();
        c->f = f;
        c->g = g;
        c->g_prime = derivative(g);
        const HoloExpr one = cst(1.0);
        const HoloExpr g2 = pow(g, 2);
        if (kind == Kind::General) {
            c->phi = {cst(-0.5) * f * (one + g2), cst(SplitComplex{0.0, 0.5}) * f * (one - g2), f * g};
        }
        else {
            const HoloExpr two_gp = cst(2.0) * c->g_prime;
            c->phi = {-(one + g2) / two_gp, cst(j_unit) * (one - g2) / two_gp, g / c->g_prime};
        }
        for (std::size_t k = 0; k < 3; ++k) {
            c->phi[k] = simplify(c->phi[k]);
            c->dphi[k] = derivative(c->phi[k]);
        }
        cache_ = std::move(c);
    }

    Kind kind_;
    std::shared_ptr<const Cache> cache_;
    SplitComplex z0_;
    Part part_;
};

// Psi'(z); for canonical data throws ZeroDivisor where g' is a zero divisor.
inline SplitVec3 curve_derivative(const GeneratingData& data, const SplitComplex& z)
{
    const SplitComplex g = eval(data.g(), z);
    const SplitComplex g2 = g * g;
    if (data.kind() == GeneratingData::Kind::General) {
        const SplitComplex f = eval(data.f(), z);
        return {-0.5 * f * (1.0 + g2), SplitComplex{0.0, 0.5} * f * (1.0 - g2), f * g};
    }
    const SplitComplex gp = eval(data.g_prime(), z);
    if (!is_invertible(gp)) {
        throw ZeroDivisor("g' is a zero divisor at z = " + to_string(z));
    }
    const SplitComplex inv = inverse(gp);
    return {-0.5 * (1.0 + g2) * inv, SplitComplex{0.0, 0.5} * (1.0 - g2) * inv, g * inv};
}

inline SplitVec3 curve_second_derivative(const GeneratingData& data, const SplitComplex& z)
{
    const auto& d = data.integrand_derivative();
    return {eval(d[0], z), eval(d[1], z), eval(d[2], z)};
}

inline Vec3 select_part(const SplitVec3& v, Part part) { return part == Part::Real ? real_part(v) : imag_part(v); }

// Position derivatives of a parametrized surface at one parameter point.
struct Jet {
    Vec3 xu{};
    Vec3 xv{};
    Vec3 xuu{};
    Vec3 xuv{};
    Vec3 xvv{};
};

using JetFunction = std::function<Jet(double u, double v)>;

// Derivatives of the selected part of a curve with first and second
// derivatives d1, d2 (d/du = d/dz, d/dv = j d/dz).
inline Jet jet_from_curve(const SplitVec3& d1, const SplitVec3& d2, Part part)
{
    Jet jet;
    if (part == Part::Real) {
        jet.xu = real_part(d1);
        jet.xv = imag_part(d1);
        jet.xuu = real_part(d2);
        jet.xuv = imag_part(d2);
        jet.xvv = real_part(d2);
    }
    else {
        jet.xu = imag_part(d1);
        jet.xv = real_part(d1);
        jet.xuu = imag_part(d2);
        jet.xuv = real_part(d2);
        jet.xvv = imag_part(d2);
    }
    return jet;
}

inline Jet surface_jet(const GeneratingData& data, double u, double v)
{
    const SplitComplex z{u, v};
    return jet_from_curve(curve_derivative(data, z), curve_second_derivative(data, z), data.part());
}

// True when the induced metric is degenerate relative to the tangent sizes.
inline bool metric_degenerate(const Vec3& xu, const Vec3& xv)
{
    const double e = minkowski_inner(xu, xu);
    const double f = minkowski_inner(xu, xv);
    const double g = minkowski_inner(xv, xv);
    const double nu = euclidean_norm(xu);
    const double nv = euclidean_norm(xv);
    return !(std::abs(e * g - f * f) > 1e-12 * nu * nu * nv * nv) || !std::isfinite(e * g - f * f);
}

enum class IntegrationMethod { Symbolic, Quadrature };

struct SurfacePatch {
    Rect domain;
    GridSpec grid;
    double hu = 0.0;
    double hv = 0.0;
    std::vector<Vec3> points;  // index i + nu*j: u = u_min + i hu, v = v_min + j hv
    std::vector<char> valid;
    std::optional<GeneratingData> provenance;
    JetFunction jet;  // empty for patches not built from generating data
    IntegrationMethod method = IntegrationMethod::Quadrature;

    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i + grid.nu * j); }
    double u_at(int i) const { return domain.u_min + i * hu; }
    double v_at(int j) const { return domain.v_min + j * hv; }
    const Vec3& point(int i, int j) const { return points[index(i, j)]; }
    bool is_valid(int i, int j) const { return valid[index(i, j)] != 0; }
    bool is_interior(int i, int j) const { return i > 0 && j > 0 && i < grid.nu - 1 && j < grid.nv - 1; }
    std::size_t invalid_count() const
    {
        return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), char{0}));
    }
};

struct SurfaceOptions {
    double tol = 1e-10;
    unsigned threads = 0;
};

inline void check_grid(const Rect& domain, const GridSpec& grid)
{
    if (grid.nu < 3 || grid.nv < 3) {
        throw InvalidParams("grid must be at least 3x3");
    }
    if (!(domain.u_min < domain.u_max) || !(domain.v_min < domain.v_max)) {
        throw InvalidParams("domain must satisfy min < max on both axes");
    }
}

inline SurfacePatch evaluate_surface(const GeneratingData& data, const Rect& domain, const GridSpec& grid,
                                     const SurfaceOptions& opt = {})
{
    check_grid(domain, grid);
    SurfacePatch patch;
    patch.domain = domain;
    patch.grid = grid;
    patch.hu = (domain.u_max - domain.u_min) / (grid.nu - 1);
    patch.hv = (domain.v_max - domain.v_min) / (grid.nv - 1);
    patch.points.assign(static_cast<std::size_t>(grid.nu) * static_cast<std::size_t>(grid.nv), Vec3{});
    patch.valid.assign(patch.points.size(), 1);
    patch.provenance = data;
    patch.jet = [data](double u, double v) { return surface_jet(data, u, v); };

    QuadratureOptions qopt;
    qopt.abs_tol = opt.tol;
    std::array<PathIntegrator, 3> integrators{PathIntegrator(data.integrand()[0], qopt),
                                              PathIntegrator(data.integrand()[1], qopt),
                                              PathIntegrator(data.integrand()[2], qopt)};
    const bool symbolic = integrators[0].symbolic() && integrators[1].symbolic() && integrators[2].symbolic();
    patch.method = symbolic ? IntegrationMethod::Symbolic : IntegrationMethod::Quadrature;
    const SplitComplex z0 = data.base_point();

    const auto node_z = [&](int i, int j) { return SplitComplex{patch.u_at(i), patch.v_at(j)}; };
    const auto segment = [&](const SplitComplex& a, const SplitComplex& b) {
        return SplitVec3{integrators[0](a, b), integrators[1](a, b), integrators[2](a, b)};
    };
    const auto add = [](const SplitVec3& a, const SplitVec3& b) { return SplitVec3{a[0] + b[0], a[1] + b[1], a[2] + b[2]}; };

    // Nodes where the integrand is singular or the metric degenerates are flagged
    // but do not abort the patch.
    const auto node_ok = [&](int i, int j) {
        try {
            const Jet jet = surface_jet(data, patch.u_at(i), patch.v_at(j));
            return !metric_degenerate(jet.xu, jet.xv);
        }
        catch (const Error&) {
            return false;
        }
    };

    std::vector<SplitVec3> curve(patch.points.size());
    const auto row_walk = [&](int j, SplitVec3 anchor_value, SplitComplex anchor_z, int i_begin) {
        for (int i = i_begin; i < grid.nu; ++i) {
            const std::size_t k = patch.index(i, j);
            try {
                curve[k] = add(anchor_value, segment(anchor_z, node_z(i, j)));
                anchor_value = curve[k];
                anchor_z = node_z(i, j);
                patch.valid[k] = node_ok(i, j) ? 1 : 0;
            }
            catch (const DomainError&) {
                patch.valid[k] = 0;
            }
        }
    };

    if (symbolic) {
        parallel_for(
            static_cast<std::size_t>(grid.nv),
            [&](std::size_t jj) {
                const int j = static_cast<int>(jj);
                for (int i = 0; i < grid.nu; ++i) {
                    const std::size_t k = patch.index(i, j);
                    try {
                        curve[k] = segment(z0, node_z(i, j));
                        patch.valid[k] = node_ok(i, j) ? 1 : 0;
                    }
                    catch (const DomainError&) {
                        patch.valid[k] = 0;
                    }
                }
            },
            opt.threads);
    }
    else {
        // First column sequentially, then every row from its first node.
        SplitVec3 anchor_value{};
        SplitComplex anchor_z = z0;
        std::vector<char> column_reached(static_cast<std::size_t>(grid.nv), 0);
        for (int j = 0; j < grid.nv; ++j) {
            const std::size_t k = patch.index(0, j);
            try {
                curve[k] = add(anchor_value, segment(anchor_z, node_z(0, j)));
                anchor_value = curve[k];
                anchor_z = node_z(0, j);
                column_reached[static_cast<std::size_t>(j)] = 1;
                patch.valid[k] = node_ok(0, j) ? 1 : 0;
            }
            catch (const DomainError&) {
                patch.valid[k] = 0;
            }
        }
        parallel_for(
            static_cast<std::size_t>(grid.nv),
            [&](std::size_t jj) {
                const int j = static_cast<int>(jj);
                if (column_reached[jj]) {
                    row_walk(j, curve[patch.index(0, j)], node_z(0, j), 1);
                }
                else {
                    // Column start unreachable: integrate straight from z0 instead.
                    row_walk(j, SplitVec3{}, z0, 0);
                }
            },
            opt.threads);
    }

    for (std::size_t k = 0; k < curve.size(); ++k) {
        patch.points[k] = select_part(curve[k], data.part());
    }
    return patch;
}

} // namespace lmsurf
