#pragma once

// First and second fundamental forms, unit normal and curvatures of timelike
// surfaces, from exact jets or from central differences on a sampled patch.

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "minkowski.hpp"
#include "parallel.hpp"
#include "weierstrass.hpp"

namespace lmsurf {

enum class DerivativeMethod { Auto, FiniteDifference, Analytic };

inline std::string to_string(DerivativeMethod m)
{
    switch (m) {
    case DerivativeMethod::Auto:
        return "auto";
    case DerivativeMethod::FiniteDifference:
        return "finite-difference";
    case DerivativeMethod::Analytic:
        return "analytic";
    }
    return {};
}

struct FundamentalForms {
    double E = 0.0;
    double F = 0.0;
    double G = 0.0;
    double L = 0.0;
    double M = 0.0;
    double N = 0.0;
    Vec3 U{};
    DerivativeMethod method = DerivativeMethod::Analytic;
};

struct Curvatures {
    double K = 0.0;
    double H = 0.0;
};

inline Curvatures curvatures(const FundamentalForms& ff)
{
    const double det = ff.E * ff.G - ff.F * ff.F;
    return {(ff.L * ff.N - ff.M * ff.M) / det, (ff.E * ff.N - 2.0 * ff.F * ff.M + ff.G * ff.L) / (2.0 * det)};
}

inline FundamentalForms forms_from_jet(const Jet& jet, DerivativeMethod method = DerivativeMethod::Analytic)
{
    FundamentalForms ff;
    ff.method = method;
    ff.E = minkowski_inner(jet.xu, jet.xu);
    ff.F = minkowski_inner(jet.xu, jet.xv);
    ff.G = minkowski_inner(jet.xv, jet.xv);
    const Vec3 c = lorentz_cross(jet.xu, jet.xv);
    const double cc = minkowski_inner(c, c);
    const double scale = euclidean_norm(jet.xu) * euclidean_norm(jet.xu) * euclidean_norm(jet.xv) * euclidean_norm(jet.xv);
    if (!(std::abs(cc) > 1e-12 * scale) || !std::isfinite(cc)) {
        throw DegenerateNormal("lightlike or singular tangent plane (<xu x xv, xu x xv> = " + format_double(cc) + ")");
    }
    if (cc < 0.0) {
        throw TimelikeViolation("spacelike tangent plane (EG - F^2 = " + format_double(ff.E * ff.G - ff.F * ff.F) + ")");
    }
    ff.U = (1.0 / std::sqrt(cc)) * c;
    ff.L = minkowski_inner(ff.U, jet.xuu);
    ff.M = minkowski_inner(ff.U, jet.xuv);
    ff.N = minkowski_inner(ff.U, jet.xvv);
    return ff;
}

// ---------------------------------------------------------------------------
// Central difference stencils, orders 2 through 8.

namespace detail {

inline std::span<const double> first_stencil(int order)
{
    static constexpr std::array<double, 3> o2{-0.5, 0.0, 0.5};
    static constexpr std::array<double, 5> o4{1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12};
    static constexpr std::array<double, 7> o6{-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60};
    static constexpr std::array<double, 9> o8{1.0 / 280, -4.0 / 105, 1.0 / 5,   -4.0 / 5,  0.0,
                                              4.0 / 5,   -1.0 / 5,   4.0 / 105, -1.0 / 280};
    switch (order) {
    case 2:
        return o2;
    case 4:
        return o4;
    case 6:
        return o6;
    case 8:
        return o8;
    default:
        throw InvalidParams("finite-difference order must be 2, 4, 6 or 8");
    }
}

inline std::span<const double> second_stencil(int order)
{
    static constexpr std::array<double, 3> o2{1.0, -2.0, 1.0};
    static constexpr std::array<double, 5> o4{-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12};
    static constexpr std::array<double, 7> o6{1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90};
    static constexpr std::array<double, 9> o8{-1.0 / 560, 8.0 / 315, -1.0 / 5,  8.0 / 5,   -205.0 / 72,
                                              8.0 / 5,    -1.0 / 5,  8.0 / 315, -1.0 / 560};
    switch (order) {
    case 2:
        return o2;
    case 4:
        return o4;
    case 6:
        return o6;
    case 8:
        return o8;
    default:
        throw InvalidParams("finite-difference order must be 2, 4, 6 or 8");
    }
}

} // namespace detail

// Central-difference partials of a sampled scalar or vector function:
// sample(di, dj) returns the value at the node offset by (di, dj).
template <class T, class Sample>
std::array<T, 5> central_partials(Sample&& sample, double hu, double hv, int order)
{
    const auto d1 = detail::first_stencil(order);
    const auto d2 = detail::second_stencil(order);
    const int r = order / 2;
    T fu{}, fv{}, fuu{}, fvv{}, fuv{};
    for (int a = -r; a <= r; ++a) {
        const double w1 = d1[static_cast<std::size_t>(a + r)];
        const double w2 = d2[static_cast<std::size_t>(a + r)];
        const T su = sample(a, 0);
        const T sv = sample(0, a);
        fu = fu + (w1 / hu) * su;
        fuu = fuu + (w2 / (hu * hu)) * su;
        fv = fv + (w1 / hv) * sv;
        fvv = fvv + (w2 / (hv * hv)) * sv;
        for (int b = -r; b <= r; ++b) {
            const double w = w1 * d1[static_cast<std::size_t>(b + r)];
            if (w != 0.0) {
                fuv = fuv + (w / (hu * hv)) * sample(a, b);
            }
        }
    }
    return {fu, fv, fuu, fuv, fvv};
}

struct FormsOptions {
    DerivativeMethod method = DerivativeMethod::Auto;
    int fd_order = 2;
};

// Jet of the sampled patch at node (i, j) from central differences; absent when
// the stencil leaves the grid or touches an invalid sample.
inline std::optional<Jet> finite_difference_jet(const SurfacePatch& patch, int i, int j, int order = 2)
{
    const int r = order / 2;
    detail::first_stencil(order);
    if (i - r < 0 || j - r < 0 || i + r >= patch.grid.nu || j + r >= patch.grid.nv) {
        return std::nullopt;
    }
    for (int b = -r; b <= r; ++b) {
        for (int a = -r; a <= r; ++a) {
            if (!patch.is_valid(i + a, j + b)) {
                return std::nullopt;
            }
        }
    }
    const auto p = central_partials<Vec3>([&](int a, int b) { return patch.point(i + a, j + b); }, patch.hu, patch.hv,
                                          order);
    return Jet{p[0], p[1], p[2], p[3], p[4]};
}

// Forms at an interior node. Auto picks exact jets when the patch carries them.
// Returns nothing for boundary nodes, nodes whose stencil is incomplete, and
// invalid samples.
inline std::optional<FundamentalForms> fundamental_forms(const SurfacePatch& patch, int i, int j,
                                                         const FormsOptions& opt = {})
{
    if (!patch.is_interior(i, j) || !patch.is_valid(i, j)) {
        return std::nullopt;
    }
    DerivativeMethod method = opt.method;
    if (method == DerivativeMethod::Auto) {
        method = patch.jet ? DerivativeMethod::Analytic : DerivativeMethod::FiniteDifference;
    }
    if (method == DerivativeMethod::Analytic) {
        if (!patch.jet) {
            throw InvalidParams("patch carries no closed-form derivatives");
        }
        return forms_from_jet(patch.jet(patch.u_at(i), patch.v_at(j)), DerivativeMethod::Analytic);
    }
    const auto jet = finite_difference_jet(patch, i, j, opt.fd_order);
    if (!jet) {
        return std::nullopt;
    }
    return forms_from_jet(*jet, DerivativeMethod::FiniteDifference);
}

struct FormsField {
    int nu = 0;
    int nv = 0;
    std::vector<std::optional<FundamentalForms>> forms;
    std::vector<std::optional<Curvatures>> curv;

    const std::optional<FundamentalForms>& at(int i, int j) const { return forms[static_cast<std::size_t>(i + nu * j)]; }
    const std::optional<Curvatures>& curvature_at(int i, int j) const
    {
        return curv[static_cast<std::size_t>(i + nu * j)];
    }
};

// Forms at every node; nodes where forms are unavailable or degenerate are left empty.
inline FormsField compute_all_forms(const SurfacePatch& patch, const FormsOptions& opt = {}, unsigned threads = 0)
{
    FormsField field;
    field.nu = patch.grid.nu;
    field.nv = patch.grid.nv;
    field.forms.resize(patch.points.size());
    field.curv.resize(patch.points.size());
    parallel_for(
        static_cast<std::size_t>(patch.grid.nv),
        [&](std::size_t jj) {
            const int j = static_cast<int>(jj);
            for (int i = 0; i < patch.grid.nu; ++i) {
                const std::size_t k = patch.index(i, j);
                try {
                    field.forms[k] = fundamental_forms(patch, i, j, opt);
                }
                catch (const DegenerateNormal&) {
                    field.forms[k].reset();
                }
                catch (const ZeroDivisor&) {
                    field.forms[k].reset();
                }
                if (field.forms[k]) {
                    field.curv[k] = curvatures(*field.forms[k]);
                }
            }
        },
        threads);
    return field;
}

} // namespace lmsurf
