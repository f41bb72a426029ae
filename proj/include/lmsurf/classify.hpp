#pragma once

// Degree-3 polynomial minimal timelike surfaces: lift to the Weierstrass curve,
// recover (f, g), and decide whether the surface is an Enneper surface up to
// position and homothety.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "expr.hpp"
#include "polynomial.hpp"
#include "split_complex.hpp"

namespace lmsurf {

// Psi(z) = 2 x(z/2, jz/2) after translating x(0,0) to the origin; Re Psi(u + jv) = x(u, v) - x(0, 0)
// whenever x is the real part of a holomorphic curve.
inline std::array<DPoly, 3> lift_to_curve(const CubicParametrization& x)
{
    std::array<DPoly, 3> psi;
    for (std::size_t k = 0; k < 3; ++k) {
        std::vector<SplitComplex> c(4);
        for (const auto& [m, coeff] : x.x[k].terms()) {
            const int n = m.first + m.second;
            if (n == 0) {
                continue;
            }
            if (n > 3) {
                throw InvalidParams("parametrization degree exceeds 3");
            }
            // u^i v^l -> (z/2)^i (jz/2)^l = j^l z^n / 2^n
            const SplitComplex jl = m.second % 2 == 0 ? SplitComplex(1.0) : j_unit;
            c[static_cast<std::size_t>(n)] += 2.0 * coeff / std::pow(2.0, n) * jl;
        }
        psi[k] = DPoly(std::move(c));
    }
    return psi;
}

// f and g = P/Q in lowest terms (null-componentwise gcd).
struct ExtractedPair {
    DPoly f;
    DPoly fg;  // phi_3
    DPoly P;
    DPoly Q;   // monic per null component
    double isotropy_defect = 0.0;  // max coefficient of f * (f g^2) - (f g)^2, relative

    HoloExpr f_expr() const { return f.to_expr(); }
    HoloExpr g_expr() const
    {
        if (Q.degree() == 0 && Q[0] == SplitComplex(1.0)) {
            return P.to_expr();
        }
        return simplify(P.to_expr() / Q.to_expr());
    }
};

class NotMinimal : public Error {
public:
    using Error::Error;
};

class Degenerate : public Error {
public:
    using Error::Error;
};

// f = -phi1 + j phi2, f g^2 = -phi1 - j phi2, f g = phi3.
inline ExtractedPair extract_pair(const std::array<DPoly, 3>& dpsi, double rel_tol = 1e-9)
{
    const double scale = std::max({1e-300, dpsi[0].max_abs(), dpsi[1].max_abs(), dpsi[2].max_abs()});
    const double tol = rel_tol * scale;
    ExtractedPair out;
    out.f = (SplitComplex(-1.0) * dpsi[0] + j_unit * dpsi[1]).pruned(tol);
    const DPoly fg2 = (SplitComplex(-1.0) * dpsi[0] - j_unit * dpsi[1]).pruned(tol);
    out.fg = dpsi[2].pruned(tol);
    const DPoly defect = out.f * fg2 - out.fg * out.fg;
    out.isotropy_defect = defect.max_abs() / (scale * scale);
    if (out.isotropy_defect > rel_tol) {
        throw NotMinimal("the curve is not isotropic: f (f g^2) - (f g)^2 has relative size " +
                         format_double(out.isotropy_defect));
    }
    RealPoly P[2], Q[2];
    for (int b = 0; b < 2; ++b) {
        const NullBranch br = b == 0 ? NullBranch::Plus : NullBranch::Minus;
        const RealPoly fb = out.f.null_component(br).pruned(tol);
        const RealPoly hb = out.fg.null_component(br).pruned(tol);
        if (fb.is_zero()) {
            throw Degenerate("f vanishes identically in a null component");
        }
        const RealPoly d = hb.is_zero() ? fb : gcd(fb, hb, tol);
        auto [pq, pr] = divmod(hb, d, tol);
        auto [qq, qr] = divmod(fb, d, tol);
        const double lead = qq.lead();
        P[b] = (1.0 / lead) * pq;
        Q[b] = (1.0 / lead) * qq;
    }
    out.P = DPoly::from_null(P[0], P[1]);
    out.Q = DPoly::from_null(Q[0], Q[1]);
    return out;
}

enum class Verdict { EnneperNegative, NotEnneper, PositiveCurvature, NotMinimal, NotIsothermal, Degenerate };

inline std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::EnneperNegative:
        return "EnneperNegative";
    case Verdict::NotEnneper:
        return "NotEnneper";
    case Verdict::PositiveCurvature:
        return "PositiveCurvature";
    case Verdict::NotMinimal:
        return "NotMinimal";
    case Verdict::NotIsothermal:
        return "NotIsothermal";
    case Verdict::Degenerate:
        return "Degenerate";
    }
    return "?";
}

struct ClassificationVerdict {
    Verdict verdict = Verdict::Degenerate;
    std::optional<HoloExpr> f;
    std::optional<HoloExpr> g;
    // For EnneperNegative: lambda with S = lambda * Enneper(f = 1, g = z) up to position.
    double scale = nan_value;
    bool mirrored = false;  // congruent only through an orientation-reversing isometry
    std::vector<std::string> notes;
};

namespace detail {

// Splits f_b = s Q_b^2 with deg Q_b <= 1; nullopt when f_b is not +-(square of a linear).
inline std::optional<std::pair<int, RealPoly>> signed_square_root(const RealPoly& f, double tol)
{
    if (f.degree() == 0) {
        const int s = f[0] > 0 ? 1 : -1;
        return std::pair{s, RealPoly({std::sqrt(std::abs(f[0]))})};
    }
    if (f.degree() != 2) {
        return std::nullopt;
    }
    const double a = f[2], b = f[1], c = f[0];
    if (std::abs(b * b - 4 * a * c) > tol * std::max(1.0, f.max_abs())) {
        return std::nullopt;
    }
    const int s = a > 0 ? 1 : -1;
    const double r = std::sqrt(std::abs(a));
    // s (r z + t)^2 = s r^2 z^2 + 2 s r t z + s t^2
    return std::pair{s, RealPoly({b / (2 * s * r), r})};
}

} // namespace detail

// Decision procedure, first match wins:
//   Degenerate       constant or rank-deficient
//   NotIsothermal    x_uu != x_vv and the parameters are not isothermal
//   NotMinimal       x_uu != x_vv in isothermal parameters (H != 0)
//   Degenerate       degree < 3
//   NotMinimal       x harmonic but its lift is not isotropic
//   Degenerate       f vanishing in a null component, or ad - bc = 0
//   PositiveCurvature  f g' has null components of opposite sign (K > 0)
//   NotEnneper       |c|^2 = |a|^2, or the homothety factor is not positive
//   EnneperNegative  otherwise, with scale lambda = sqrt(|kappa|) |det|^2 / (|c|^2 - |a|^2)^2, kappa = f g'
inline ClassificationVerdict classify_cubic(const CubicParametrization& x, double rel_tol = 1e-9)
{
    x.validate();
    ClassificationVerdict out;
    const double scale = std::max(1e-300, x.max_abs());
    const double tol = rel_tol * scale;
    CubicParametrization xs;
    for (std::size_t k = 0; k < 3; ++k) {
        xs.x[k] = x.x[k].pruned(tol);
    }

    Poly3 xu, xv, wave;
    for (std::size_t k = 0; k < 3; ++k) {
        xu[k] = xs.x[k].du();
        xv[k] = xs.x[k].dv();
        wave[k] = (xs.x[k].du().du() - xs.x[k].dv().dv()).pruned(tol);
    }
    const Poly2 E = minkowski_inner(xu, xu), F = minkowski_inner(xu, xv), G = minkowski_inner(xv, xv);
    const double tol2 = rel_tol * scale * scale;
    const bool isothermal = (E + G).pruned(tol2).is_zero() && F.pruned(tol2).is_zero();
    const bool harmonic = wave[0].is_zero() && wave[1].is_zero() && wave[2].is_zero();

    // Rank: x_u x x_v vanishing identically.
    Poly3 cross{(-1.0) * (xu[1] * xv[2] - xu[2] * xv[1]), xu[2] * xv[0] - xu[0] * xv[2], xu[0] * xv[1] - xu[1] * xv[0]};
    if (xs.degree() <= 0 ||
        (cross[0].pruned(tol2).is_zero() && cross[1].pruned(tol2).is_zero() && cross[2].pruned(tol2).is_zero())) {
        out.verdict = Verdict::Degenerate;
        out.notes.push_back("tangent vectors are everywhere dependent");
        return out;
    }
    if (!harmonic) {
        out.verdict = isothermal ? Verdict::NotMinimal : Verdict::NotIsothermal;
        out.notes.push_back(isothermal ? "isothermal but x_uu - x_vv != 0, so H != 0"
                                       : "E + G or F does not vanish identically");
        return out;
    }

    if (xs.degree() < 3) {
        out.verdict = Verdict::Degenerate;
        out.notes.push_back("degree " + std::to_string(xs.degree()) + " is below the degree-3 hypothesis");
        return out;
    }
    const auto psi = lift_to_curve(xs);
    const std::array<DPoly, 3> dpsi{psi[0].derivative(), psi[1].derivative(), psi[2].derivative()};
    ExtractedPair pair;
    try {
        pair = extract_pair(dpsi, rel_tol);
    }
    catch (const NotMinimal& err) {
        out.verdict = Verdict::NotMinimal;
        out.notes.push_back(std::string("harmonic but not isothermal: ") + err.what());
        return out;
    }
    catch (const Degenerate& err) {
        out.verdict = Verdict::Degenerate;
        out.notes.push_back(err.what());
        return out;
    }
    out.f = pair.f_expr();
    out.g = pair.g_expr();

    // Per null component: f = s Q^2, g = P/Q with P = c z + d, Q = a z + b.
    double a[2], b[2], c[2], d[2], det[2];
    int s[2];
    const double ftol = rel_tol * std::max(1.0, pair.f.max_abs());
    for (int k = 0; k < 2; ++k) {
        const NullBranch br = k == 0 ? NullBranch::Plus : NullBranch::Minus;
        const RealPoly fb = pair.f.null_component(br);
        const auto root = detail::signed_square_root(fb, rel_tol);
        if (!root) {
            out.verdict = Verdict::Degenerate;
            out.notes.push_back("f is not +-(az+b)^2 in a null component, so g is constant there");
            return out;
        }
        s[k] = root->first;
        const RealPoly& Q = root->second;
        const auto [P, rem] = divmod(pair.fg.null_component(br), static_cast<double>(s[k]) * Q, ftol);
        if (!rem.is_zero() || P.degree() > 1) {
            out.verdict = Verdict::NotEnneper;
            out.notes.push_back("f g is not (az+b)(cz+d) in a null component");
            return out;
        }
        a[k] = Q[1];
        b[k] = Q[0];
        c[k] = P[1];
        d[k] = P[0];
        det[k] = a[k] * d[k] - b[k] * c[k];
    }
    const double det_scale = std::max({1.0, std::abs(a[0] * d[0]), std::abs(b[0] * c[0]), std::abs(a[1] * d[1]),
                                       std::abs(b[1] * c[1])});
    if (std::abs(det[0]) <= rel_tol * det_scale || std::abs(det[1]) <= rel_tol * det_scale) {
        out.verdict = Verdict::Degenerate;
        out.notes.push_back("ad - bc = 0: g is constant in a null component (planar or null-degenerate)");
        return out;
    }
    // kappa = f g' = s (cb - ad) is constant.
    const double kappa[2] = {-s[0] * det[0], -s[1] * det[1]};
    if (kappa[0] * kappa[1] < 0.0) {
        out.verdict = Verdict::PositiveCurvature;
        out.notes.push_back("f g' has null components of opposite sign: the surface has K > 0");
        return out;
    }
    out.mirrored = kappa[0] < 0.0;
    if (out.mirrored) {
        out.notes.push_back("f g' < 0: congruent to the f -> -f pair through x -> -x");
    }
    const double k = c[0] * c[1] - a[0] * a[1];
    const double k_scale = std::max({1.0, std::abs(c[0] * c[1]), std::abs(a[0] * a[1])});
    if (std::abs(k) <= rel_tol * k_scale) {
        out.verdict = Verdict::NotEnneper;
        out.notes.push_back("|c|^2 = |a|^2: the canonical curvature is -16|det|^4/(linear)^4, not of Enneper type");
        return out;
    }
    const double lambda = std::sqrt(kappa[0] * kappa[1]) * det[0] * det[1] / (k * k);
    if (!(lambda > 0.0)) {
        out.verdict = Verdict::NotEnneper;
        out.notes.push_back("negative homothety factor: the canonical curvature is Enneper's with u and v exchanged");
        return out;
    }
    out.verdict = Verdict::EnneperNegative;
    out.scale = lambda;
    return out;
}

} // namespace lmsurf
