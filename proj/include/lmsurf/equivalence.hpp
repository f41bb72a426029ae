#pragma once

// Transformations of generating data that leave the surface unchanged (up to
// position), their SO(1,2) witnesses, and a surface-identity test through
// canonical curvature fields.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "canonical.hpp"
#include "errors.hpp"
#include "expr.hpp"
#include "field.hpp"
#include "minkowski.hpp"
#include "quadrature.hpp"
#include "weierstrass.hpp"

namespace lmsurf {

// (f, g) -> (f(w(z)) w'(z), g(w(z))).
inline std::pair<HoloExpr, HoloExpr> reparametrize_pair(const HoloExpr& f, const HoloExpr& g, const HoloExpr& w)
{
    return {simplify(substitute(f, w) * derivative(w)), simplify(substitute(g, w))};
}

enum class MoebiusForm { Fractional, Inversion };

// Which reciprocal the inversion form takes: 1/g, or the literal 1/f = g' of canonical data.
enum class InversionReading { ReciprocalG, ReciprocalF };

struct MoebiusParams {
    double phi = 0.0;
    SplitComplex alpha;
    int sign = 1;
    MoebiusForm form = MoebiusForm::Fractional;
    InversionReading inversion = InversionReading::ReciprocalG;
};

inline std::string to_string(MoebiusForm f) { return f == MoebiusForm::Fractional ? "fractional" : "inversion"; }

inline SplitComplex hyperbolic_unit(double phi) { return {std::cosh(phi), std::sinh(phi)}; }

namespace detail {

inline void check_moebius(const MoebiusParams& m)
{
    if (m.sign != 1 && m.sign != -1) {
        throw InvalidParams("sign must be +1 or -1");
    }
    if (!std::isfinite(m.phi) || !std::isfinite(m.alpha.re()) || !std::isfinite(m.alpha.im())) {
        throw InvalidParams("transform parameters must be finite");
    }
    if (m.form == MoebiusForm::Fractional) {
        const double a = m.alpha.re(), b = m.alpha.im();
        if (std::abs(1.0 - a * a + b * b) < 1e-9) {
            throw InvalidParams("|alpha|^2 = 1: the fractional transform degenerates (1 - a^2 + b^2 = " +
                                format_double(1.0 - a * a + b * b) + ")");
        }
    }
}

} // namespace detail

// g~ = sign e^{phi j} (alpha + g) / (1 + conj(alpha) g), or sign e^{phi j} / g,
// or (literal inversion reading) sign e^{phi j} g'.
inline HoloExpr moebius_transform(const HoloExpr& g, const MoebiusParams& m)
{
    detail::check_moebius(m);
    const HoloExpr unit = cst(static_cast<double>(m.sign) * hyperbolic_unit(m.phi));
    if (m.form == MoebiusForm::Fractional) {
        return simplify(unit * (cst(m.alpha) + g) / (cst(1.0) + cst(m.alpha.conj()) * g));
    }
    if (m.inversion == InversionReading::ReciprocalG) {
        return simplify(unit / g);
    }
    return simplify(unit * derivative(g));
}

// Parameters of m2 after m1, both fractional: the family is closed under composition.
inline MoebiusParams compose(const MoebiusParams& m2, const MoebiusParams& m1)
{
    detail::check_moebius(m1);
    detail::check_moebius(m2);
    if (m1.form != MoebiusForm::Fractional || m2.form != MoebiusForm::Fractional) {
        throw InvalidParams("only fractional transforms compose within the family");
    }
    // g -> (P g + Q) / (R g + S) with matrix [[e, e alpha], [conj(alpha), 1]].
    const SplitComplex e1 = static_cast<double>(m1.sign) * hyperbolic_unit(m1.phi);
    const SplitComplex e2 = static_cast<double>(m2.sign) * hyperbolic_unit(m2.phi);
    const SplitComplex P = e2 * e1 + e2 * m2.alpha * m1.alpha.conj();
    const SplitComplex Q = e2 * e1 * m1.alpha + e2 * m2.alpha;
    const SplitComplex S = m2.alpha.conj() * e1 * m1.alpha + 1.0;
    if (!is_invertible(P) || !is_invertible(S)) {
        throw InvalidParams("composite transform leaves the fractional family");
    }
    const SplitComplex unit = P / S;  // sign e^{phi j}
    if (unit.p() * unit.q() <= 0.0) {
        throw InvalidParams("composite transform leaves the fractional family");
    }
    MoebiusParams out;
    out.sign = unit.p() > 0.0 ? 1 : -1;
    out.phi = 0.5 * std::log(unit.p() / unit.q());
    out.alpha = Q / P;
    detail::check_moebius(out);
    return out;
}

struct MotionWitness {
    Mat3 A = identity3;  // boost in the (x1, x2) plane
    Mat3 B = identity3;  // determined by alpha
    Mat3 S = identity3;  // diag(-1, -1, 1) for sign -1
    Vec3 translation{0.0, 0.0, 0.0};

    Mat3 linear() const { return S * A * B; }
};

inline Mat3 boost_matrix(double phi)
{
    const double c = std::cosh(phi), s = std::sinh(phi);
    return {{{c, s, 0.0}, {s, c, 0.0}, {0.0, 0.0, 1.0}}};
}

inline Mat3 alpha_matrix(const SplitComplex& alpha)
{
    const double a = alpha.re(), b = alpha.im();
    const double d = 1.0 - a * a + b * b;
    if (std::abs(d) < 1e-9) {
        throw InvalidParams("|alpha|^2 = 1: no motion matrix (1 - a^2 + b^2 = " + format_double(d) + ")");
    }
    return {{{(1 + a * a + b * b) / d, -2 * a * b / d, -2 * a / d},
             {2 * a * b / d, (1 - a * a - b * b) / d, -2 * b / d},
             {-2 * a / d, 2 * b / d, (1 + a * a - b * b) / d}}};
}

// Linear part carrying Psi' of canonical data g to Psi' of the transformed data:
// S A B Psi'(z) = Psi~'(z).
inline MotionWitness motion_witness(const MoebiusParams& m)
{
    detail::check_moebius(m);
    if (m.form != MoebiusForm::Fractional) {
        throw InvalidParams("motion witness is defined for the fractional form");
    }
    MotionWitness w;
    w.A = boost_matrix(m.phi);
    w.B = alpha_matrix(m.alpha);
    if (m.sign == -1) {
        w.S = {{{-1.0, 0.0, 0.0}, {0.0, -1.0, 0.0}, {0.0, 0.0, 1.0}}};
    }
    return w;
}

// max over the lattice of |S A B Psi'(z) - Psi~'(z)| (componentwise, both parts).
inline double witness_discrepancy(const HoloExpr& g, const MoebiusParams& m, const Rect& domain, const GridSpec& grid)
{
    check_grid(domain, grid);
    const MotionWitness w = motion_witness(m);
    const Mat3 L = w.linear();
    const GeneratingData a = GeneratingData::canonical(g);
    const GeneratingData b = GeneratingData::canonical(moebius_transform(g, m));
    const double hu = (domain.u_max - domain.u_min) / (grid.nu - 1);
    const double hv = (domain.v_max - domain.v_min) / (grid.nv - 1);
    double worst = 0.0;
    for (int j = 0; j < grid.nv; ++j) {
        for (int i = 0; i < grid.nu; ++i) {
            const SplitComplex z{domain.u_min + i * hu, domain.v_min + j * hv};
            const SplitVec3 lhs = L * curve_derivative(a, z);
            const SplitVec3 rhs = curve_derivative(b, z);
            for (std::size_t k = 0; k < 3; ++k) {
                worst = std::max({worst, std::abs(lhs[k].re() - rhs[k].re()), std::abs(lhs[k].im() - rhs[k].im())});
            }
        }
    }
    return worst;
}

// Gauss curvature of the surface of canonical data g at z.
inline double canonical_curvature(const GeneratingData& canonical_data, const SplitComplex& z)
{
    return curvatures(forms_from_jet(surface_jet(canonical_data, z.re(), z.im()))).K;
}

// -16 |g'|^4 / (1 - |g|^2)^4 for the real part of canonical data g.
inline double canonical_curvature_formula(const HoloExpr& g, const SplitComplex& z)
{
    const SplitComplex gv = eval(g, z);
    const SplitComplex gp = eval(derivative(g), z);
    const double n_gp = gp.re() * gp.re() - gp.im() * gp.im();
    const double n_g = gv.re() * gv.re() - gv.im() * gv.im();
    return -16.0 * n_gp * n_gp / std::pow(1.0 - n_g, 4);
}

// ---------------------------------------------------------------------------
// Surface identity

struct RigidMotion {
    Mat3 M = identity3;
    Vec3 t{0.0, 0.0, 0.0};
};

struct CoincidenceOptions {
    double step = 0.05;  // canonical lattice step
    CompareOptions compare;
    CanonicalizeOptions canonicalize;
};

struct CoincidenceResult {
    bool coincide = false;
    CurvatureMatch match;
    Rect w_domain1;
    Rect w_domain2;
    // Least-squares affine map X2(w) ~ M X1(gauge(w)) + t over the overlap, when the fields match.
    std::optional<RigidMotion> motion;
    double motion_residual = nan_value;       // max |X2 - M X1 - t| over overlap nodes
    double motion_metric_defect = nan_value;  // max |M^T eta M - eta|
};

namespace detail {

// Points X(w) = part(Psi(z(w)) - Psi(z0)) of a canonicalized surface.
class CanonicalPoints {
public:
    CanonicalPoints(const CanonicalizationResult& res, Part part)
        : res_(res), part_(part),
          integ_{PathIntegrator(res.data->integrand()[0]), PathIntegrator(res.data->integrand()[1]),
                 PathIntegrator(res.data->integrand()[2])}
    {
    }

    Vec3 operator()(const SplitComplex& w) const
    {
        const SplitComplex z = res_.z_of_w(w);
        return select_part({integ_[0](res_.z0, z), integ_[1](res_.z0, z), integ_[2](res_.z0, z)}, part_);
    }

private:
    const CanonicalizationResult& res_;
    Part part_;
    std::array<PathIntegrator, 3> integ_;
};

// Solves the 4x4 system by Gaussian elimination with partial pivoting.
inline std::optional<std::array<double, 4>> solve4(std::array<std::array<double, 5>, 4> m)
{
    for (int c = 0; c < 4; ++c) {
        int piv = c;
        for (int r = c + 1; r < 4; ++r) {
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) {
                piv = r;
            }
        }
        if (std::abs(m[piv][c]) < 1e-300) {
            return std::nullopt;
        }
        std::swap(m[c], m[piv]);
        for (int r = 0; r < 4; ++r) {
            if (r == c) {
                continue;
            }
            const double k = m[r][c] / m[c][c];
            for (int k2 = c; k2 < 5; ++k2) {
                m[r][k2] -= k * m[c][k2];
            }
        }
    }
    return std::array<double, 4>{m[0][4] / m[0][0], m[1][4] / m[1][1], m[2][4] / m[2][2], m[3][4] / m[3][3]};
}

inline GridSpec lattice_for(const Rect& r, double step)
{
    const auto n = [&](double len) { return std::max(3, static_cast<int>(std::ceil(len / step - 1e-9)) + 1); };
    return {n(r.u_max - r.u_min), n(r.v_max - r.v_min)};
}

inline CanonicalizationResult canonicalize_data(const GeneratingData& d, const Rect& z_domain,
                                                const CanonicalizeOptions& opt)
{
    return canonicalize_region(d.f(), d.g(), z_domain, 1, opt);
}

} // namespace detail

// Canonicalizes each data set on its own z-rectangle and compares the canonical
// curvature fields modulo gauge. When they match, a motion is fitted between
// the two canonical patches as an independent witness.
inline CoincidenceResult surfaces_coincide(const GeneratingData& d1, const Rect& z_domain1, const GeneratingData& d2,
                                           const Rect& z_domain2, const CoincidenceOptions& opt = {})
{
    const CanonicalizationResult r1 = detail::canonicalize_data(d1, z_domain1, opt.canonicalize);
    const CanonicalizationResult r2 = detail::canonicalize_data(d2, z_domain2, opt.canonicalize);
    CoincidenceResult out;
    out.w_domain1 = r1.w_domain;
    out.w_domain2 = r2.w_domain;
    const ScalarField K1 = curvature_field(r1, r1.w_domain, detail::lattice_for(r1.w_domain, opt.step), d1.part());
    ScalarField K2 = curvature_field(r2, r2.w_domain, detail::lattice_for(r2.w_domain, opt.step), d2.part());
    K2.evaluator = nullptr;
    CompareOptions copt = opt.compare;
    if (copt.coarse_step <= 0.0) {
        copt.coarse_step = opt.step;
    }
    out.match = compare_curvature_fields(K1, K2, copt);
    out.coincide = out.match.same;
    if (!out.coincide) {
        return out;
    }

    // Affine fit X2 = M X1 + t, one 4x4 normal system per output coordinate.
    const detail::CanonicalPoints X1(r1, d1.part());
    const detail::CanonicalPoints X2(r2, d2.part());
    std::vector<std::pair<Vec3, Vec3>> pairs;
    for (int j = 0; j < K2.grid.nv; ++j) {
        for (int i = 0; i < K2.grid.nu; ++i) {
            const double ub = K2.u_at(i), vb = K2.v_at(j);
            const auto [u, v] = out.match.gauge(ub, vb);
            if (!std::isfinite(K2.at(i, j)) || !std::isfinite(K1.value(u, v))) {
                continue;
            }
            try {
                pairs.emplace_back(X1({u, v}), X2({ub, vb}));
            }
            catch (const Error&) {
            }
        }
    }
    if (pairs.size() < 4) {
        return out;
    }
    std::array<std::array<double, 4>, 4> ata{};
    for (const auto& [a, b] : pairs) {
        const std::array<double, 4> x{a[0], a[1], a[2], 1.0};
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                ata[r][c] += x[r] * x[c];
            }
        }
    }
    RigidMotion motion;
    for (int row = 0; row < 3; ++row) {
        std::array<std::array<double, 5>, 4> sys{};
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                sys[r][c] = ata[r][c];
            }
        }
        for (const auto& [a, b] : pairs) {
            const std::array<double, 4> x{a[0], a[1], a[2], 1.0};
            for (int r = 0; r < 4; ++r) {
                sys[r][4] += x[r] * b[row];
            }
        }
        const auto sol = detail::solve4(sys);
        if (!sol) {
            return out;
        }
        motion.M[row] = {(*sol)[0], (*sol)[1], (*sol)[2]};
        motion.t[row] = (*sol)[3];
    }
    double worst = 0.0;
    for (const auto& [a, b] : pairs) {
        const Vec3 d = b - (motion.M * a + motion.t);
        worst = std::max(worst, euclidean_norm(d));
    }
    out.motion = motion;
    out.motion_residual = worst;
    out.motion_metric_defect = metric_defect(motion.M);
    return out;
}

inline CoincidenceResult surfaces_coincide(const GeneratingData& d1, const GeneratingData& d2, const Rect& z_domain,
                                           const CoincidenceOptions& opt = {})
{
    return surfaces_coincide(d1, z_domain, d2, z_domain, opt);
}

} // namespace lmsurf
