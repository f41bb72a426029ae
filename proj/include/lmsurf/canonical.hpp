#pragma once

// Canonical parameters: the change of variable z = z(w) with (z')^2 f(z) g'(z) = 1,
// checks of the canonical coefficient shapes, the curvature PDE residual and the
// gauge search that identifies two curvature fields.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "exp_poly.hpp"
#include "expr.hpp"
#include "field.hpp"
#include "geometry.hpp"
#include "ode.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "weierstrass.hpp"

namespace lmsurf {

struct CanonicalizeOptions {
    OdeOptions ode;
    // f g' null components at or below this are outside the square-root cone.
    double branch_eps = 1e-12;
};

struct ResidualStats {
    double max = 0.0;
    double mean = 0.0;
    std::size_t samples = 0;
};

class CanonicalizationResult {
public:
    HoloExpr f;
    HoloExpr g;
    HoloExpr phi;        // f g'
    HoloExpr phi_prime;  // (f g')'
    int sign = 1;
    SplitComplex w0;
    SplitComplex z0;
    Rect w_domain;
    std::optional<SplitComplex> slope;   // z = z0 + slope (w - w0) when f g' is constant
    std::optional<HoloExpr> g_tilde_expr;  // symbolic g(z(w)) in the affine case, variable named z
    DenseTrajectory p_of_sigma;          // null components of z(w); empty in the affine case
    DenseTrajectory q_of_tau;
    std::optional<GeneratingData> data;  // general(f, g)

    bool affine() const { return slope.has_value(); }

    bool covers(const SplitComplex& w) const
    {
        if (affine()) {
            return true;
        }
        return p_of_sigma.covers(w.p()) && q_of_tau.covers(w.q());
    }

    SplitComplex z_of_w(const SplitComplex& w) const
    {
        if (affine()) {
            return z0 + *slope * (w - w0);
        }
        return SplitComplex::from_null(p_of_sigma.value(w.p()), q_of_tau.value(w.q()));
    }

    // z'(w) from the dense output of the solver.
    SplitComplex dz_dw_dense(const SplitComplex& w) const
    {
        if (affine()) {
            return *slope;
        }
        return SplitComplex::from_null(p_of_sigma.derivative(w.p()), q_of_tau.derivative(w.q()));
    }

    // z'(w) = sign / sqrt(f g') at z(w).
    SplitComplex dz_dw(const SplitComplex& w) const
    {
        if (affine()) {
            return *slope;
        }
        return rhs_at(z_of_w(w));
    }

    // z'' = -(1/2) (f g')' (z')^4
    SplitComplex d2z_dw2(const SplitComplex& w) const
    {
        if (affine()) {
            return 0.0;
        }
        const SplitComplex z = z_of_w(w);
        const SplitComplex zp = rhs_at(z);
        return -0.5 * eval(phi_prime, z) * pow(zp, 4);
    }

    SplitComplex g_tilde(const SplitComplex& w) const
    {
        if (g_tilde_expr) {
            return eval(*g_tilde_expr, w);
        }
        return eval(g, z_of_w(w));
    }

    // |(z')^2 f g' - 1| over a w-lattice, z' from the dense output.
    ResidualStats ode_residual(const Rect& domain, const GridSpec& grid) const
    {
        ResidualStats stats;
        double total = 0.0;
        const double hu = (domain.u_max - domain.u_min) / (grid.nu - 1);
        const double hv = (domain.v_max - domain.v_min) / (grid.nv - 1);
        for (int j = 0; j < grid.nv; ++j) {
            for (int i = 0; i < grid.nu; ++i) {
                const SplitComplex w{domain.u_min + i * hu, domain.v_min + j * hv};
                if (!covers(w)) {
                    continue;
                }
                const SplitComplex z = z_of_w(w);
                const SplitComplex zp = dz_dw_dense(w);
                const double r = null_abs(zp * zp * eval(phi, z) - 1.0);
                stats.max = std::max(stats.max, r);
                total += r;
                ++stats.samples;
            }
        }
        stats.mean = stats.samples != 0 ? total / static_cast<double>(stats.samples) : 0.0;
        return stats;
    }

    // Canonical curve derivatives Phi'(w) = Psi'(z) z', Phi'' = Psi'' z'^2 + Psi' z''.
    Jet canonical_jet(const SplitComplex& w, Part part) const
    {
        const SplitComplex z = z_of_w(w);
        const SplitComplex zp = dz_dw(w);
        const SplitComplex zpp = d2z_dw2(w);
        const SplitVec3 d1 = curve_derivative(*data, z);
        const SplitVec3 d2 = curve_second_derivative(*data, z);
        SplitVec3 c1{};
        SplitVec3 c2{};
        for (std::size_t k = 0; k < 3; ++k) {
            c1[k] = d1[k] * zp;
            c2[k] = d2[k] * zp * zp + d1[k] * zpp;
        }
        return jet_from_curve(c1, c2, part);
    }

private:
    SplitComplex rhs_at(const SplitComplex& z) const
    {
        const double fp = eval_branch(phi, z.p(), NullBranch::Plus);
        const double fq = eval_branch(phi, z.q(), NullBranch::Minus);
        if (!(fp > 0.0) || !(fq > 0.0)) {
            throw BranchError("f g' left the square-root cone at z = " + to_string(z));
        }
        return SplitComplex::from_null(sign / std::sqrt(fp), sign / std::sqrt(fq));
    }
};

// Solves z'(w) = sign / sqrt(f(z) g'(z)), z(w0) = z0, over the null box of
// `domain` (a rectangle in the w-plane). The two null components decouple into
// scalar ODEs dp/dsigma = sign / sqrt(Phi+(p)) and dq/dtau = sign / sqrt(Phi-(q)).
inline CanonicalizationResult canonicalize(const HoloExpr& f, const HoloExpr& g, const SplitComplex& w0,
                                           const SplitComplex& z0, const Rect& domain, int sign = 1,
                                           const CanonicalizeOptions& opt = {})
{
    if (sign != 1 && sign != -1) {
        throw InvalidParams("sign must be +1 or -1");
    }
    CanonicalizationResult res;
    res.f = f;
    res.g = g;
    res.phi = simplify(f * derivative(g));
    res.phi_prime = derivative(res.phi);
    res.data = GeneratingData::general(f, g);
    res.sign = sign;
    res.w0 = w0;
    res.z0 = z0;
    res.w_domain = domain;

    const auto branch_value = [&](double x, NullBranch br) {
        double value = 0.0;
        try {
            value = eval_branch(res.phi, x, br);
        }
        catch (const Error& err) {
            throw BranchError(std::string("f g' undefined along the solve: ") + err.what());
        }
        if (!(value > opt.branch_eps)) {
            throw BranchError("f g' has no principal square root at " +
                              std::string(br == NullBranch::Plus ? "p = " : "q = ") + format_double(x) +
                              " (null component " + format_double(value) + ")");
        }
        return value;
    };
    branch_value(z0.p(), NullBranch::Plus);
    branch_value(z0.q(), NullBranch::Minus);

    if (auto poly = to_exp_poly(res.phi)) {
        if (auto c = poly->as_constant()) {
            res.slope = sign * inverse(sqrt(*c));
            const HoloExpr map = cst(z0) + cst(*res.slope) * (var_z() - cst(w0));
            const HoloExpr composed = substitute(g, map);
            if (auto gp = to_exp_poly(composed)) {
                res.g_tilde_expr = gp->pruned(1e-15).to_expr();
            }
            else {
                res.g_tilde_expr = simplify(composed);
            }
            return res;
        }
    }

    const double s_lo = std::min(domain.u_min + domain.v_min, w0.p());
    const double s_hi = std::max(domain.u_max + domain.v_max, w0.p());
    const double t_lo = std::min(domain.u_min - domain.v_max, w0.q());
    const double t_hi = std::max(domain.u_max - domain.v_min, w0.q());
    const double s = sign;
    parallel_for(2, [&](std::size_t which) {
        if (which == 0) {
            res.p_of_sigma = solve_ode([&](double, double p) { return s / std::sqrt(branch_value(p, NullBranch::Plus)); },
                                       w0.p(), z0.p(), s_lo, s_hi, opt.ode);
        }
        else {
            res.q_of_tau = solve_ode([&](double, double q) { return s / std::sqrt(branch_value(q, NullBranch::Minus)); },
                                     w0.q(), z0.q(), t_lo, t_hi, opt.ode);
        }
    });
    return res;
}

// Canonicalization over the image of a z-rectangle: z0 is the rectangle centre,
// w0 = 0, and the w-rectangle is the largest square centred in the image null box.
inline CanonicalizationResult canonicalize_region(const HoloExpr& f, const HoloExpr& g, const Rect& z_domain,
                                                  int sign = 1, const CanonicalizeOptions& opt = {})
{
    const SplitComplex z0 = z_domain.center();
    const HoloExpr root = sqrt(simplify(f * derivative(g)));
    const SplitComplex lo = SplitComplex::from_null(z_domain.u_min + z_domain.v_min, z_domain.u_min - z_domain.v_max);
    const SplitComplex hi = SplitComplex::from_null(z_domain.u_max + z_domain.v_max, z_domain.u_max - z_domain.v_min);
    SplitComplex a;
    SplitComplex b;
    try {
        a = sign * integrate_path(root, z0, lo, 1e-12);
        b = sign * integrate_path(root, z0, hi, 1e-12);
    }
    catch (const DomainError& err) {
        throw BranchError(std::string("f g' leaves the square-root cone on the domain: ") + err.what());
    }
    const double sp_lo = std::min(a.p(), b.p()), sp_hi = std::max(a.p(), b.p());
    const double sq_lo = std::min(a.q(), b.q()), sq_hi = std::max(a.q(), b.q());
    const double half = 0.5 * std::min(sp_hi - sp_lo, sq_hi - sq_lo) / 2.0;
    const SplitComplex centre = SplitComplex::from_null(0.5 * (sp_lo + sp_hi), 0.5 * (sq_lo + sq_hi));
    const Rect w_domain{centre.re() - half, centre.re() + half, centre.im() - half, centre.im() + half};
    return canonicalize(f, g, 0.0, z0, w_domain, sign, opt);
}

// The surface in canonical parameters, sampled on a w-lattice.
inline SurfacePatch canonical_patch(const CanonicalizationResult& res, const Rect& domain, const GridSpec& grid,
                                    Part part = Part::Real, const SurfaceOptions& sopt = {})
{
    if (res.g_tilde_expr) {
        return evaluate_surface(GeneratingData::canonical(*res.g_tilde_expr, res.w0, part), domain, grid, sopt);
    }
    check_grid(domain, grid);
    SurfacePatch patch;
    patch.domain = domain;
    patch.grid = grid;
    patch.hu = (domain.u_max - domain.u_min) / (grid.nu - 1);
    patch.hv = (domain.v_max - domain.v_min) / (grid.nv - 1);
    patch.points.assign(static_cast<std::size_t>(grid.nu) * static_cast<std::size_t>(grid.nv), Vec3{});
    patch.valid.assign(patch.points.size(), 1);
    patch.provenance = GeneratingData::general(res.f, res.g, res.z0, part);
    patch.jet = [res, part](double u, double v) { return res.canonical_jet({u, v}, part); };

    QuadratureOptions qopt;
    qopt.abs_tol = sopt.tol;
    const GeneratingData data = *patch.provenance;
    std::array<PathIntegrator, 3> integ{PathIntegrator(data.integrand()[0], qopt),
                                        PathIntegrator(data.integrand()[1], qopt),
                                        PathIntegrator(data.integrand()[2], qopt)};
    patch.method = integ[0].symbolic() && integ[1].symbolic() && integ[2].symbolic() ? IntegrationMethod::Symbolic
                                                                                       : IntegrationMethod::Quadrature;
    parallel_for(
        static_cast<std::size_t>(grid.nv),
        [&](std::size_t jj) {
            const int j = static_cast<int>(jj);
            for (int i = 0; i < grid.nu; ++i) {
                const std::size_t k = patch.index(i, j);
                try {
                    const SplitComplex w{patch.u_at(i), patch.v_at(j)};
                    const SplitComplex z = res.z_of_w(w);
                    const SplitVec3 c{integ[0](res.z0, z), integ[1](res.z0, z), integ[2](res.z0, z)};
                    patch.points[k] = select_part(c, part);
                    const Jet jet = patch.jet(w.re(), w.im());
                    patch.valid[k] = metric_degenerate(jet.xu, jet.xv) ? 0 : 1;
                }
                catch (const Error&) {
                    patch.valid[k] = 0;
                }
            }
        },
        sopt.threads);
    return patch;
}

// Gauss curvature over the w-plane, evaluated exactly at z(w).
inline ScalarField curvature_field(const CanonicalizationResult& res, const Rect& domain, const GridSpec& grid,
                                   Part part = Part::Real)
{
    auto fn = [res, part](double u, double v) {
        const SplitComplex w{u, v};
        if (!res.covers(w)) {
            return nan_value;
        }
        return curvatures(forms_from_jet(res.canonical_jet(w, part))).K;
    };
    return sample_field(fn, domain, grid);
}

// Gauss curvature of a patch from its forms.
inline ScalarField curvature_field(const SurfacePatch& patch, const FormsOptions& opt = {})
{
    const FormsField forms = compute_all_forms(patch, opt);
    ScalarField field;
    field.domain = patch.domain;
    field.grid = patch.grid;
    field.hu = patch.hu;
    field.hv = patch.hv;
    field.values.resize(patch.points.size(), nan_value);
    for (std::size_t k = 0; k < forms.curv.size(); ++k) {
        if (forms.curv[k]) {
            field.values[k] = forms.curv[k]->K;
        }
    }
    if (patch.jet) {
        field.evaluator = [jet = patch.jet](double u, double v) {
            try {
                return curvatures(forms_from_jet(jet(u, v))).K;
            }
            catch (const Error&) {
                return nan_value;
            }
        };
    }
    return field;
}

// ---------------------------------------------------------------------------
// Canonical coefficient shapes
//   K < 0:  -E = G = 1/sqrt(-K), F = 0, L = -1, M = 0, N = -1
//   K > 0:   E = -G = 1/sqrt(K), F = 0, L = 0,  M = 1, N = 0

struct CoefficientResiduals {
    double e_plus_g = 0.0;
    double f = 0.0;
    double e_vs_k = 0.0;
    double l = 0.0;
    double m = 0.0;
    double n = 0.0;

    double max() const { return std::max({e_plus_g, f, e_vs_k, l, m, n}); }
};

inline CoefficientResiduals coefficient_residuals(const FundamentalForms& ff, double K)
{
    CoefficientResiduals r;
    r.e_plus_g = std::abs(ff.E + ff.G);
    r.f = std::abs(ff.F);
    if (K < 0.0) {
        r.e_vs_k = std::abs(-ff.E - 1.0 / std::sqrt(-K));
        r.l = std::abs(ff.L + 1.0);
        r.m = std::abs(ff.M);
        r.n = std::abs(ff.N + 1.0);
    }
    else {
        r.e_vs_k = std::abs(ff.E - 1.0 / std::sqrt(K));
        r.l = std::abs(ff.L);
        r.m = std::abs(ff.M - 1.0);
        r.n = std::abs(ff.N);
    }
    return r;
}

struct CanonicalReport {
    std::size_t nodes = 0;
    std::size_t negative_nodes = 0;
    std::size_t positive_nodes = 0;
    CoefficientResiduals max;
    CoefficientResiduals mean;
    double worst = 0.0;
    double worst_u = 0.0;
    double worst_v = 0.0;
    DerivativeMethod method = DerivativeMethod::Auto;

    bool passes(double tol) const { return nodes > 0 && worst < tol; }
};

struct VerifyOptions {
    FormsOptions forms;
    std::function<bool(double, double)> node_filter;  // keep node when true; all nodes when empty
};

inline CanonicalReport verify_canonical_coefficients(const SurfacePatch& patch, const VerifyOptions& opt = {})
{
    CanonicalReport rep;
    const FormsField field = compute_all_forms(patch, opt.forms);
    CoefficientResiduals sum;
    for (int j = 0; j < patch.grid.nv; ++j) {
        for (int i = 0; i < patch.grid.nu; ++i) {
            const auto& ff = field.at(i, j);
            if (!ff || (opt.node_filter && !opt.node_filter(patch.u_at(i), patch.v_at(j)))) {
                continue;
            }
            const double K = field.curvature_at(i, j)->K;
            if (!std::isfinite(K) || K == 0.0) {
                continue;
            }
            rep.method = ff->method;
            const CoefficientResiduals r = coefficient_residuals(*ff, K);
            ++rep.nodes;
            (K < 0.0 ? rep.negative_nodes : rep.positive_nodes) += 1;
            rep.max.e_plus_g = std::max(rep.max.e_plus_g, r.e_plus_g);
            rep.max.f = std::max(rep.max.f, r.f);
            rep.max.e_vs_k = std::max(rep.max.e_vs_k, r.e_vs_k);
            rep.max.l = std::max(rep.max.l, r.l);
            rep.max.m = std::max(rep.max.m, r.m);
            rep.max.n = std::max(rep.max.n, r.n);
            sum.e_plus_g += r.e_plus_g;
            sum.f += r.f;
            sum.e_vs_k += r.e_vs_k;
            sum.l += r.l;
            sum.m += r.m;
            sum.n += r.n;
            if (r.max() > rep.worst) {
                rep.worst = r.max();
                rep.worst_u = patch.u_at(i);
                rep.worst_v = patch.v_at(j);
            }
        }
    }
    if (rep.nodes > 0) {
        const double n = static_cast<double>(rep.nodes);
        rep.mean = {sum.e_plus_g / n, sum.f / n, sum.e_vs_k / n, sum.l / n, sum.m / n, sum.n / n};
    }
    return rep;
}

// ---------------------------------------------------------------------------
// (ln sqrt(-+K))_uu - (ln sqrt(-+K))_vv - 2 sqrt(-+K)

enum class CurvatureSign { Negative, Positive };

struct PdeOptions {
    double h = 1e-3;
    int fd_order = 4;
};

inline ScalarField ganchev_pde_residual(const ScalarField& K, CurvatureSign sign, const PdeOptions& opt = {})
{
    ScalarField out = K;
    out.evaluator = nullptr;
    const double s = sign == CurvatureSign::Negative ? -1.0 : 1.0;
    const int r = opt.fd_order / 2;
    const auto lambda = [&](double k) {
        const double a = s * k;
        return a > 0.0 ? 0.5 * std::log(a) : nan_value;
    };
    for (int j = 0; j < K.grid.nv; ++j) {
        for (int i = 0; i < K.grid.nu; ++i) {
            double res = nan_value;
            const double k0 = K.at(i, j);
            if (K.evaluator) {
                const double u = K.u_at(i), v = K.v_at(j);
                const auto d = central_partials<double>(
                    [&](int a, int b) { return lambda(K.evaluator(u + a * opt.h, v + b * opt.h)); }, opt.h, opt.h,
                    opt.fd_order);
                res = d[2] - d[4] - 2.0 * std::sqrt(s * k0);
            }
            else if (i - r >= 0 && j - r >= 0 && i + r < K.grid.nu && j + r < K.grid.nv) {
                const auto d = central_partials<double>([&](int a, int b) { return lambda(K.at(i + a, j + b)); }, K.hu,
                                                        K.hv, opt.fd_order);
                res = d[2] - d[4] - 2.0 * std::sqrt(s * k0);
            }
            out.values[out.index(i, j)] = std::isfinite(res) ? res : nan_value;
        }
    }
    return out;
}

struct FieldSummary {
    double max_abs = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t defined = 0;
};

inline FieldSummary summarize(const ScalarField& field, const std::function<bool(double, double)>& filter = {})
{
    FieldSummary s;
    s.min = std::numeric_limits<double>::infinity();
    s.max = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < field.grid.nv; ++j) {
        for (int i = 0; i < field.grid.nu; ++i) {
            const double x = field.at(i, j);
            if (!std::isfinite(x) || (filter && !filter(field.u_at(i), field.v_at(j)))) {
                continue;
            }
            ++s.defined;
            s.max_abs = std::max(s.max_abs, std::abs(x));
            s.min = std::min(s.min, x);
            s.max = std::max(s.max, x);
        }
    }
    if (s.defined == 0) {
        s.min = s.max = nan_value;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Gauge search

struct CompareOptions {
    double tol = 1e-4;
    double coarse_step = 0.0;  // lattice step for the translation search; 0 = grid step of K2
    std::size_t min_nodes = 16;
    double min_overlap = 0.25;
    std::size_t refine_candidates = 6;
};

struct CurvatureMatch {
    bool same = false;
    CanonicalGauge gauge;
    double max_discrepancy = std::numeric_limits<double>::infinity();
    std::size_t overlap_nodes = 0;
    double overlap_fraction = 0.0;
};

namespace detail {

struct GaugeScore {
    double max = 0.0;
    double mean_sq = 0.0;
    std::size_t count = 0;
};

} // namespace detail

// Finds the gauge with apply_gauge(gauge, K1) ~ K2 on K2's lattice. The
// discrepancy at a node is |K1 - K2| / max(1, |K2|). Without an evaluator on K1
// only lattice-aligned translations are tried.
inline CurvatureMatch compare_curvature_fields(const ScalarField& K1, const ScalarField& K2,
                                               const CompareOptions& opt = {})
{
    struct Node {
        double u, v, k;
    };
    std::vector<Node> nodes;
    for (int j = 0; j < K2.grid.nv; ++j) {
        for (int i = 0; i < K2.grid.nu; ++i) {
            if (std::isfinite(K2.at(i, j))) {
                nodes.push_back({K2.u_at(i), K2.v_at(j), K2.at(i, j)});
            }
        }
    }
    const std::size_t needed =
        std::max(opt.min_nodes, static_cast<std::size_t>(std::ceil(opt.min_overlap * static_cast<double>(nodes.size()))));
    const double slack = 1e-9 * std::max(1.0, std::max(K1.hu, K1.hv));

    // The coarse scan scores a strided subset of the nodes.
    std::vector<Node> coarse;
    const std::size_t stride = std::max<std::size_t>(1, nodes.size() / 64);
    for (std::size_t k = 0; k < nodes.size(); k += stride) {
        coarse.push_back(nodes[k]);
    }

    const auto score = [&](const CanonicalGauge& g, const std::vector<Node>& set) {
        detail::GaugeScore s;
        double sq = 0.0;
        for (const Node& n : set) {
            const auto [u, v] = g(n.u, n.v);
            if (u < K1.domain.u_min - slack || u > K1.domain.u_max + slack || v < K1.domain.v_min - slack ||
                v > K1.domain.v_max + slack) {
                continue;
            }
            const double k1 = K1.value(u, v);
            if (!std::isfinite(k1)) {
                continue;
            }
            const double d = std::abs(k1 - n.k) / std::max(1.0, std::abs(n.k));
            s.max = std::max(s.max, d);
            sq += d * d;
            ++s.count;
        }
        s.mean_sq = s.count != 0 ? sq / static_cast<double>(s.count) : std::numeric_limits<double>::infinity();
        return s;
    };
    const auto adequate = [&](const detail::GaugeScore& s) { return s.count >= needed; };
    const auto coarse_adequate = [&](const detail::GaugeScore& s) {
        return static_cast<double>(s.count) * static_cast<double>(nodes.size()) >=
               static_cast<double>(needed) * static_cast<double>(coarse.size());
    };

    struct Candidate {
        CanonicalGauge g;
        detail::GaugeScore s;
    };
    std::vector<Candidate> found;
    const bool lattice_only = !K1.evaluator;
    const double step_u = lattice_only ? K1.hu : (opt.coarse_step > 0.0 ? opt.coarse_step : K2.hu);
    const double step_v = lattice_only ? K1.hv : (opt.coarse_step > 0.0 ? opt.coarse_step : K2.hv);
    for (int eps : {1, -1}) {
        const double ub_lo = std::min(eps * K2.domain.u_min, eps * K2.domain.u_max);
        const double ub_hi = std::max(eps * K2.domain.u_min, eps * K2.domain.u_max);
        const double vb_lo = std::min(eps * K2.domain.v_min, eps * K2.domain.v_max);
        const double vb_hi = std::max(eps * K2.domain.v_min, eps * K2.domain.v_max);
        // Lattice-only: translations that carry K2 nodes onto K1 nodes.
        const double a_base = lattice_only ? K1.domain.u_min - eps * K2.domain.u_min : 0.0;
        const double b_base = lattice_only ? K1.domain.v_min - eps * K2.domain.v_min : 0.0;
        const long ka_lo = static_cast<long>(std::floor((K1.domain.u_min - ub_hi - a_base) / step_u));
        const long ka_hi = static_cast<long>(std::ceil((K1.domain.u_max - ub_lo - a_base) / step_u));
        const long kb_lo = static_cast<long>(std::floor((K1.domain.v_min - vb_hi - b_base) / step_v));
        const long kb_hi = static_cast<long>(std::ceil((K1.domain.v_max - vb_lo - b_base) / step_v));
        for (long ka = ka_lo; ka <= ka_hi; ++ka) {
            for (long kb = kb_lo; kb <= kb_hi; ++kb) {
                const CanonicalGauge g{eps, a_base + static_cast<double>(ka) * step_u, b_base + static_cast<double>(kb) * step_v};
                const auto s = score(g, coarse);
                if (coarse_adequate(s)) {
                    found.push_back({g, s});
                }
            }
        }
    }
    if (found.empty()) {
        throw InconclusiveOverlap("curvature fields share fewer than " + std::to_string(needed) +
                                  " nodes under every candidate gauge");
    }
    std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) { return a.s.max < b.s.max; });

    // Rescore the best coarse candidates, and every candidate tied with the best, on all nodes.
    const double coarse_best = found.front().s.max;
    std::size_t keep = std::min(found.size(), opt.refine_candidates);
    while (keep < found.size() && found[keep].s.max <= coarse_best + 1e-12 + 1e-9 * coarse_best) {
        ++keep;
    }
    found.resize(keep);
    for (Candidate& c : found) {
        c.s = score(c.g, nodes);
    }
    std::erase_if(found, [&](const Candidate& c) { return !adequate(c.s); });
    if (found.empty()) {
        throw InconclusiveOverlap("curvature fields share fewer than " + std::to_string(needed) +
                                  " nodes under every candidate gauge");
    }
    if (!lattice_only) {
        for (Candidate& c : found) {
            // Compass search on the mean-square discrepancy.
            double step = 0.5 * std::max(step_u, step_v);
            while (step > 1e-9) {
                bool moved = false;
                for (const auto& [da, db] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}) {
                    const CanonicalGauge trial{c.g.eps, c.g.A + da * step, c.g.B + db * step};
                    const auto s = score(trial, nodes);
                    if (adequate(s) && s.mean_sq < c.s.mean_sq) {
                        c = {trial, s};
                        moved = true;
                        break;
                    }
                }
                if (!moved) {
                    step *= 0.5;
                }
            }
        }
    }
    std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) { return a.s.max < b.s.max; });

    // Ties: smallest |A| + |B|, then eps = +1.
    const double best = found.front().s.max;
    const Candidate* pick = &found.front();
    for (const Candidate& c : found) {
        if (c.s.max > best + 1e-12 + 1e-9 * best) {
            continue;
        }
        const double size_c = std::abs(c.g.A) + std::abs(c.g.B);
        const double size_p = std::abs(pick->g.A) + std::abs(pick->g.B);
        if (size_c < size_p - 1e-12 || (std::abs(size_c - size_p) <= 1e-12 && c.g.eps > pick->g.eps)) {
            pick = &c;
        }
    }
    CurvatureMatch m;
    m.gauge = pick->g;
    m.max_discrepancy = pick->s.max;
    m.overlap_nodes = pick->s.count;
    m.overlap_fraction = nodes.empty() ? 0.0 : static_cast<double>(pick->s.count) / static_cast<double>(nodes.size());
    m.same = m.max_discrepancy < opt.tol;
    return m;
}

} // namespace lmsurf
