// Two generating pairs for one surface: (1, z) and (exp z, exp z). The second is
// moved to canonical parameters, the curvature fields are matched modulo the
// canonical gauge and the rigid motion between the patches is recovered.
// A Moebius-type change of g is then checked against its SO(1,2) witness.

#include <cstdio>

#include <lmsurf/lmsurf.hpp>

using namespace lmsurf;

int main()
{
    const auto enneper = GeneratingData::general(parse_expr("1"), parse_expr("z"));
    const auto expo = GeneratingData::general(parse_expr("exp(z)"), parse_expr("exp(z)"));

    // |exp z|^2 = exp(2u) = 1 on u = 0, where the metric degenerates: keep both regions
    // off the locus |g|^2 = 1.
    const Rect d1{0.2, 1.0, -0.4, 0.4};
    const Rect d2{-1.0, -0.4, -0.3, 0.3};
    const auto res = canonicalize_region(parse_expr("exp(z)"), parse_expr("exp(z)"), d2);
    std::printf("canonicalize(exp z, exp z): affine = %s, w-square [%.3f, %.3f]^2, ODE residual %.2e\n",
                res.affine() ? "yes" : "no", res.w_domain.u_min, res.w_domain.u_max,
                res.ode_residual(res.w_domain, {11, 11}).max);

    const CoincidenceResult c = surfaces_coincide(enneper, d1, expo, d2);
    std::printf("coincide: %s (discrepancy %.2e over %zu nodes, gauge eps=%d A=%.6f B=%.6f)\n",
                c.coincide ? "yes" : "no", c.match.max_discrepancy, c.match.overlap_nodes, c.match.gauge.eps,
                c.match.gauge.A, c.match.gauge.B);
    if (c.motion) {
        std::printf("rigid motion residual %.2e, metric defect %.2e\n", c.motion_residual, c.motion_metric_defect);
    }

    const auto three = GeneratingData::general(parse_expr("1"), parse_expr("3*z"));
    const CoincidenceResult d = surfaces_coincide(enneper, three, {-0.3, 0.3, -0.3, 0.3});
    std::printf("(1, z) vs (1, 3z): %s\n", d.coincide ? "coincide" : "distinct");

    MoebiusParams m;
    m.phi = 0.3;
    m.alpha = SplitComplex(0.2, 0.1);
    const HoloExpr g = parse_expr("z");
    std::printf("g~ = %s\n", to_string(moebius_transform(g, m)).c_str());
    std::printf("witness |S A B Psi' - Psi~'| = %.2e on a 5x5 grid\n",
                witness_discrepancy(g, m, {-0.5, 0.5, -0.5, 0.5}, {5, 5}));
    const SplitComplex z(0.2, -0.1);
    std::printf("K at z = %s: %.15g before, %.15g after\n", to_string(z).c_str(), canonical_curvature_formula(g, z),
                canonical_curvature_formula(moebius_transform(g, m), z));
    return 0;
}
