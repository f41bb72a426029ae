// Builds the timelike Enneper surface from (f, g) = (1, z), exports both parts,
// checks the canonical shape of its forms and recognises it from a cubic fit.

#include <cstdio>
#include <fstream>

#include <lmsurf/lmsurf.hpp>

using namespace lmsurf;

int main()
{
    const Rect domain{-0.9, 0.9, -0.9, 0.9};
    const GridSpec grid{37, 37};
    const auto data = GeneratingData::general(parse_expr("1"), parse_expr("z"));

    for (const Part part : {Part::Real, Part::Imaginary}) {
        const SurfacePatch patch = evaluate_surface(data.with_part(part), domain, grid);
        const FormsField forms = compute_all_forms(patch);
        double max_h = 0.0;
        double k_lo = 1e300;
        double k_hi = -1e300;
        for (const auto& c : forms.curv) {
            if (c) {
                max_h = std::max(max_h, std::abs(c->H));
                k_lo = std::min(k_lo, c->K);
                k_hi = std::max(k_hi, c->K);
            }
        }
        const std::string name = "enneper_" + to_string(part) + ".obj";
        std::ofstream out(name);
        write_obj(out, patch);
        std::printf("%-5s part: %zu invalid samples, max|H| = %.2e, K in [%.4g, %.4g] -> %s\n", to_string(part).c_str(),
                    patch.invalid_count(), max_h, k_lo, k_hi, name.c_str());
    }

    // (1, z) is already canonical: g~ = z, so the canonical coefficient shapes hold.
    const auto canon = GeneratingData::canonical(parse_expr("z"));
    VerifyOptions vopt;
    vopt.node_filter = [](double u, double v) { return std::abs(1.0 - (u * u - v * v)) > 0.3; };
    for (const Part part : {Part::Real, Part::Imaginary}) {
        const CanonicalReport rep = verify_canonical_coefficients(evaluate_surface(canon.with_part(part), domain, grid), vopt);
        std::printf("canonical shape (%s): %zu nodes, worst residual %.2e\n", to_string(part).c_str(), rep.nodes,
                    rep.worst);
    }

    const CubicParametrization cubic = fit_cubic(evaluate_surface(data, domain, {9, 9}));
    const ClassificationVerdict v = classify_cubic(cubic);
    std::printf("fitted cubic: %s, f = %s, g = %s, scale %.12g\n", to_string(v.verdict).c_str(),
                v.f ? to_string(*v.f).c_str() : "-", v.g ? to_string(*v.g).c_str() : "-", v.scale);
    std::printf("fitted coefficients: %s\n", to_json(cubic).dump().c_str());
    return 0;
}
