#include <catch_amalgamated.hpp>

#include <cmath>

#include <lmsurf/canonical.hpp>
#include <lmsurf/parser.hpp>

using namespace lmsurf;
using Catch::Matchers::WithinAbs;

namespace {

double enneper_k(double u, double v)
{
    return -16.0 / std::pow(1.0 - (u * u - v * v), 4);
}

bool away_from_degeneracy(double u, double v) { return std::abs(1.0 - (u * u - v * v)) > 0.3; }

} // namespace

TEST_CASE("affine worked example", "[canonical]")
{
    // f = 2, g = z + 1, z(0) = -1: z(w) = w/sqrt(2) - 1, g~(w) = w/sqrt(2).
    const auto res = canonicalize(parse_expr("2"), parse_expr("z + 1"), 0.0, -1.0, {-1, 1, -1, 1});
    REQUIRE(res.affine());
    REQUIRE(res.g_tilde_expr);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK_THAT(res.slope->re(), WithinAbs(r, 1e-15));
    CHECK(res.slope->im() == 0.0);
    const auto poly = to_exp_poly(*res.g_tilde_expr);
    REQUIRE(poly);
    REQUIRE(poly->polynomial_degree() == 1);
    for (const auto& [key, c] : poly->terms()) {
        CHECK(key.n == 1);
        CHECK_THAT(c.re(), WithinAbs(r, 1e-10));
        CHECK_THAT(c.im(), WithinAbs(0.0, 1e-10));
    }
    const auto stats = res.ode_residual({-1, 1, -1, 1}, {11, 11});
    CHECK(stats.samples == 121);
    CHECK(stats.max < 1e-10);
    CHECK(null_abs(res.z_of_w({0.4, -0.2}) - (SplitComplex(0.4, -0.2) * r - 1.0)) < 1e-15);

    const auto neg = canonicalize(parse_expr("2"), parse_expr("z + 1"), 0.0, -1.0, {-1, 1, -1, 1}, -1);
    CHECK_THAT(neg.slope->re(), WithinAbs(-r, 1e-15));
}

TEST_CASE("already canonical data maps by a translation", "[canonical]")
{
    const auto res = canonicalize(parse_expr("1"), parse_expr("z"), 0.0, SplitComplex(0.1, 0.2), {-1, 1, -1, 1});
    REQUIRE(res.affine());
    CHECK(*res.slope == SplitComplex(1.0));
    CHECK(null_abs(res.g_tilde({0.3, 0.1}) - SplitComplex(0.4, 0.3)) < 1e-15);
}

TEST_CASE("exponential data against the closed-form solution", "[canonical]")
{
    // f = g = exp(z): z' = exp(-z), so exp(z(w)) = w + 1 with z(0) = 0.
    const Rect dom{-0.3, 0.3, -0.3, 0.3};
    const auto res = canonicalize(parse_expr("exp(z)"), parse_expr("exp(z)"), 0.0, 0.0, dom);
    REQUIRE_FALSE(res.affine());
    double worst = 0.0;
    for (double u = -0.3; u <= 0.3 + 1e-12; u += 0.05) {
        for (double v = -0.3; v <= 0.3 + 1e-12; v += 0.05) {
            const SplitComplex w(u, v);
            const SplitComplex exact = SplitComplex::from_null(std::log(w.p() + 1), std::log(w.q() + 1));
            worst = std::max(worst, null_abs(res.z_of_w(w) - exact));
        }
    }
    CHECK(worst < 1e-9);
    const auto stats = res.ode_residual(dom, {25, 25});
    CHECK(stats.samples == 625);
    CHECK(stats.max < 1e-8);
}

TEST_CASE("branch and sign errors", "[canonical]")
{
    CHECK_THROWS_AS(canonicalize(parse_expr("1"), parse_expr("z^3"), 0.0, 0.0, {-0.5, 0.5, -0.5, 0.5}), BranchError);
    // f g' = -1 has negative null components.
    CHECK_THROWS_AS(canonicalize(parse_expr("-1"), parse_expr("z"), 0.0, 0.0, {-0.5, 0.5, -0.5, 0.5}), BranchError);
    // f g' = 1 + z leaves the cone inside the box.
    CHECK_THROWS_AS(canonicalize(parse_expr("1"), parse_expr("z + 0.5*z^2"), 0.0, 0.0, {-2.5, 2.5, -0.1, 0.1}),
                    BranchError);
    CHECK_THROWS_AS(canonicalize(parse_expr("1"), parse_expr("z"), 0.0, 0.0, {-1, 1, -1, 1}, 0), InvalidParams);
}

TEST_CASE("canonical Enneper coefficient shapes", "[canonical]")
{
    const Rect dom{-0.4, 0.4, -0.4, 0.4};
    const auto real = evaluate_surface(GeneratingData::canonical(parse_expr("z")), dom, {33, 33});
    VerifyOptions opt;
    opt.node_filter = away_from_degeneracy;
    const auto rep = verify_canonical_coefficients(real, opt);
    CHECK(rep.nodes > 900);
    CHECK(rep.negative_nodes == rep.nodes);
    CHECK(rep.worst < 1e-10);
    opt.forms = {DerivativeMethod::FiniteDifference, 2};
    const auto fd = verify_canonical_coefficients(real, opt);
    CHECK(fd.method == DerivativeMethod::FiniteDifference);
    CHECK(fd.worst < 1e-2);

    const auto imag = evaluate_surface(GeneratingData::canonical(parse_expr("z"), 0.0, Part::Imaginary), dom, {33, 33});
    const auto rep_y = verify_canonical_coefficients(imag, {{}, away_from_degeneracy});
    CHECK(rep_y.positive_nodes == rep_y.nodes);
    CHECK(rep_y.max.l < 1e-10);
    CHECK(rep_y.max.m < 1e-10);
    CHECK(rep_y.max.n < 1e-10);

    // f = 1, g = 2z is isothermal but not canonical.
    const auto off = evaluate_surface(GeneratingData::general(parse_expr("1"), parse_expr("2*z")), dom, {9, 9});
    const auto bad = verify_canonical_coefficients(off);
    CHECK(bad.max.l > 0.5);
}

TEST_CASE("canonicalized patches carry the canonical shape", "[canonical]")
{
    const Rect zdom{-0.8, -0.2, -0.3, 0.3};
    const auto res = canonicalize_region(parse_expr("exp(z)"), parse_expr("exp(z)"), zdom);
    const auto patch = canonical_patch(res, res.w_domain, {15, 15});
    CHECK(patch.invalid_count() == 0);
    const auto rep = verify_canonical_coefficients(patch);
    // Boundary nodes report no forms.
    CHECK(rep.nodes == 169);
    CHECK(rep.worst < 1e-4);
    // Points against the dense-output map: x(w) = Re(Psi(z(w)) - Psi(z0)).
    const auto ref = evaluate_surface(GeneratingData::general(parse_expr("exp(z)"), parse_expr("exp(z)"), res.z0),
                                      {-0.8, -0.2, -0.3, 0.3}, {3, 3});
    CHECK(ref.point(1, 1)[0] == 0.0);
    const auto centre = patch.point(7, 7);
    const SplitComplex zc = res.z_of_w({patch.u_at(7), patch.v_at(7)});
    INFO("z at the centre " << to_string(zc));
    CHECK(std::abs(centre[2] - (std::exp(2 * zc.re()) * std::cosh(2 * zc.im()) - std::exp(2 * res.z0.re())) / 2) < 1e-9);
}

TEST_CASE("curvature PDE residual", "[canonical]")
{
    const GridSpec grid{41, 41};
    const Rect dom{-0.5, 0.5, -0.5, 0.5};
    const auto k = sample_field(enneper_k, dom, grid);
    const auto res = ganchev_pde_residual(k, CurvatureSign::Negative, {1e-3, 4});
    const auto s = summarize(res, away_from_degeneracy);
    CHECK(s.defined > 1000);
    CHECK(s.max_abs < 1e-5);

    // Two-parameter family with a = 2, b = 1.
    const auto k2 = sample_field([](double u, double v) { return -16 * 0.25 / std::pow(1 - 0.5 * (u * u - v * v), 4); },
                                 dom, grid);
    CHECK(summarize(ganchev_pde_residual(k2, CurvatureSign::Negative, {1e-3, 4})).max_abs < 1e-5);

    // Positive family: K of the imaginary part.
    const auto kp = sample_field([](double u, double v) { return -enneper_k(u, v); }, dom, grid);
    CHECK(summarize(ganchev_pde_residual(kp, CurvatureSign::Positive, {1e-3, 4}), away_from_degeneracy).max_abs <
          1e-5);

    const auto flat = sample_field([](double, double) { return -4.0; }, dom, {5, 5});
    const auto fr = summarize(ganchev_pde_residual(flat, CurvatureSign::Negative));
    CHECK_THAT(fr.max, WithinAbs(-4.0, 1e-12));
    CHECK_THAT(fr.min, WithinAbs(-4.0, 1e-12));
}

TEST_CASE("PDE residual of a measured canonical curvature", "[canonical]")
{
    const auto res = canonicalize_region(parse_expr("exp(z)"), parse_expr("exp(z)"), {-0.8, -0.2, -0.3, 0.3});
    const auto kx = curvature_field(res, res.w_domain, {11, 11});
    CHECK(summarize(ganchev_pde_residual(kx, CurvatureSign::Negative)).max_abs < 1e-5);
    const auto ky = curvature_field(res, res.w_domain, {11, 11}, Part::Imaginary);
    CHECK(summarize(ganchev_pde_residual(ky, CurvatureSign::Positive)).max_abs < 1e-5);
}

TEST_CASE("gauge action", "[canonical]")
{
    const Rect dom{-0.5, 0.5, -0.5, 0.5};
    const auto k = sample_field(enneper_k, dom, {21, 21});
    const auto same = apply_gauge(CanonicalGauge::identity(), k);
    CHECK(same.values == k.values);
    CHECK(same.domain.u_min == dom.u_min);

    const auto flipped = apply_gauge({-1, 0, 0}, k);
    for (int j = 0; j < 21; ++j) {
        for (int i = 0; i < 21; ++i) {
            CHECK_THAT(flipped.at(i, j), WithinAbs(k.at(i, j), 1e-13 * std::abs(k.at(i, j))));
        }
    }

    const CanonicalGauge g1{-1, 0.3, -0.1}, g2{-1, -0.2, 0.4};
    const auto shifted = sample_field(enneper_k, {0.0, 0.4, -0.2, 0.2}, {9, 9});
    const auto twice = apply_gauge(g2, apply_gauge(g1, shifted));
    const auto once = apply_gauge(compose(g2, g1), shifted);
    CHECK(twice.values == once.values);
    CHECK_THAT(twice.domain.u_min, WithinAbs(once.domain.u_min, 1e-15));
    CHECK_THAT(twice.domain.v_max, WithinAbs(once.domain.v_max, 1e-15));
    for (double u : {-0.11, 0.05}) {
        CHECK(twice.evaluator(u, 0.07) == once.evaluator(u, 0.07));
    }
    CHECK(compose(g1, inverse(g1)) == CanonicalGauge::identity());

    // The PDE residual is reindexed, not changed.
    const auto r0 = ganchev_pde_residual(k, CurvatureSign::Negative);
    const auto r1 = ganchev_pde_residual(apply_gauge({-1, 0, 0}, k), CurvatureSign::Negative);
    CHECK_THAT(summarize(r0).max_abs, WithinAbs(summarize(r1).max_abs, 1e-12));

    // Coefficient reports are gauge invariant.
    const auto patch = evaluate_surface(GeneratingData::canonical(parse_expr("z")), {-0.3, 0.3, -0.3, 0.3}, {13, 13});
    const auto a = verify_canonical_coefficients(patch);
    const auto b = verify_canonical_coefficients(apply_gauge({-1, 0.25, 0.1}, patch));
    CHECK(a.nodes == b.nodes);
    CHECK_THAT(a.worst, WithinAbs(b.worst, 1e-12));
}

TEST_CASE("curvature field comparison", "[canonical]")
{
    const Rect dom{-0.5, 0.5, -0.5, 0.5};
    const auto k = sample_field(enneper_k, dom, {21, 21});
    const auto self = compare_curvature_fields(k, k);
    CHECK(self.same);
    CHECK(self.gauge == CanonicalGauge::identity());
    CHECK(self.max_discrepancy == 0.0);

    // K2(u, v) = K(u + 0.5, v): K2 = apply_gauge({1, 0.5, 0}, K), so the gauge search reports A = +0.5 from K to
    // K2 and A = -0.5 from K2 to K.
    const auto k2 = sample_field([](double u, double v) { return enneper_k(u + 0.5, v); }, dom, {21, 21});
    const auto m = compare_curvature_fields(k2, k);
    CHECK(m.same);
    CHECK(m.gauge.eps == 1);
    CHECK_THAT(m.gauge.A, WithinAbs(-0.5, 1e-9));
    CHECK_THAT(m.gauge.B, WithinAbs(0.0, 1e-9));

    // Without an evaluator the search is restricted to the lattice.
    ScalarField k2s = k2;
    k2s.evaluator = nullptr;
    const auto ms = compare_curvature_fields(k2s, k);
    CHECK(ms.same);
    CHECK_THAT(ms.gauge.A, WithinAbs(-0.5, 1e-12));

    const auto other = sample_field([](double u, double v) { return -9.0 / std::pow(1.0 - 0.5 * (u * u - v * v), 4); }, dom,
                                    {21, 21});
    CHECK_FALSE(compare_curvature_fields(other, k).same);

    const auto far = sample_field(enneper_k, {10, 10.2, 10, 10.2}, {3, 3});
    ScalarField fars = far;
    fars.evaluator = nullptr;
    CHECK_THROWS_AS(compare_curvature_fields(fars, k), InconclusiveOverlap);
}

TEST_CASE("both signs give the same canonical curvature up to gauge", "[canonical]")
{
    const Rect zdom{-0.8, -0.2, -0.3, 0.3};
    const auto plus = canonicalize_region(parse_expr("exp(z)"), parse_expr("exp(z)"), zdom, 1);
    const auto minus = canonicalize_region(parse_expr("exp(z)"), parse_expr("exp(z)"), zdom, -1);
    const GridSpec grid{15, 15};
    const auto kp = curvature_field(plus, plus.w_domain, grid);
    const auto km = curvature_field(minus, minus.w_domain, grid);
    const auto m = compare_curvature_fields(kp, km);
    CHECK(m.same);
    CHECK(m.gauge.eps == -1);
}
