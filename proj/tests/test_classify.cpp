#include <catch_amalgamated.hpp>

#include <chrono>
#include <cmath>
#include <random>

#include <lmsurf/canonical.hpp>
#include <lmsurf/classify.hpp>
#include <lmsurf/equivalence.hpp>
#include <lmsurf/parser.hpp>

using namespace lmsurf;
using Catch::Matchers::WithinAbs;

namespace {

CubicParametrization enneper_cubic()
{
    // (-u(u^2+3v^2+3)/6, -v(3u^2+v^2-3)/6, (u^2+v^2)/2)
    CubicParametrization x;
    x.x[0].add(3, 0, -1.0 / 6).add(1, 2, -0.5).add(1, 0, -0.5);
    x.x[1].add(2, 1, -0.5).add(0, 3, -1.0 / 6).add(0, 1, 0.5);
    x.x[2].add(2, 0, 0.5).add(0, 2, 0.5);
    return x;
}

// Real part of the curve with Psi' = (-(f + fg^2)/2, j (f - fg^2)/2, fg).
CubicParametrization from_pair(const DPoly& f, const DPoly& fg, const DPoly& fg2)
{
    const SplitComplex half(0.5);
    return parametrization_from_curve(
        {SplitComplex(-0.5) * (f + fg2), (half * j_unit) * (f - fg2), fg});
}

DPoly dpoly(std::initializer_list<SplitComplex> c) { return DPoly(std::vector<SplitComplex>(c)); }

double max_coeff_diff(const DPoly& a, const DPoly& b) { return (a - b).max_abs(); }

} // namespace

TEST_CASE("lifting to the Weierstrass curve", "[classify]")
{
    CubicParametrization third;
    third.x[2].add(2, 0, 0.5).add(0, 2, 0.5);
    const auto psi3 = lift_to_curve(third)[2];
    CHECK(max_coeff_diff(psi3, dpoly({0, 0, 0.5})) < 1e-15);

    CubicParametrization constant;
    for (auto& p : constant.x) {
        p.add(0, 0, 1.5);
    }
    for (const auto& p : lift_to_curve(constant)) {
        CHECK(p.is_zero());
    }

    const auto psi = lift_to_curve(enneper_cubic());
    const SplitComplex half_j = 0.5 * j_unit;
    CHECK(max_coeff_diff(psi[0].derivative(), dpoly({-0.5, 0, -0.5})) < 1e-15);
    CHECK(max_coeff_diff(psi[1].derivative(), dpoly({half_j, 0, -1.0 * half_j})) < 1e-15);
    CHECK(max_coeff_diff(psi[2].derivative(), dpoly({0, 1})) < 1e-15);

    // Re Psi(u + jv) reproduces x - x(0,0).
    CubicParametrization shifted = enneper_cubic();
    shifted.x[0].add(0, 0, 2.0);
    const auto lifted = lift_to_curve(shifted);
    for (std::size_t k = 0; k < 3; ++k) {
        const auto [re, im] = split_parts(lifted[k]);
        CHECK((re - enneper_cubic().x[k]).pruned(1e-15).is_zero());
    }
}

TEST_CASE("extracting the generating pair", "[classify]")
{
    const auto psi = lift_to_curve(enneper_cubic());
    const std::array<DPoly, 3> d{psi[0].derivative(), psi[1].derivative(), psi[2].derivative()};
    const auto pair = extract_pair(d);
    CHECK(max_coeff_diff(pair.f, dpoly({1})) < 1e-15);
    CHECK(null_abs(eval(pair.g_expr(), {0.3, 0.2}) - SplitComplex(0.3, 0.2)) < 1e-15);

    // Homothety scales f and keeps g.
    const std::array<DPoly, 3> d3{SplitComplex(3.0) * d[0], SplitComplex(3.0) * d[1], SplitComplex(3.0) * d[2]};
    const auto p3 = extract_pair(d3);
    CHECK(max_coeff_diff(p3.f, dpoly({3})) < 1e-14);
    CHECK(null_abs(eval(p3.g_expr(), {0.3, 0.2}) - SplitComplex(0.3, 0.2)) < 1e-15);

    // (z+2)^2 and (z+1)/(z+2): the common factor cancels.
    const DPoly f = dpoly({4, 4, 1}), fg = dpoly({2, 3, 1}), fg2 = dpoly({1, 2, 1});
    const auto x = from_pair(f, fg, fg2);
    const auto l = lift_to_curve(x);
    const auto p = extract_pair({l[0].derivative(), l[1].derivative(), l[2].derivative()});
    CHECK(p.Q.degree() == 1);
    CHECK(p.P.degree() == 1);
    CHECK(null_abs(eval(p.g_expr(), {0.3, 0.2}) - (SplitComplex(1.3, 0.2) / SplitComplex(2.3, 0.2))) < 1e-13);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> c(-1, 1);
    for (int k = 0; k < 20; ++k) {
        std::array<DPoly, 3> r;
        for (auto& q : r) {
            q = dpoly({SplitComplex(c(rng), c(rng)), SplitComplex(c(rng), c(rng)), SplitComplex(c(rng), c(rng))});
        }
        CHECK_THROWS_AS(extract_pair(r), NotMinimal);
    }
}

TEST_CASE("Enneper cubic is recognised", "[classify]")
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto v = classify_cubic(enneper_cubic());
    CHECK(v.verdict == Verdict::EnneperNegative);
    CHECK_THAT(v.scale, WithinAbs(1.0, 1e-12));
    REQUIRE(v.f);
    REQUIRE(v.g);
    CHECK(structurally_equal(*v.f, parse_expr("1")));
    CHECK(null_abs(eval(*v.g, {0.4, -0.1}) - SplitComplex(0.4, -0.1)) < 1e-15);

    const auto v2 = classify_cubic(transformed(enneper_cubic(), identity3, {0, 0, 0}, 2.0));
    CHECK(v2.verdict == Verdict::EnneperNegative);
    CHECK_THAT(v2.scale, WithinAbs(2.0, 1e-12));
    CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(1));
}

TEST_CASE("verdicts are motion invariant", "[classify][property]")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> phi(-1, 1), ab(-0.6, 0.6), t(-3, 3);
    int done = 0;
    while (done < 10) {
        const SplitComplex alpha(ab(rng), ab(rng));
        const double n = alpha.re() * alpha.re() - alpha.im() * alpha.im();
        if (std::abs(n) > 0.5) {
            continue;
        }
        const auto w = motion_witness({phi(rng), alpha});
        const Mat3 M = w.A * w.B;
        const auto x = transformed(enneper_cubic(), M, {t(rng), t(rng), t(rng)}, 2.0);
        const auto v = classify_cubic(x);
        INFO("alpha " << to_string(alpha));
        CHECK(v.verdict == Verdict::EnneperNegative);
        CHECK_THAT(v.scale, WithinAbs(2.0, 1e-8));
        CHECK_FALSE(v.mirrored);
        ++done;
    }
    // The orientation-reversing x -> -x keeps the verdict and flags it.
    const auto m = classify_cubic(transformed(enneper_cubic(), identity3, {0, 0, 0}, -1.0));
    CHECK(m.verdict == Verdict::EnneperNegative);
    CHECK(m.mirrored);
    CHECK_THAT(m.scale, WithinAbs(1.0, 1e-12));
}

TEST_CASE("the generic normal form", "[classify]")
{
    // f = (az+b)^2, g = (cz+d)/(az+b) with a = 0.5, b = 1, c = 1, d = 0.2: |c|^2 != |a|^2.
    const DPoly Q = dpoly({1, 0.5}), P = dpoly({0.2, 1});
    const auto v = classify_cubic(from_pair(Q * Q, Q * P, P * P));
    REQUIRE(v.verdict == Verdict::EnneperNegative);
    // lambda = sqrt(kappa+ kappa-) |det|^2 / (|c|^2 - |a|^2)^2 with det = ad - bc = -0.9, kappa = 0.9.
    const double lambda = 0.9 * 0.81 / std::pow(1 - 0.25, 2);
    CHECK_THAT(v.scale, WithinAbs(lambda, 1e-12));

    // Independent check: the canonical curvature equals the homothetic Enneper one,
    // K = -16 mu^4 / (1 - mu^2 |w - w0|^2)^4 with mu^2 = 1/lambda, modulo gauge.
    const auto res = canonicalize(v.f.value(), v.g.value(), 0.0, 0.0,
                                  {-0.3, 0.3, -0.3, 0.3});
    const auto k = curvature_field(res, {-0.3, 0.3, -0.3, 0.3}, {13, 13});
    const double mu = std::sqrt(1.0 / lambda);
    const auto e = sample_field(
        [mu](double u, double w) {
            return -16 * std::pow(mu, 4) / std::pow(1 - mu * mu * (u * u - w * w), 4);
        },
        {-1.5, 1.5, -1.5, 1.5}, {61, 61});
    const auto m = compare_curvature_fields(e, k);
    CHECK(m.same);
}

TEST_CASE("the |c| = |a| family is minimal but not Enneper", "[classify]")
{
    // f = (z+2)^2, g = (z+1)/(z+2): a = c = 1, so |c|^2 - |a|^2 = 0.
    const DPoly f = dpoly({4, 4, 1}), fg = dpoly({2, 3, 1}), fg2 = dpoly({1, 2, 1});
    const auto x = from_pair(f, fg, fg2);
    CHECK(x.degree() == 3);
    const auto v = classify_cubic(x);
    CHECK(v.verdict == Verdict::NotEnneper);

    // It is minimal and timelike with K < 0 ...
    const auto patch = evaluate_surface(GeneratingData::general(parse_expr("(z+2)^2"), parse_expr("(z+1)/(z+2)")),
                                        {-0.3, 0.3, -0.3, 0.3}, {9, 9});
    const auto ff = fundamental_forms(patch, 4, 4);
    REQUIRE(ff);
    CHECK(curvatures(*ff).K < 0.0);
    CHECK(std::abs(curvatures(*ff).H) < 1e-9);
    // ... but its canonical curvature has no critical point: it depends on one affine
    // combination of (u, v) only, while every Enneper field has one.
    const auto res = canonicalize(parse_expr("(z+2)^2"), parse_expr("(z+1)/(z+2)"), 0.0, 0.0, {-0.3, 0.3, -0.3, 0.3});
    const auto k = curvature_field(res, {-0.25, 0.25, -0.25, 0.25}, {11, 11});
    double min_grad = 1e300;
    for (int j = 1; j < 10; ++j) {
        for (int i = 1; i < 10; ++i) {
            const double ku = (k.at(i + 1, j) - k.at(i - 1, j)) / (2 * k.hu);
            const double kv = (k.at(i, j + 1) - k.at(i, j - 1)) / (2 * k.hv);
            min_grad = std::min(min_grad, std::hypot(ku, kv) / std::abs(k.at(i, j)));
            // Level sets are parallel lines: the gradient direction is constant.
            const double ku0 = (k.at(6, 5) - k.at(4, 5)) / (2 * k.hu);
            const double kv0 = (k.at(5, 6) - k.at(5, 4)) / (2 * k.hv);
            CHECK(std::abs(ku * kv0 - kv * ku0) / (std::hypot(ku, kv) * std::hypot(ku0, kv0)) < 1e-4);
        }
    }
    CHECK(min_grad > 0.1);
}

TEST_CASE("negative controls", "[classify]")
{
    CubicParametrization bad;
    bad.x[0].add(1, 0, 1);
    bad.x[1].add(0, 1, 1);
    bad.x[2].add(2, 0, 1);
    CHECK(classify_cubic(bad).verdict == Verdict::NotIsothermal);

    // Real parts of random non-isotropic curves: harmonic, but not minimal.
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> c(-1, 1);
    for (int k = 0; k < 20; ++k) {
        std::array<DPoly, 3> r;
        for (auto& q : r) {
            q = dpoly({SplitComplex(c(rng), c(rng)), SplitComplex(c(rng), c(rng)), SplitComplex(c(rng), c(rng))});
        }
        const auto v = classify_cubic(parametrization_from_curve(r));
        CHECK(v.verdict == Verdict::NotMinimal);
    }

    // Random real coefficients.
    CubicParametrization rnd;
    for (auto& p : rnd.x) {
        for (int i = 0; i <= 3; ++i) {
            for (int j = 0; i + j <= 3; ++j) {
                p.add(i, j, c(rng));
            }
        }
    }
    CHECK(classify_cubic(rnd).verdict == Verdict::NotIsothermal);

    CubicParametrization constant;
    constant.x[0].add(0, 0, 1);
    CHECK(classify_cubic(constant).verdict == Verdict::Degenerate);

    // bc - ad = 0: g constant, the surface is planar.
    const DPoly f = dpoly({1, 2, 1});
    CHECK(classify_cubic(from_pair(f, SplitComplex(0.5) * f, SplitComplex(0.25) * f)).verdict == Verdict::Degenerate);

    // The imaginary part of Enneper has K > 0.
    const std::array<DPoly, 3> dpsi{dpoly({-0.5, 0, -0.5}), dpoly({0.5 * j_unit, 0, -0.5 * j_unit}), dpoly({0, 1})};
    CHECK(classify_cubic(parametrization_from_curve(dpsi, Part::Imaginary)).verdict == Verdict::PositiveCurvature);

    CubicParametrization quartic;
    quartic.x[0].add(4, 0, 1);
    CHECK_THROWS_AS(classify_cubic(quartic), InvalidParams);
}

TEST_CASE("round trip through a fitted patch", "[classify]")
{
    const auto patch = evaluate_surface(GeneratingData::general(parse_expr("1"), parse_expr("z")),
                                        {-0.8, 0.8, -0.8, 0.8}, {9, 9});
    const auto x = fit_cubic(patch);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK((x.x[k] - enneper_cubic().x[k]).pruned(1e-12).is_zero());
    }
    const auto v = classify_cubic(x);
    CHECK(v.verdict == Verdict::EnneperNegative);
    CHECK_THAT(v.scale, WithinAbs(1.0, 1e-9));
}
