#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <lmsurf/split_complex.hpp>

using namespace lmsurf;
using Catch::Matchers::WithinAbs;

namespace {

bool near(const SplitComplex& a, const SplitComplex& b, double tol)
{
    const double scale = std::max({1.0, std::abs(a.re()), std::abs(a.im()), std::abs(b.re()), std::abs(b.im())});
    return std::abs(a.re() - b.re()) <= tol * scale && std::abs(a.im() - b.im()) <= tol * scale;
}

} // namespace

TEST_CASE("multiplication follows j^2 = 1", "[algebra]")
{
    CHECK(SplitComplex(1, 1) * SplitComplex(1, -1) == SplitComplex(0, 0));
    CHECK(j_unit * j_unit == SplitComplex(1, 0));
    CHECK(SplitComplex(2, 1) * SplitComplex(3, 2) == SplitComplex(8, 7));
}

TEST_CASE("division inverts multiplication and rejects zero divisors", "[algebra]")
{
    CHECK(near(SplitComplex(8, 7) / SplitComplex(3, 2), SplitComplex(2, 1), 1e-15));
    CHECK_THROWS_AS(SplitComplex(1) / SplitComplex(1, 1), ZeroDivisor);
    CHECK_THROWS_AS(inverse(SplitComplex(2, -2)), ZeroDivisor);
    CHECK(SplitComplex(0.3, -4.5) / SplitComplex(1) == SplitComplex(0.3, -4.5));
}

TEST_CASE("exp acts on null coordinates", "[algebra]")
{
    CHECK(exp(SplitComplex(0)) == SplitComplex(1));
    const SplitComplex e = exp(j_unit);
    CHECK_THAT(e.re(), WithinAbs(std::cosh(1.0), 1e-15));
    CHECK_THAT(e.im(), WithinAbs(std::sinh(1.0), 1e-15));
    for (double phi : {-2.0, -0.3, 0.0, 0.7, 3.1}) {
        CHECK_THAT(exp(SplitComplex(0, phi)).norm2(), WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("principal square root", "[algebra]")
{
    CHECK(sqrt(SplitComplex(4)) == SplitComplex(2));
    CHECK(near(sqrt(SplitComplex(1, 1)), SplitComplex(1, 1) * (1.0 / std::sqrt(2.0)), 1e-15));
    CHECK_THROWS_AS(sqrt(SplitComplex(-1)), NoSquareRoot);
    const auto roots = sqrt_all(SplitComplex(5, 3));
    CHECK(roots.size() == 4);
    for (const auto& r : roots) {
        CHECK(near(r * r, SplitComplex(5, 3), 1e-14));
    }
    CHECK(sqrt_all(SplitComplex(1, 1)).size() == 2);
    CHECK(sqrt_all(SplitComplex(-1)).empty());
}

TEST_CASE("null coordinates", "[algebra]")
{
    const NullCoords n = SplitComplex(3, 2).to_null();
    CHECK(n.p == 5.0);
    CHECK(n.q == 1.0);
    CHECK(j_unit.p() == 1.0);
    CHECK(j_unit.q() == -1.0);
    CHECK(SplitComplex::from_null(1, 1) == SplitComplex(1));
    CHECK(e_plus * e_plus == e_plus);
    CHECK(e_minus * e_minus == e_minus);
    CHECK(e_plus * e_minus == SplitComplex(0));
}

TEST_CASE("ring identities on random samples", "[algebra][property]")
{
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    const auto draw = [&] { return SplitComplex(dist(rng), dist(rng)); };
    for (int k = 0; k < 2000; ++k) {
        const SplitComplex a = draw(), b = draw(), c = draw();
        REQUIRE(near((a * b) * c, a * (b * c), 1e-12));
        REQUIRE(near(a * (b + c), a * b + a * c, 1e-12));
        REQUIRE(a * b == b * a);
        REQUIRE(near((a * b).conj(), a.conj() * b.conj(), 1e-12));
        REQUIRE(a.conj().conj() == a);
        const double lhs = (a * b).norm2();
        const double rhs = a.norm2() * b.norm2();
        // Relative to the Euclidean sizes: re^2 - im^2 cancels.
        const double scale = (a.re() * a.re() + a.im() * a.im()) * (b.re() * b.re() + b.im() * b.im());
        REQUIRE(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, scale));
        const SplitComplex via_null = SplitComplex::from_null(a.p() * b.p(), a.q() * b.q());
        REQUIRE(near(via_null, a * b, 1e-14));
    }
}

TEST_CASE("literal printing round-trips", "[algebra]")
{
    CHECK(to_string(SplitComplex(2)) == "2");
    CHECK(to_string(SplitComplex(0, -2.5)) == "-2.5J");
    CHECK(to_string(SplitComplex(1, -2)) == "1-2J");
    CHECK(to_string(SplitComplex(0.1, 3)) == "0.1+3J");
    CHECK(parse_split_complex("1+2j") == SplitComplex(1, 2));
    CHECK(parse_split_complex(" -3 - 4J ") == SplitComplex(-3, -4));
    CHECK(parse_split_complex("J") == SplitComplex(0, 1));
    CHECK(parse_split_complex("1e-3-2e+2J") == SplitComplex(1e-3, -2e2));
    CHECK_THROWS_AS(parse_split_complex("1+"), SyntaxError);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1e3, 1e3);
    for (int k = 0; k < 200; ++k) {
        const SplitComplex z(dist(rng), dist(rng));
        REQUIRE(parse_split_complex(to_string(z)) == z);
    }
}
