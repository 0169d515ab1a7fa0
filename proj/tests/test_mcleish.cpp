#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mbsense/errors.hpp"
#include "mbsense/mcleish.hpp"
#include "mbsense/moments.hpp"
#include "mbsense/specfun.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <numbers>

using namespace mbsense;
using namespace mbsense::mcleish;

namespace {

struct Pooled {
    double m2 = 0.0; // E|w|^2
    double m4 = 0.0; // E|w|^4
    double re2 = 0.0;
    double re4 = 0.0;
};

Pooled pooled(const ComplexSampleBuffer& w)
{
    Pooled p;
    for (const auto& x : w) {
        const double a = x.real() * x.real();
        const double b = x.imag() * x.imag();
        p.m2 += a + b;
        p.m4 += (a + b) * (a + b);
        p.re2 += a;
        p.re4 += a * a;
    }
    const double n = static_cast<double>(w.size());
    p.m2 /= n;
    p.m4 /= n;
    p.re2 /= n;
    p.re4 /= n;
    return p;
}

// Integral of g over the real line for an even integrand, split at the
// origin so the v <= 1/2 singularity sits at an endpoint.
template <class F>
double even_integral(F g)
{
    boost::math::quadrature::tanh_sinh<double> near;
    boost::math::quadrature::exp_sinh<double> far;
    return 2.0 * (near.integrate(g, 0.0, 1.0) + far.integrate(g, 1.0, std::numeric_limits<double>::infinity()));
}

} // namespace

TEST_CASE("params")
{
    CHECK_NOTHROW((McLeishParams{1.0, 1.0}.validate()));
    CHECK_THROWS_AS((McLeishParams{0.0, 1.0}.validate()), DomainError);
    CHECK_THROWS_AS((McLeishParams{1.0, -2.0}.validate()), DomainError);
    CHECK_THROWS_AS((McLeishParams{1.0, INFINITY}.validate()), DomainError);
    CHECK((McLeishParams{1.0, 3.0}.kurtosis()) == doctest::Approx(4.0));
}

TEST_CASE("pdf at v = 1 is the Laplacian quadrature marginal")
{
    // One quadrature of a CCS Laplacian with sigma2 = 1 is Laplace with b = 1/2.
    const McLeishParams p{1.0, 1.0};
    for (double x : {-3.0, -0.4, 0.0, 1e-9, 0.25, 1.0, 6.0}) {
        CHECK(pdf_real_component(x, p) == doctest::Approx(std::exp(-2.0 * std::abs(x))).epsilon(1e-12));
    }
}

TEST_CASE("pdf against the Boost Bessel oracle")
{
    for (double v : {0.3, 0.75, 2.0, 7.5, 40.0}) {
        for (double sigma2 : {0.5, 2.0}) {
            const double s = std::sqrt(sigma2 / (2.0 * v));
            for (double x : {-2.0, 0.01, 0.3, 1.7}) {
                const double z = std::numbers::sqrt2 * std::abs(x) / s;
                const double expect = 2.0 / (std::sqrt(2.0 * std::numbers::pi) * s * std::tgamma(v))
                                      * std::pow(z / 2.0, v - 0.5) * boost::math::cyl_bessel_k(v - 0.5, z);
                CHECK(pdf_real_component(x, {sigma2, v}) == doctest::Approx(expect).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("pdf normalization and second moment by quadrature")
{
    for (double v : {0.5, 1.0, 3.0}) {
        for (double sigma2 : {1.0, 2.5}) {
            const McLeishParams p{sigma2, v};
            const double mass = even_integral([&](double x) { return x == 0.0 ? 0.0 : pdf_real_component(x, p); });
            const double second
                = even_integral([&](double x) { return x == 0.0 ? 0.0 : x * x * pdf_real_component(x, p); });
            CHECK(std::abs(mass - 1.0) <= 1e-6);
            CHECK(std::abs(second - sigma2 / 2.0) <= 1e-6);
        }
    }
}

TEST_CASE("pdf domain")
{
    CHECK_THROWS_AS(pdf_real_component(0.0, {1.0, 0.5}), DomainError);
    CHECK_THROWS_AS(pdf_real_component(0.0, {1.0, 0.2}), DomainError);
    CHECK(std::isfinite(pdf_real_component(0.0, {1.0, 0.75})));
    CHECK(pdf_real_component(1e-12, {1.0, 0.3}) > 1e3);
    CHECK_THROWS_AS(pdf_real_component(NAN, {1.0, 1.0}), DomainError);
    CHECK(pdf_real_component(1e3, {1.0, 1.0}) == 0.0);
}

TEST_CASE("real_moment")
{
    CHECK(real_moment(2, 0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(real_moment(4, 0.5, 1.0) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(real_moment(0, 3.0, 7.0) == 1.0);
    CHECK(real_moment(3, 0.5, 1.0) == 0.0);
    CHECK_THROWS_AS(real_moment(-2, 0.5, 1.0), DomainError);
    CHECK_THROWS_AS(real_moment(18, 0.5, 1.0), DomainError);
    // Large v takes the product path and approaches Gaussian moments.
    CHECK(real_moment(8, 0.5, 1e9) == doctest::Approx(105.0 / 16.0).epsilon(1e-7));
}

TEST_CASE("real_moment agrees with the H0 received moment")
{
    for (double v : {0.5, 1.0, 2.0, 5.0, 100.0}) {
        for (int n : {2, 4, 6, 8}) {
            const double a = real_moment(n, 0.5, v);
            const double b = moments::received_real_moment(n, std::nullopt, {1.0, v}, moments::Hypothesis::H0);
            CHECK(std::abs(a - b) <= 1e-12 * b);
        }
    }
}

TEST_CASE("sampler moments at 1e7 draws")
{
    SUBCASE("sigma2 = 1 across v")
    {
        std::uint64_t seed = 11;
        for (double v : {0.5, 1.0, 2.0, 5.0}) {
            const auto w = sample_ccs({1.0, v}, 10'000'000, seed++);
            const auto p = pooled(w);
            CHECK(p.m2 == doctest::Approx(1.0).epsilon(0.01));
            CHECK(p.m4 / (p.m2 * p.m2) == doctest::Approx(2.0 + 1.5 / v).epsilon(0.02));
        }
    }
    SUBCASE("near-Gaussian")
    {
        const auto w = sample_ccs({2.0, 1e6}, 1'000'000, 5);
        const auto p = pooled(w);
        CHECK(p.re4 / (p.re2 * p.re2) == doctest::Approx(3.0).epsilon(0.02));
        CHECK(p.m2 == doctest::Approx(2.0).epsilon(0.01));
    }
}

TEST_CASE("sampler determinism and errors")
{
    const auto a = sample_ccs({1.0, 0.7}, 1000, 42);
    const auto b = sample_ccs({1.0, 0.7}, 1000, 42);
    const auto c = sample_ccs({1.0, 0.7}, 1000, 43);
    CHECK(a == b);
    CHECK(a != c);
    CHECK_THROWS_AS(sample_ccs({1.0, 1.0}, 0, 1), DomainError);
    CHECK_THROWS_AS(sample_ccs({-1.0, 1.0}, 10, 1), DomainError);
}

TEST_CASE("fit_params")
{
    SUBCASE("round trip")
    {
        const auto w = sample_ccs({1.0, 1.0}, 10'000'000, 77);
        const auto fit = fit_params(w);
        CHECK(fit.variance == doctest::Approx(1.0).epsilon(0.02));
        REQUIRE(fit.non_gaussianity.has_value());
        CHECK(*fit.non_gaussianity == doctest::Approx(1.0).epsilon(0.10));
        CHECK(fit.params()->variance == fit.variance);
        CHECK(fit.samples == w.size());
    }
    SUBCASE("Gaussian input gives the sentinel")
    {
        const auto w = sample_ccs({1.0, 1e12}, 1'000'000, 3);
        const auto fit = fit_params(w);
        CHECK(fit.gaussian_or_lighter());
        CHECK_FALSE(fit.params().has_value());
    }
    SUBCASE("lighter than Gaussian gives the sentinel even with no guard")
    {
        ComplexSampleBuffer w(1000, {1.0, -1.0});
        const auto fit = fit_params(w, 0.0);
        CHECK(fit.kurtosis == doctest::Approx(1.0));
        CHECK(fit.gaussian_or_lighter());
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(fit_params(ComplexSampleBuffer(16, {0.0, 0.0})), DegenerateInputError);
        CHECK_THROWS_AS(fit_params(ComplexSampleBuffer(3, {1.0, 0.0})), DomainError);
        ComplexSampleBuffer bad(8, {1.0, 0.0});
        bad[3] = {NAN, 0.0};
        CHECK_THROWS_AS(fit_params(bad), DomainError);
    }
}
