#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mbsense/detector.hpp"
#include "mbsense/errors.hpp"
#include "mbsense/rng.hpp"
#include "mbsense/specfun.hpp"

#include <cmath>
#include <complex>
#include <vector>

using namespace mbsense;
using namespace mbsense::detector;
using cd = std::complex<double>;

namespace {

double bisect_q_inverse(double p)
{
    double lo = -40.0;
    double hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (0.5 * std::erfc(mid / std::sqrt(2.0)) > p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Second-order delta-method bias of T_hat = -m4/m2^2 under H0, times N:
// (1/2) tr(H Sigma) with H the Hessian of -b/a^2 at (mu(2), mu(4)).
double h0_bias_times_n(double v)
{
    const auto m = moments::abs_moments(std::nullopt, {1.0, v}, Hypothesis::H0);
    const double s11 = m.mu4 - m.mu2 * m.mu2;
    const double s12 = m.mu6 - m.mu2 * m.mu4;
    return -3.0 * m.mu4 / std::pow(m.mu2, 4) * s11 + 2.0 / std::pow(m.mu2, 3) * s12;
}

} // namespace

TEST_CASE("sample moments and the test statistic")
{
    CHECK(sample_abs_moment(std::vector<cd>(5, 0.0), 2) == 0.0);
    const std::vector<cd> unit{{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    CHECK(sample_abs_moment(unit, 4) == 1.0);
    CHECK(sample_abs_moment(std::vector<cd>{{1, 0}, {0, 2}}, 2) == 2.5);
    CHECK(sample_abs_moment(std::vector<cd>{{3, 4}}, 1) == 5.0);
    CHECK_THROWS_AS(sample_abs_moment(std::vector<cd>{}, 2), DomainError);

    std::vector<cd> constant;
    for (int k = 0; k < 16; ++k) {
        constant.push_back(std::polar(2.5, 0.4 * k));
    }
    CHECK(test_statistic(constant) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK_THROWS_AS(test_statistic(std::vector<cd>(8, 0.0)), DegenerateInputError);
}

TEST_CASE("test statistic on long noise records")
{
    const auto laplace = mcleish::sample_ccs({1.0, 1.0}, 1'000'000, 31);
    CHECK(std::abs(test_statistic(laplace) + 3.5) < 0.05);
    const auto gauss = mcleish::sample_ccs({1.0, 1e9}, 1'000'000, 32);
    CHECK(std::abs(test_statistic(gauss) + 2.0) < 0.01);

    auto scaled = laplace;
    for (auto& y : scaled) {
        y *= 7.0;
    }
    CHECK(std::abs(test_statistic(scaled) - test_statistic(laplace)) <= 1e-12 * std::abs(test_statistic(laplace)));
}

TEST_CASE("decision statistic")
{
    // |y|^2 = {9, 0, 0, 0}: mu(4)/mu(2)^2 = 4 = 2 + 3/(2v) at v = 3/4.
    const std::vector<cd> y{{3, 0}, {0, 0}, {0, 0}, {0, 0}};
    CHECK(std::abs(decision_statistic(y, 0.75)) < 1e-14);
    CHECK(h0_test_value(1.0) == -3.5);
    CHECK(std::abs(h0_test_value(1e9) + 2.0) < 1e-6);
    CHECK_THROWS_AS(h0_test_value(0.0), DomainError);
}

TEST_CASE("H0 variance")
{
    CHECK(std::abs(sigma2_h0(1e9) - 4.0) < 1e-6);
    CHECK(sigma2_h0(1.0) == doctest::Approx(154.75).epsilon(1e-15));
    CHECK(sigma2_h0(3.0) == doctest::Approx(2583.0 / 108.0).epsilon(1e-15));
    for (double v : {0.1, 0.5, 2.0, 17.0}) {
        const double literal = (16 * v * v * v + 120 * v * v + 294 * v + 189) / (4 * v * v * v);
        CHECK(sigma2_h0(v) == doctest::Approx(literal).epsilon(1e-14));
    }
}

TEST_CASE("H1 variance")
{
    CHECK(sigma2_h1({0.5, 1.5, 11.25, 157.5}) == doctest::Approx(154.75).epsilon(1e-14));
    for (double s : {0.3, 1.0, 4.0}) {
        const double s2 = s * s;
        CHECK(sigma2_h1({s2, 3 * s2 * s2, 15 * s2 * s2 * s2, 105 * s2 * s2 * s2 * s2})
              == doctest::Approx(4.0).epsilon(1e-13));
    }
    const moments::RealMomentSet r{0.7, 2.1, 11.0, 90.0};
    const double c = 2.3;
    const moments::RealMomentSet rs{r.m2 * c * c, r.m4 * std::pow(c, 4), r.m6 * std::pow(c, 6), r.m8 * std::pow(c, 8)};
    CHECK(sigma2_h1(rs) == doctest::Approx(sigma2_h1(r)).epsilon(1e-12));
    CHECK_THROWS_AS(sigma2_h1({0.0, 1.0, 1.0, 1.0}), DegenerateInputError);
}

TEST_CASE("delta-method variance")
{
    CHECK(delta_method_variance({1.0, 3.5, 27.0, 373.5}) == doctest::Approx(154.75).epsilon(1e-14));
    for (double s2 : {0.5, 1.0, 3.0}) {
        CHECK(delta_method_variance({s2, 2 * s2 * s2, 6 * s2 * s2 * s2, 24 * s2 * s2 * s2 * s2})
              == doctest::Approx(4.0).epsilon(1e-13));
    }
    const moments::MomentSet m{1.2, 3.1, 14.0, 120.0};
    const double c = 0.6;
    const moments::MomentSet ms{m.mu2 * c, m.mu4 * c * c, m.mu6 * c * c * c, m.mu8 * c * c * c * c};
    CHECK(delta_method_variance(ms) == doctest::Approx(delta_method_variance(m)).epsilon(1e-12));
    CHECK_THROWS_AS(delta_method_variance({0.0, 1.0, 1.0, 1.0}), DegenerateInputError);
}

TEST_CASE("three variance paths agree under H0")
{
    for (double v : {0.5, 1.0, 2.0, 5.0, 100.0}) {
        const mcleish::McLeishParams noise{1.0, v};
        const double a = sigma2_h0(v);
        const double b = sigma2_h1(moments::real_moments(std::nullopt, noise, Hypothesis::H0));
        const double c = delta_method_variance(moments::abs_moments(std::nullopt, noise, Hypothesis::H0));
        CHECK(std::abs(a - b) <= 1e-9 * a);
        CHECK(std::abs(a - c) <= 1e-9 * a);
    }
}

TEST_CASE("false alarm and threshold")
{
    CHECK(pf(0.0, 1.0) == 0.5);
    CHECK(pf(std::sqrt(sigma2_h0(2.0)), 2.0) == doctest::Approx(0.15865525393145705).epsilon(1e-12));
    for (double v : {0.3, 1.0, 5.0, 1e9}) {
        CHECK(md_threshold(0.5, v) == 0.0);
        for (double p : {0.01, 0.05, 0.1, 0.5}) {
            CHECK(std::abs(pf(md_threshold(p, v), v) - p) <= 1e-10);
        }
    }
    CHECK(std::abs(md_threshold(0.1, 1e9) - 2.0 * bisect_q_inverse(0.1)) < 1e-7);
    CHECK(md_threshold(0.1, 1e9) == doctest::Approx(2.5631).epsilon(1e-4));
    CHECK(md_threshold(0.1, 1.0) == doctest::Approx(std::sqrt(154.75) * bisect_q_inverse(0.1)).epsilon(1e-12));
    CHECK_THROWS_AS(md_threshold(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(md_threshold(1.0, 1.0), DomainError);
}

TEST_CASE("noise-power independence")
{
    const auto y = mcleish::sample_ccs({1.0, 2.0}, 4096, 5);
    for (double c : {1e-3, 0.5, 40.0}) {
        auto s = y;
        for (auto& z : s) {
            z *= c;
        }
        CHECK(std::abs(test_statistic(s) - test_statistic(y)) <= 1e-12 * std::abs(test_statistic(y)));
        CHECK(std::abs(decision_statistic(s, 2.0) - decision_statistic(y, 2.0))
              <= 1e-12 * std::abs(test_statistic(y)) * 64.0);
        const MdConfig a{{1.0, 2.0}, 4096, 0.1};
        const MdConfig b{{c * c, 2.0}, 4096, 0.1};
        CHECK(md_decide(s, b).threshold == md_decide(y, a).threshold);
    }
}

TEST_CASE("detection probability")
{
    const moments::SignalModel bpsk{2, 1.0, 1.0};
    SUBCASE("zero mean shift with constant modulus in Gaussian noise")
    {
        const MdConfig cfg{{1.0, 1e12}, 1000, 0.1};
        const auto r = moments::real_moments(bpsk, cfg.noise, Hypothesis::H1);
        CHECK(std::abs(h1_test_value(r) + 2.0) < 1e-9);
        CHECK(std::abs(sigma2_h1(r) - 4.0) < 1e-9);
        CHECK(md_pd(cfg, bpsk) == doctest::Approx(0.1).epsilon(1e-6));
    }
    SUBCASE("Laplacian noise at 0 dB")
    {
        const MdConfig cfg{{1.0, 1.0}, 1000, 0.1};
        const auto r = moments::real_moments(bpsk, cfg.noise, Hypothesis::H1);
        CHECK(h1_test_value(r) == doctest::Approx(-2.375).epsilon(1e-14));
        const double shift = std::sqrt(1000.0) * 1.125;
        const double expect = specfun::gaussian_q((md_threshold(0.1, 1.0) - shift) / std::sqrt(sigma2_h1(r)));
        CHECK(md_pd(cfg, bpsk) == doctest::Approx(expect).epsilon(1e-14));
        CHECK(md_pd({{1.0, 1.0}, 100000, 0.1}, bpsk) > 1.0 - 1e-9);
    }
}

TEST_CASE("decision rule")
{
    const MdConfig cfg{{1.0, 1.0}, 512, 0.2};
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto y = mcleish::sample_ccs(cfg.noise, cfg.sample_count, seed);
        const auto out = md_decide(y, cfg);
        CHECK(out.statistic_value == decision_statistic(y, 1.0));
        CHECK(out.threshold == md_threshold(0.2, 1.0));
        CHECK((out.decision == Hypothesis::H1) == (out.statistic_value > out.threshold));
    }
    CHECK(DecisionOutcome::compare(1.0, 1.0).decision == Hypothesis::H0);
}

TEST_CASE("energy detector")
{
    SUBCASE("statistic")
    {
        CHECK(ed_statistic(std::vector<cd>(4, 0.0), 1.0) == 0.0);
        const auto y = mcleish::sample_ccs({2.0, 1.0}, 1'000'000, 8);
        CHECK(ed_statistic(y, 2.0) == doctest::Approx(1.0).epsilon(0.01));
        CHECK(ed_statistic(y, 2.0 * 1.6) == doctest::Approx(ed_statistic(y, 2.0) / 1.6).epsilon(1e-14));
        CHECK_THROWS_AS(ed_statistic(y, 0.0), DomainError);
    }
    SUBCASE("threshold")
    {
        const std::size_t n = 1000;
        const double q = bisect_q_inverse(0.1);
        const EdConfig gauss{1.0, {1.0, 1e12}, n, 0.1};
        CHECK(ed_threshold(gauss) == doctest::Approx(1.0 + q / std::sqrt(1000.0)).epsilon(1e-10));
        const EdConfig laplace{1.0, {1.0, 1.0}, n, 0.1};
        CHECK(ed_threshold(laplace) == doctest::Approx(1.0 + q * std::sqrt(2.5 / 1000.0)).epsilon(1e-10));
        // Designing on an inflated power moves the threshold with it.
        const EdConfig off{1.0 * 1.5, {1.0, 1.0}, n, 0.1};
        CHECK(ed_threshold(off) == doctest::Approx(ed_threshold(laplace)).epsilon(1e-12));
    }
    SUBCASE("probabilities")
    {
        for (double v : {0.5, 1.0, 1e12}) {
            for (double p : {0.01, 0.1, 0.6}) {
                const EdConfig cfg{3.0, {3.0, v}, 700, p};
                CHECK(std::abs(ed_pf(ed_threshold(cfg), cfg) - p) < 1e-10);
            }
        }
        const EdConfig gauss{1.0, {1.0, 1e12}, 1000, 0.1};
        for (double lambda : {0.95, 1.0, 1.04, 1.1}) {
            const double textbook = 0.5 * std::erfc((lambda - 1.0) * std::sqrt(1000.0) / std::sqrt(2.0));
            CHECK(std::abs(ed_pf(lambda, gauss) - textbook) < 1e-9);
        }
        // Underestimated noise power raises the false-alarm rate.
        const EdConfig under{1.0 / 1.3, {1.0, 1.0}, 1000, 0.1};
        CHECK(ed_pf(ed_threshold(under), under) > 0.5);
        const moments::SignalModel bpsk{2, 1.0, 1.0};
        CHECK(ed_pd(ed_threshold(gauss), gauss, bpsk) > 0.999);
    }
}

TEST_CASE("CLT behaviour of the normalized statistic")
{
    // Z has an O(1/sqrt N) mean bias from the ratio estimator; its value is
    // the second-order delta-method term, checked here to Monte-Carlo accuracy.
    constexpr std::size_t trials = 10000;
    constexpr std::size_t n = 2000;
    for (double v : {1.0, 5.0}) {
        double s = 0.0;
        double s2 = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const auto y = mcleish::sample_ccs({1.0, v}, n, derive_seed(4242, t));
            const double z = decision_statistic(y, v);
            s += z;
            s2 += z * z;
        }
        const double mean = s / trials;
        const double var = s2 / trials - mean * mean;
        const double sigma = std::sqrt(sigma2_h0(v));
        const double bias = h0_bias_times_n(v) / std::sqrt(static_cast<double>(n));
        INFO("v=" << v << " mean=" << mean << " predicted bias=" << bias << " var=" << var);
        CHECK(std::abs(mean - bias) < 3.0 * sigma / 100.0);
        CHECK(std::abs(var / sigma2_h0(v) - 1.0) < 0.10);
    }
    CHECK(h0_bias_times_n(1.0) == doctest::Approx(20.75).epsilon(1e-12));
}
