#include "mbsense/detector.hpp"

#include "mbsense/errors.hpp"
#include "mbsense/specfun.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace mbsense::detector {

namespace {

void require_probability(double p)
{
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("target probability must lie in (0, 1)");
    }
}

void require_v(double v)
{
    if (!std::isfinite(v) || v <= 0.0) {
        throw DomainError("non-Gaussianity parameter must be finite and > 0");
    }
}

double ed_tail(double threshold, double assumed_power, std::size_t n, const moments::MomentSet& m)
{
    const double mean = m.mu2 / assumed_power;
    const double sd = std::sqrt((m.mu4 - m.mu2 * m.mu2) / (static_cast<double>(n) * assumed_power * assumed_power));
    return specfun::gaussian_q((threshold - mean) / sd);
}

} // namespace

void MdConfig::validate() const
{
    noise.validate();
    if (sample_count < 1) {
        throw DomainError("sample count must be >= 1");
    }
    require_probability(pf_target);
}

void EdConfig::validate() const
{
    true_noise.validate();
    if (!std::isfinite(assumed_noise_power) || assumed_noise_power <= 0.0) {
        throw DomainError("assumed noise power must be finite and > 0");
    }
    if (sample_count < 1) {
        throw DomainError("sample count must be >= 1");
    }
    require_probability(pf_target);
}

DecisionOutcome DecisionOutcome::compare(double statistic, double threshold)
{
    return {statistic, threshold, statistic > threshold ? Hypothesis::H1 : Hypothesis::H0};
}

double sample_abs_moment(Samples samples, int n)
{
    if (samples.empty()) {
        throw DomainError("sample_abs_moment: empty buffer");
    }
    if (n < 1) {
        throw DomainError("sample_abs_moment: order must be >= 1");
    }
    double sum = 0.0;
    if (n % 2 == 0) {
        for (const auto& y : samples) {
            sum += std::pow(std::norm(y), n / 2);
        }
    } else {
        for (const auto& y : samples) {
            sum += std::pow(std::abs(y), n);
        }
    }
    return sum / static_cast<double>(samples.size());
}

double test_statistic(Samples samples)
{
    if (samples.empty()) {
        throw DomainError("test_statistic: empty buffer");
    }
    double p2 = 0.0;
    double p4 = 0.0;
    for (const auto& y : samples) {
        const double e = std::norm(y);
        p2 += e;
        p4 += e * e;
    }
    if (p2 == 0.0) {
        throw DegenerateInputError("test_statistic: zero second moment");
    }
    // The 1/N factors cancel in the ratio.
    return -static_cast<double>(samples.size()) * p4 / (p2 * p2);
}

double h0_test_value(double v)
{
    require_v(v);
    return -(2.0 + 1.5 / v);
}

double decision_statistic(Samples samples, double v)
{
    const double t = test_statistic(samples);
    return std::sqrt(static_cast<double>(samples.size())) * (t - h0_test_value(v));
}

double sigma2_h0(double v)
{
    require_v(v);
    // (16v^3 + 120v^2 + 294v + 189) / (4v^3), in powers of 1/v so v -> inf stays exact.
    const double u = 1.0 / v;
    return 4.0 + u * (30.0 + u * (73.5 + u * 47.25));
}

double sigma2_h1(const moments::RealMomentSet& r)
{
    if (!(r.m2 > 0.0)) {
        throw DegenerateInputError("sigma2_h1: zero second moment");
    }
    const double m2 = r.m2;
    const double m2_2 = m2 * m2;
    const double m2_4 = m2_2 * m2_2;
    const double m2_6 = m2_4 * m2_2;
    const double num = 2.0 * m2_6 - 4.0 * r.m4 * m2_4 + (r.m4 * r.m4 + r.m8) * m2_2 - 4.0 * r.m4 * r.m6 * m2
                       + 4.0 * r.m4 * r.m4 * r.m4;
    return num / (8.0 * m2_6);
}

double delta_method_variance(const moments::MomentSet& m)
{
    if (!(m.mu2 > 0.0)) {
        throw DegenerateInputError("delta_method_variance: zero second moment");
    }
    const Eigen::Vector2d c(2.0 * m.mu4 / (m.mu2 * m.mu2 * m.mu2), -1.0 / (m.mu2 * m.mu2));
    Eigen::Matrix2d sigma;
    sigma << m.mu4 - m.mu2 * m.mu2, m.mu6 - m.mu2 * m.mu4,
             m.mu6 - m.mu2 * m.mu4, m.mu8 - m.mu4 * m.mu4;
    return c.dot(sigma * c);
}

double h1_test_value(const moments::RealMomentSet& r)
{
    if (!(r.m2 > 0.0)) {
        throw DegenerateInputError("h1_test_value: zero second moment");
    }
    return -r.m4 / (2.0 * r.m2 * r.m2) - 0.5;
}

double pf(double threshold, double v)
{
    return specfun::gaussian_q(threshold / std::sqrt(sigma2_h0(v)));
}

double md_threshold(double pf_target, double v)
{
    require_probability(pf_target);
    return std::sqrt(sigma2_h0(v)) * specfun::inverse_gaussian_q(pf_target);
}

double md_pd(const MdConfig& config, const moments::SignalModel& model)
{
    config.validate();
    const double v = config.noise.non_gaussianity;
    const auto real = moments::real_moments(model, config.noise, Hypothesis::H1);
    const double shift = std::sqrt(static_cast<double>(config.sample_count)) * (h1_test_value(real) - h0_test_value(v));
    const double lambda = md_threshold(config.pf_target, v);
    return specfun::gaussian_q((lambda - shift) / std::sqrt(sigma2_h1(real)));
}

DecisionOutcome md_decide(Samples samples, const MdConfig& config)
{
    const double v = config.noise.non_gaussianity;
    return DecisionOutcome::compare(decision_statistic(samples, v), md_threshold(config.pf_target, v));
}

double ed_statistic(Samples samples, double assumed_noise_power)
{
    if (!std::isfinite(assumed_noise_power) || assumed_noise_power <= 0.0) {
        throw DomainError("ed_statistic: assumed noise power must be > 0");
    }
    if (samples.empty()) {
        throw DomainError("ed_statistic: empty buffer");
    }
    double sum = 0.0;
    for (const auto& y : samples) {
        sum += std::norm(y);
    }
    return sum / (static_cast<double>(samples.size()) * assumed_noise_power);
}

double ed_threshold(const EdConfig& config)
{
    config.validate();
    const mcleish::McLeishParams assumed{config.assumed_noise_power, config.true_noise.non_gaussianity};
    const auto m = moments::abs_moments(std::nullopt, assumed, Hypothesis::H0);
    const double p2 = config.assumed_noise_power;
    const double sd = std::sqrt((m.mu4 - m.mu2 * m.mu2) / (static_cast<double>(config.sample_count) * p2 * p2));
    return sd * specfun::inverse_gaussian_q(config.pf_target) + m.mu2 / p2;
}

double ed_pf(double threshold, const EdConfig& config)
{
    config.validate();
    const auto m = moments::abs_moments(std::nullopt, config.true_noise, Hypothesis::H0);
    return ed_tail(threshold, config.assumed_noise_power, config.sample_count, m);
}

double ed_pd(double threshold, const EdConfig& config, const moments::SignalModel& model)
{
    config.validate();
    const auto m = moments::abs_moments(model, config.true_noise, Hypothesis::H1);
    return ed_tail(threshold, config.assumed_noise_power, config.sample_count, m);
}

DecisionOutcome ed_decide(Samples samples, const EdConfig& config)
{
    return DecisionOutcome::compare(ed_statistic(samples, config.assumed_noise_power), ed_threshold(config));
}

} // namespace mbsense::detector
