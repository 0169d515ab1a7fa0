#pragma once

#include "mbsense/mcleish.hpp"
#include "mbsense/moments.hpp"

#include <complex>
#include <cstddef>
#include <span>

/// Moment-based detector (MD) and energy detector (ED).
///
/// The MD compares the normalized statistic
///
///     Z = sqrt(N) (T_hat + 2 + 3/(2v)),   T_hat = -mu_hat(4) / mu_hat(2)^2,
///
/// against lambda* = sigma_H0 Q^-1(Pf). Under H0, Z is asymptotically
/// N(0, sigma2_H0), so P[Z > lambda] = Q(lambda / sigma_H0) and the threshold
/// inverts that exactly. Under H1, Z ~ N(sqrt(N)(T_H1 + 2 + 3/(2v)), sigma2_H1).
/// All probabilities are large-N Gaussian approximations; N >= 500 is the
/// recommended minimum.
namespace mbsense::detector {

using moments::Hypothesis;
using Samples = std::span<const std::complex<double>>;

struct MdConfig {
    mcleish::McLeishParams noise;
    std::size_t sample_count = 1000;
    double pf_target = 0.1;

    void validate() const;
};

struct EdConfig {
    double assumed_noise_power = 1.0; ///< sigma_hat^2 = beta sigma_w^2
    mcleish::McLeishParams true_noise;
    std::size_t sample_count = 1000;
    double pf_target = 0.1;

    void validate() const;
};

struct DecisionOutcome {
    double statistic_value = 0.0;
    double threshold = 0.0;
    Hypothesis decision = Hypothesis::H0;

    /// decision is H1 iff statistic > threshold.
    static DecisionOutcome compare(double statistic, double threshold);
};

/// (1/N) sum |y|^n.
double sample_abs_moment(Samples samples, int n);

double test_statistic(Samples samples);

/// T under H0: -(2 + 3/(2v)).
double h0_test_value(double v);

double decision_statistic(Samples samples, double v);

/// Asymptotic H0 variance (16v^3 + 120v^2 + 294v + 189) / (4v^3).
double sigma2_h0(double v);

/// Asymptotic variance of sqrt(N)(T_hat - T) written in the Re{y} moments.
double sigma2_h1(const moments::RealMomentSet& real);

/// Delta-method variance c Sigma c^T of T_hat = -mu(4)/mu(2)^2, with
/// c = [2 mu(4)/mu(2)^3, -1/mu(2)^2] and Sigma the covariance of (|y|^2, |y|^4).
double delta_method_variance(const moments::MomentSet& m);

/// T under H1 from the Re{y} moments: -m4 / (2 m2^2) - 1/2.
double h1_test_value(const moments::RealMomentSet& real);

double pf(double threshold, double v);
double md_threshold(double pf_target, double v);
double md_pd(const MdConfig& config, const moments::SignalModel& model);
DecisionOutcome md_decide(Samples samples, const MdConfig& config);

/// (1 / (N sigma_hat^2)) sum |y|^2.
double ed_statistic(Samples samples, double assumed_noise_power);

/// Threshold designed on the assumed noise power.
double ed_threshold(const EdConfig& config);
/// Probabilities of the ED statistic (normalized by the assumed power) under
/// the true noise law.
double ed_pf(double threshold, const EdConfig& config);
double ed_pd(double threshold, const EdConfig& config, const moments::SignalModel& model);
DecisionOutcome ed_decide(Samples samples, const EdConfig& config);

} // namespace mbsense::detector
