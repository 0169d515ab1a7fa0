#pragma once

#include "mbsense/mcleish.hpp"

#include <array>
#include <optional>

/// Closed-form moments of the received signal y = h s + w under both
/// hypotheses: s real and uniform over M equally spaced levels in [-s_p, s_p],
/// h ~ CN(0, sigma_h^2), w CCS McLeish.
namespace mbsense::moments {

enum class Hypothesis { H0, H1 };

struct SignalModel {
    int levels_per_dimension = 2; ///< M (2: BPSK, 4: the 16-QAM amplitude grid)
    double amplitude = 1.0;       ///< s_p; SNR = s_p^2 / sigma_w^2
    double fading_variance = 1.0; ///< sigma_h^2

    void validate() const;
};

/// Moments of Re{y} at orders 2, 4, 6, 8.
struct RealMomentSet {
    double m2 = 0.0;
    double m4 = 0.0;
    double m6 = 0.0;
    double m8 = 0.0;

    bool is_valid_sequence() const;
};

/// Absolute moments E|y|^n at n = 2, 4, 6, 8.
struct MomentSet {
    double mu2 = 0.0;
    double mu4 = 0.0;
    double mu6 = 0.0;
    double mu8 = 0.0;

    bool is_valid_sequence() const;
    /// E|y|^4 / (E|y|^2)^2, the negated test value.
    double kurtosis_ratio() const { return mu4 / (mu2 * mu2); }
};

/// mu_s(n) of the discrete uniform constellation.
double constellation_moment(int n, const SignalModel& model);

/// E[Re{h}^n] for Re{h} ~ N(0, sigma_h^2 / 2): (n-1)!! (sigma_h^2/2)^(n/2) for even n.
double fading_real_moment(int n, const SignalModel& model);

/// E[Re{w}^k]; the noise factor of the binomial expansion.
double noise_real_moment(int k, const mcleish::McLeishParams& noise);

/// E[Re{y}^n] for even n <= 8 (odd n gives 0). Under H0 only the pure-noise
/// term survives and `model` is ignored; H1 requires a model.
double received_real_moment(int n, const std::optional<SignalModel>& model, const mcleish::McLeishParams& noise,
                            Hypothesis hypothesis);

RealMomentSet real_moments(const std::optional<SignalModel>& model, const mcleish::McLeishParams& noise,
                           Hypothesis hypothesis);

/// Absolute moments from the Re{y} moments, treating Re{y} and Im{y} as
/// independent and identically distributed:
///   mu(2) = 2 m2, mu(4) = 2 (m4 + m2^2), mu(6) = 2 m6 + 6 m4 m2,
///   mu(8) = 2 m8 + 8 m6 m2 + 6 m4^2.
MomentSet abs_moments(const RealMomentSet& real);
MomentSet abs_moments(const std::optional<SignalModel>& model, const mcleish::McLeishParams& noise,
                      Hypothesis hypothesis);

/// Exact E|y|^n without the independence assumption.
///
/// Re{y} = s a + n1 and Im{y} = s b + n2 share the symbol s, so for a
/// multi-level constellation the quadratures are dependent and abs_moments()
/// is only approximate under H1. Here E[(X^2 + Y^2)^(n/2)] is expanded jointly
/// over s, a, b, n1, n2. Agrees with abs_moments() under H0 and for
/// constant-modulus symbols.
MomentSet abs_moments_exact(const std::optional<SignalModel>& model, const mcleish::McLeishParams& noise,
                            Hypothesis hypothesis);

} // namespace mbsense::moments
