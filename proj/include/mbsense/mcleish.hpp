#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mbsense {
class Rng;
}

/// McLeish (variance-gamma) noise: density, moments, sampling and fitting.
///
/// A complex sample w is built from two independent real McLeish quadratures,
/// each a Gaussian scale mixture
///
///     X = sqrt(G * sigma2 / (2 v)) * Z,   G ~ Gamma(v, 1),  Z ~ N(0, 1),
///
/// with its own mixer G. Each quadrature then has variance sigma2 / 2 and
/// kurtosis 3 + 3/v, and
///
///     E|w|^4 / (E|w|^2)^2 = (2 E[X^4] + 2 E[X^2]^2) / (4 E[X^2]^2)
///                         = (3 (1 + 1/v) + 1) / 2 = 2 + 3 / (2 v).
///
/// Sharing one mixer between the quadratures (w = sqrt(G) * CN(0, sigma2/v))
/// would instead give 2 E[G^2] / E[G]^2 = 2 + 2/v, so the independent-mixer
/// construction is the one whose fourth-to-second moment ratio matches the
/// detector's H0 reference value -(2 + 3/(2v)).
namespace mbsense::mcleish {

using ComplexSampleBuffer = std::vector<std::complex<double>>;

struct McLeishParams {
    double variance = 1.0;        ///< sigma_w^2, total complex noise power
    double non_gaussianity = 1.0; ///< v; 1 is Laplacian, v -> inf is Gaussian

    /// Throws DomainError unless both fields are finite and positive.
    void validate() const;
    /// Per-quadrature kurtosis 3 + 3/v.
    double kurtosis() const { return 3.0 + 3.0 / non_gaussianity; }
};

/// Density of one quadrature component (variance sigma2/2) on the real line:
///
///     f(x) = 2 / (sqrt(2 pi) s Gamma(v)) * (|x| / (sqrt(2) s))^(v - 1/2)
///            * K_{v-1/2}(sqrt(2) |x| / s),        s^2 = sigma2 / (2 v).
///
/// Finite at x = 0 for v > 1/2; throws DomainError there for v <= 1/2, where
/// the density has an (integrable) singularity.
double pdf_real_component(double x, const McLeishParams& params);

/// E[X^n] of a real McLeish variate with the given variance:
/// (2 c / v)^(n/2) Gamma(v + n/2) Gamma((n+1)/2) / (Gamma(v) Gamma(1/2)).
/// Odd n gives 0. n must lie in [0, 16].
double real_moment(int n, double component_variance, double v);

/// `count` i.i.d. CCS McLeish samples, deterministic in `seed`.
ComplexSampleBuffer sample_ccs(const McLeishParams& params, std::size_t count, std::uint64_t seed);

/// Outcome of fitting the noise model to zero-mean samples.
struct NoiseFit {
    double variance = 0.0;      ///< mean |w|^2
    double kurtosis = 0.0;      ///< per-quadrature sample kurtosis (pooled over I and Q)
    std::size_t samples = 0;
    /// v = 3 / (kurtosis - 3); empty when the samples are Gaussian or lighter-tailed.
    std::optional<double> non_gaussianity;

    bool gaussian_or_lighter() const { return !non_gaussianity.has_value(); }
    std::optional<McLeishParams> params() const;
};

/// Moment fit of sigma2 and v.
///
/// Excess kurtosis that is not significantly positive, i.e. at most
/// `gaussian_z` standard errors sqrt(24 / (2 n)) of the Gaussian null, yields
/// the Gaussian-or-lighter outcome. `gaussian_z = 0` reduces the rule to
/// "kurtosis <= 3". Throws DomainError for fewer than 4 samples or non-finite
/// values and DegenerateInputError for an all-zero buffer.
NoiseFit fit_params(std::span<const std::complex<double>> samples, double gaussian_z = 3.0);

/// One real McLeish variate with the given variance, drawn from `rng`.
double draw_real(Rng& rng, double component_variance, double v);
/// One CCS McLeish sample drawn from `rng`.
std::complex<double> draw_ccs(Rng& rng, const McLeishParams& params);

} // namespace mbsense::mcleish
