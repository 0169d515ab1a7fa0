#include "mbsense/mcleish.hpp"

#include "mbsense/errors.hpp"
#include "mbsense/rng.hpp"
#include "mbsense/specfun.hpp"

#include <cmath>
#include <numbers>

namespace mbsense::mcleish {

void McLeishParams::validate() const
{
    if (!std::isfinite(variance) || variance <= 0.0) {
        throw DomainError("McLeish variance must be finite and > 0");
    }
    if (!std::isfinite(non_gaussianity) || non_gaussianity <= 0.0) {
        throw DomainError("McLeish non-Gaussianity parameter must be finite and > 0");
    }
}

double pdf_real_component(double x, const McLeishParams& params)
{
    params.validate();
    if (!std::isfinite(x)) {
        throw DomainError("pdf_real_component: x must be finite");
    }
    const double v = params.non_gaussianity;
    const double s = std::sqrt(params.variance / (2.0 * v));
    const double order = v - 0.5;
    const double log_norm =
        std::log(2.0) - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(s) - specfun::log_gamma(v);

    // (z/2)^nu K_nu(z) -> Gamma(nu)/2 as z -> 0.
    auto at_origin = [&] {
        return std::exp(log_norm + specfun::log_gamma(order) - std::log(2.0));
    };

    if (x == 0.0) {
        if (v <= 0.5) {
            throw DomainError("pdf_real_component: density is singular at x = 0 for v <= 1/2");
        }
        return at_origin();
    }

    const double z = std::numbers::sqrt2 * std::abs(x) / s;
    const double k_scaled = specfun::bessel_k_scaled(std::abs(order), z);
    if (std::isinf(k_scaled)) {
        return at_origin();
    }
    // K_{-nu} = K_nu, so a negative order (v < 1/2) only flips the power term.
    return std::exp(log_norm + order * std::log(0.5 * z) + std::log(k_scaled) - z);
}

double real_moment(int n, double component_variance, double v)
{
    if (n < 0 || n > 16) {
        throw DomainError("real_moment: order must lie in [0, 16]");
    }
    if (!(component_variance > 0.0) || !(v > 0.0) || !std::isfinite(component_variance) || !std::isfinite(v)) {
        throw DomainError("real_moment: variance and v must be finite and > 0");
    }
    if (n % 2 != 0) {
        return 0.0;
    }
    if (n == 0) {
        return 1.0;
    }
    const double half = 0.5 * n;
    double gamma_ratio = 1.0;
    if (v + half < 170.0) {
        gamma_ratio = specfun::gamma(v + half) / specfun::gamma(v);
    } else {
        // tgamma overflows; log-gamma differencing would cancel. n/2 is an
        // integer here, so the ratio is the finite product v (v+1) ... .
        for (int j = 0; j < n / 2; ++j) {
            gamma_ratio *= v + j;
        }
    }
    const double half_integer_ratio = specfun::gamma(0.5 * (n + 1)) / std::sqrt(std::numbers::pi);
    return std::pow(2.0 * component_variance / v, half) * gamma_ratio * half_integer_ratio;
}

double draw_real(Rng& rng, double component_variance, double v)
{
    const double g = rng.gamma(v);
    return std::sqrt(g * component_variance / v) * rng.normal();
}

std::complex<double> draw_ccs(Rng& rng, const McLeishParams& params)
{
    const double c = 0.5 * params.variance;
    const double re = draw_real(rng, c, params.non_gaussianity);
    const double im = draw_real(rng, c, params.non_gaussianity);
    return {re, im};
}

ComplexSampleBuffer sample_ccs(const McLeishParams& params, std::size_t count, std::uint64_t seed)
{
    params.validate();
    if (count == 0) {
        throw DomainError("sample_ccs: count must be >= 1");
    }
    Rng rng(seed);
    ComplexSampleBuffer out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(draw_ccs(rng, params));
    }
    return out;
}

std::optional<McLeishParams> NoiseFit::params() const
{
    if (!non_gaussianity) {
        return std::nullopt;
    }
    return McLeishParams{variance, *non_gaussianity};
}

NoiseFit fit_params(std::span<const std::complex<double>> samples, double gaussian_z)
{
    if (samples.size() < 4) {
        throw DomainError("fit_params: need at least 4 samples");
    }
    if (!(gaussian_z >= 0.0)) {
        throw DomainError("fit_params: gaussian_z must be >= 0");
    }
    double m2 = 0.0;
    double m4 = 0.0;
    for (const auto& w : samples) {
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
            throw DomainError("fit_params: non-finite sample");
        }
        const double a = w.real() * w.real();
        const double b = w.imag() * w.imag();
        m2 += a + b;
        m4 += a * a + b * b;
    }
    const double reals = 2.0 * static_cast<double>(samples.size());
    m2 /= reals;
    m4 /= reals;
    if (m2 == 0.0) {
        throw DegenerateInputError("fit_params: zero-power buffer");
    }

    NoiseFit fit;
    fit.samples = samples.size();
    fit.variance = 2.0 * m2;
    fit.kurtosis = m4 / (m2 * m2);
    const double excess = fit.kurtosis - 3.0;
    const double guard = gaussian_z * std::sqrt(24.0 / reals);
    if (excess > guard && excess > 0.0) {
        fit.non_gaussianity = 3.0 / excess;
    }
    return fit;
}

} // namespace mbsense::mcleish
