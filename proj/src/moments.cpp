#include "mbsense/moments.hpp"

#include "mbsense/errors.hpp"
#include "mbsense/specfun.hpp"

#include <cmath>

namespace mbsense::moments {

namespace {

bool log_convex_chain(double a0, double a1, double a2, double a3, double a4)
{
    // a_k are moments of orders 0, 2, 4, 6, 8; Cauchy-Schwarz needs a_k^2 <= a_{k-1} a_{k+1}.
    constexpr double slack = 1.0 + 1e-12;
    if (!(a1 > 0.0) || a2 < 0.0 || a3 < 0.0 || a4 < 0.0) {
        return false;
    }
    return a1 * a1 <= a0 * a2 * slack && a2 * a2 <= a1 * a3 * slack && a3 * a3 <= a2 * a4 * slack;
}

const SignalModel& require_model(const std::optional<SignalModel>& model)
{
    if (!model) {
        throw DomainError("H1 moments need a signal model");
    }
    model->validate();
    return *model;
}

void require_order(int n, int max_order)
{
    if (n < 0 || n > max_order) {
        throw DomainError("moment order out of range");
    }
}

} // namespace

void SignalModel::validate() const
{
    if (levels_per_dimension < 2) {
        throw DomainError("constellation needs at least 2 levels");
    }
    if (!std::isfinite(amplitude) || amplitude <= 0.0) {
        throw DomainError("signal amplitude must be finite and > 0");
    }
    if (!std::isfinite(fading_variance) || fading_variance <= 0.0) {
        throw DomainError("fading variance must be finite and > 0");
    }
}

bool RealMomentSet::is_valid_sequence() const
{
    return log_convex_chain(1.0, m2, m4, m6, m8);
}

bool MomentSet::is_valid_sequence() const
{
    return log_convex_chain(1.0, mu2, mu4, mu6, mu8);
}

double constellation_moment(int n, const SignalModel& model)
{
    require_order(n, 16);
    if (n == 0) {
        return 1.0;
    }
    const int m = model.levels_per_dimension;
    double sum = 0.0;
    for (int l = 0; l < m; ++l) {
        const double level = -static_cast<double>(m - 2 * l - 1) / static_cast<double>(m - 1);
        sum += std::pow(level * model.amplitude, n);
    }
    return sum / m;
}

double fading_real_moment(int n, const SignalModel& model)
{
    require_order(n, 16);
    if (n % 2 != 0) {
        return 0.0;
    }
    return static_cast<double>(specfun::double_factorial(n - 1)) * std::pow(0.5 * model.fading_variance, n / 2);
}

double noise_real_moment(int k, const mcleish::McLeishParams& noise)
{
    require_order(k, 16);
    if (k % 2 != 0) {
        return 0.0;
    }
    // (sigma2/v)^(k/2) Gamma(v+k/2)/Gamma(v) * Gamma((k+1)/2)/Gamma(1/2)
    //   = (sigma2/2)^(k/2) (k-1)!! prod_{j<k/2} (1 + j/v)
    double rising = 1.0;
    for (int j = 0; j < k / 2; ++j) {
        rising *= 1.0 + j / noise.non_gaussianity;
    }
    return std::pow(0.5 * noise.variance, k / 2) * static_cast<double>(specfun::double_factorial(k - 1)) * rising;
}

double received_real_moment(int n, const std::optional<SignalModel>& model, const mcleish::McLeishParams& noise,
                            Hypothesis hypothesis)
{
    require_order(n, 8);
    noise.validate();
    if (n % 2 != 0) {
        return 0.0;
    }
    if (hypothesis == Hypothesis::H0) {
        return noise_real_moment(n, noise);
    }
    const SignalModel& sig = require_model(model);
    double sum = 0.0;
    for (int k = 0; k <= n; k += 2) {
        sum += static_cast<double>(specfun::binomial(n, k)) * noise_real_moment(k, noise)
               * fading_real_moment(n - k, sig) * constellation_moment(n - k, sig);
    }
    return sum;
}

RealMomentSet real_moments(const std::optional<SignalModel>& model, const mcleish::McLeishParams& noise,
                           Hypothesis hypothesis)
{
    return {received_real_moment(2, model, noise, hypothesis), received_real_moment(4, model, noise, hypothesis),
            received_real_moment(6, model, noise, hypothesis), received_real_moment(8, model, noise, hypothesis)};
}

MomentSet abs_moments(const RealMomentSet& r)
{
    return {2.0 * r.m2, 2.0 * (r.m4 + r.m2 * r.m2), 2.0 * r.m6 + 6.0 * r.m4 * r.m2,
            2.0 * r.m8 + 8.0 * r.m6 * r.m2 + 6.0 * r.m4 * r.m4};
}

MomentSet abs_moments(const std::optional<SignalModel>& model, const mcleish::McLeishParams& noise,
                      Hypothesis hypothesis)
{
    return abs_moments(real_moments(model, noise, hypothesis));
}

MomentSet abs_moments_exact(const std::optional<SignalModel>& model, const mcleish::McLeishParams& noise,
                            Hypothesis hypothesis)
{
    noise.validate();
    const bool signal = hypothesis == Hypothesis::H1;
    const SignalModel* sig = signal ? &require_model(model) : nullptr;

    // E[X^(2i) Y^(2j)] with X = s a + n1, Y = s b + n2.
    auto joint = [&](int i, int j) {
        double total = 0.0;
        const int max_p = signal ? 2 * i : 0;
        const int max_q = signal ? 2 * j : 0;
        for (int p = 0; p <= max_p; p += 2) {
            for (int q = 0; q <= max_q; q += 2) {
                double term = static_cast<double>(specfun::binomial(2 * i, p) * specfun::binomial(2 * j, q))
                              * noise_real_moment(2 * i - p, noise) * noise_real_moment(2 * j - q, noise);
                if (signal) {
                    term *= constellation_moment(p + q, *sig) * fading_real_moment(p, *sig)
                            * fading_real_moment(q, *sig);
                }
                total += term;
            }
        }
        return total;
    };
    auto abs_moment = [&](int half) {
        double total = 0.0;
        for (int i = 0; i <= half; ++i) {
            total += static_cast<double>(specfun::binomial(half, i)) * joint(i, half - i);
        }
        return total;
    };
    return {abs_moment(1), abs_moment(2), abs_moment(3), abs_moment(4)};
}

} // namespace mbsense::moments
