#pragma once

#include <cstdint>

/// Scalar special functions shared by the noise model, the moment engine and
/// the detectors. All functions are pure and reentrant.
namespace mbsense::specfun {

/// Gamma function for x > 0 (relative error below 1e-12).
double gamma(double x);

/// log Gamma(x) for x > 0. Thread-safe (does not touch `signgam`).
double log_gamma(double x);

/// Modified Bessel function of the second kind K_order(x), order >= 0, x > 0.
///
/// Temme's series for x <= 2 and Steed's continued fraction above that give
/// K_mu, K_{mu+1} for the fractional part mu in [-1/2, 1/2]; the integer part
/// of the order is reached by forward recurrence, which is stable for K.
/// Underflows to 0 for large x.
double bessel_k(double order, double x);

/// exp(x) * K_order(x); finite for every x the unscaled version underflows on.
double bessel_k_scaled(double order, double x);

/// Gaussian tail probability Q(x) = P[N(0,1) > x].
double gaussian_q(double x);

/// Inverse of gaussian_q on (0, 1).
double inverse_gaussian_q(double p);

/// n!! for -1 <= n <= 33 ((-1)!! = 0!! = 1).
std::uint64_t double_factorial(int n);

/// Binomial coefficient C(n, k), 0 <= k <= n <= 60.
std::uint64_t binomial(int n, int k);

} // namespace mbsense::specfun
