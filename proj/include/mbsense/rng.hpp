#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace mbsense {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Seed of stream `index` under `master` (trial seeds, companion batches, ...).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Random source for every sampler in the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The variate transforms are implemented here rather than taken
/// from <random> distributions (whose algorithms are unspecified) so that a
/// seed reproduces the same samples on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    double normal();
    /// Gamma(shape, 1) variate, exact (Marsaglia-Tsang, with the U^(1/a)
    /// boost for shape < 1).
    double gamma(double shape);
    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_normal(double variance);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace mbsense
