#pragma once

#include "mbsense/detector.hpp"
#include "mbsense/mcleish.hpp"
#include "mbsense/moments.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

/// Monte-Carlo engine: signal, channel and noise chains, trial batches and
/// empirical detection curves.
///
/// Every trial draws from its own generator seeded by
/// derive_seed(master_seed, trial_index), so batch results do not depend on
/// the number of worker threads or the order in which trials finish.
namespace mbsense::simulator {

using moments::Hypothesis;
using mcleish::ComplexSampleBuffer;
using mcleish::McLeishParams;

enum class Modulation { Bpsk, Qam16 };

int levels_per_dimension(Modulation m);

struct SrrcSpec {
    double rolloff = 0.2;
    int oversampling = 4;
    int span_taps = 17;
    /// Filter the received samples with the matched SRRC before detection.
    /// Off by default: the matched filter correlates neighbouring samples and
    /// averages the impulsive noise toward Gaussian, so the i.i.d. McLeish
    /// calibration of both detectors no longer holds at its output.
    bool matched_receive_filter = false;

    void validate() const;
};

struct TxSpec {
    Modulation modulation = Modulation::Bpsk;
    double amplitude = 1.0;
    std::optional<SrrcSpec> pulse_shaping; ///< empty: flat symbol-rate model
};

struct ChannelSpec {
    double fading_variance = 1.0;
};

struct UncertaintySpec {
    double half_range_db = 0.0;
};

struct Scenario {
    TxSpec tx;
    ChannelSpec channel;
    McLeishParams noise;
    UncertaintySpec uncertainty;

    moments::SignalModel signal_model() const;
    void validate() const;
};

enum class DetectorKind { MD, ED };

struct TrialBatch {
    std::size_t trials = 10000;
    std::size_t samples_per_trial = 1000;
    std::uint64_t master_seed = 1;
    DetectorKind detector = DetectorKind::MD;
    Hypothesis hypothesis = Hypothesis::H0;
    double pf_target = 0.1;
    /// 0 selects std::thread::hardware_concurrency().
    unsigned workers = 0;

    void validate() const;
};

struct BatchResult {
    std::size_t trials = 0;
    std::size_t alarms = 0;
    double rate = 0.0;
    double ci_halfwidth = 0.0;
};

struct CurvePoint {
    double x = 0.0;
    double pd = 0.0;
    double pf_empirical = 0.0;
    double ci_halfwidth = 0.0;
};

/// Unit-energy SRRC impulse response, `oversampling` samples per symbol,
/// centred. The removable points t = 0 and |t| = 1/(4 rolloff) use their limits.
std::vector<double> srrc_taps(double rolloff, int oversampling, int span_taps);

/// Noise parameters seen by the detector. Identical to scenario.noise except
/// after the matched receive filter g, which keeps the noise power and
/// quadrature independence but scales the excess kurtosis by sum g^4, i.e.
/// v -> v / sum g^4.
McLeishParams detector_noise(const Scenario& scenario);

/// N received samples under `hypothesis`, deterministic in `seed`.
ComplexSampleBuffer gen_received(const TxSpec& tx, const ChannelSpec& channel, const McLeishParams& noise,
                                 Hypothesis hypothesis, std::size_t n, std::uint64_t seed);

/// Assumed noise power true_power * 10^(b/10), b ~ Uniform(-L, L) dB.
double apply_noise_uncertainty(const UncertaintySpec& spec, double true_power, std::uint64_t trial_seed);

/// 95% normal-approximation half-width; rates 0 and 1 are pulled in by 1/(2n).
double binomial_ci_halfwidth(std::size_t successes, std::size_t trials);

/// Per-trial detector inputs, the expensive part of a batch.
struct TrialRecord {
    double statistic = 0.0;
    double assumed_noise_power = 0.0; ///< ED only
};

std::vector<TrialRecord> trial_records(const TrialBatch& batch, const Scenario& scenario);

/// Threshold applied to one trial record at the given false-alarm target.
double record_threshold(const TrialRecord& record, const TrialBatch& batch, const Scenario& scenario,
                        double pf_target);

BatchResult count_alarms(std::span<const TrialRecord> records, const TrialBatch& batch, const Scenario& scenario,
                         double pf_target);

/// Fraction of trials deciding H1 at the batch's CFAR threshold.
BatchResult run_batch(const TrialBatch& batch, const Scenario& scenario);

/// One point per Pf target: pd from an H1 batch, pf_empirical from an H0
/// batch. Both batches are simulated once and re-thresholded per point, which
/// equals running run_batch per point with the same seeds.
std::vector<CurvePoint> roc_curve(std::span<const double> pf_targets, const Scenario& scenario,
                                  const TrialBatch& batch);

/// One point per SNR (dB, s_p^2 / sigma_w^2) at a fixed Pf target.
std::vector<CurvePoint> pd_vs_snr(std::span<const double> snr_db, const Scenario& scenario, const TrialBatch& batch);

/// Seeds of the H1 and H0 batches behind a curve.
std::uint64_t curve_seed(std::uint64_t master, Hypothesis h);

} // namespace mbsense::simulator
