#include "mbsense/simulator.hpp"

#include "mbsense/errors.hpp"
#include "mbsense/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace mbsense::simulator {

namespace {

constexpr std::uint64_t kUncertaintyStream = 0xb5ad4eceda1ce2a9ULL;

std::vector<std::complex<double>> convolve_valid(std::span<const std::complex<double>> x,
                                                 std::span<const double> taps)
{
    // Only outputs where the filter fully overlaps the input.
    const std::size_t l = taps.size();
    std::vector<std::complex<double>> y(x.size() + 1 - l);
    for (std::size_t i = 0; i < y.size(); ++i) {
        std::complex<double> acc = 0.0;
        for (std::size_t k = 0; k < l; ++k) {
            acc += taps[k] * x[i + l - 1 - k];
        }
        y[i] = acc;
    }
    return y;
}

template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn)
{
    unsigned n = workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : workers;
    n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(count, 1)));
    if (n <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (unsigned w = 0; w < n; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += n) {
                fn(i);
            }
        });
    }
}

detector::MdConfig md_config(const TrialBatch& batch, const Scenario& scenario, double pf_target)
{
    return {detector_noise(scenario), batch.samples_per_trial, pf_target};
}

} // namespace

int levels_per_dimension(Modulation m)
{
    return m == Modulation::Bpsk ? 2 : 4;
}

void SrrcSpec::validate() const
{
    if (!(rolloff > 0.0 && rolloff <= 1.0)) {
        throw DomainError("SRRC rolloff must lie in (0, 1]");
    }
    if (oversampling < 1) {
        throw DomainError("SRRC oversampling must be >= 1");
    }
    if (span_taps < 1 || span_taps % 2 == 0) {
        throw DomainError("SRRC span must be a positive odd number of taps");
    }
}

moments::SignalModel Scenario::signal_model() const
{
    return {levels_per_dimension(tx.modulation), tx.amplitude, channel.fading_variance};
}

void Scenario::validate() const
{
    noise.validate();
    signal_model().validate();
    if (tx.pulse_shaping) {
        tx.pulse_shaping->validate();
    }
    if (!(uncertainty.half_range_db >= 0.0) || !std::isfinite(uncertainty.half_range_db)) {
        throw DomainError("noise uncertainty half-range must be finite and >= 0 dB");
    }
}

void TrialBatch::validate() const
{
    if (trials < 1) {
        throw DomainError("a batch needs at least one trial");
    }
    if (samples_per_trial < 4) {
        throw DomainError("a trial needs at least 4 samples");
    }
    if (!(pf_target > 0.0 && pf_target < 1.0)) {
        throw DomainError("Pf target must lie in (0, 1)");
    }
}

std::vector<double> srrc_taps(double rolloff, int oversampling, int span_taps)
{
    SrrcSpec{rolloff, oversampling, span_taps}.validate();
    const double b = rolloff;
    const double pi = std::numbers::pi;
    std::vector<double> h(static_cast<std::size_t>(span_taps));
    const double centre = 0.5 * (span_taps - 1);
    for (int k = 0; k < span_taps; ++k) {
        const double t = (k - centre) / oversampling;
        double value = 0.0;
        if (std::abs(t) < 1e-12) {
            value = 1.0 - b + 4.0 * b / pi;
        } else if (std::abs(std::abs(t) - 1.0 / (4.0 * b)) < 1e-12) {
            value = b / std::numbers::sqrt2
                    * ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * b)) + (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * b)));
        } else {
            const double x = 4.0 * b * t;
            value = (std::sin(pi * t * (1.0 - b)) + x * std::cos(pi * t * (1.0 + b))) / (pi * t * (1.0 - x * x));
        }
        h[static_cast<std::size_t>(k)] = value;
    }
    double energy = 0.0;
    for (double v : h) {
        energy += v * v;
    }
    const double scale = 1.0 / std::sqrt(energy);
    for (double& v : h) {
        v *= scale;
    }
    return h;
}

McLeishParams detector_noise(const Scenario& scenario)
{
    McLeishParams p = scenario.noise;
    const auto& shaping = scenario.tx.pulse_shaping;
    if (shaping && shaping->matched_receive_filter) {
        const auto g = srrc_taps(shaping->rolloff, shaping->oversampling, shaping->span_taps);
        double g4 = 0.0;
        for (double x : g) {
            g4 += x * x * x * x;
        }
        p.non_gaussianity /= g4;
    }
    return p;
}

ComplexSampleBuffer gen_received(const TxSpec& tx, const ChannelSpec& channel, const McLeishParams& noise,
                                 Hypothesis hypothesis, std::size_t n, std::uint64_t seed)
{
    noise.validate();
    if (n == 0) {
        throw DomainError("gen_received: N must be >= 1");
    }
    const moments::SignalModel model{levels_per_dimension(tx.modulation), tx.amplitude, channel.fading_variance};
    model.validate();
    Rng rng(seed);
    const auto levels = static_cast<std::uint64_t>(model.levels_per_dimension);
    auto symbol = [&] {
        const auto l = static_cast<double>(rng.below(levels));
        const double m = static_cast<double>(levels);
        return model.amplitude * (m - 2.0 * l - 1.0) / (m - 1.0);
    };

    if (!tx.pulse_shaping) {
        ComplexSampleBuffer y(n);
        for (auto& out : y) {
            if (hypothesis == Hypothesis::H1) {
                const double s = symbol();
                const auto h = rng.complex_normal(model.fading_variance);
                out = h * s + mcleish::draw_ccs(rng, noise);
            } else {
                out = mcleish::draw_ccs(rng, noise);
            }
        }
        return y;
    }

    const SrrcSpec& shaping = *tx.pulse_shaping;
    shaping.validate();
    const auto taps = srrc_taps(shaping.rolloff, shaping.oversampling, shaping.span_taps);
    const std::size_t span = taps.size();
    const std::size_t f = static_cast<std::size_t>(shaping.oversampling);
    const std::size_t channel_len = n + (shaping.matched_receive_filter ? span - 1 : 0);

    ComplexSampleBuffer y(channel_len);
    if (hypothesis == Hypothesis::H1) {
        // sqrt(F) keeps the per-sample power of the shaped stream at E[s^2].
        const std::size_t train_len = channel_len + span - 1;
        const std::size_t symbols = (train_len + f - 1) / f;
        std::vector<std::complex<double>> train(symbols * f, 0.0);
        const double gain = std::sqrt(static_cast<double>(f));
        for (std::size_t k = 0; k < symbols; ++k) {
            train[k * f] = gain * symbol();
        }
        train.resize(train_len);
        const auto shaped = convolve_valid(train, taps);
        for (std::size_t i = 0; i < channel_len; ++i) {
            const auto h = rng.complex_normal(model.fading_variance);
            y[i] = h * shaped[i] + mcleish::draw_ccs(rng, noise);
        }
    } else {
        for (auto& out : y) {
            out = mcleish::draw_ccs(rng, noise);
        }
    }
    if (shaping.matched_receive_filter) {
        return convolve_valid(y, taps);
    }
    return y;
}

double apply_noise_uncertainty(const UncertaintySpec& spec, double true_power, std::uint64_t trial_seed)
{
    if (!(spec.half_range_db >= 0.0)) {
        throw DomainError("noise uncertainty half-range must be >= 0 dB");
    }
    if (spec.half_range_db == 0.0) {
        return true_power;
    }
    Rng rng(derive_seed(trial_seed, kUncertaintyStream));
    const double beta_db = rng.uniform(-spec.half_range_db, spec.half_range_db);
    return true_power * std::pow(10.0, beta_db / 10.0);
}

double binomial_ci_halfwidth(std::size_t successes, std::size_t trials)
{
    if (trials == 0) {
        throw DomainError("binomial_ci_halfwidth: no trials");
    }
    const double n = static_cast<double>(trials);
    const double p = std::clamp(static_cast<double>(successes) / n, 0.5 / n, 1.0 - 0.5 / n);
    return 1.959963984540054 * std::sqrt(p * (1.0 - p) / n);
}

std::vector<TrialRecord> trial_records(const TrialBatch& batch, const Scenario& scenario)
{
    batch.validate();
    scenario.validate();
    const McLeishParams seen = detector_noise(scenario);
    std::vector<TrialRecord> records(batch.trials);
    parallel_for(batch.trials, batch.workers, [&](std::size_t i) {
        const std::uint64_t seed = derive_seed(batch.master_seed, i);
        const auto y = gen_received(scenario.tx, scenario.channel, scenario.noise, batch.hypothesis,
                                    batch.samples_per_trial, seed);
        TrialRecord& r = records[i];
        if (batch.detector == DetectorKind::MD) {
            r.statistic = detector::decision_statistic(y, seen.non_gaussianity);
        } else {
            r.assumed_noise_power = apply_noise_uncertainty(scenario.uncertainty, seen.variance, seed);
            r.statistic = detector::ed_statistic(y, r.assumed_noise_power);
        }
    });
    return records;
}

double record_threshold(const TrialRecord& record, const TrialBatch& batch, const Scenario& scenario,
                        double pf_target)
{
    if (batch.detector == DetectorKind::MD) {
        const auto cfg = md_config(batch, scenario, pf_target);
        return detector::md_threshold(cfg.pf_target, cfg.noise.non_gaussianity);
    }
    const detector::EdConfig cfg{record.assumed_noise_power, detector_noise(scenario), batch.samples_per_trial,
                                 pf_target};
    return detector::ed_threshold(cfg);
}

BatchResult count_alarms(std::span<const TrialRecord> records, const TrialBatch& batch, const Scenario& scenario,
                         double pf_target)
{
    BatchResult out;
    out.trials = records.size();
    for (const auto& r : records) {
        const auto outcome = detector::DecisionOutcome::compare(r.statistic,
                                                                record_threshold(r, batch, scenario, pf_target));
        if (outcome.decision == Hypothesis::H1) {
            ++out.alarms;
        }
    }
    out.rate = static_cast<double>(out.alarms) / static_cast<double>(out.trials);
    out.ci_halfwidth = binomial_ci_halfwidth(out.alarms, out.trials);
    return out;
}

BatchResult run_batch(const TrialBatch& batch, const Scenario& scenario)
{
    const auto records = trial_records(batch, scenario);
    return count_alarms(records, batch, scenario, batch.pf_target);
}

std::uint64_t curve_seed(std::uint64_t master, Hypothesis h)
{
    return derive_seed(master, h == Hypothesis::H1 ? 0x4831ULL : 0x4830ULL);
}

std::vector<CurvePoint> roc_curve(std::span<const double> pf_targets, const Scenario& scenario,
                                  const TrialBatch& batch)
{
    if (pf_targets.empty()) {
        throw DomainError("roc_curve: empty Pf grid");
    }
    TrialBatch h1 = batch;
    h1.hypothesis = Hypothesis::H1;
    h1.master_seed = curve_seed(batch.master_seed, Hypothesis::H1);
    TrialBatch h0 = batch;
    h0.hypothesis = Hypothesis::H0;
    h0.master_seed = curve_seed(batch.master_seed, Hypothesis::H0);
    for (double p : pf_targets) {
        h1.pf_target = p;
        h1.validate();
    }
    const auto rec1 = trial_records(h1, scenario);
    const auto rec0 = trial_records(h0, scenario);
    std::vector<CurvePoint> out;
    out.reserve(pf_targets.size());
    for (double p : pf_targets) {
        const auto d = count_alarms(rec1, h1, scenario, p);
        const auto f = count_alarms(rec0, h0, scenario, p);
        out.push_back({p, d.rate, f.rate, d.ci_halfwidth});
    }
    return out;
}

std::vector<CurvePoint> pd_vs_snr(std::span<const double> snr_db, const Scenario& scenario, const TrialBatch& batch)
{
    if (snr_db.empty()) {
        throw DomainError("pd_vs_snr: empty SNR grid");
    }
    TrialBatch h0 = batch;
    h0.hypothesis = Hypothesis::H0;
    h0.master_seed = curve_seed(batch.master_seed, Hypothesis::H0);
    // The H0 companion does not depend on the SNR.
    const auto f = count_alarms(trial_records(h0, scenario), h0, scenario, batch.pf_target);

    TrialBatch h1 = batch;
    h1.hypothesis = Hypothesis::H1;
    h1.master_seed = curve_seed(batch.master_seed, Hypothesis::H1);
    std::vector<CurvePoint> out;
    out.reserve(snr_db.size());
    for (double snr : snr_db) {
        Scenario s = scenario;
        s.tx.amplitude = std::sqrt(scenario.noise.variance * std::pow(10.0, snr / 10.0));
        const auto d = run_batch(h1, s);
        out.push_back({snr, d.rate, f.rate, d.ci_halfwidth});
    }
    return out;
}

} // namespace mbsense::simulator
