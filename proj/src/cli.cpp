#include "mbsense/cli.hpp"

#include "mbsense/detector.hpp"
#include "mbsense/errors.hpp"
#include "mbsense/iq_io.hpp"
#include "mbsense/mcleish.hpp"
#include "mbsense/simulator.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

namespace mbsense::cli {

namespace {

namespace sim = mbsense::simulator;

// Shortest of %.15g..%.17g that reads back to the same double.
std::string num(double x)
{
    char buf[40];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, x);
        if (std::strtod(buf, nullptr) == x) {
            break;
        }
    }
    return buf;
}

std::string short_num(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::vector<double> parse_grid(const std::string& text, const char* flag)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(item, &used);
        } catch (const std::logic_error&) {
            throw DomainError(std::string(flag) + ": cannot parse '" + item + "'");
        }
        if (used != item.size() || !std::isfinite(value)) {
            throw DomainError(std::string(flag) + ": cannot parse '" + item + "'");
        }
        out.push_back(value);
    }
    if (out.empty()) {
        throw DomainError(std::string(flag) + ": empty grid");
    }
    return out;
}

std::string join_grid(const std::vector<double>& grid)
{
    std::string s;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        s += (i ? "," : "") + num(grid[i]);
    }
    return s;
}

/// Flags in a fixed order with full-precision values; replaying it rebuilds
/// the same configuration.
class Canonical {
public:
    explicit Canonical(std::string command) : text_(std::move(command)) {}
    void add(const char* flag, const std::string& value) { text_ += std::string(" --") + flag + " " + value; }
    void add(const char* flag, double value) { add(flag, num(value)); }
    void add_count(const char* flag, std::uint64_t value) { add(flag, std::to_string(value)); }
    void add_flag(const char* flag, bool on)
    {
        if (on) {
            text_ += std::string(" --") + flag;
        }
    }
    const std::string& str() const { return text_; }

private:
    std::string text_;
};

struct ScenarioOpts {
    double v = 1.0;
    double sigma2 = 1.0;
    double snr_db = 0.0;
    std::optional<double> sp;
    std::string modulation = "bpsk";
    double fading_variance = 1.0;
    double uncertainty_db = 0.0;
    std::string pulse = "flat";
    bool rx_filter = false;

    void attach(CLI::App* app)
    {
        app->add_option("--v", v, "McLeish non-Gaussianity v (large = Gaussian)");
        app->add_option("--sigma2", sigma2, "noise power sigma_w^2");
        app->add_option("--snr-db", snr_db, "SNR s_p^2 / sigma_w^2 in dB");
        app->add_option("--sp", sp, "peak symbol amplitude (overrides --snr-db)");
        app->add_option("--mod", modulation, "modulation")->check(CLI::IsMember({"bpsk", "qam16"}));
        app->add_option("--fading-variance", fading_variance, "Rayleigh fading variance sigma_h^2");
        app->add_option("--uncertainty-db", uncertainty_db, "ED noise uncertainty half-range L in dB");
        app->add_option("--pulse", pulse, "pulse shaping")->check(CLI::IsMember({"flat", "srrc"}));
        app->add_flag("--rx-filter", rx_filter, "matched SRRC filter at the receiver (srrc only)");
    }

    double amplitude() const { return sp ? *sp : std::sqrt(sigma2 * std::pow(10.0, snr_db / 10.0)); }

    sim::Scenario scenario() const
    {
        sim::Scenario s;
        s.tx.modulation = modulation == "bpsk" ? sim::Modulation::Bpsk : sim::Modulation::Qam16;
        s.tx.amplitude = amplitude();
        if (pulse == "srrc") {
            sim::SrrcSpec shaping;
            shaping.matched_receive_filter = rx_filter;
            s.tx.pulse_shaping = shaping;
        } else if (rx_filter) {
            throw DomainError("--rx-filter needs --pulse srrc");
        }
        s.channel.fading_variance = fading_variance;
        s.noise = {sigma2, v};
        s.uncertainty.half_range_db = uncertainty_db;
        s.validate();
        return s;
    }

    void canonical(Canonical& c, bool with_snr) const
    {
        c.add("v", v);
        c.add("sigma2", sigma2);
        if (with_snr) {
            if (sp) {
                c.add("sp", *sp);
            } else {
                c.add("snr-db", snr_db);
            }
        }
        c.add("mod", modulation);
        c.add("fading-variance", fading_variance);
        c.add("uncertainty-db", uncertainty_db);
        c.add("pulse", pulse);
        c.add_flag("rx-filter", rx_filter);
    }
};

struct RunOpts {
    std::size_t n = 1000;
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    std::string detector = "md";
    double pf = 0.1;
    unsigned threads = 0;
    std::string out_path;

    void attach(CLI::App* app)
    {
        app->add_option("--n", n, "samples per trial");
        app->add_option("--trials", trials, "Monte-Carlo trials per batch");
        app->add_option("--seed", seed, "master seed");
        app->add_option("--detector", detector, "detector")->check(CLI::IsMember({"md", "ed"}));
        app->add_option("--threads", threads, "worker threads (0 = all cores); does not change results");
        app->add_option("--out", out_path, "output file (default stdout)");
    }

    sim::TrialBatch batch() const
    {
        sim::TrialBatch b;
        b.trials = trials;
        b.samples_per_trial = n;
        b.master_seed = seed;
        b.detector = detector == "md" ? sim::DetectorKind::MD : sim::DetectorKind::ED;
        b.pf_target = pf;
        b.workers = threads;
        b.validate();
        return b;
    }

    void canonical(Canonical& c) const
    {
        c.add_count("n", n);
        c.add_count("trials", trials);
        c.add_count("seed", seed);
        c.add("detector", detector);
    }
};

std::string header(const Canonical& args, const std::vector<std::pair<std::string, std::string>>& extra)
{
    std::string h = std::string("# mbsense ") + kVersion + "\n# args: " + args.str() + "\n";
    for (const auto& [key, value] : extra) {
        h += "# " + key + ": " + value + "\n";
    }
    return h;
}

void emit(const std::string& text, const std::string& path, std::ostream& out)
{
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw IoError("cannot open " + path + " for writing");
    }
    file << text;
    if (!file) {
        throw IoError("write failed: " + path);
    }
}

std::string curve_csv(const std::vector<sim::CurvePoint>& points)
{
    std::string body = "x,pd,pf_empirical,ci_halfwidth\n";
    for (const auto& p : points) {
        body += num(p.x) + "," + num(p.pd) + "," + num(p.pf_empirical) + "," + num(p.ci_halfwidth) + "\n";
    }
    return body;
}

std::vector<std::string> trim_split(const std::string& line, char sep)
{
    const auto pos = line.find(sep);
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (pos == std::string::npos) {
        return {trim(line)};
    }
    return {trim(line.substr(0, pos)), trim(line.substr(pos + 1))};
}

std::vector<std::string> config_tokens(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read config " + path);
    }
    std::vector<std::string> tokens;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = line.substr(0, line.find('#'));
        const auto parts = trim_split(line, '=');
        if (parts.size() == 1 && parts[0].empty()) {
            continue;
        }
        if (parts.size() != 2 || parts[0].empty()) {
            throw FormatError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        std::string key = parts[0];
        if (key.rfind("--", 0) == 0) {
            key = key.substr(2);
        }
        if (key == "config") {
            throw FormatError(path + ":" + std::to_string(lineno) + ": nested config files are not supported");
        }
        tokens.push_back("--" + key + "=" + parts[1]);
    }
    return tokens;
}

/// Splices config-file tokens in front of the command-line flags.
std::vector<std::string> expand_config(const std::vector<std::string>& args)
{
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        }
    }
    if (!path || args.empty()) {
        return args;
    }
    std::vector<std::string> expanded{args.front()};
    for (auto& t : config_tokens(*path)) {
        expanded.push_back(std::move(t));
    }
    expanded.insert(expanded.end(), args.begin() + 1, args.end());
    return expanded;
}

int dispatch(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err);

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    try {
        return dispatch(expand_config(args), out, err);
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const DegenerateInputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const FormatError& e) {
        err << "format error: " << e.what() << "\n";
        return kExitIo;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return kExitIo;
    }
}

namespace {

int dispatch(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Moment-based spectrum sensing under McLeish noise", "mbsense"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string config_path;
    auto with_config = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "file of 'key = value' lines; flags override it");
        return sub;
    };

    // threshold
    double th_v = 1.0;
    double th_pf = 0.1;
    std::size_t th_n = 1000;
    auto* threshold = with_config(app.add_subcommand("threshold", "MD CFAR threshold"));
    threshold->add_option("--v", th_v, "non-Gaussianity v");
    threshold->add_option("--pf", th_pf, "false-alarm target");
    threshold->add_option("--n", th_n, "samples per decision");

    // analytic
    ScenarioOpts an_sc;
    std::size_t an_n = 1000;
    double an_beta_db = 0.0;
    std::string an_grid = "0.01,0.05,0.1,0.2,0.3,0.5,0.7,0.9";
    std::string an_out;
    auto* analytic = with_config(app.add_subcommand("analytic", "closed-form Pf/Pd of MD and ED over a Pf grid"));
    an_sc.attach(analytic);
    analytic->add_option("--n", an_n, "samples per decision");
    analytic->add_option("--beta-db", an_beta_db, "ED assumed/true noise power ratio in dB");
    analytic->add_option("--pf-grid", an_grid, "comma-separated Pf targets");
    analytic->add_option("--out", an_out, "output file (default stdout)");

    // gen-noise
    double gn_v = 1.0;
    double gn_sigma2 = 1.0;
    std::size_t gn_n = 100000;
    std::uint64_t gn_seed = 1;
    std::string gn_out;
    bool gn_text = false;
    auto* gen_noise = with_config(app.add_subcommand("gen-noise", "write McLeish noise as an IQ file"));
    gen_noise->add_option("--v", gn_v, "non-Gaussianity v");
    gen_noise->add_option("--sigma2", gn_sigma2, "noise power");
    gen_noise->add_option("--n", gn_n, "number of complex samples");
    gen_noise->add_option("--seed", gn_seed, "seed");
    gen_noise->add_option("--out", gn_out, "output file")->required();
    gen_noise->add_flag("--text", gn_text, "write i,q text instead of binary float32");

    // fit-noise
    std::string fn_in;
    bool fn_text = false;
    auto* fit_noise = with_config(app.add_subcommand("fit-noise", "estimate sigma_w^2 and v from an IQ file"));
    fit_noise->add_option("--in", fn_in, "input file")->required();
    fit_noise->add_flag("--text", fn_text, "read i,q text instead of binary float32");

    // roc
    ScenarioOpts roc_sc;
    RunOpts roc_run;
    std::string roc_grid = "0.01,0.05,0.1,0.2,0.3,0.5,0.7,0.9";
    auto* roc = with_config(app.add_subcommand("roc", "Monte-Carlo Pd vs Pf target"));
    roc_sc.attach(roc);
    roc_run.attach(roc);
    roc->add_option("--pf-grid", roc_grid, "comma-separated Pf targets");

    // pd-snr
    ScenarioOpts ps_sc;
    RunOpts ps_run;
    std::string ps_grid = "-15,-10,-5,0,5";
    auto* pd_snr = with_config(app.add_subcommand("pd-snr", "Monte-Carlo Pd vs SNR at a fixed Pf target"));
    ps_sc.attach(pd_snr);
    ps_run.attach(pd_snr);
    pd_snr->add_option("--pf", ps_run.pf, "false-alarm target");
    pd_snr->add_option("--snr-grid", ps_grid, "comma-separated SNRs in dB");

    // replay
    std::string rp_in;
    std::string rp_out;
    unsigned rp_threads = 0;
    auto* replay = app.add_subcommand("replay", "regenerate a CSV from its metadata header");
    replay->add_option("--in", rp_in, "CSV written by roc, pd-snr or analytic")->required();
    replay->add_option("--out", rp_out, "output file (default stdout)");
    replay->add_option("--threads", rp_threads, "worker threads");

    try {
        std::vector<std::string> reversed(raw.rbegin(), raw.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitDomain;
    }

    if (threshold->parsed()) {
        detector::MdConfig cfg{{1.0, th_v}, th_n, th_pf};
        cfg.validate();
        const double lambda = detector::md_threshold(th_pf, th_v);
        const double t0 = detector::h0_test_value(th_v);
        out << "lambda_star " << short_num(lambda) << "\n";
        out << "sigma_h0 " << short_num(std::sqrt(detector::sigma2_h0(th_v))) << "\n";
        out << "t_h0 " << short_num(t0) << "\n";
        out << "t_threshold " << short_num(t0 + lambda / std::sqrt(static_cast<double>(th_n))) << "\n";
        return kExitOk;
    }

    if (analytic->parsed()) {
        const auto grid = parse_grid(an_grid, "--pf-grid");
        const auto sc = an_sc.scenario();
        if (sc.tx.pulse_shaping) {
            throw DomainError("analytic: closed forms assume the flat model (--pulse flat)");
        }
        const auto model = sc.signal_model();
        Canonical c("analytic");
        an_sc.canonical(c, true);
        c.add_count("n", an_n);
        c.add("beta-db", an_beta_db);
        c.add("pf-grid", join_grid(grid));
        std::string text = header(c, {{"n", std::to_string(an_n)}});
        text += "pf_target,md_threshold,md_pf,md_pd,ed_threshold,ed_pf,ed_pd\n";
        for (double p : grid) {
            const detector::MdConfig md{sc.noise, an_n, p};
            md.validate();
            const detector::EdConfig ed{sc.noise.variance * std::pow(10.0, an_beta_db / 10.0), sc.noise, an_n, p};
            ed.validate();
            const double md_thr = detector::md_threshold(p, sc.noise.non_gaussianity);
            const double ed_thr = detector::ed_threshold(ed);
            text += num(p) + "," + num(md_thr) + "," + num(detector::pf(md_thr, sc.noise.non_gaussianity)) + ","
                    + num(detector::md_pd(md, model)) + "," + num(ed_thr) + "," + num(detector::ed_pf(ed_thr, ed))
                    + "," + num(detector::ed_pd(ed_thr, ed, model)) + "\n";
        }
        emit(text, an_out, out);
        return kExitOk;
    }

    if (gen_noise->parsed()) {
        const mcleish::McLeishParams params{gn_sigma2, gn_v};
        params.validate();
        const auto samples = mcleish::sample_ccs(params, gn_n, gn_seed);
        if (gn_text) {
            iq_io::write_text(gn_out, samples);
        } else {
            iq_io::write_binary(gn_out, samples);
        }
        out << "wrote " << samples.size() << " samples to " << gn_out << "\n";
        return kExitOk;
    }

    if (fit_noise->parsed()) {
        const auto samples = fn_text ? iq_io::read_text(fn_in) : iq_io::read_binary(fn_in);
        const auto fit = mcleish::fit_params(samples);
        out << "samples " << fit.samples << "\n";
        out << "sigma2_hat " << short_num(fit.variance) << "\n";
        out << "kurtosis " << short_num(fit.kurtosis) << "\n";
        if (fit.non_gaussianity) {
            out << "v_hat " << short_num(*fit.non_gaussianity) << "\n";
        } else {
            out << "v_hat inf\n";
            out << "note: kurtosis is not significantly above 3; the samples are Gaussian or lighter-tailed\n";
        }
        return kExitOk;
    }

    if (roc->parsed()) {
        const auto grid = parse_grid(roc_grid, "--pf-grid");
        const auto sc = roc_sc.scenario();
        const auto batch = roc_run.batch();
        Canonical c("roc");
        roc_sc.canonical(c, true);
        roc_run.canonical(c);
        c.add("pf-grid", join_grid(grid));
        const auto points = sim::roc_curve(grid, sc, batch);
        emit(header(c, {{"seed", std::to_string(roc_run.seed)},
                        {"n", std::to_string(roc_run.n)},
                        {"trials", std::to_string(roc_run.trials)}})
                 + curve_csv(points),
             roc_run.out_path, out);
        return kExitOk;
    }

    if (pd_snr->parsed()) {
        const auto grid = parse_grid(ps_grid, "--snr-grid");
        const auto sc = ps_sc.scenario();
        const auto batch = ps_run.batch();
        Canonical c("pd-snr");
        ps_sc.canonical(c, false);
        ps_run.canonical(c);
        c.add("pf", ps_run.pf);
        c.add("snr-grid", join_grid(grid));
        const auto points = sim::pd_vs_snr(grid, sc, batch);
        emit(header(c, {{"seed", std::to_string(ps_run.seed)},
                        {"n", std::to_string(ps_run.n)},
                        {"trials", std::to_string(ps_run.trials)}})
                 + curve_csv(points),
             ps_run.out_path, out);
        return kExitOk;
    }

    if (replay->parsed()) {
        std::ifstream in(rp_in);
        if (!in) {
            throw IoError("cannot read " + rp_in);
        }
        std::string line;
        while (std::getline(in, line) && line.rfind("#", 0) == 0) {
            if (line.rfind("# args: ", 0) != 0) {
                continue;
            }
            std::vector<std::string> args;
            std::istringstream words(line.substr(8));
            for (std::string w; words >> w;) {
                args.push_back(w);
            }
            if (!args.empty() && args.front() != "analytic") {
                args.push_back("--threads");
                args.push_back(std::to_string(rp_threads));
            }
            if (!rp_out.empty()) {
                args.push_back("--out");
                args.push_back(rp_out);
            }
            return run_cli(args, out, err);
        }
        throw FormatError(rp_in + ": no '# args:' header line");
    }
    return kExitDomain;
}

} // namespace

} // namespace mbsense::cli
