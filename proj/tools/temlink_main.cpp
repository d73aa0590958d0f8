#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "temlink/detect.hpp"
#include "temlink/errors.hpp"
#include "temlink/harness.hpp"
#include "temlink/likelihood.hpp"
#include "temlink/stats.hpp"
#include "temlink/timing.hpp"

namespace {

using namespace temlink;

constexpr std::uint64_t kSymbolStream = 0x73796d626f6c7331ull;

// encode/decode share the frame derivation so a record written by `encode`
// decodes against the same pilots and compares against the same data.
Frame frame_for_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 rng(mix_seed(seed ^ kSymbolStream));
    return random_frame(cfg.make_constellation(), cfg.pilot_length, cfg.data_length,
                        cfg.symbol_period, rng);
}

int cmd_simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 std::uint64_t trial) {
    ExperimentConfig cfg = load_config(config_path);
    if (seed) cfg.base_seed = *seed;
    const TrialResult result = run_trial(cfg, trial);
    std::cout << trial_to_json(result) << '\n';
    return 0;
}

int cmd_sweep(const std::string& config_path, std::optional<std::string> axis,
              const std::string& out_path, std::optional<std::uint64_t> seed) {
    ExperimentConfig cfg = load_config(config_path);
    if (seed) cfg.base_seed = *seed;
    if (axis) {
        if (!cfg.sweep) throw config_error("--axis given but the config has no sweep values");
        cfg.sweep->axis = parse_sweep_axis(*axis);
        cfg.validate();
    }
    const std::string csv = sweep_to_csv(run_sweep(cfg));
    if (out_path.empty() || out_path == "-") {
        std::cout << csv;
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open " + out_path + " for writing");
        out << csv;
    }
    return 0;
}

int cmd_encode(const std::string& config_path, std::optional<std::uint64_t> seed,
               const std::string& out_path) {
    ExperimentConfig cfg = load_config(config_path);
    if (seed) cfg.base_seed = *seed;
    const PulseShape pulse = cfg.make_pulse();
    const Frame frame = frame_for_seed(cfg, cfg.base_seed);
    double tau = cfg.tau_value;
    if (cfg.tau_mode == "uniform") {
        std::mt19937_64 tau_rng(mix_seed(cfg.base_seed ^ 0x74696d696e673f73ull));
        tau = ((tau_rng() >> 11) * 0x1.0p-53 - 0.5) * cfg.symbol_period;
    }
    const TxSignal signal(frame, pulse, tau);
    const double sigma2 = cfg.resolve_sigma2(pulse);
    const NoiseModel noise =
        sigma2 > 0.0 ? NoiseModel::awgn(sigma2, mix_seed(cfg.base_seed)) : NoiseModel::none();
    const double T = cfg.symbol_period;
    const FiringRecord record =
        encode(signal, cfg.make_tem_params(), noise, -0.5 * T,
               (cfg.pilot_length + cfg.data_length - 0.5) * T);
    save_firing_record(record, out_path);
    std::cerr << "wrote " << record.times.size() << " firing times to " << out_path << '\n';
    return 0;
}

int cmd_decode(const std::string& config_path, const std::string& record_path,
               std::optional<std::uint64_t> seed, const std::string& detector) {
    ExperimentConfig cfg = load_config(config_path);
    if (seed) cfg.base_seed = *seed;
    const PulseShape pulse = cfg.make_pulse();
    const Constellation constellation = cfg.make_constellation();
    const Frame frame = frame_for_seed(cfg, cfg.base_seed);
    const FiringRecord record = load_firing_record(record_path);

    const SplitTimes split = split_firing_times(record, cfg.pilot_length, pulse.memory(),
                                                cfg.data_length, cfg.symbol_period);
    const TimingEstimate estimate =
        estimate_tau_ml(split.pilot_times, frame.pilots, pulse, record.params, cfg.estimator);

    std::vector<double> decided;
    if (detector == "zf") {
        const DetectionSystem system =
            build_detection_system(split.data_times, frame.pilots, estimate.tau_hat, pulse,
                                   record.params, cfg.pilot_length, cfg.data_length);
        decided = hard_decision(zf_detect(system), constellation);
    } else if (detector == "ml") {
        const DetectionSystem system =
            build_detection_system(split.data_times, frame.pilots, estimate.tau_hat, pulse,
                                   record.params, cfg.pilot_length, cfg.data_length);
        decided = brute_force_ml(system, constellation, cfg.data_length);
    } else if (detector == "count") {
        // Calibration needs dt and tolerance, which records do not carry.
        TemParams params = cfg.make_tem_params();
        params.threshold = record.params.threshold;
        params.bias = record.params.bias;
        const SpikeCountCalibration cal = calibrate_spike_counts(constellation, pulse, params);
        decided = spike_count_detect(record, estimate.tau_hat, constellation, cfg.symbol_period,
                                     cfg.pilot_length, cfg.data_length, cal);
    } else {
        throw config_error("unknown detector '" + detector + "' (use zf, ml or count)");
    }

    std::fprintf(stderr, "tau_hat %.17g (objective %.17g)\n", estimate.tau_hat,
                 estimate.objective);
    for (double s : decided) std::printf("%.17g\n", s);
    return 0;
}

int cmd_selftest() {
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name);
        if (!ok) ++failures;
    };

    const Constellation c4 = pam_constellation(4, 1.0);
    double ms = 0.0;
    for (double p : c4.points()) ms += p * p;
    check("constellation mean energy", std::fabs(ms / 4 - 1.0) < 1e-12);

    const PulseShape rrc = PulseShape::root_raised_cosine(1.0, 0.5, 4);
    bool deriv_ok = true;
    for (int i = 1; i <= 20; ++i) {
        const double t = -2.3 + 0.22 * i;
        const double h = 1e-6;
        const double fd = (rrc.eval(t + h) - rrc.eval(t - h)) / (2 * h);
        const double an = rrc.eval_derivative(t);
        if (std::fabs(fd - an) > 1e-5 * std::max(1.0, std::fabs(an))) deriv_ok = false;
    }
    check("pulse derivative vs finite differences", deriv_ok);

    std::mt19937_64 rng(7);
    const Frame frame = random_frame(c4, 8, 6, 1.0, rng);
    const TxSignal signal(frame, rrc, 0.12);
    const TemParams params = make_tem_params(1.5, 4.0, 1.0);
    const FiringRecord record = encode(signal, params, NoiseModel::none(), -0.5, 13.5);
    double max_res = 0.0;
    for (double r : t_transform_residuals(record, signal, params))
        max_res = std::max(max_res, std::fabs(r));
    check("noiseless t-transform identity", max_res < 1e-9);

    const SplitTimes split = split_firing_times(record, 8, rrc.memory(), 6, 1.0);
    const TimingEstimate est = estimate_tau_ml(split.pilot_times, frame.pilots, rrc, params);
    check("noiseless timing recovery", std::fabs(est.tau_hat - 0.12) < 1e-6);

    const DetectionSystem system = build_detection_system(
        split.data_times, frame.pilots, est.tau_hat, rrc, params, 8, 6);
    const std::vector<double> decided = hard_decision(zf_detect(system), c4);
    check("noiseless zero-forcing detection", decided == frame.data);

    return failures == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"integrate-and-fire time-encoding link simulator"};
    app.require_subcommand(1);

    std::string config_path, out_path, record_path, axis, detector = "zf";
    std::optional<std::uint64_t> seed;
    std::uint64_t trial = 0;

    auto* simulate = app.add_subcommand("simulate", "run one trial and print the result");
    simulate->add_option("--config", config_path, "JSON experiment config")->required();
    simulate->add_option("--seed", seed, "override the config base seed");
    simulate->add_option("--trial", trial, "trial index (seed = base_seed + index)");

    auto* sweep = app.add_subcommand("sweep", "run a sweep and write CSV");
    sweep->add_option("--config", config_path, "JSON experiment config")->required();
    sweep->add_option("--axis", axis, "sweep axis: snr_db, sigma2, pilot_length, n_guess");
    sweep->add_option("--out", out_path, "output CSV path (default stdout)");
    sweep->add_option("--seed", seed, "override the config base seed");

    auto* enc = app.add_subcommand("encode", "encode one frame to a firing-record file");
    enc->add_option("--config", config_path, "JSON experiment config")->required();
    enc->add_option("--seed", seed, "override the config base seed");
    enc->add_option("--out", out_path, "output record path")->required();

    auto* dec = app.add_subcommand("decode", "recover symbols from a firing-record file");
    dec->add_option("--config", config_path, "JSON experiment config")->required();
    dec->add_option("--record", record_path, "firing-record file")->required();
    dec->add_option("--seed", seed, "override the config base seed");
    dec->add_option("--detector", detector, "zf (default), ml or count");

    auto* self = app.add_subcommand("selftest", "run built-in invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(config_path, seed, trial);
        if (sweep->parsed())
            return cmd_sweep(config_path,
                             axis.empty() ? std::nullopt : std::optional<std::string>(axis),
                             out_path, seed);
        if (enc->parsed()) return cmd_encode(config_path, seed, out_path);
        if (dec->parsed()) return cmd_decode(config_path, record_path, seed, detector);
        if (self->parsed()) return cmd_selftest();
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
