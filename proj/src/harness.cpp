#include "temlink/harness.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "temlink/errors.hpp"
#include "temlink/parallel.hpp"
#include "temlink/stats.hpp"
#include "temlink/timing.hpp"

namespace temlink {

std::string to_string(TrialFailure failure) {
    switch (failure) {
        case TrialFailure::none: return "none";
        case TrialFailure::bias_too_small: return "bias_too_small";
        case TrialFailure::insufficient_pilot_spikes: return "insufficient_pilot_spikes";
        case TrialFailure::insufficient_data_anchor: return "insufficient_data_anchor";
        case TrialFailure::rank_deficient: return "rank_deficient";
    }
    return "?";
}

namespace {

// Independent per-trial streams: symbols, timing offset, integrator noise.
constexpr std::uint64_t kSymbolStream = 0x73796d626f6c7331ull;
constexpr std::uint64_t kTauStream = 0x74696d696e673f73ull;

int count_errors(const std::vector<double>& decided, const std::vector<double>& truth) {
    int errors = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (decided[i] != truth[i]) ++errors;
    return errors;
}

} // namespace

TrialResult run_trial(const ExperimentConfig& config, std::uint64_t trial_index,
                      std::optional<double> sigma2_override) {
    const std::uint64_t seed = config.base_seed + trial_index;
    TrialResult result;
    result.seed = seed;

    const Constellation constellation = config.make_constellation();
    const PulseShape pulse = config.make_pulse();
    const TemParams params = config.make_tem_params();
    const double T = config.symbol_period;

    std::mt19937_64 symbol_rng(mix_seed(seed ^ kSymbolStream));
    const Frame frame = random_frame(constellation, config.pilot_length, config.data_length, T,
                                     symbol_rng);

    double tau = config.tau_value;
    if (config.tau_mode == "uniform") {
        std::mt19937_64 tau_rng(mix_seed(seed ^ kTauStream));
        const double u = (tau_rng() >> 11) * 0x1.0p-53; // [0, 1)
        tau = (u - 0.5) * T;
    }
    result.tau_true = tau;

    const double sigma2 = sigma2_override ? *sigma2_override : config.resolve_sigma2(pulse);
    const NoiseModel noise = sigma2 > 0.0 ? NoiseModel::awgn(sigma2, mix_seed(seed)) :
                                            NoiseModel::none();

    const double window_start = -0.5 * T;
    const double window_end = (config.pilot_length + config.data_length - 0.5) * T;

    try {
        const TxSignal signal(frame, pulse, tau);
        const FiringRecord record = encode(signal, params, noise, window_start, window_end);
        result.firings_total = static_cast<int>(record.times.size());

        const SplitTimes split = split_firing_times(record, config.pilot_length, pulse.memory(),
                                                    config.data_length, T);
        result.pilot_firings = static_cast<int>(split.pilot_times.size());
        result.data_firings = static_cast<int>(split.data_times.size());

        const TimingEstimate estimate = estimate_tau_ml(split.pilot_times, frame.pilots, pulse,
                                                        params, config.estimator);
        result.tau_hat = estimate.tau_hat;
        const double err = estimate.tau_hat - tau;
        result.timing_sq_error = err * err;

        const int data_length = config.data_length;
        const bool want_zf = config.detector_enabled("zf");
        const bool want_ml = config.detector_enabled("ml_bruteforce");
        DetectionSystem system;
        if (want_zf || want_ml)
            system = build_detection_system(split.data_times, frame.pilots, estimate.tau_hat,
                                            pulse, params, config.pilot_length, data_length);
        if (want_zf) {
            const std::vector<double> decided = hard_decision(zf_detect(system), constellation);
            const int errors = count_errors(decided, frame.data);
            result.zf = DetectorResult{errors, static_cast<double>(errors) / data_length};
        }
        if (want_ml) {
            const std::vector<double> decided = brute_force_ml(system, constellation, data_length);
            const int errors = count_errors(decided, frame.data);
            result.ml = DetectorResult{errors, static_cast<double>(errors) / data_length};
        }
        if (config.detector_enabled("spike_count")) {
            const SpikeCountCalibration cal = calibrate_spike_counts(constellation, pulse, params);
            const std::vector<double> decided =
                spike_count_detect(record, estimate.tau_hat, constellation, T,
                                   config.pilot_length, data_length, cal);
            const int errors = count_errors(decided, frame.data);
            result.spike_count = DetectorResult{errors, static_cast<double>(errors) / data_length};
        }
    } catch (const bias_too_small&) {
        result.failure = TrialFailure::bias_too_small;
    } catch (const insufficient_pilot_spikes&) {
        result.failure = TrialFailure::insufficient_pilot_spikes;
    } catch (const insufficient_data_anchor&) {
        result.failure = TrialFailure::insufficient_data_anchor;
    } catch (const rank_deficient&) {
        result.failure = TrialFailure::rank_deficient;
    }
    return result;
}

namespace {

ExperimentConfig apply_axis(ExperimentConfig config, SweepAxis axis, double value) {
    switch (axis) {
        case SweepAxis::snr_db:
            config.noise_kind = "awgn";
            config.snr_db = value;
            break;
        case SweepAxis::sigma2:
            config.noise_kind = value > 0.0 ? "awgn" : "none";
            config.snr_db.reset();
            config.sigma2 = value;
            break;
        case SweepAxis::pilot_length: {
            // The axis value is the effective pilot length.
            const int memory = config.make_pulse().memory();
            config.pilot_length = static_cast<int>(value) + memory;
            break;
        }
        case SweepAxis::n_guess:
            config.estimator.n_guess = static_cast<int>(value);
            break;
    }
    config.validate();
    return config;
}

} // namespace

std::vector<SweepRow> run_sweep(const ExperimentConfig& config) {
    if (!config.sweep) throw config_error("config has no sweep section");
    std::vector<SweepRow> rows;
    rows.reserve(config.sweep->values.size());

    for (double value : config.sweep->values) {
        const ExperimentConfig point = apply_axis(config, config.sweep->axis, value);
        std::vector<TrialResult> results(static_cast<std::size_t>(point.trials));
        parallel_for(results.size(),
                     [&](std::size_t i) { results[i] = run_trial(point, i); });

        SweepRow row;
        row.sweep_value = value;
        row.trials = point.trials;

        std::int64_t ok = 0;
        double sq_sum = 0.0, sq_sum2 = 0.0;
        std::int64_t zf_errors = 0, ml_errors = 0, count_errors_total = 0, symbols = 0;
        double pilot_sum = 0.0, data_sum = 0.0;
        for (const TrialResult& r : results) {
            if (r.failure != TrialFailure::none) {
                ++row.failures;
                continue;
            }
            ++ok;
            sq_sum += r.timing_sq_error;
            sq_sum2 += r.timing_sq_error * r.timing_sq_error;
            symbols += point.data_length;
            if (r.zf) zf_errors += r.zf->symbol_errors;
            if (r.ml) ml_errors += r.ml->symbol_errors;
            if (r.spike_count) count_errors_total += r.spike_count->symbol_errors;
            pilot_sum += r.pilot_firings;
            data_sum += r.data_firings;
        }
        if (ok > 0) {
            row.timing_mse = sq_sum / ok;
            const double var = sq_sum2 / ok - row.timing_mse * row.timing_mse;
            row.timing_mse_se = std::sqrt(std::max(var, 0.0) / ok);
            row.mean_pilot_firings = pilot_sum / ok;
            row.mean_data_firings = data_sum / ok;
            auto fill = [&](const char* name, std::int64_t errors, std::optional<double>& ser,
                            std::optional<double>& lo, std::optional<double>& hi) {
                if (!point.detector_enabled(name)) return;
                ser = static_cast<double>(errors) / symbols;
                const Interval iv = wilson_interval(errors, symbols);
                lo = iv.lo;
                hi = iv.hi;
            };
            fill("zf", zf_errors, row.ser_zf, row.ser_zf_lo, row.ser_zf_hi);
            fill("ml_bruteforce", ml_errors, row.ser_ml, row.ser_ml_lo, row.ser_ml_hi);
            fill("spike_count", count_errors_total, row.ser_count, row.ser_count_lo,
                 row.ser_count_hi);
        }
        rows.push_back(row);
    }
    return rows;
}

const char* const kSweepCsvHeader =
    "sweep_value,trials,failures,timing_mse,timing_mse_se,"
    "ser_zf,ser_zf_lo,ser_zf_hi,ser_ml,ser_count,"
    "ser_ml_lo,ser_ml_hi,ser_count_lo,ser_count_hi,"
    "mean_pilot_firings,mean_data_firings";

namespace {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string format_opt(const std::optional<double>& v) {
    return v ? format_number(*v) : "nan";
}

} // namespace

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << kSweepCsvHeader << '\n';
    for (const SweepRow& r : rows) {
        out << format_number(r.sweep_value) << ',' << r.trials << ',' << r.failures << ','
            << format_number(r.timing_mse) << ',' << format_number(r.timing_mse_se) << ','
            << format_opt(r.ser_zf) << ',' << format_opt(r.ser_zf_lo) << ','
            << format_opt(r.ser_zf_hi) << ',' << format_opt(r.ser_ml) << ','
            << format_opt(r.ser_count) << ',' << format_opt(r.ser_ml_lo) << ','
            << format_opt(r.ser_ml_hi) << ',' << format_opt(r.ser_count_lo) << ','
            << format_opt(r.ser_count_hi) << ',' << format_number(r.mean_pilot_firings) << ','
            << format_number(r.mean_data_firings) << '\n';
    }
    return out.str();
}

std::string trial_to_json(const TrialResult& r) {
    nlohmann::json j;
    j["seed"] = r.seed;
    j["tau_true"] = r.tau_true;
    j["tau_hat"] = r.tau_hat;
    j["timing_sq_error"] = r.timing_sq_error;
    j["firings_total"] = r.firings_total;
    j["pilot_firings"] = r.pilot_firings;
    j["data_firings"] = r.data_firings;
    j["failure"] = to_string(r.failure);
    auto put = [&](const char* name, const std::optional<DetectorResult>& d) {
        if (!d) return;
        j[name] = {{"symbol_errors", d->symbol_errors}, {"ser", d->ser}};
    };
    put("zf", r.zf);
    put("ml_bruteforce", r.ml);
    put("spike_count", r.spike_count);
    return j.dump(2);
}

} // namespace temlink
