#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "temlink/config.hpp"
#include "temlink/detect.hpp"

namespace temlink {

enum class TrialFailure {
    none,
    bias_too_small,
    insufficient_pilot_spikes,
    insufficient_data_anchor,
    rank_deficient,
};

std::string to_string(TrialFailure failure);

struct DetectorResult {
    int symbol_errors = 0;
    double ser = 0.0;
};

struct TrialResult {
    std::uint64_t seed = 0;
    double tau_true = 0.0;
    double tau_hat = 0.0;
    double timing_sq_error = 0.0;
    int firings_total = 0;
    int pilot_firings = 0;
    int data_firings = 0;
    std::optional<DetectorResult> zf;
    std::optional<DetectorResult> ml;
    std::optional<DetectorResult> spike_count;
    TrialFailure failure = TrialFailure::none;
};

/// One end-to-end trial: synthesize -> encode -> timing recovery -> detect.
/// The trial seed is base_seed + trial_index; module errors become failure
/// flags instead of aborting a sweep. sigma2_override replaces the config
/// noise power (used by sweeps).
TrialResult run_trial(const ExperimentConfig& config, std::uint64_t trial_index,
                      std::optional<double> sigma2_override = std::nullopt);

struct SweepRow {
    double sweep_value = 0.0;
    std::int64_t trials = 0;
    std::int64_t failures = 0;
    double timing_mse = 0.0;
    double timing_mse_se = 0.0;
    std::optional<double> ser_zf, ser_zf_lo, ser_zf_hi;
    std::optional<double> ser_ml, ser_ml_lo, ser_ml_hi;
    std::optional<double> ser_count, ser_count_lo, ser_count_hi;
    double mean_pilot_firings = 0.0;
    double mean_data_firings = 0.0;
};

/// One aggregate row per sweep value; trials run in parallel but aggregation
/// is index-ordered, so results are independent of the worker count.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config);

extern const char* const kSweepCsvHeader;

std::string sweep_to_csv(const std::vector<SweepRow>& rows);

std::string trial_to_json(const TrialResult& result);

} // namespace temlink
