#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "temlink/tem.hpp"
#include "temlink/timing.hpp"
#include "temlink/waveform.hpp"

namespace temlink {

enum class SweepAxis { snr_db, sigma2, pilot_length, n_guess };

struct SweepConfig {
    SweepAxis axis = SweepAxis::snr_db;
    std::vector<double> values;
};

/// Experiment description; loaded from a versioned JSON document (see the
/// config reference in README.md).
struct ExperimentConfig {
    int schema_version = 1;

    // constellation
    int constellation_order = 4;
    double average_energy = 1.0;

    // pulse
    std::string pulse_kind = "root_raised_cosine";
    double rolloff = 0.5;
    int pulse_memory = 4;

    // frame
    int pilot_length = 12;
    int data_length = 16;
    double symbol_period = 1.0;

    // TEM
    double kappa = 1.0;
    double delta = 1.5;
    double bias = 4.0;
    std::optional<double> dt;               // default T/1000
    std::optional<double> firing_tolerance; // default 1e-12·T

    // noise: sigma2 directly, or derived from snr_db with
    // sigma2 = average_energy * pulse_energy / 10^(snr_db/10)
    std::string noise_kind = "none"; // none | awgn
    double sigma2 = 0.0;
    std::optional<double> snr_db;

    // timing offset: fixed value or uniform draw over [-T/2, T/2]
    std::string tau_mode = "uniform"; // fixed | uniform
    double tau_value = 0.0;

    NewtonConfig estimator;

    std::vector<std::string> detectors = {"zf"}; // subset of zf|ml_bruteforce|spike_count
    std::int64_t trials = 100;
    std::uint64_t base_seed = 1;

    std::optional<SweepConfig> sweep;

    // Derived helpers -------------------------------------------------------
    Constellation make_constellation() const;
    PulseShape make_pulse() const;
    TemParams make_tem_params() const;
    double resolve_sigma2(const PulseShape& pulse) const;
    bool detector_enabled(const std::string& name) const;
    void validate() const; // throws config_error
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

SweepAxis parse_sweep_axis(const std::string& name);
std::string sweep_axis_name(SweepAxis axis);

} // namespace temlink
