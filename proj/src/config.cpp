#include "temlink/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "temlink/errors.hpp"

namespace temlink {

using nlohmann::json;

Constellation ExperimentConfig::make_constellation() const {
    return pam_constellation(constellation_order, average_energy);
}

PulseShape ExperimentConfig::make_pulse() const {
    if (pulse_kind == "rectangular") return PulseShape::rectangular(symbol_period);
    if (pulse_kind == "triangular") return PulseShape::triangular(symbol_period);
    if (pulse_kind == "root_raised_cosine")
        return PulseShape::root_raised_cosine(symbol_period, rolloff, pulse_memory);
    throw config_error("unknown pulse kind '" + pulse_kind + "'");
}

TemParams ExperimentConfig::make_tem_params() const {
    TemParams p = temlink::make_tem_params(kappa * delta, bias, symbol_period);
    if (dt) p.dt = *dt;
    if (firing_tolerance) p.firing_tolerance = *firing_tolerance;
    return p;
}

double ExperimentConfig::resolve_sigma2(const PulseShape& pulse) const {
    if (noise_kind == "none") return 0.0;
    if (snr_db)
        return average_energy * pulse.energy() / std::pow(10.0, *snr_db / 10.0);
    return sigma2;
}

bool ExperimentConfig::detector_enabled(const std::string& name) const {
    return std::find(detectors.begin(), detectors.end(), name) != detectors.end();
}

void ExperimentConfig::validate() const {
    if (schema_version != 1) throw config_error("unsupported schema_version");
    if (constellation_order != 2 && constellation_order != 4 && constellation_order != 8 &&
        constellation_order != 16)
        throw config_error("constellation order must be one of {2, 4, 8, 16}");
    if (!(average_energy > 0.0)) throw config_error("average_energy must be positive");
    if (pulse_kind != "rectangular" && pulse_kind != "triangular" &&
        pulse_kind != "root_raised_cosine")
        throw config_error("unknown pulse kind '" + pulse_kind + "'");
    if (!(symbol_period > 0.0)) throw config_error("symbol_period must be positive");
    if (pilot_length < 1 || data_length < 1) throw config_error("frame lengths must be positive");
    const int memory = pulse_kind == "rectangular" ? 0
                       : pulse_kind == "triangular" ? 1
                                                    : pulse_memory;
    if (pilot_length <= memory)
        throw config_error("pilot_length must exceed the pulse memory");
    if (!(kappa > 0.0) || !(delta > 0.0) || !(bias > 0.0))
        throw config_error("kappa, delta and bias must be positive");
    if (dt && !(*dt > 0.0)) throw config_error("dt must be positive");
    if (firing_tolerance && !(*firing_tolerance > 0.0))
        throw config_error("firing_tolerance must be positive");
    if (noise_kind != "none" && noise_kind != "awgn")
        throw config_error("noise kind must be none or awgn");
    if (sigma2 < 0.0) throw config_error("sigma2 must be nonnegative");
    if (tau_mode != "fixed" && tau_mode != "uniform")
        throw config_error("tau mode must be fixed or uniform");
    if (std::fabs(tau_value) > 0.5 * symbol_period)
        throw config_error("tau_value must lie in [-T/2, T/2]");
    if (estimator.n_guess < 2) throw config_error("estimator n_guess must be at least 2");
    if (estimator.max_iterations < 1)
        throw config_error("estimator max_iterations must be positive");
    if (!(estimator.damping > 0.0 && estimator.damping <= 1.0))
        throw config_error("estimator damping must lie in (0, 1]");
    for (const auto& d : detectors)
        if (d != "zf" && d != "ml_bruteforce" && d != "spike_count")
            throw config_error("unknown detector '" + d + "'");
    if (detector_enabled("ml_bruteforce") &&
        data_length * std::log2(static_cast<double>(constellation_order)) > 20.0 + 1e-9)
        throw config_error("ml_bruteforce search space exceeds the 2^20 guard");
    if (trials < 0) throw config_error("trials must be nonnegative");
    if (sweep && sweep->values.empty()) throw config_error("sweep values must be nonempty");
    if (sweep && (sweep->axis == SweepAxis::pilot_length || sweep->axis == SweepAxis::n_guess))
        for (double v : sweep->values)
            if (v < 1.0 || v != std::floor(v))
                throw config_error("sweep values for this axis must be positive integers");
}

SweepAxis parse_sweep_axis(const std::string& name) {
    if (name == "snr_db") return SweepAxis::snr_db;
    if (name == "sigma2") return SweepAxis::sigma2;
    if (name == "pilot_length") return SweepAxis::pilot_length;
    if (name == "n_guess") return SweepAxis::n_guess;
    throw config_error("unknown sweep axis '" + name + "'");
}

std::string sweep_axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::snr_db: return "snr_db";
        case SweepAxis::sigma2: return "sigma2";
        case SweepAxis::pilot_length: return "pilot_length";
        case SweepAxis::n_guess: return "n_guess";
    }
    return "?";
}

namespace {

template <class T>
void read_field(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw config_error(std::string("invalid JSON: ") + e.what());
    }

    ExperimentConfig cfg;
    try {
        if (!j.contains("schema_version")) throw config_error("missing schema_version");
        cfg.schema_version = j.at("schema_version").get<int>();

        if (j.contains("constellation")) {
            const auto& c = j.at("constellation");
            read_field(c, "order", cfg.constellation_order);
            read_field(c, "average_energy", cfg.average_energy);
        }
        if (j.contains("pulse")) {
            const auto& p = j.at("pulse");
            read_field(p, "kind", cfg.pulse_kind);
            read_field(p, "rolloff", cfg.rolloff);
            read_field(p, "memory", cfg.pulse_memory);
        }
        if (j.contains("frame")) {
            const auto& f = j.at("frame");
            read_field(f, "pilot_length", cfg.pilot_length);
            read_field(f, "data_length", cfg.data_length);
            read_field(f, "symbol_period", cfg.symbol_period);
        }
        if (j.contains("tem")) {
            const auto& t = j.at("tem");
            read_field(t, "kappa", cfg.kappa);
            read_field(t, "delta", cfg.delta);
            read_field(t, "bias", cfg.bias);
            if (t.contains("dt")) cfg.dt = t.at("dt").get<double>();
            if (t.contains("firing_tolerance"))
                cfg.firing_tolerance = t.at("firing_tolerance").get<double>();
        }
        if (j.contains("noise")) {
            const auto& n = j.at("noise");
            read_field(n, "kind", cfg.noise_kind);
            read_field(n, "sigma2", cfg.sigma2);
            if (n.contains("snr_db")) cfg.snr_db = n.at("snr_db").get<double>();
        }
        if (j.contains("timing")) {
            const auto& t = j.at("timing");
            read_field(t, "tau_mode", cfg.tau_mode);
            read_field(t, "tau_value", cfg.tau_value);
            if (t.contains("estimator")) {
                const auto& e = t.at("estimator");
                read_field(e, "n_guess", cfg.estimator.n_guess);
                read_field(e, "max_iterations", cfg.estimator.max_iterations);
                read_field(e, "step_tolerance", cfg.estimator.step_tolerance);
                read_field(e, "damping", cfg.estimator.damping);
            }
        }
        read_field(j, "detectors", cfg.detectors);
        read_field(j, "trials", cfg.trials);
        read_field(j, "base_seed", cfg.base_seed);
        if (j.contains("sweep")) {
            SweepConfig s;
            s.axis = parse_sweep_axis(j.at("sweep").at("axis").get<std::string>());
            s.values = j.at("sweep").at("values").get<std::vector<double>>();
            cfg.sweep = s;
        }
    } catch (const json::exception& e) {
        throw config_error(std::string("bad field: ") + e.what());
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

} // namespace temlink
