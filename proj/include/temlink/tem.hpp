#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "temlink/waveform.hpp"

namespace temlink {

struct TemParams {
    double threshold;        // κ·Δ product
    double bias;             // b
    double firing_tolerance; // bisection stop for each firing time, seconds
    double dt;               // integration step, seconds
};

/// Defaults: tolerance 1e-12·T, step T/1000.
TemParams make_tem_params(double kappa_delta, double bias, double symbol_period);

struct NoiseModel {
    enum class Kind { none, awgn } kind = Kind::none;
    double sigma2 = 0.0; // power spectral density of the integrator noise
    std::uint64_t seed = 0;

    static NoiseModel none() { return {}; }
    static NoiseModel awgn(double sigma2, std::uint64_t seed) {
        return NoiseModel{Kind::awgn, sigma2, seed};
    }
};

struct FiringRecord {
    std::vector<double> times; // strictly increasing, inside [window_start, window_end)
    double window_start = 0.0;
    double window_end = 0.0;
    TemParams params{};
};

/// Integrate bias + signal (+ noise) from window_start with the integrator at
/// zero, emit a firing time at every threshold crossing and reset to zero.
FiringRecord encode(const TxSignal& signal, const TemParams& params, const NoiseModel& noise,
                    double window_start, double window_end);

/// Same encoder on an arbitrary signal; signal_sup_abs must bound |signal| on
/// the window (checked again on the integration grid).
FiringRecord encode(const std::function<double(double)>& signal, double signal_sup_abs,
                    const TemParams& params, const NoiseModel& noise, double window_start,
                    double window_end);

struct SplitTimes {
    std::vector<double> pilot_times; // firings in [-T/2, (L̃_p - 1/2)T)
    std::vector<double> data_times;  // anchor before (L_p - 1/2)T, then firings up to (L_p+L_d-1/2)T
};

SplitTimes split_firing_times(const FiringRecord& record, int pilot_length, int pulse_memory,
                              int data_length, double symbol_period);

/// residual_k = κΔ - ∫_{t_{k-1}}^{t_k} (b + r) dt for k = 1..K.
/// Noiseless encodings leave only the firing-time tolerance.
std::vector<double> t_transform_residuals(const FiringRecord& record, const TxSignal& signal,
                                          const TemParams& params);

/// Line format: "# window <start> <end> <kappa_delta> <bias>" then one firing
/// time per line; doubles are printed with 17 significant digits so the file
/// round-trips bit exactly.
void write_firing_record(const FiringRecord& record, std::ostream& out);
FiringRecord read_firing_record(std::istream& in);

void save_firing_record(const FiringRecord& record, const std::string& path);
FiringRecord load_firing_record(const std::string& path);

} // namespace temlink
