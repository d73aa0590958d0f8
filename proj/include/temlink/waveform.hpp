#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "temlink/pulse.hpp"

namespace temlink {

/// M-PAM amplitude alphabet, strictly increasing and symmetric about zero,
/// scaled so that the mean squared point equals average_energy.
class Constellation {
public:
    int order() const noexcept { return static_cast<int>(points_.size()); }
    const std::vector<double>& points() const noexcept { return points_; }
    double average_energy() const noexcept { return average_energy_; }

    bool contains(double value) const;

    /// Nearest point by Euclidean distance; exact midpoints resolve to the
    /// smaller amplitude.
    double nearest(double value) const;

    friend Constellation pam_constellation(int order, double average_energy);

private:
    std::vector<double> points_;
    double average_energy_ = 0.0;
};

Constellation pam_constellation(int order, double average_energy);

struct Frame {
    std::vector<double> pilots;
    std::vector<double> data;
    double symbol_period = 1.0;

    int pilot_length() const noexcept { return static_cast<int>(pilots.size()); }
    int data_length() const noexcept { return static_cast<int>(data.size()); }
};

/// Validates that every symbol is a constellation point.
Frame make_frame(const Constellation& constellation, std::vector<double> pilots,
                 std::vector<double> data, double symbol_period);

/// Pilots and data drawn uniformly from the constellation.
Frame random_frame(const Constellation& constellation, int pilot_length, int data_length,
                   double symbol_period, std::mt19937_64& rng);

int effective_pilot_length(int pilot_length, int pulse_memory);

/// Baseband transmit signal
///   r(t) = sum_l pilots[l] p(t - lT - tau) + sum_l data[l] p(t - (L_p+l)T - tau).
class TxSignal {
public:
    TxSignal(Frame frame, PulseShape pulse, double timing_offset);

    double eval(double t) const;

    /// max |r| over a uniform grid spanning [t0, t1].
    double sup_abs(double t0, double t1, int grid_points = 4096) const;

    const Frame& frame() const noexcept { return frame_; }
    const PulseShape& pulse() const noexcept { return pulse_; }
    double timing_offset() const noexcept { return timing_offset_; }

private:
    Frame frame_;
    PulseShape pulse_;
    double timing_offset_;
};

inline double eval_signal(const TxSignal& signal, double t) { return signal.eval(t); }

} // namespace temlink
