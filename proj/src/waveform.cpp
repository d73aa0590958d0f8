#include "temlink/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace temlink {

bool Constellation::contains(double value) const {
    return std::find(points_.begin(), points_.end(), value) != points_.end();
}

double Constellation::nearest(double value) const {
    double best = points_.front();
    double best_dist = std::fabs(value - best);
    for (std::size_t i = 1; i < points_.size(); ++i) {
        const double d = std::fabs(value - points_[i]);
        if (d < best_dist) { // ties keep the smaller amplitude
            best_dist = d;
            best = points_[i];
        }
    }
    return best;
}

Constellation pam_constellation(int order, double average_energy) {
    if (order != 2 && order != 4 && order != 8 && order != 16)
        throw std::invalid_argument("constellation order must be one of {2, 4, 8, 16}");
    if (!(average_energy > 0.0))
        throw std::invalid_argument("average energy must be positive");

    // Levels ±1, ±3, ..., ±(M-1) have mean square (M^2 - 1) / 3.
    const double m = static_cast<double>(order);
    const double scale = std::sqrt(average_energy / ((m * m - 1.0) / 3.0));

    Constellation c;
    c.average_energy_ = average_energy;
    c.points_.reserve(order);
    for (int i = 0; i < order; ++i)
        c.points_.push_back(scale * (2.0 * i - (m - 1.0)));
    return c;
}

Frame make_frame(const Constellation& constellation, std::vector<double> pilots,
                 std::vector<double> data, double symbol_period) {
    if (!(symbol_period > 0.0)) throw std::invalid_argument("symbol period must be positive");
    for (double s : pilots)
        if (!constellation.contains(s))
            throw std::invalid_argument("pilot symbol is not a constellation point");
    for (double s : data)
        if (!constellation.contains(s))
            throw std::invalid_argument("data symbol is not a constellation point");
    return Frame{std::move(pilots), std::move(data), symbol_period};
}

Frame random_frame(const Constellation& constellation, int pilot_length, int data_length,
                   double symbol_period, std::mt19937_64& rng) {
    if (pilot_length < 1 || data_length < 0)
        throw std::invalid_argument("frame lengths out of range");
    // Order is a power of two, so masking the generator output is unbiased
    // and keeps draws identical across standard library implementations.
    const std::uint64_t mask = static_cast<std::uint64_t>(constellation.order()) - 1;
    auto draw = [&] { return constellation.points()[rng() & mask]; };
    Frame f;
    f.symbol_period = symbol_period;
    f.pilots.reserve(pilot_length);
    f.data.reserve(data_length);
    for (int i = 0; i < pilot_length; ++i) f.pilots.push_back(draw());
    for (int i = 0; i < data_length; ++i) f.data.push_back(draw());
    return f;
}

int effective_pilot_length(int pilot_length, int pulse_memory) {
    if (pulse_memory < 0) throw std::invalid_argument("pulse memory must be nonnegative");
    if (pilot_length <= pulse_memory)
        throw std::invalid_argument("pilot length must exceed the pulse memory");
    return pilot_length - pulse_memory;
}

TxSignal::TxSignal(Frame frame, PulseShape pulse, double timing_offset)
    : frame_(std::move(frame)), pulse_(std::move(pulse)), timing_offset_(timing_offset) {
    const double T = frame_.symbol_period;
    if (pulse_.symbol_period() != T)
        throw std::invalid_argument("frame and pulse symbol periods differ");
    if (std::fabs(timing_offset) > 0.5 * T)
        throw std::invalid_argument("timing offset must lie in [-T/2, T/2]");
    effective_pilot_length(frame_.pilot_length(), pulse_.memory());
}

double TxSignal::eval(double t) const {
    const double T = frame_.symbol_period;
    const double s = pulse_.support_half_width();
    const double u = t - timing_offset_;
    // Only symbols whose pulse support covers t contribute.
    const int total = frame_.pilot_length() + frame_.data_length();
    const int lo = std::max(0, static_cast<int>(std::ceil((u - s) / T)));
    const int hi = std::min(total - 1, static_cast<int>(std::floor((u + s) / T)));
    double acc = 0.0;
    for (int l = lo; l <= hi; ++l) {
        const double sym = l < frame_.pilot_length() ? frame_.pilots[l]
                                                     : frame_.data[l - frame_.pilot_length()];
        acc += sym * pulse_.eval(u - l * T);
    }
    return acc;
}

double TxSignal::sup_abs(double t0, double t1, int grid_points) const {
    if (grid_points < 2 || !(t1 > t0)) throw std::invalid_argument("bad sup grid");
    double sup = 0.0;
    const double step = (t1 - t0) / (grid_points - 1);
    for (int i = 0; i < grid_points; ++i)
        sup = std::max(sup, std::fabs(eval(t0 + i * step)));
    return sup;
}

} // namespace temlink
