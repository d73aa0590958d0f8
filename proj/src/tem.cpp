#include "temlink/tem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "temlink/errors.hpp"
#include "temlink/quadrature.hpp"

namespace temlink {

namespace {

// Uniform double in (0, 1] from the top 53 bits, then Box-Muller. The
// distribution is pinned here so that seeded records are bit-identical
// across standard library implementations.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = ((rng_() >> 11) + 1) * 0x1.0p-53;
        const double u2 = (rng_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

double simpson(double f0, double fm, double f1, double h) {
    return h * (f0 + 4.0 * fm + f1) / 6.0;
}

} // namespace

TemParams make_tem_params(double kappa_delta, double bias, double symbol_period) {
    if (!(kappa_delta > 0.0) || !(bias > 0.0) || !(symbol_period > 0.0))
        throw std::invalid_argument("TEM parameters must be positive");
    return TemParams{kappa_delta, bias, 1e-12 * symbol_period, symbol_period / 1000.0};
}

FiringRecord encode(const TxSignal& signal, const TemParams& params, const NoiseModel& noise,
                    double window_start, double window_end) {
    const double sup = signal.sup_abs(window_start, window_end);
    return encode([&signal](double t) { return signal.eval(t); }, sup, params, noise,
                  window_start, window_end);
}

FiringRecord encode(const std::function<double(double)>& signal, double signal_sup_abs,
                    const TemParams& params, const NoiseModel& noise, double window_start,
                    double window_end) {
    if (!(params.threshold > 0.0) || !(params.bias > 0.0) || !(params.dt > 0.0) ||
        !(params.firing_tolerance > 0.0))
        throw std::invalid_argument("TEM parameters must be positive");
    if (!(window_end > window_start)) throw std::invalid_argument("empty encoding window");
    if (noise.sigma2 < 0.0) throw std::invalid_argument("noise power must be nonnegative");

    const double b = params.bias;
    const double kd = params.threshold;
    const std::size_t n_steps =
        static_cast<std::size_t>(std::ceil((window_end - window_start) / params.dt));

    // Tabulate the signal at step nodes and midpoints once; the integrand is
    // Simpson-composed per step from these values.
    std::vector<double> nodes(n_steps + 1);
    std::vector<double> mids(n_steps);
    double grid_sup = 0.0;
    for (std::size_t i = 0; i <= n_steps; ++i) {
        const double t = std::min(window_start + i * params.dt, window_end);
        nodes[i] = signal(t);
        grid_sup = std::max(grid_sup, std::fabs(nodes[i]));
    }
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double t0 = window_start + i * params.dt;
        const double t1 = std::min(t0 + params.dt, window_end);
        mids[i] = signal(0.5 * (t0 + t1));
        grid_sup = std::max(grid_sup, std::fabs(mids[i]));
    }
    const double sup = std::max(grid_sup, signal_sup_abs);
    if (!(b > sup)) throw bias_too_small(b, sup);

    const bool noisy = noise.kind == NoiseModel::Kind::awgn && noise.sigma2 > 0.0;
    GaussianStream gauss(noise.seed);

    FiringRecord record;
    record.window_start = window_start;
    record.window_end = window_end;
    record.params = params;

    double integrator = 0.0;
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double t0 = window_start + i * params.dt;
        const double t1 = std::min(t0 + params.dt, window_end);
        const double h = t1 - t0;
        if (!(h > 0.0)) break;

        const double step_noise = noisy ? gauss.next() * std::sqrt(noise.sigma2 * h) : 0.0;

        // Cumulative in-step integral of b + r with the noise increment
        // spread linearly over the step.
        auto cumulative = [&](double x) {
            const double fm = signal(t0 + 0.5 * x);
            return simpson(b + nodes[i], b + fm, b + signal(t0 + x), x) + step_noise * x / h;
        };
        const double full = simpson(b + nodes[i], b + mids[i], b + nodes[i + 1], h) + step_noise;

        double level = kd - integrator;
        double lo = 0.0;
        while (full >= level) {
            double hi = h;
            // cumulative(lo) < level <= cumulative(hi); bisect the crossing.
            while (hi - lo > params.firing_tolerance) {
                const double mid = 0.5 * (lo + hi);
                if (cumulative(mid) >= level)
                    hi = mid;
                else
                    lo = mid;
            }
            const double t_fire = t0 + 0.5 * (lo + hi);
            if (t_fire < window_end) record.times.push_back(t_fire);
            lo = 0.5 * (lo + hi);
            level += kd;
        }
        // `level` advanced once per firing, so this is the post-reset remainder.
        integrator = full + kd - level;
    }

    return record;
}

SplitTimes split_firing_times(const FiringRecord& record, int pilot_length, int pulse_memory,
                              int data_length, double symbol_period) {
    if (record.times.empty()) throw invalid_firing_record("record is empty");
    const int effective = effective_pilot_length(pilot_length, pulse_memory);
    const double T = symbol_period;
    const double pilot_lo = -0.5 * T;
    const double pilot_hi = (effective - 0.5) * T;
    const double data_lo = (pilot_length - 0.5) * T;
    const double data_hi = (pilot_length + data_length - 0.5) * T;

    SplitTimes split;
    const double* anchor = nullptr;
    for (const double& t : record.times) {
        if (t >= pilot_lo && t < pilot_hi) split.pilot_times.push_back(t);
        if (t < data_lo) anchor = &t;
    }
    if (split.pilot_times.size() < 2)
        throw insufficient_pilot_spikes(split.pilot_times.size());
    if (anchor == nullptr) throw insufficient_data_anchor();

    split.data_times.push_back(*anchor);
    for (double t : record.times)
        if (t >= data_lo && t < data_hi) split.data_times.push_back(t);
    return split;
}

std::vector<double> t_transform_residuals(const FiringRecord& record, const TxSignal& signal,
                                          const TemParams& params) {
    std::vector<double> residuals;
    if (record.times.size() < 2) return residuals;
    residuals.reserve(record.times.size() - 1);
    for (std::size_t k = 1; k < record.times.size(); ++k) {
        const double integral = integrate_adaptive(
            [&](double t) { return params.bias + signal.eval(t); }, record.times[k - 1],
            record.times[k], 1e-13);
        residuals.push_back(params.threshold - integral);
    }
    return residuals;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void write_firing_record(const FiringRecord& record, std::ostream& out) {
    out << "# window " << format_double(record.window_start) << ' '
        << format_double(record.window_end) << ' ' << format_double(record.params.threshold)
        << ' ' << format_double(record.params.bias) << '\n';
    for (double t : record.times) out << format_double(t) << '\n';
}

FiringRecord read_firing_record(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw invalid_firing_record("missing header line");
    std::istringstream header(line);
    std::string hash, word;
    FiringRecord record;
    if (!(header >> hash >> word >> record.window_start >> record.window_end >>
          record.params.threshold >> record.params.bias) ||
        hash != "#" || word != "window")
        throw invalid_firing_record("malformed header: " + line);
    record.params.dt = 0.0;               // not stored; record is decode-only
    record.params.firing_tolerance = 0.0; // not stored

    double prev = -std::numeric_limits<double>::infinity();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        double t = 0.0;
        if (!(row >> t)) throw invalid_firing_record("malformed firing time: " + line);
        if (!(t > prev)) throw invalid_firing_record("firing times not strictly increasing");
        if (t < record.window_start || t >= record.window_end)
            throw invalid_firing_record("firing time outside the window");
        record.times.push_back(t);
        prev = t;
    }
    return record;
}

void save_firing_record(const FiringRecord& record, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_firing_record(record, out);
}

FiringRecord load_firing_record(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_firing_record(in);
}

} // namespace temlink
