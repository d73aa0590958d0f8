#include "temlink/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "temlink/errors.hpp"
#include "temlink/quadrature.hpp"

namespace temlink {

namespace {

// Antiderivative of the triangular pulse from the left support edge.
double triangular_cumulative(double x, double T) {
    if (x <= -T) return 0.0;
    if (x >= T) return 1.0;
    if (x <= 0.0) return (x + 0.5 * x * x / T + 0.5 * T) / T;
    return 0.5 + (x - 0.5 * x * x / T) / T;
}

} // namespace

double integrated_pulse(const PulseShape& pulse, double a, double b, double shift) {
    if (!(a < b)) throw std::invalid_argument("integration interval must satisfy a < b");
    const double T = pulse.symbol_period();
    switch (pulse.kind()) {
        case PulseKind::rectangular: {
            const double lo = std::max(a - shift, -0.5 * T);
            const double hi = std::min(b - shift, 0.5 * T);
            return hi > lo ? (hi - lo) / T : 0.0;
        }
        case PulseKind::triangular:
            return triangular_cumulative(b - shift, T) - triangular_cumulative(a - shift, T);
        case PulseKind::root_raised_cosine: {
            const double s = pulse.support_half_width();
            const double lo = std::max(a - shift, -s);
            const double hi = std::min(b - shift, s);
            if (!(hi > lo)) return 0.0;
            return integrate_adaptive([&pulse](double u) { return pulse.eval(u); }, lo, hi,
                                      1e-12);
        }
    }
    return 0.0;
}

double integrated_pulse_dshift(const PulseShape& pulse, double a, double b, double shift) {
    if (!(a < b)) throw std::invalid_argument("integration interval must satisfy a < b");
    return pulse.eval(a - shift) - pulse.eval(b - shift);
}

LikelihoodMatrices build_matrices(const std::vector<double>& firing_times, int pilot_length,
                                  int data_length, double tau, const PulseShape& pulse,
                                  const TemParams& params) {
    if (firing_times.size() < 2)
        throw invalid_firing_record("need at least two firing times");
    for (std::size_t k = 1; k < firing_times.size(); ++k)
        if (!(firing_times[k] > firing_times[k - 1]))
            throw invalid_firing_record("firing times not strictly increasing");
    if (pilot_length < 1 || data_length < 0)
        throw std::invalid_argument("sequence lengths out of range");

    const int rows = static_cast<int>(firing_times.size()) - 1;
    const double T = pulse.symbol_period();
    const double s = pulse.support_half_width();

    LikelihoodMatrices m;
    m.tau = tau;
    m.observation.resize(rows);
    m.weights.resize(rows);
    m.pilot_matrix = Eigen::MatrixXd::Zero(rows, pilot_length);
    m.data_matrix = Eigen::MatrixXd::Zero(rows, data_length);

    for (int k = 0; k < rows; ++k) {
        const double ta = firing_times[k];
        const double tb = firing_times[k + 1];
        const double len = tb - ta;
        m.observation(k) = params.threshold - params.bias * len;
        m.weights(k) = 1.0 / len;

        // A symbol at center lT + tau contributes only when its support
        // intersects [ta, tb].
        const int lo = static_cast<int>(std::ceil((ta - s - tau) / T));
        const int hi = static_cast<int>(std::floor((tb + s - tau) / T));
        for (int l = std::max(lo, 0); l <= std::min(hi, pilot_length - 1); ++l)
            m.pilot_matrix(k, l) = integrated_pulse(pulse, ta, tb, l * T + tau);
        for (int l = std::max(lo - pilot_length, 0);
             l <= std::min(hi - pilot_length, data_length - 1); ++l)
            m.data_matrix(k, l) = integrated_pulse(pulse, ta, tb, (pilot_length + l) * T + tau);
    }
    return m;
}

double log_likelihood(const LikelihoodMatrices& matrices, const Eigen::VectorXd& pilots,
                      const Eigen::VectorXd& data) {
    if (pilots.size() != matrices.pilot_matrix.cols() ||
        data.size() != matrices.data_matrix.cols())
        throw std::invalid_argument("symbol vector lengths do not match the matrices");
    const Eigen::VectorXd residual =
        matrices.observation - matrices.pilot_matrix * pilots - matrices.data_matrix * data;
    return -(matrices.weights.array() * residual.array().square()).sum();
}

} // namespace temlink
