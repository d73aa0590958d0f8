#include "temlink/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "temlink/errors.hpp"
#include "temlink/likelihood.hpp"

namespace temlink {

DetectionSystem build_detection_system(const std::vector<double>& data_times,
                                       const std::vector<double>& pilots, double tau_hat,
                                       const PulseShape& pulse, const TemParams& params,
                                       int pilot_length, int data_length) {
    if (data_times.size() < 2) throw invalid_firing_record("need at least two data firing times");
    for (std::size_t k = 1; k < data_times.size(); ++k)
        if (!(data_times[k] > data_times[k - 1]))
            throw invalid_firing_record("data firing times not strictly increasing");
    const int memory = pulse.memory();
    if (pilot_length <= memory)
        throw std::invalid_argument("pilot length must exceed the pulse memory");
    if (static_cast<int>(pilots.size()) != pilot_length)
        throw std::invalid_argument("pilot vector length mismatch");
    if (data_length < 1) throw std::invalid_argument("data length must be positive");

    const int rows = static_cast<int>(data_times.size()) - 1;
    const double T = pulse.symbol_period();
    const double s = pulse.support_half_width();

    DetectionSystem sys;
    sys.tau_used = tau_hat;
    sys.observation.resize(rows);
    sys.weights.resize(rows);
    sys.data_matrix = Eigen::MatrixXd::Zero(rows, data_length);

    for (int k = 0; k < rows; ++k) {
        const double ta = data_times[k];
        const double tb = data_times[k + 1];
        const double len = tb - ta;
        sys.weights(k) = 1.0 / len;

        // Interference from the last memory+1 pilot symbols is subtracted as
        // known signal.
        double y = params.threshold - params.bias * len;
        for (int l = pilot_length - 1 - memory; l <= pilot_length - 1; ++l) {
            const double shift = l * T + tau_hat;
            if (shift + s <= ta || shift - s >= tb) continue;
            y -= pilots[l] * integrated_pulse(pulse, ta, tb, shift);
        }
        sys.observation(k) = y;

        const int lo = std::max(
            0, static_cast<int>(std::ceil((ta - s - tau_hat) / T)) - pilot_length);
        const int hi = std::min(
            data_length - 1, static_cast<int>(std::floor((tb + s - tau_hat) / T)) - pilot_length);
        for (int l = lo; l <= hi; ++l)
            sys.data_matrix(k, l) = integrated_pulse(pulse, ta, tb, (pilot_length + l) * T + tau_hat);
    }
    return sys;
}

Eigen::VectorXd zf_detect(const DetectionSystem& system) {
    const Eigen::Index rows = system.data_matrix.rows();
    const Eigen::Index cols = system.data_matrix.cols();
    if (rows < cols) throw rank_deficient(std::numeric_limits<double>::infinity());

    const Eigen::VectorXd root_weights = system.weights.array().sqrt();
    const Eigen::MatrixXd scaled = root_weights.asDiagonal() * system.data_matrix;
    const Eigen::VectorXd target = root_weights.asDiagonal() * system.observation;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(cols - 1);
    // Condition of the normal-equation matrix G^T T G is the square of the
    // scaled matrix's condition number.
    const double cond = smin > 0.0 ? (smax / smin) * (smax / smin)
                                   : std::numeric_limits<double>::infinity();
    if (!(cond < 1e12)) throw rank_deficient(cond);
    return svd.solve(target);
}

std::vector<double> hard_decision(const Eigen::VectorXd& pre_estimate,
                                  const Constellation& constellation) {
    std::vector<double> decided(pre_estimate.size());
    for (Eigen::Index i = 0; i < pre_estimate.size(); ++i)
        decided[i] = constellation.nearest(pre_estimate(i));
    return decided;
}

std::vector<double> brute_force_ml(const DetectionSystem& system,
                                   const Constellation& constellation, int data_length) {
    const int order = constellation.order();
    if (data_length < 1) throw std::invalid_argument("data length must be positive");
    if (data_length * std::log2(static_cast<double>(order)) > 20.0 + 1e-9)
        throw search_space_too_large(order, data_length);
    if (system.data_matrix.cols() != data_length)
        throw std::invalid_argument("data length does not match the system");

    const Eigen::VectorXd root_weights = system.weights.array().sqrt();
    const Eigen::MatrixXd scaled = root_weights.asDiagonal() * system.data_matrix;
    const Eigen::VectorXd target = root_weights.asDiagonal() * system.observation;
    const auto& points = constellation.points();

    // Lexicographic odometer over symbol indices; the model vector is updated
    // incrementally on each digit change.
    std::vector<int> digits(data_length, 0);
    Eigen::VectorXd model = Eigen::VectorXd::Zero(scaled.rows());
    for (int j = 0; j < data_length; ++j) model += points[0] * scaled.col(j);

    std::vector<int> best_digits = digits;
    double best = (target - model).squaredNorm();
    for (;;) {
        // advance the least significant digit (rightmost changes fastest)
        int j = data_length - 1;
        while (j >= 0 && digits[j] == order - 1) {
            model += (points[0] - points[order - 1]) * scaled.col(j);
            digits[j] = 0;
            --j;
        }
        if (j < 0) break;
        model += (points[digits[j] + 1] - points[digits[j]]) * scaled.col(j);
        ++digits[j];
        const double value = (target - model).squaredNorm();
        if (value < best) { // first in lexicographic order wins ties
            best = value;
            best_digits = digits;
        }
    }

    std::vector<double> decided(data_length);
    for (int j = 0; j < data_length; ++j) decided[j] = points[best_digits[j]];
    return decided;
}

SpikeCountCalibration calibrate_spike_counts(const Constellation& constellation,
                                             const PulseShape& pulse, const TemParams& params) {
    SpikeCountCalibration cal;
    const double T = pulse.symbol_period();
    for (double a : constellation.points()) {
        // The bias check runs on the encoder's own integration grid.
        const FiringRecord rec = encode([&](double t) { return a * pulse.eval(t); }, 0.0,
                                        params, NoiseModel::none(), -0.5 * T, 0.5 * T);
        cal.symbols.push_back(a);
        cal.counts.push_back(static_cast<int>(rec.times.size()));
    }
    return cal;
}

std::vector<double> spike_count_detect(const FiringRecord& record, double tau_hat,
                                       const Constellation& constellation, double symbol_period,
                                       int pilot_length, int data_length,
                                       const SpikeCountCalibration& calibration) {
    if (calibration.symbols.size() != calibration.counts.size() ||
        calibration.symbols != constellation.points())
        throw std::invalid_argument("spike-count calibration does not match the constellation");
    std::vector<double> decided(data_length);
    for (int l = 0; l < data_length; ++l) {
        const double lo = (pilot_length + l - 0.5) * symbol_period + tau_hat;
        const double hi = (pilot_length + l + 0.5) * symbol_period + tau_hat;
        int count = 0;
        for (double t : record.times)
            if (t >= lo && t < hi) ++count;

        int best_dist = std::numeric_limits<int>::max();
        double best_symbol = calibration.symbols.front();
        for (std::size_t i = 0; i < calibration.symbols.size(); ++i) {
            const int d = std::abs(count - calibration.counts[i]);
            if (d < best_dist) { // ties keep the smaller amplitude
                best_dist = d;
                best_symbol = calibration.symbols[i];
            }
        }
        decided[l] = best_symbol;
    }
    return decided;
}

} // namespace temlink
