#pragma once

#include <Eigen/Dense>
#include <vector>

#include "temlink/tem.hpp"
#include "temlink/waveform.hpp"

namespace temlink {

/// Weighted linear system for the data region. The observation has the known
/// pilot interference already subtracted, so for a noiseless record at the
/// true offset, observation = data_matrix * s_d.
struct DetectionSystem {
    Eigen::VectorXd observation; // y_d
    Eigen::MatrixXd data_matrix; // K_d x L_d
    Eigen::VectorXd weights;     // 1 / interval length
    double tau_used = 0.0;
};

enum class DetectorMethod { zf, ml_bruteforce, spike_count };

struct SymbolEstimate {
    std::vector<double> pre_estimate;
    std::vector<double> decided;
    DetectorMethod method = DetectorMethod::zf;
};

DetectionSystem build_detection_system(const std::vector<double>& data_times,
                                       const std::vector<double>& pilots, double tau_hat,
                                       const PulseShape& pulse, const TemParams& params,
                                       int pilot_length, int data_length);

/// Weighted least-squares pre-estimate through an SVD of W^(1/2) G; throws
/// rank_deficient when K_d < L_d or the normal-equation condition estimate
/// reaches 1e12.
Eigen::VectorXd zf_detect(const DetectionSystem& system);

/// Per-element nearest constellation point; midpoints round toward the
/// smaller amplitude.
std::vector<double> hard_decision(const Eigen::VectorXd& pre_estimate,
                                  const Constellation& constellation);

/// Exhaustive minimizer of the weighted residual over all M^L_d sequences
/// (guarded at 2^20); ties broken lexicographically.
std::vector<double> brute_force_ml(const DetectionSystem& system,
                                   const Constellation& constellation, int data_length);

/// Count -> symbol table built from noiseless single-symbol encodings.
struct SpikeCountCalibration {
    std::vector<double> symbols; // ascending constellation points
    std::vector<int> counts;     // firing count for each symbol in isolation
};

SpikeCountCalibration calibrate_spike_counts(const Constellation& constellation,
                                             const PulseShape& pulse, const TemParams& params);

/// Baseline detector: count firings in each data symbol window (shifted by
/// tau_hat) and map each count to the nearest calibrated count's symbol.
std::vector<double> spike_count_detect(const FiringRecord& record, double tau_hat,
                                       const Constellation& constellation, double symbol_period,
                                       int pilot_length, int data_length,
                                       const SpikeCountCalibration& calibration);

} // namespace temlink
