#pragma once

#include <Eigen/Dense>
#include <vector>

#include "temlink/tem.hpp"
#include "temlink/waveform.hpp"

namespace temlink {

/// Observation vector and design matrices for one timing hypothesis.
///
/// Row k covers the inter-firing interval [t_{k-1}, t_k]:
///   observation[k]  = κΔ - b (t_k - t_{k-1})
///   pilot_matrix    K x L_p, entry (k, l) = ∫ p(t - lT - τ) dt over the interval
///   data_matrix     K x L_d, entry (k, l) = ∫ p(t - (L_p + l)T - τ) dt
///   weights[k]      = 1 / (t_k - t_{k-1})
struct LikelihoodMatrices {
    Eigen::VectorXd observation;
    Eigen::MatrixXd pilot_matrix;
    Eigen::MatrixXd data_matrix;
    Eigen::VectorXd weights;
    double tau = 0.0;
};

/// ∫_a^b p(t - shift) dt; closed form for the rectangular and triangular
/// pulses, adaptive quadrature (abs tol 1e-12) for the root raised cosine,
/// with the range clipped to the pulse support.
double integrated_pulse(const PulseShape& pulse, double a, double b, double shift);

/// d/dshift ∫_a^b p(t - shift) dt = p(a - shift) - p(b - shift).
double integrated_pulse_dshift(const PulseShape& pulse, double a, double b, double shift);

LikelihoodMatrices build_matrices(const std::vector<double>& firing_times, int pilot_length,
                                  int data_length, double tau, const PulseShape& pulse,
                                  const TemParams& params);

/// -‖T^(1/2) (y - P s_p - G s_d)‖²; the additive constant of the full
/// log-likelihood is dropped.
double log_likelihood(const LikelihoodMatrices& matrices, const Eigen::VectorXd& pilots,
                      const Eigen::VectorXd& data);

} // namespace temlink
