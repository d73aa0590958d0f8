#pragma once

#include <vector>

#include "temlink/tem.hpp"
#include "temlink/waveform.hpp"

namespace temlink {

struct NewtonConfig {
    int n_guess = 8;              // initial guesses spread over [-T/2, T/2]
    int max_iterations = 50;      // Newton iterations per start
    double step_tolerance = 0.0;  // seconds; 0 means 1e-10·T
    double damping = 1.0;         // in (0, 1], halved on overshoot
};

struct TimingEstimate {
    double tau_hat = 0.0;
    double objective = 0.0;
    bool converged = false;  // at least one Newton start reached the step tolerance
    int starts_converged = 0;
    int iterations_total = 0;
};

/// Weighted sum of squared pilot residuals,
///   sum_k (y_k - sum_l pilots[l] P_k,l(tau))^2 / (2 (t_k - t_{k-1})).
/// Zero at the true offset for a noiseless record.
double timing_objective(double tau, const std::vector<double>& pilot_times,
                        const std::vector<double>& pilots, const PulseShape& pulse,
                        const TemParams& params);

/// Analytic d/dtau of timing_objective.
double timing_objective_derivative(double tau, const std::vector<double>& pilot_times,
                                   const std::vector<double>& pilots, const PulseShape& pulse,
                                   const TemParams& params);

/// Multi-start damped Newton root finding on the derivative, iterates clamped
/// to [-T/2, T/2]; starts that diverge fall back to golden-section search
/// around their initial guess. Returns the candidate with the smallest
/// objective; ties within 1e-12 resolve to the smaller |tau|.
TimingEstimate estimate_tau_ml(const std::vector<double>& pilot_times,
                               const std::vector<double>& pilots, const PulseShape& pulse,
                               const TemParams& params, const NewtonConfig& config = {});

} // namespace temlink
