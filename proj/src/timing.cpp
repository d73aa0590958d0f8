#include "temlink/timing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "temlink/errors.hpp"
#include "temlink/likelihood.hpp"

namespace temlink {

namespace {

void check_pilot_times(const std::vector<double>& pilot_times) {
    if (pilot_times.size() < 2) throw insufficient_pilot_spikes(pilot_times.size());
    for (std::size_t k = 1; k < pilot_times.size(); ++k)
        if (!(pilot_times[k] > pilot_times[k - 1]))
            throw invalid_firing_record("pilot firing times not strictly increasing");
}

// Residual of interval k: y_k - sum_l s_l ∫ p(t - lT - tau).
double interval_residual(double tau, double ta, double tb, const std::vector<double>& pilots,
                         const PulseShape& pulse, const TemParams& params) {
    const double T = pulse.symbol_period();
    const double s = pulse.support_half_width();
    const int lo = std::max(0, static_cast<int>(std::ceil((ta - s - tau) / T)));
    const int hi = std::min(static_cast<int>(pilots.size()) - 1,
                            static_cast<int>(std::floor((tb + s - tau) / T)));
    double model = 0.0;
    for (int l = lo; l <= hi; ++l)
        model += pilots[l] * integrated_pulse(pulse, ta, tb, l * T + tau);
    return params.threshold - params.bias * (tb - ta) - model;
}

double interval_residual_dtau(double tau, double ta, double tb,
                              const std::vector<double>& pilots, const PulseShape& pulse) {
    const double T = pulse.symbol_period();
    const double s = pulse.support_half_width();
    const int lo = std::max(0, static_cast<int>(std::ceil((ta - s - tau) / T)));
    const int hi = std::min(static_cast<int>(pilots.size()) - 1,
                            static_cast<int>(std::floor((tb + s - tau) / T)));
    double d = 0.0;
    for (int l = lo; l <= hi; ++l)
        d -= pilots[l] * (pulse.eval(ta - l * T - tau) - pulse.eval(tb - l * T - tau));
    return d;
}

struct Candidate {
    double tau = 0.0;
    bool newton_converged = false;
    int iterations = 0;
};

} // namespace

double timing_objective(double tau, const std::vector<double>& pilot_times,
                        const std::vector<double>& pilots, const PulseShape& pulse,
                        const TemParams& params) {
    check_pilot_times(pilot_times);
    double acc = 0.0;
    for (std::size_t k = 1; k < pilot_times.size(); ++k) {
        const double ta = pilot_times[k - 1];
        const double tb = pilot_times[k];
        const double r = interval_residual(tau, ta, tb, pilots, pulse, params);
        acc += r * r / (2.0 * (tb - ta));
    }
    return acc;
}

double timing_objective_derivative(double tau, const std::vector<double>& pilot_times,
                                   const std::vector<double>& pilots, const PulseShape& pulse,
                                   const TemParams& params) {
    check_pilot_times(pilot_times);
    double acc = 0.0;
    for (std::size_t k = 1; k < pilot_times.size(); ++k) {
        const double ta = pilot_times[k - 1];
        const double tb = pilot_times[k];
        const double r = interval_residual(tau, ta, tb, pilots, pulse, params);
        const double dr = interval_residual_dtau(tau, ta, tb, pilots, pulse);
        acc += r * dr / (tb - ta);
    }
    return acc;
}

TimingEstimate estimate_tau_ml(const std::vector<double>& pilot_times,
                               const std::vector<double>& pilots, const PulseShape& pulse,
                               const TemParams& params, const NewtonConfig& config) {
    check_pilot_times(pilot_times);
    if (config.n_guess < 2)
        throw std::invalid_argument("need at least 2 initial guesses");
    if (config.max_iterations < 1)
        throw std::invalid_argument("max_iterations must be positive");
    if (!(config.damping > 0.0 && config.damping <= 1.0))
        throw std::invalid_argument("damping must lie in (0, 1]");

    const double T = pulse.symbol_period();
    const double half = 0.5 * T;
    const double step_tol = config.step_tolerance > 0.0 ? config.step_tolerance : 1e-10 * T;
    const double fd_step = 1e-6 * T;
    const double guess_spacing = T / (config.n_guess - 1);

    auto objective = [&](double tau) {
        return timing_objective(tau, pilot_times, pilots, pulse, params);
    };
    auto derivative = [&](double tau) {
        return timing_objective_derivative(tau, pilot_times, pilots, pulse, params);
    };

    auto golden_section = [&](double center) {
        double a = std::max(-half, center - guess_spacing);
        double b = std::min(half, center + guess_spacing);
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - phi * (b - a);
        double x2 = a + phi * (b - a);
        double f1 = objective(x1);
        double f2 = objective(x2);
        for (int i = 0; i < 40; ++i) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = objective(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = objective(x2);
            }
        }
        return 0.5 * (a + b);
    };

    auto run_start = [&](double tau0) {
        Candidate cand;
        double tau = tau0;
        double damping = config.damping;
        double g = derivative(tau);
        const double g0 = std::fabs(g);
        int escapes = 0;
        for (int it = 0; it < config.max_iterations; ++it) {
            ++cand.iterations;
            const double gp = derivative(tau + fd_step);
            const double gm = derivative(tau - fd_step);
            const double curvature = (gp - gm) / (2.0 * fd_step);
            if (!std::isfinite(curvature) || curvature == 0.0) break;
            const double raw = tau - damping * g / curvature;
            if ((raw < -half || raw > half) && ++escapes >= 2) break;
            const double next = std::clamp(raw, -half, half);
            const double g_next = derivative(next);
            if (std::fabs(g_next) > std::fabs(g)) damping = std::max(0.5 * damping, 1.0 / 64.0);
            const double moved = std::fabs(next - tau);
            tau = next;
            g = g_next;
            if (std::fabs(g) > 10.0 * g0 + 1e-12) break;
            if (moved < step_tol) {
                cand.newton_converged = true;
                break;
            }
        }
        // Any start that did not converge falls back to a bracketed
        // golden-section search around its initial guess.
        cand.tau = cand.newton_converged ? tau : golden_section(tau0);
        return cand;
    };

    TimingEstimate best;
    best.objective = std::numeric_limits<double>::infinity(); // the NULL candidate
    double min_objective = best.objective;
    for (int g = 0; g < config.n_guess; ++g) {
        const double tau0 = (-0.5 + static_cast<double>(g) / (config.n_guess - 1)) * T;
        const Candidate cand = run_start(tau0);
        const double obj = objective(cand.tau);
        best.iterations_total += cand.iterations;
        if (cand.newton_converged) ++best.starts_converged;
        min_objective = std::min(min_objective, obj);
        const bool better = obj < best.objective - 1e-12;
        const bool tie = std::fabs(obj - best.objective) <= 1e-12 &&
                         std::fabs(cand.tau) < std::fabs(best.tau_hat);
        if (better || tie) {
            best.tau_hat = cand.tau;
            best.objective = obj;
        }
    }
    if (!(best.objective <= min_objective + 1e-12))
        throw std::logic_error("candidate selection lost the best objective");
    best.converged = best.starts_converged > 0;
    return best;
}

} // namespace temlink
