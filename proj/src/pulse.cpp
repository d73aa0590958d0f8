#include "temlink/pulse.hpp"

#include <cmath>
#include <stdexcept>

#include "temlink/quadrature.hpp"

namespace temlink {

namespace {

constexpr double kPi = 3.14159265358979323846;

} // namespace

PulseShape::PulseShape(PulseKind kind, double symbol_period, double rolloff, int memory)
    : kind_(kind), period_(symbol_period), rolloff_(rolloff), memory_(memory), energy_(0.0) {
    if (!(symbol_period > 0.0)) throw std::invalid_argument("symbol period must be positive");
    const double s = support_half_width();
    energy_ = integrate_adaptive([this](double t) { const double v = eval(t); return v * v; },
                                 -s, s, 1e-13);
}

PulseShape PulseShape::rectangular(double symbol_period) {
    return PulseShape(PulseKind::rectangular, symbol_period, 0.0, 0);
}

PulseShape PulseShape::triangular(double symbol_period) {
    return PulseShape(PulseKind::triangular, symbol_period, 0.0, 1);
}

PulseShape PulseShape::root_raised_cosine(double symbol_period, double rolloff, int memory) {
    if (!(rolloff >= 0.0 && rolloff <= 1.0))
        throw std::invalid_argument("rolloff must lie in [0, 1]");
    if (memory < 1) throw std::invalid_argument("root-raised-cosine memory must be >= 1");
    return PulseShape(PulseKind::root_raised_cosine, symbol_period, rolloff, memory);
}

// p(xT)·T for the untruncated root raised cosine, with the removable
// singularities at x = 0 and |x| = 1/(4β) patched by their limits.
double PulseShape::rrc_shape(double x) const {
    const double beta = rolloff_;
    if (std::fabs(x) < 1e-8) return 1.0 - beta + 4.0 * beta / kPi;
    if (beta > 0.0) {
        const double xs = std::fabs(x) - 1.0 / (4.0 * beta);
        if (std::fabs(xs) < 1e-8) {
            const double arg = kPi / (4.0 * beta);
            return (beta / std::sqrt(2.0)) *
                   ((1.0 + 2.0 / kPi) * std::sin(arg) + (1.0 - 2.0 / kPi) * std::cos(arg));
        }
    }
    const double num = std::sin(kPi * x * (1.0 - beta)) +
                       4.0 * beta * x * std::cos(kPi * x * (1.0 + beta));
    const double den = kPi * x * (1.0 - 16.0 * beta * beta * x * x);
    return num / den;
}

double PulseShape::rrc_shape_derivative(double x) const {
    const double beta = rolloff_;
    if (std::fabs(x) < 1e-7) return 0.0; // even pulse
    if (beta > 0.0) {
        const double xs = std::fabs(x) - 1.0 / (4.0 * beta);
        if (std::fabs(xs) < 1e-7) {
            // Removable singularity: average the two-sided values.
            const double h = 1e-5;
            return 0.5 * (rrc_shape_derivative(x - h) + rrc_shape_derivative(x + h));
        }
    }
    const double a1 = kPi * (1.0 - beta);
    const double a2 = kPi * (1.0 + beta);
    const double num = std::sin(a1 * x) + 4.0 * beta * x * std::cos(a2 * x);
    const double dnum = a1 * std::cos(a1 * x) + 4.0 * beta * std::cos(a2 * x) -
                        4.0 * beta * x * a2 * std::sin(a2 * x);
    const double b2 = 16.0 * beta * beta;
    const double den = kPi * x * (1.0 - b2 * x * x);
    const double dden = kPi * (1.0 - 3.0 * b2 * x * x);
    return (dnum * den - num * dden) / (den * den);
}

double PulseShape::eval(double t) const {
    const double T = period_;
    switch (kind_) {
        case PulseKind::rectangular:
            return (t >= -0.5 * T && t < 0.5 * T) ? 1.0 / T : 0.0;
        case PulseKind::triangular: {
            const double a = std::fabs(t);
            return a <= T ? (1.0 - a / T) / T : 0.0;
        }
        case PulseKind::root_raised_cosine: {
            if (std::fabs(t) > support_half_width()) return 0.0;
            return rrc_shape(t / T) / T;
        }
    }
    return 0.0;
}

double PulseShape::eval_derivative(double t) const {
    const double T = period_;
    switch (kind_) {
        case PulseKind::rectangular:
            return 0.0;
        case PulseKind::triangular: {
            const double a = std::fabs(t);
            if (a >= T || t == 0.0) return 0.0;
            return (t > 0.0 ? -1.0 : 1.0) / (T * T);
        }
        case PulseKind::root_raised_cosine: {
            if (std::fabs(t) > support_half_width()) return 0.0;
            return rrc_shape_derivative(t / T) / (T * T);
        }
    }
    return 0.0;
}

} // namespace temlink
