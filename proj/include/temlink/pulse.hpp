#pragma once

namespace temlink {

enum class PulseKind { rectangular, triangular, root_raised_cosine };

/// Transmit pulse p(t) with finite support [-(memory+1)T/2, (memory+1)T/2].
///
/// All three kinds integrate to 1 over their support before truncation:
///   rectangular  amplitude 1/T on [-T/2, T/2), memory 0
///   triangular   peak 1/T on [-T, T], memory 1
///   root raised cosine  truncated to the declared memory (default 4)
class PulseShape {
public:
    static PulseShape rectangular(double symbol_period);
    static PulseShape triangular(double symbol_period);
    static PulseShape root_raised_cosine(double symbol_period, double rolloff, int memory = 4);

    PulseKind kind() const noexcept { return kind_; }
    double symbol_period() const noexcept { return period_; }
    int memory() const noexcept { return memory_; }
    double rolloff() const noexcept { return rolloff_; }

    double support_half_width() const noexcept { return 0.5 * (memory_ + 1) * period_; }

    /// ∫ p(t)^2 dt over the support, computed once at construction.
    double energy() const noexcept { return energy_; }

    double eval(double t) const;

    /// Pointwise derivative p'(t); at kinks of the rectangular and
    /// triangular pulses the value is 0 by convention.
    double eval_derivative(double t) const;

private:
    PulseShape(PulseKind kind, double symbol_period, double rolloff, int memory);

    double rrc_shape(double x) const;            // dimensionless p(xT)·T
    double rrc_shape_derivative(double x) const; // d/dx of the above

    PulseKind kind_;
    double period_;
    double rolloff_;
    int memory_;
    double energy_;
};

} // namespace temlink
