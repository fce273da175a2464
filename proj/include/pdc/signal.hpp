#pragma once

#include <string>
#include <vector>

#include "pdc/matrix.hpp"

namespace pdc {

/// Scalar time signal with a small set of closed-form shapes plus a tabulated
/// fallback with linear interpolation. Tagged (rather than a bare callable)
/// so CLI configs can describe it and reports can echo it back.
class Signal {
public:
    enum class Kind { Constant, Ramp, Sinusoid, Tabulated };

    static Signal constant(double value);
    /// a + b*t
    static Signal ramp(double a, double b);
    /// amplitude * sin(omega*t + phase)
    static Signal sinusoid(double amplitude, double omega, double phase = 0.0);
    /// Linear interpolation between (t_i, v_i) knots; clamped outside the range.
    static Signal tabulated(std::vector<double> times, std::vector<double> values);

    double operator()(double t) const;

    Kind kind() const { return kind_; }
    const std::vector<double>& params() const { return params_; }
    const std::vector<double>& knot_times() const { return knot_times_; }
    const std::vector<double>& knot_values() const { return knot_values_; }

private:
    Kind kind_ = Kind::Constant;
    std::vector<double> params_{0.0};
    std::vector<double> knot_times_;
    std::vector<double> knot_values_;
};

/// m-vector signal assembled from per-component scalar signals.
class VectorSignal {
public:
    VectorSignal() = default;
    explicit VectorSignal(std::vector<Signal> components);
    static VectorSignal constant(const Vec& value);
    static VectorSignal zero(std::size_t dim);

    std::size_t dim() const { return components_.size(); }
    Vec operator()(double t) const;

    const std::vector<Signal>& components() const { return components_; }

private:
    std::vector<Signal> components_;
};

}  // namespace pdc
