#include "pdc/signal.hpp"

#include <algorithm>
#include <cmath>

#include "pdc/errors.hpp"

namespace pdc {

Signal Signal::constant(double value) {
    Signal s;
    s.kind_ = Kind::Constant;
    s.params_ = {value};
    return s;
}

Signal Signal::ramp(double a, double b) {
    Signal s;
    s.kind_ = Kind::Ramp;
    s.params_ = {a, b};
    return s;
}

Signal Signal::sinusoid(double amplitude, double omega, double phase) {
    Signal s;
    s.kind_ = Kind::Sinusoid;
    s.params_ = {amplitude, omega, phase};
    return s;
}

Signal Signal::tabulated(std::vector<double> times, std::vector<double> values) {
    if (times.size() != values.size() || times.size() < 2)
        throw ConfigError("tabulated signal needs at least two (t, v) knots");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1])
            throw ConfigError("tabulated signal knot times must be strictly increasing");
    Signal s;
    s.kind_ = Kind::Tabulated;
    s.params_.clear();
    s.knot_times_ = std::move(times);
    s.knot_values_ = std::move(values);
    return s;
}

double Signal::operator()(double t) const {
    switch (kind_) {
        case Kind::Constant:
            return params_[0];
        case Kind::Ramp:
            return params_[0] + params_[1] * t;
        case Kind::Sinusoid:
            return params_[0] * std::sin(params_[1] * t + params_[2]);
        case Kind::Tabulated: {
            if (t <= knot_times_.front()) return knot_values_.front();
            if (t >= knot_times_.back()) return knot_values_.back();
            const auto it = std::upper_bound(knot_times_.begin(), knot_times_.end(), t);
            const std::size_t i = static_cast<std::size_t>(it - knot_times_.begin());
            const double t0 = knot_times_[i - 1];
            const double t1 = knot_times_[i];
            const double w = (t - t0) / (t1 - t0);
            return (1.0 - w) * knot_values_[i - 1] + w * knot_values_[i];
        }
    }
    return 0.0;
}

VectorSignal::VectorSignal(std::vector<Signal> components)
    : components_(std::move(components)) {}

VectorSignal VectorSignal::constant(const Vec& value) {
    std::vector<Signal> comps;
    comps.reserve(value.size());
    for (double v : value) comps.push_back(Signal::constant(v));
    return VectorSignal(std::move(comps));
}

VectorSignal VectorSignal::zero(std::size_t dim) {
    return constant(Vec(dim, 0.0));
}

Vec VectorSignal::operator()(double t) const {
    Vec out(components_.size());
    for (std::size_t i = 0; i < components_.size(); ++i) out[i] = components_[i](t);
    return out;
}

}  // namespace pdc
