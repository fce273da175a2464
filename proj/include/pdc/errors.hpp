#pragma once

#include <stdexcept>
#include <string>

namespace pdc {

// Base class for all library errors so callers can catch everything at once.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
    using Error::Error;
};

// Rank / definiteness problems detected at construction time.
struct RankError : Error {
    using Error::Error;
};

struct ConvexityError : Error {
    using Error::Error;
};

struct NotPositiveSemidefiniteError : Error {
    using Error::Error;
};

struct GraphError : Error {
    using Error::Error;
};

struct MetricError : Error {
    using Error::Error;
};

struct CertificationError : Error {
    using Error::Error;
};

// A bound's standing hypothesis (e.g. beta_hat > xi) does not hold.
struct ConditionError : Error {
    using Error::Error;
};

struct OptimizerError : Error {
    OptimizerError(const std::string& msg, double residual)
        : Error(msg), last_residual(residual) {}
    double last_residual;
};

struct DivergenceError : Error {
    DivergenceError(const std::string& msg, double t)
        : Error(msg), last_finite_time(t) {}
    double last_finite_time;
};

struct ConfigError : Error {
    using Error::Error;
};

struct WindowError : Error {
    using Error::Error;
};

struct DegeneratePairError : Error {
    using Error::Error;
};

struct StabilityConditionError : Error {
    StabilityConditionError(const std::string& msg, int layer)
        : Error(msg), layer_index(layer) {}
    int layer_index;
};

struct SamplingError : Error {
    using Error::Error;
};

}  // namespace pdc
