// errors.hpp: error taxonomy shared by the integrators and the CLI front end

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace hybridbath {

// Bad or incomplete run configuration. Carries the path of the offending
// field ("grid.dt", "parameters.kernel_b.lambda", ...) so the CLI can report
// it machine-readably.
class config_error : public std::runtime_error {
public:
    config_error(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// A memory integral crossed the overflow guard. Resonant single-mode kernels
// genuinely diverge (tangent law), so this is a signal, not a bug; the time
// of the crossing estimates the singularity location.
class singularity_error : public std::runtime_error {
public:
    singularity_error(double when, const std::string& message)
        : std::runtime_error(message), when_(when) {}
    double when() const noexcept { return when_; }

private:
    double when_;
};

// Requested grid or Hilbert-space dimension exceeds the desk-scale budget.
class resource_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An integrator violated one of its own conservation guarantees (trace or
// norm drift past the hard limit).
class integration_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace hybridbath
