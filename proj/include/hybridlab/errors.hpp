#ifndef HYBRIDLAB_ERRORS_HPP
#define HYBRIDLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hybridlab {

// Configuration / input validation problems (bad grids, unnormalized
// amplitudes, malformed polynomials, ...).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Numerical failures at run time (instability, non-positive states, ...).
class NumericsError : public std::runtime_error {
public:
    explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

// Explicit time-stepping would be unstable at the requested step size.
class StabilityError : public NumericsError {
public:
    StabilityError(const std::string& what, double suggested_dt)
        : NumericsError(what), suggested_dt_(suggested_dt) {}
    double suggested_dt() const { return suggested_dt_; }

private:
    double suggested_dt_;
};

} // namespace hybridlab

#endif
