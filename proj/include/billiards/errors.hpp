#ifndef BILLIARDS_ERRORS_HPP
#define BILLIARDS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace billiards {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// eval asked for a derivative order beyond the represented ones.
struct UnsupportedOrderError : Error {
    using Error::Error;
};

// Nearest-point projection did not converge within the iteration budget.
struct ProjectionError : Error {
    using Error::Error;
};

// Ray met the boundary tangentially (|<v,N>| below the grazing tolerance).
struct GrazingError : Error {
    GrazingError(const std::string& what, double s_hit, int bounce_index = -1)
        : Error(what), s(s_hit), bounce(bounce_index) {}
    double s;
    int bounce;
};

// No boundary intersection found where one was required.
struct GeometryError : Error {
    using Error::Error;
};

struct DegenerateConfigurationError : Error {
    using Error::Error;
};

struct InvalidPathError : Error {
    using Error::Error;
};

// Bump support would touch a protected parameter.
struct SupportError : Error {
    using Error::Error;
};

// Perturbation amplitude would break strict convexity / Sigma_r membership.
struct AmplitudeError : Error {
    using Error::Error;
};

struct TargetError : Error {
    using Error::Error;
};

struct CertificationError : Error {
    CertificationError(const std::string& what, double res) : Error(what), residual(res) {}
    double residual;
};

struct BudgetError : Error {
    BudgetError(const std::string& what, double requested_eps, double measured_effect)
        : Error(what), requested(requested_eps), measured(measured_effect) {}
    double requested;
    double measured;
};

struct SolverError : Error {
    using Error::Error;
};

struct PigeonholeError : Error {
    using Error::Error;
};

}  // namespace billiards

#endif
