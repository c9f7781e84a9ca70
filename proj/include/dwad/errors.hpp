#pragma once
// Error taxonomy. Each category maps to a distinct CLI exit code so shell
// callers can distinguish misconfiguration from bad data from numerical
// breakdown from violated model assumptions.

#include <stdexcept>
#include <string>

namespace dwad {

// Invalid flags, malformed config, out-of-range parameters.  Exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Unreadable/malformed input data (CSV files, non-finite values).  Exit code 3.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical breakdown: quadrature non-convergence, extrapolation instability,
// degenerate variance in a requested direction.  Exit code 4.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// A model assumption fails a numeric check (e.g. non-PD roughness matrix).
// Exit code 5.
struct AssumptionError : std::runtime_error {
    explicit AssumptionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when studentization is requested in a direction whose estimated
// variance is not positive; carries the offending quadratic form value.
struct DegenerateVarianceError : NumericalError {
    double quad_form;
    explicit DegenerateVarianceError(double q)
        : NumericalError("requested variance quadratic form is not positive: " +
                         std::to_string(q)),
          quad_form(q) {}
};

}  // namespace dwad
