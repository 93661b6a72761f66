#ifndef CRESTLINE_ERRORS_HPP
#define CRESTLINE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace crestline {

/// Base class for everything thrown by this library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A run configuration failed validation; the message names the field path.
struct config_error : error {
    using error::error;
};

/// A standing assumption of the model (u'(d) != 0, d != r, ...) is violated.
struct assumption_error : error {
    using error::error;
};

/// The free surface left the regime where the formulation is valid.
struct surface_error : error {
    using error::error;
};

/// An iterative solver failed to reach its tolerance.
struct convergence_error : error {
    using error::error;
};

/// A trajectory left the amplitude region where the truncation is trusted.
struct trust_region_error : error {
    using error::error;
};

} // namespace crestline

#endif
