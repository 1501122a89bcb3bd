#ifndef HCLAB_ERRORS_HPP
#define HCLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hclab {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Raised when an instance document fails to parse or violates an invariant.
// The message names the violated invariant and the offending id.
struct InstanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact engines refuse to run past their enumeration caps; callers can fall
// back to Monte-Carlo evaluation.
struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hclab

#endif
