#pragma once

#include <stdexcept>
#include <string>

namespace implab {

// Base for everything thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad inputs: malformed configs, violated preconditions, un-normalized germs.
// CLI maps these to exit code 1.
struct ValidationError : Error {
    using Error::Error;
};

// The computation itself gave up: solver non-convergence, overflow,
// evaluation outside a truncation's validity radius. CLI exit code 2.
struct NumericalError : Error {
    using Error::Error;
};

} // namespace implab
