#pragma once

#include <stdexcept>
#include <string>

namespace rankexpl {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or parameter combination (CLI exit code 2).
struct config_error : error {
    using error::error;
};

/// Malformed or missing input data (CLI exit code 3).
struct data_error : error {
    using error::error;
};

/// A call that violates an interface contract, e.g. requesting per-document
/// scores from a strongly agnostic black box.
struct contract_error : error {
    using error::error;
};

}  // namespace rankexpl
