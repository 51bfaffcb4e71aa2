#pragma once

#include <stdexcept>
#include <string>

namespace renecast {

// Error categories map onto the CLI exit codes: input 2, model 3, I/O 4.

class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A metric that has no defined value on the given data (e.g. R-squared on a
// constant actual sequence). Kept distinct so callers can skip rather than
// abort; never signalled through NaN.
class UndefinedMetricError : public ModelError {
public:
    using ModelError::ModelError;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace renecast
