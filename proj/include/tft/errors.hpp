#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tft {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad hyperparameters, schemas or file layouts. CLI exit code 2.
struct ConfigError : Error {
    using Error::Error;
};

// Operand shapes do not satisfy an operation's preconditions.
struct DimensionError : Error {
    using Error::Error;
};

// API misuse: a call sequence the library forbids (e.g. backward twice).
struct ContractError : Error {
    using Error::Error;
};

// Unreadable or inconsistent input data. CLI exit code 3.
struct DataError : Error {
    using Error::Error;
};

// Non-finite values produced mid-computation. CLI exit code 4.
struct NumericError : Error {
    using Error::Error;
};

inline std::string shape_str(const std::vector<int>& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += "x";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

}  // namespace tft
