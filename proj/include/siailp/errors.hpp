#pragma once

#include <stdexcept>
#include <string>

namespace siailp {

// Error categories map onto the CLI exit codes: usage/config -> 1,
// data/parse/vocabulary -> 2, numeric failures -> 3.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : DataError {
    using DataError::DataError;
};

struct VocabError : DataError {
    using DataError::DataError;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace siailp
