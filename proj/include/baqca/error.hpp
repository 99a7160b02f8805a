#pragma once

#include <stdexcept>
#include <string>

namespace baqca {

// Bad user input: malformed files, missing columns, thresholds out of range.
// The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A violated internal precondition. Maps to exit code 1.
class LogicError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace baqca
