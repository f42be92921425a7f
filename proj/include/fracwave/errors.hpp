#pragma once

#include <stdexcept>
#include <string>

namespace fracwave {

// Input rejected by a validation step; the message names the violated invariant.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A word / point enumeration would exceed the configured cap.
class EnumerationOverflow : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

// A numerical procedure failed or could not reach the requested accuracy.
class ComputationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fracwave
