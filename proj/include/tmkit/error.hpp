#pragma once

#include <stdexcept>
#include <string>

namespace tmkit {

enum class ErrorCode {
    InvalidArgument,
    Io,
    Parse,
    UnknownElement,
    DisconnectedRegion,
    DuplicateEvent,
    UnknownEvent,
    ContainmentViolation,
    EmptyGraph,
    RunCapExceeded,
    Divergence,
    DivisionByZero,
    InvalidRule,
    Domain,
    EmptyObservation,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace tmkit
