#pragma once

#include <stdexcept>
#include <string>

namespace detflow {

enum class ErrorCode {
    DegenerateBeta,
    ZeroGamma3,
    Overflow,
    NoBoundedOrbit,
    OutOfRange,
    NoRealU0,
    BracketInvalid,
    InsufficientSpan,
    EpsilonTooLarge,
    PlateauNotFound,
    WrongLevel,
    NoDisc,
    Undefined,
    BadArgument,
    Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace detflow
