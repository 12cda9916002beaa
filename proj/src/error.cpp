#include "detflow/error.hpp"

namespace detflow {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::DegenerateBeta: return "degenerate-beta";
    case ErrorCode::ZeroGamma3: return "zero-gamma3";
    case ErrorCode::Overflow: return "overflow";
    case ErrorCode::NoBoundedOrbit: return "no-bounded-orbit";
    case ErrorCode::OutOfRange: return "out-of-range";
    case ErrorCode::NoRealU0: return "no-real-u0";
    case ErrorCode::BracketInvalid: return "bracket-invalid";
    case ErrorCode::InsufficientSpan: return "insufficient-span";
    case ErrorCode::EpsilonTooLarge: return "epsilon-too-large";
    case ErrorCode::PlateauNotFound: return "plateau-not-found";
    case ErrorCode::WrongLevel: return "wrong-level";
    case ErrorCode::NoDisc: return "no-disc";
    case ErrorCode::Undefined: return "undefined";
    case ErrorCode::BadArgument: return "bad-argument";
    case ErrorCode::Io: return "io";
    }
    return "unknown";
}

} // namespace detflow
