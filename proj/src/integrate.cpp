#include "detflow/integrate.hpp"

namespace detflow {

const char* to_string(TerminationKind k) {
    switch (k) {
    case TerminationKind::ReachedTmax: return "reached-tmax";
    case TerminationKind::Event: return "event";
    case TerminationKind::Blowup: return "blowup";
    case TerminationKind::StepFailure: return "step-failure";
    }
    return "?";
}

} // namespace detflow
