#include "fden/errors.hpp"

namespace fden {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::invalid_channel: return "invalid-channel";
    case ErrorKind::invalid_quantum_number: return "invalid-quantum-number";
    case ErrorKind::invalid_state: return "invalid-state";
    case ErrorKind::subcriticality: return "subcriticality";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::potential_evaluation: return "potential-evaluation";
    case ErrorKind::evaluation: return "evaluation";
    case ErrorKind::solver: return "solver";
    case ErrorKind::degenerate_discretization: return "degenerate-discretization";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::coupling_too_large: return "coupling-too-large";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::internal_consistency: return "internal-consistency";
    case ErrorKind::range: return "range";
    case ErrorKind::domain_too_small: return "domain-too-small";
    case ErrorKind::cache_format: return "cache-format";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind)
{
}

}  // namespace fden
