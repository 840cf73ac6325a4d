#pragma once

#include <stdexcept>
#include <string>

namespace fden {

enum class ErrorKind {
    invalid_channel,
    invalid_quantum_number,
    invalid_state,
    subcriticality,
    configuration,
    dimension,
    potential_evaluation,
    evaluation,
    solver,
    degenerate_discretization,
    parameter,
    coupling_too_large,
    convergence,
    internal_consistency,
    range,
    domain_too_small,
    cache_format,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace fden
