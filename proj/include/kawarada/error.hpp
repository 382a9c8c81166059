#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kawarada {

enum class ErrorKind {
    InvalidGrid,
    EmptyGrid,
    InvalidArgument,
    QuenchDomain,      // source evaluated at or beyond u = 1
    SingularFactor,    // zero pivot in a line solve
    IterationFailure,  // fixed-point source iteration did not converge
    GridTooLarge,      // dense oracle cap exceeded
    NumericFailure,    // non-finite input or an eigenvalue solve failed
    Config,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidGrid: return "invalid-grid";
        case ErrorKind::EmptyGrid: return "empty-grid";
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::QuenchDomain: return "quench-domain";
        case ErrorKind::SingularFactor: return "singular-factor";
        case ErrorKind::IterationFailure: return "iteration-failure";
        case ErrorKind::GridTooLarge: return "grid-too-large";
        case ErrorKind::NumericFailure: return "numeric-failure";
        case ErrorKind::Config: return "config";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace kawarada
