#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spectral3 {

enum class ErrorKind {
    Io,
    Parse,
    InvalidArgument,
    NonFinite,
    ResolutionLimit,
    NoConvergence,
    BasinEscape,
    DerivativeVanishes,
    GammaZero,
    BranchAmbiguity,
    NearPole,
    PoleHit,
    SingularSystem,
    AdmissibilityViolation,
};

std::string_view to_string(ErrorKind kind);

// Process exit status used by the command-line tool for each failure class.
int exit_code(ErrorKind kind);

class SpectralError : public std::runtime_error {
public:
    SpectralError(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw SpectralError(kind, message);
}

}  // namespace spectral3
