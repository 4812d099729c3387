#include "spectral3/error.hpp"

namespace spectral3 {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Io: return "IoError";
        case ErrorKind::Parse: return "ParseError";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::ResolutionLimit: return "ResolutionLimit";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::BasinEscape: return "BasinEscape";
        case ErrorKind::DerivativeVanishes: return "DerivativeVanishes";
        case ErrorKind::GammaZero: return "GammaZero";
        case ErrorKind::BranchAmbiguity: return "BranchAmbiguity";
        case ErrorKind::NearPole: return "NearPole";
        case ErrorKind::PoleHit: return "PoleHit";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::AdmissibilityViolation: return "AdmissibilityViolation";
    }
    return "UnknownError";
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Io:
        case ErrorKind::Parse:
        case ErrorKind::InvalidArgument:
            return 1;
        case ErrorKind::SingularSystem:
            return 3;
        case ErrorKind::AdmissibilityViolation:
        case ErrorKind::PoleHit:
            return 4;
        default:
            return 2;
    }
}

}  // namespace spectral3
