#include "tgflock/error.hpp"

namespace tgflock {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NonSymmetric: return "NonSymmetric";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::PreconditionViolated: return "PreconditionViolated";
        case ErrorKind::InvalidSize: return "InvalidSize";
        case ErrorKind::DivisionDegenerate: return "DivisionDegenerate";
        case ErrorKind::DegenerateVelocity: return "DegenerateVelocity";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::EdgeAsymmetry: return "EdgeAsymmetry";
        case ErrorKind::UnknownKind: return "UnknownKind";
        case ErrorKind::Requires2D: return "Requires2D";
        case ErrorKind::ConfigInvalid: return "ConfigInvalid";
        case ErrorKind::IoFailure: return "IoFailure";
        case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what, std::optional<double> time)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), time_(time) {}

}  // namespace tgflock
