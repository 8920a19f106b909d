#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tgflock {

enum class ErrorKind {
    NonSymmetric,
    DimensionMismatch,
    PreconditionViolated,
    InvalidSize,
    DivisionDegenerate,
    DegenerateVelocity,
    NonFinite,
    EdgeAsymmetry,
    UnknownKind,
    Requires2D,
    ConfigInvalid,
    IoFailure,
    ParseError,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library. `kind()` identifies the contract that
/// was violated; `time()` is set when the failure happened during integration.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, std::optional<double> time = std::nullopt);

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::optional<double> time() const noexcept { return time_; }

private:
    ErrorKind kind_;
    std::optional<double> time_;
};

}  // namespace tgflock
