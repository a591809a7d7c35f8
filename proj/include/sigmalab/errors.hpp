#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sigmalab {

/// Machine-readable failure codes. The prefix names the module that raised it.
enum class ErrorCode {
    ParamsInvalid,
    ModulusDomain,
    ModulusInvalid,
    Underflow,
    IntegrationFailure,
    AccuracyLoss,
    InvalidOrder,
    GridMismatch,
    BoxTooSmall,
    NumericalFailure,
    InsufficientData,
    InsufficientSnapshots,
    DegenerateGrid,
    ConfigParse,
    ConfigInvalid,
};

constexpr std::string_view error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::ParamsInvalid: return "params.invalid";
    case ErrorCode::ModulusDomain: return "moduli.domain";
    case ErrorCode::ModulusInvalid: return "moduli.invalid";
    case ErrorCode::Underflow: return "moduli.underflow";
    case ErrorCode::IntegrationFailure: return "fraclap.integration_failure";
    case ErrorCode::AccuracyLoss: return "fraclap.accuracy_loss";
    case ErrorCode::InvalidOrder: return "fraclap.invalid_order";
    case ErrorCode::GridMismatch: return "kernels.grid_mismatch";
    case ErrorCode::BoxTooSmall: return "kernels.box_too_small";
    case ErrorCode::NumericalFailure: return "solver.numerical_failure";
    case ErrorCode::InsufficientData: return "solver.insufficient_data";
    case ErrorCode::InsufficientSnapshots: return "diag.insufficient_snapshots";
    case ErrorCode::DegenerateGrid: return "diag.degenerate_grid";
    case ErrorCode::ConfigParse: return "config.parse";
    case ErrorCode::ConfigInvalid: return "config.invalid";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace sigmalab
