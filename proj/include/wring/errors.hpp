#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wring {

/// Failure categories raised by the toolkit. Each maps onto a CLI exit code.
enum class ErrorKind {
    BadArgument,
    Format,
    NonFinite,
    NonZeroMeanVorticity,
    NotDivergenceFree,
    NonPeriodic,
    ZeroF,
    SupportTooLarge,
    TubesOverlap,
    MapNotInvertible,
    ConsistencyLoss,
    DegenerateField,
    FluxObstruction,
    IntegrabilityFailure,
    DenominatorVanishesEverywhere,
    MaskTooSmall,
    CflViolation,
    DriftExceeded,
    ZeroSlopeOne,
    DegenerateFluxes,
    MissingLinkData,
    CurvesIntersect,
};

inline std::string_view to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::BadArgument: return "BadArgument";
    case ErrorKind::Format: return "FormatError";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NonZeroMeanVorticity: return "NonZeroMeanVorticity";
    case ErrorKind::NotDivergenceFree: return "NotDivergenceFree";
    case ErrorKind::NonPeriodic: return "NonPeriodic";
    case ErrorKind::ZeroF: return "ZeroF";
    case ErrorKind::SupportTooLarge: return "SupportTooLarge";
    case ErrorKind::TubesOverlap: return "TubesOverlap";
    case ErrorKind::MapNotInvertible: return "MapNotInvertible";
    case ErrorKind::ConsistencyLoss: return "ConsistencyLoss";
    case ErrorKind::DegenerateField: return "DegenerateField";
    case ErrorKind::FluxObstruction: return "FluxObstruction";
    case ErrorKind::IntegrabilityFailure: return "IntegrabilityFailure";
    case ErrorKind::DenominatorVanishesEverywhere: return "DenominatorVanishesEverywhere";
    case ErrorKind::MaskTooSmall: return "MaskTooSmall";
    case ErrorKind::CflViolation: return "CflViolation";
    case ErrorKind::DriftExceeded: return "DriftExceeded";
    case ErrorKind::ZeroSlopeOne: return "ZeroSlopeOne";
    case ErrorKind::DegenerateFluxes: return "DegenerateFluxes";
    case ErrorKind::MissingLinkData: return "MissingLinkData";
    case ErrorKind::CurvesIntersect: return "CurvesIntersect";
    }
    return "Unknown";
}

/// Process exit code for the CLI: 2 bad arguments, 3 input format,
/// 4 numerical precondition, 5 internal tolerance breach.
inline int exit_code(ErrorKind k) {
    switch (k) {
    case ErrorKind::BadArgument: return 2;
    case ErrorKind::Format: return 3;
    case ErrorKind::ConsistencyLoss:
    case ErrorKind::DriftExceeded: return 5;
    default: return 4;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace wring
