#include "tti/core/error.hpp"

namespace tti {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidHorizon: return "InvalidHorizon";
    case ErrorCode::UnknownTask: return "UnknownTask";
    case ErrorCode::EpisodeOver: return "EpisodeOver";
    case ErrorCode::InvalidSlot: return "InvalidSlot";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::InfeasibleConfig: return "InfeasibleConfig";
    case ErrorCode::ExhaustedProposals: return "ExhaustedProposals";
    case ErrorCode::TooFewTasks: return "TooFewTasks";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::InvalidAction: return "InvalidAction";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyBuffer: return "EmptyBuffer";
    case ErrorCode::UnfilteredTrajectory: return "UnfilteredTrajectory";
    case ErrorCode::TaskMismatch: return "TaskMismatch";
    case ErrorCode::MismatchedRuns: return "MismatchedRuns";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::CorruptCheckpoint: return "CorruptCheckpoint";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

} // namespace tti
