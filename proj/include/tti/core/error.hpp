#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tti {

enum class ErrorCode {
    InvalidHorizon,
    UnknownTask,
    EpisodeOver,
    InvalidSlot,
    InvalidGraph,
    InfeasibleConfig,
    ExhaustedProposals,
    TooFewTasks,
    EmptyMask,
    InvalidAction,
    ShapeMismatch,
    EmptyBuffer,
    UnfilteredTrajectory,
    TaskMismatch,
    MismatchedRuns,
    InvalidArgument,
    ConfigError,
    CorruptCheckpoint,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace tti
