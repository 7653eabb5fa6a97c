#include "climbtrace/error.hpp"

namespace climbtrace {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::DegenerateSeries: return "DegenerateSeries";
    case ErrorCode::InvalidSeries: return "InvalidSeries";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::NonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::UnknownHeader: return "UnknownHeader";
    case ErrorCode::StorageWriteFailure: return "StorageWriteFailure";
    case ErrorCode::StorageReadFailure: return "StorageReadFailure";
    case ErrorCode::MalformedClimbFile: return "MalformedClimbFile";
    case ErrorCode::UnsupportedSchemaVersion: return "UnsupportedSchemaVersion";
    case ErrorCode::UnknownClimb: return "UnknownClimb";
    case ErrorCode::AmbiguousClimb: return "AmbiguousClimb";
    case ErrorCode::CutOutOfRange: return "CutOutOfRange";
    case ErrorCode::EmptyTitle: return "EmptyTitle";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), line_(line) {}

}  // namespace climbtrace
