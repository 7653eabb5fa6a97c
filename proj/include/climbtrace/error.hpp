#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace climbtrace {

enum class ErrorCode {
    EmptySeries,
    DegenerateSeries,
    InvalidSeries,
    NonFiniteInput,
    TooFewSamples,
    NonMonotonicTimestamps,
    MalformedRow,
    UnknownHeader,
    StorageWriteFailure,
    StorageReadFailure,
    MalformedClimbFile,
    UnsupportedSchemaVersion,
    UnknownClimb,
    AmbiguousClimb,
    CutOutOfRange,
    EmptyTitle,
    EmptyTrace,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the library is an Error carrying a code, so
// front ends (CLI, HTTP) can map it to exit codes or status codes.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    // Set for MalformedRow: 1-based line number in the source text.
    std::optional<std::size_t> line() const noexcept { return line_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> line_;
};

}  // namespace climbtrace
