#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "climbtrace/metrics.hpp"

namespace climbtrace {

struct RawSample {
    double t;  // seconds since log start
    double magnitude;
    // Present when the sample was logged per axis.
    std::optional<std::array<double, 3>> axes;
};

struct RawSampleLog {
    std::vector<RawSample> samples;
    std::int64_t source_epoch_ms = 0;
};

struct GapFlag {
    double start_s;
    double end_s;

    bool operator==(const GapFlag&) const = default;
};

/// Uniform 20 Hz magnitude trace. Sample i sits at i / sample_rate seconds
/// after start_epoch_ms.
struct ClimbTrace {
    MagnitudeSeries magnitudes{{}};
    std::int64_t start_epoch_ms = 0;
    std::vector<GapFlag> gap_flags;

    std::size_t size() const noexcept { return magnitudes.size(); }
    double duration_s() const;
    double sample_time_s(std::size_t i) const;
    std::int64_t sample_time_ms(std::size_t i) const;
};

inline constexpr double kGapThresholdS = 0.25;

double magnitude(double ax, double ay, double az);

RawSampleLog parse_csv(std::string_view text);

// Drops samples before lead_s; remaining timestamps are kept as-is.
RawSampleLog trim_lead(const RawSampleLog& log, double lead_s);

ClimbTrace resample(const RawSampleLog& log, double sample_rate = kSampleRateHz);

struct SynthParams {
    double duration_s = 10.0;
    double jerk_rate = 0.0;       // transient events per second
    double jerk_amplitude = 1.5;  // g
    std::uint64_t seed = 0;
    std::int64_t start_epoch_ms = 1554034800000;
};

/// Deterministic stand-in for a live recording: a resting 1 g baseline with
/// small sensor noise, irregular 4-6 ms sampling, and Poisson-timed transient
/// spikes.
RawSampleLog synth_climb(const SynthParams& params);

}  // namespace climbtrace
