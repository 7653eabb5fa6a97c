#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace climbtrace {

class ClimbStore;
struct ClimbRecord;

struct VideoLink {
    std::string filename;
    // Video time minus trace time at alignment: trace t=0 sits offset_ms
    // into the video. Negative when the video started after the climb.
    std::int64_t offset_ms = 0;
    double fps = 30.0;

    bool operator==(const VideoLink&) const = default;
};

// First run of exactly 13 digits in the name, read as epoch milliseconds.
std::optional<std::int64_t> parse_filename_epoch(std::string_view filename);

std::int64_t auto_offset(std::int64_t video_epoch_ms, std::int64_t climb_recorded_at_ms);

/// floor((t + offset) * fps), clamped below at 0 and, when the video length
/// is known, above at its last frame.
std::int64_t frame_for_time(double t_s, const VideoLink& link,
                            std::optional<std::int64_t> frame_count = std::nullopt);

// Offset used when a video is attached: explicit value, else the filename
// epoch relative to the climb, else 0.
std::int64_t resolve_offset(std::string_view filename, std::int64_t climb_recorded_at_ms,
                            std::optional<std::int64_t> explicit_offset_ms);

/// Links a video to a stored climb and persists it through the store.
ClimbRecord attach_video(ClimbStore& store, std::string_view id_or_prefix, std::string filename,
                         double fps, std::optional<std::int64_t> explicit_offset_ms = std::nullopt);

}  // namespace climbtrace
