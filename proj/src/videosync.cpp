#include "climbtrace/videosync.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "climbtrace/error.hpp"
#include "climbtrace/store.hpp"

namespace climbtrace {

namespace {
constexpr std::size_t kEpochDigits = 13;
}

std::optional<std::int64_t> parse_filename_epoch(std::string_view filename) {
    std::size_t i = 0;
    while (i < filename.size()) {
        if (!std::isdigit(static_cast<unsigned char>(filename[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < filename.size() && std::isdigit(static_cast<unsigned char>(filename[j]))) ++j;
        if (j - i == kEpochDigits) {
            std::int64_t value = 0;
            std::from_chars(filename.data() + i, filename.data() + j, value);
            return value;
        }
        i = j;
    }
    return std::nullopt;
}

std::int64_t auto_offset(std::int64_t video_epoch_ms, std::int64_t climb_recorded_at_ms) {
    return climb_recorded_at_ms - video_epoch_ms;
}

std::int64_t frame_for_time(double t_s, const VideoLink& link,
                            std::optional<std::int64_t> frame_count) {
    if (!(link.fps > 0.0)) throw Error(ErrorCode::InvalidArgument, "fps must be positive");
    const double video_s = t_s + static_cast<double>(link.offset_ms) / 1000.0;
    // The epsilon keeps exact frame boundaries (e.g. 3.5 s * 30) from
    // rounding down a frame.
    const double raw = std::floor(video_s * link.fps + 1e-9);
    std::int64_t frame = raw <= 0.0 ? 0 : static_cast<std::int64_t>(raw);
    if (frame_count && *frame_count > 0) frame = std::min(frame, *frame_count - 1);
    return frame;
}

std::int64_t resolve_offset(std::string_view filename, std::int64_t climb_recorded_at_ms,
                            std::optional<std::int64_t> explicit_offset_ms) {
    if (explicit_offset_ms) return *explicit_offset_ms;
    if (const auto epoch = parse_filename_epoch(filename)) {
        return auto_offset(*epoch, climb_recorded_at_ms);
    }
    return 0;
}

ClimbRecord attach_video(ClimbStore& store, std::string_view id_or_prefix, std::string filename,
                         double fps, std::optional<std::int64_t> explicit_offset_ms) {
    if (filename.empty()) throw Error(ErrorCode::InvalidArgument, "video filename is empty");
    if (!(fps > 0.0) || !std::isfinite(fps)) {
        throw Error(ErrorCode::InvalidArgument, "fps must be positive");
    }
    return store.update(id_or_prefix, [&](ClimbRecord& record) {
        record.video = VideoLink{
            filename, resolve_offset(filename, record.recorded_at_ms, explicit_offset_ms), fps};
    });
}

}  // namespace climbtrace
