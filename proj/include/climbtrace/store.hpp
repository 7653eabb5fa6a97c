#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "climbtrace/ingest.hpp"
#include "climbtrace/videosync.hpp"

namespace climbtrace {

inline constexpr int kSchemaVersion = 1;

struct ClimbRecord {
    std::string id;
    std::string title;
    std::int64_t recorded_at_ms = 0;
    ClimbTrace trace;
    std::optional<VideoLink> video;
    std::int64_t crop_history = 0;
};

// Field equality; magnitudes compared bit-for-bit.
bool same_record(const ClimbRecord& a, const ClimbRecord& b);

// 16 hex digits derived from the recording time and the magnitudes.
std::string compute_id(std::int64_t recorded_at_ms, std::span<const double> magnitudes);

// "YYYY-MM-DD HH:MM:SS" in UTC.
std::string default_title(std::int64_t recorded_at_ms);

ClimbRecord make_record(ClimbTrace trace, std::optional<std::string> title = std::nullopt,
                        std::optional<std::int64_t> recorded_at_ms = std::nullopt);

// Keeps the samples at t <= cut_s; gap flags are clipped to the new end.
ClimbTrace truncate_trace(const ClimbTrace& trace, double cut_s);

nlohmann::json to_json(const ClimbRecord& record);
ClimbRecord record_from_json(const nlohmann::json& doc);
std::string serialize(const ClimbRecord& record);
ClimbRecord deserialize(std::string_view bytes);

// climb_<recorded_at_ms>_<first 8 id chars>.json
std::string record_filename(const ClimbRecord& record);

struct LoadIssue {
    std::filesystem::path file;
    std::string reason;
};

struct LoadResult {
    std::vector<ClimbRecord> records;
    std::vector<LoadIssue> skipped;
};

struct ImportResult {
    ClimbRecord record;
    bool created;
};

/// Directory-backed climb store with an in-memory cache.
///
/// The cache holds every record newest-first and is populated from disk on
/// first use. Mutations are serialized and update disk first, then publish a
/// new cache snapshot, so readers only ever see complete states.
class ClimbStore {
public:
    using Snapshot = std::shared_ptr<const std::vector<ClimbRecord>>;

    explicit ClimbStore(std::filesystem::path dir);

    const std::filesystem::path& dir() const noexcept { return dir_; }

    // Re-reads the directory and replaces the cache.
    LoadResult load_all();

    Snapshot snapshot() const;
    std::vector<ClimbRecord> list() const;

    // Accepts a full id or a unique prefix.
    std::string resolve(std::string_view id_or_prefix) const;
    ClimbRecord get(std::string_view id_or_prefix) const;

    std::filesystem::path save(ClimbRecord record);
    ImportResult import_climb(std::string_view bytes);
    void remove(std::string_view id_or_prefix);
    ClimbRecord crop(std::string_view id_or_prefix, double cut_s);
    ClimbRecord rename(std::string_view id_or_prefix, std::string_view title);
    std::string export_climb(std::string_view id_or_prefix) const;

    // Serialized read-modify-write of one record. The id is recomputed from
    // the edited content; a changed id replaces the old file.
    ClimbRecord update(std::string_view id_or_prefix,
                       const std::function<void(ClimbRecord&)>& edit);

private:
    void ensure_loaded() const;
    LoadResult read_directory() const;
    void publish(std::vector<ClimbRecord> records) const;
    std::filesystem::path write_file(const ClimbRecord& record);
    std::string resolve_in(const std::vector<ClimbRecord>& records,
                           std::string_view id_or_prefix) const;

    std::filesystem::path dir_;
    mutable std::mutex write_mutex_;
    mutable std::mutex snapshot_mutex_;
    mutable Snapshot cache_;
};

}  // namespace climbtrace
