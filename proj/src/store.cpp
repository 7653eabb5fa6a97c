#include "climbtrace/store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "climbtrace/error.hpp"

namespace climbtrace {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_mix(std::uint64_t& h, std::uint64_t word) {
    for (int i = 0; i < 8; ++i) {
        h ^= (word >> (8 * i)) & 0xffU;
        h *= kFnvPrime;
    }
}

bool newer_first(const ClimbRecord& a, const ClimbRecord& b) {
    if (a.recorded_at_ms != b.recorded_at_ms) return a.recorded_at_ms > b.recorded_at_ms;
    return a.id < b.id;
}

[[noreturn]] void malformed(const std::string& what) {
    throw Error(ErrorCode::MalformedClimbFile, what);
}

const json& require(const json& doc, const char* key) {
    const auto it = doc.find(key);
    if (it == doc.end()) malformed(std::string("missing field '") + key + "'");
    return *it;
}

std::int64_t require_int(const json& doc, const char* key) {
    const json& v = require(doc, key);
    if (!v.is_number_integer()) malformed(std::string("field '") + key + "' must be an integer");
    return v.get<std::int64_t>();
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::StorageReadFailure, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string trim_copy(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

}  // namespace

bool same_record(const ClimbRecord& a, const ClimbRecord& b) {
    const auto va = a.trace.magnitudes.values();
    const auto vb = b.trace.magnitudes.values();
    const bool same_values =
        va.size() == vb.size() &&
        std::equal(va.begin(), va.end(), vb.begin(), [](double x, double y) {
            return std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y);
        });
    return same_values && a.id == b.id && a.title == b.title &&
           a.recorded_at_ms == b.recorded_at_ms &&
           a.trace.start_epoch_ms == b.trace.start_epoch_ms &&
           a.trace.magnitudes.sample_rate() == b.trace.magnitudes.sample_rate() &&
           a.trace.gap_flags == b.trace.gap_flags && a.video == b.video &&
           a.crop_history == b.crop_history;
}

std::string compute_id(std::int64_t recorded_at_ms, std::span<const double> magnitudes) {
    std::uint64_t h = kFnvOffset;
    fnv_mix(h, static_cast<std::uint64_t>(recorded_at_ms));
    fnv_mix(h, magnitudes.size());
    for (double v : magnitudes) fnv_mix(h, std::bit_cast<std::uint64_t>(v));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string default_title(std::int64_t recorded_at_ms) {
    const std::time_t seconds = static_cast<std::time_t>(
        recorded_at_ms >= 0 ? recorded_at_ms / 1000 : (recorded_at_ms - 999) / 1000);
    std::tm tm{};
    gmtime_r(&seconds, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%d %H:%M:%S", &tm);
    return buf;
}

ClimbRecord make_record(ClimbTrace trace, std::optional<std::string> title,
                        std::optional<std::int64_t> recorded_at_ms) {
    ClimbRecord record;
    record.recorded_at_ms = recorded_at_ms.value_or(trace.start_epoch_ms);
    record.trace = std::move(trace);
    record.trace.start_epoch_ms = record.recorded_at_ms;
    const std::string trimmed = title ? trim_copy(*title) : std::string();
    record.title = trimmed.empty() ? default_title(record.recorded_at_ms) : trimmed;
    record.id = compute_id(record.recorded_at_ms, record.trace.magnitudes.values());
    return record;
}

ClimbTrace truncate_trace(const ClimbTrace& trace, double cut_s) {
    const double rate = trace.magnitudes.sample_rate();
    const double kept = std::floor(std::max(cut_s, 0.0) * rate + 1e-9) + 1.0;
    const auto count = std::min(static_cast<std::size_t>(kept), trace.size());
    ClimbTrace out;
    out.magnitudes = trace.magnitudes.slice(0, count);
    out.start_epoch_ms = trace.start_epoch_ms;
    const double end = out.duration_s();
    for (const GapFlag& gap : trace.gap_flags) {
        if (gap.start_s < end) out.gap_flags.push_back({gap.start_s, std::min(gap.end_s, end)});
    }
    return out;
}

json to_json(const ClimbRecord& record) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["title"] = record.title;
    doc["recorded_at_ms"] = record.recorded_at_ms;
    doc["sample_rate_hz"] = record.trace.magnitudes.sample_rate();
    json values = json::array();
    for (double v : record.trace.magnitudes.values()) values.push_back(v);
    doc["magnitudes"] = std::move(values);
    json gaps = json::array();
    for (const GapFlag& gap : record.trace.gap_flags) gaps.push_back({gap.start_s, gap.end_s});
    doc["gap_flags"] = std::move(gaps);
    if (record.video) {
        doc["video"] = {{"filename", record.video->filename},
                        {"offset_ms", record.video->offset_ms},
                        {"fps", record.video->fps}};
    } else {
        doc["video"] = nullptr;
    }
    doc["crop_history"] = record.crop_history;
    return doc;
}

ClimbRecord record_from_json(const json& doc) {
    if (!doc.is_object()) malformed("climb file must be a JSON object");
    const json& version = require(doc, "schema_version");
    if (!version.is_number_integer()) malformed("schema_version must be an integer");
    if (version.get<std::int64_t>() != kSchemaVersion) {
        throw Error(ErrorCode::UnsupportedSchemaVersion,
                    "schema_version " + version.dump() + " is not supported");
    }

    ClimbRecord record;
    const json& title = require(doc, "title");
    if (!title.is_string()) malformed("title must be a string");
    record.title = title.get<std::string>();
    record.recorded_at_ms = require_int(doc, "recorded_at_ms");

    const json& rate = require(doc, "sample_rate_hz");
    if (!rate.is_number() || rate.get<double>() != kSampleRateHz) {
        malformed("sample_rate_hz must be 20");
    }

    const json& values = require(doc, "magnitudes");
    if (!values.is_array() || values.size() < 2) malformed("magnitudes must hold >= 2 numbers");
    std::vector<double> magnitudes;
    magnitudes.reserve(values.size());
    for (const json& v : values) {
        if (!v.is_number()) malformed("magnitudes must be numbers");
        magnitudes.push_back(v.get<double>());
    }
    try {
        record.trace.magnitudes = MagnitudeSeries(std::move(magnitudes), kSampleRateHz);
    } catch (const Error& e) {
        malformed(e.what());
    }
    record.trace.start_epoch_ms = record.recorded_at_ms;

    const double duration = record.trace.duration_s();
    const json& gaps = require(doc, "gap_flags");
    if (!gaps.is_array()) malformed("gap_flags must be an array");
    for (const json& gap : gaps) {
        if (!gap.is_array() || gap.size() != 2 || !gap[0].is_number() || !gap[1].is_number()) {
            malformed("gap_flags entries must be [start, end] pairs");
        }
        const GapFlag flag{gap[0].get<double>(), gap[1].get<double>()};
        if (!(flag.start_s >= 0.0 && flag.start_s <= flag.end_s && flag.end_s <= duration)) {
            malformed("gap flag outside the trace");
        }
        record.trace.gap_flags.push_back(flag);
    }

    const json& video = require(doc, "video");
    if (!video.is_null()) {
        if (!video.is_object()) malformed("video must be an object or null");
        const json& filename = require(video, "filename");
        if (!filename.is_string() || filename.get<std::string>().empty()) {
            malformed("video.filename must be a non-empty string");
        }
        VideoLink link;
        link.filename = filename.get<std::string>();
        link.offset_ms = require_int(video, "offset_ms");
        if (video.contains("fps")) {
            if (!video["fps"].is_number() || !(video["fps"].get<double>() > 0.0)) {
                malformed("video.fps must be positive");
            }
            link.fps = video["fps"].get<double>();
        }
        record.video = std::move(link);
    }

    record.crop_history = require_int(doc, "crop_history");
    if (record.crop_history < 0) malformed("crop_history must be non-negative");
    record.id = compute_id(record.recorded_at_ms, record.trace.magnitudes.values());
    return record;
}

std::string serialize(const ClimbRecord& record) { return to_json(record).dump(2) + "\n"; }

ClimbRecord deserialize(std::string_view bytes) {
    json doc;
    try {
        doc = json::parse(bytes.begin(), bytes.end());
    } catch (const json::exception& e) {
        malformed(std::string("invalid JSON: ") + e.what());
    }
    return record_from_json(doc);
}

std::string record_filename(const ClimbRecord& record) {
    return "climb_" + std::to_string(record.recorded_at_ms) + "_" + record.id.substr(0, 8) +
           ".json";
}

ClimbStore::ClimbStore(fs::path dir) : dir_(std::move(dir)) {}

LoadResult ClimbStore::read_directory() const {
    LoadResult result;
    std::error_code ec;
    if (!fs::exists(dir_, ec)) return result;
    if (!fs::is_directory(dir_, ec)) {
        throw Error(ErrorCode::StorageReadFailure, dir_.string() + " is not a directory");
    }
    std::vector<fs::path> files;
    for (fs::directory_iterator it(dir_, ec), end; !ec && it != end; it.increment(ec)) {
        const fs::path& p = it->path();
        const std::string name = p.filename().string();
        if (it->is_regular_file() && name.starts_with("climb_") && p.extension() == ".json") {
            files.push_back(p);
        }
    }
    if (ec) throw Error(ErrorCode::StorageReadFailure, "cannot list " + dir_.string());
    std::sort(files.begin(), files.end());

    for (const fs::path& file : files) {
        try {
            ClimbRecord record = deserialize(read_file(file));
            const bool duplicate =
                std::any_of(result.records.begin(), result.records.end(),
                            [&](const ClimbRecord& r) { return r.id == record.id; });
            if (duplicate) {
                result.skipped.push_back({file, "duplicate of climb " + record.id});
                continue;
            }
            result.records.push_back(std::move(record));
        } catch (const Error& e) {
            result.skipped.push_back({file, e.what()});
        }
    }
    std::sort(result.records.begin(), result.records.end(), newer_first);
    return result;
}

void ClimbStore::publish(std::vector<ClimbRecord> records) const {
    std::sort(records.begin(), records.end(), newer_first);
    auto next = std::make_shared<const std::vector<ClimbRecord>>(std::move(records));
    std::lock_guard lock(snapshot_mutex_);
    cache_ = std::move(next);
}

void ClimbStore::ensure_loaded() const {
    {
        std::lock_guard lock(snapshot_mutex_);
        if (cache_) return;
    }
    std::lock_guard write_lock(write_mutex_);
    {
        std::lock_guard lock(snapshot_mutex_);
        if (cache_) return;
    }
    publish(read_directory().records);
}

LoadResult ClimbStore::load_all() {
    std::lock_guard write_lock(write_mutex_);
    LoadResult result = read_directory();
    publish(result.records);
    return result;
}

ClimbStore::Snapshot ClimbStore::snapshot() const {
    ensure_loaded();
    std::lock_guard lock(snapshot_mutex_);
    return cache_;
}

std::vector<ClimbRecord> ClimbStore::list() const { return *snapshot(); }

std::string ClimbStore::resolve_in(const std::vector<ClimbRecord>& records,
                                   std::string_view id_or_prefix) const {
    const std::string key = trim_copy(id_or_prefix);
    if (key.empty()) throw Error(ErrorCode::UnknownClimb, "empty climb id");
    const ClimbRecord* match = nullptr;
    for (const ClimbRecord& r : records) {
        if (r.id == key) return r.id;
        if (r.id.starts_with(key)) {
            if (match) throw Error(ErrorCode::AmbiguousClimb, "'" + key + "' matches several climbs");
            match = &r;
        }
    }
    if (!match) throw Error(ErrorCode::UnknownClimb, "no climb '" + key + "'");
    return match->id;
}

std::string ClimbStore::resolve(std::string_view id_or_prefix) const {
    return resolve_in(*snapshot(), id_or_prefix);
}

ClimbRecord ClimbStore::get(std::string_view id_or_prefix) const {
    const Snapshot snap = snapshot();
    const std::string id = resolve_in(*snap, id_or_prefix);
    return *std::find_if(snap->begin(), snap->end(),
                         [&](const ClimbRecord& r) { return r.id == id; });
}

fs::path ClimbStore::write_file(const ClimbRecord& record) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::StorageWriteFailure, "cannot create " + dir_.string());
    const fs::path target = dir_ / record_filename(record);
    const fs::path temp = dir_ / ("." + record_filename(record) + ".tmp");
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        out << serialize(record);
        out.flush();
        if (!out) {
            fs::remove(temp, ec);
            throw Error(ErrorCode::StorageWriteFailure, "cannot write " + temp.string());
        }
    }
    fs::rename(temp, target, ec);
    if (ec) {
        fs::remove(temp, ec);
        throw Error(ErrorCode::StorageWriteFailure, "cannot replace " + target.string());
    }
    return target;
}

fs::path ClimbStore::save(ClimbRecord record) {
    if (record.trace.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "a climb needs at least 2 samples");
    }
    record.id = compute_id(record.recorded_at_ms, record.trace.magnitudes.values());
    record.trace.start_epoch_ms = record.recorded_at_ms;
    if (trim_copy(record.title).empty()) record.title = default_title(record.recorded_at_ms);

    ensure_loaded();
    std::lock_guard write_lock(write_mutex_);
    const fs::path path = write_file(record);
    std::vector<ClimbRecord> next = *cache_;
    std::erase_if(next, [&](const ClimbRecord& r) { return r.id == record.id; });
    next.push_back(std::move(record));
    publish(std::move(next));
    return path;
}

ImportResult ClimbStore::import_climb(std::string_view bytes) {
    ClimbRecord record = deserialize(bytes);
    ensure_loaded();
    {
        const Snapshot snap = snapshot();
        for (const ClimbRecord& r : *snap) {
            if (r.id == record.id) return {r, false};
        }
    }
    save(record);
    return {std::move(record), true};
}

void ClimbStore::remove(std::string_view id_or_prefix) {
    ensure_loaded();
    std::lock_guard write_lock(write_mutex_);
    const std::string id = resolve_in(*cache_, id_or_prefix);
    std::vector<ClimbRecord> next = *cache_;
    const auto it = std::find_if(next.begin(), next.end(),
                                 [&](const ClimbRecord& r) { return r.id == id; });
    std::error_code ec;
    fs::remove(dir_ / record_filename(*it), ec);
    if (ec) throw Error(ErrorCode::StorageWriteFailure, "cannot delete climb " + id);
    next.erase(it);
    publish(std::move(next));
}

ClimbRecord ClimbStore::update(std::string_view id_or_prefix,
                               const std::function<void(ClimbRecord&)>& edit) {
    ensure_loaded();
    std::lock_guard write_lock(write_mutex_);
    const std::string id = resolve_in(*cache_, id_or_prefix);
    std::vector<ClimbRecord> next = *cache_;
    const auto it = std::find_if(next.begin(), next.end(),
                                 [&](const ClimbRecord& r) { return r.id == id; });
    ClimbRecord edited = *it;
    edit(edited);
    edited.id = compute_id(edited.recorded_at_ms, edited.trace.magnitudes.values());

    const fs::path old_file = dir_ / record_filename(*it);
    write_file(edited);
    if (edited.id != id) {
        std::error_code ec;
        fs::remove(old_file, ec);
        if (ec) throw Error(ErrorCode::StorageWriteFailure, "cannot remove " + old_file.string());
    }
    next.erase(it);
    std::erase_if(next, [&](const ClimbRecord& r) { return r.id == edited.id; });
    next.push_back(edited);
    publish(std::move(next));
    return edited;
}

ClimbRecord ClimbStore::crop(std::string_view id_or_prefix, double cut_s) {
    return update(id_or_prefix, [cut_s](ClimbRecord& record) {
        const double duration = record.trace.duration_s();
        const double min_cut = 1.0 / record.trace.magnitudes.sample_rate();
        if (!std::isfinite(cut_s) || !(cut_s > 0.0) || !(cut_s < duration) ||
            cut_s + 1e-9 < min_cut) {
            throw Error(ErrorCode::CutOutOfRange,
                        "cut at " + std::to_string(cut_s) + " s is outside (0, " +
                            std::to_string(duration) + ") s or leaves fewer than 2 samples");
        }
        record.trace = truncate_trace(record.trace, cut_s);
        ++record.crop_history;
    });
}

ClimbRecord ClimbStore::rename(std::string_view id_or_prefix, std::string_view title) {
    std::string trimmed = trim_copy(title);
    if (trimmed.empty()) throw Error(ErrorCode::EmptyTitle, "title is empty");
    return update(id_or_prefix, [&](ClimbRecord& record) { record.title = trimmed; });
}

std::string ClimbStore::export_climb(std::string_view id_or_prefix) const {
    return serialize(get(id_or_prefix));
}

}  // namespace climbtrace
