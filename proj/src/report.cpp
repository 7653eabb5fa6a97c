#include "climbtrace/report.hpp"

namespace climbtrace {

SmoothnessReport analyze(const ClimbRecord& record) { return analyze(record.trace.magnitudes); }

nlohmann::json report_json(const SmoothnessReport& report) {
    nlohmann::json doc;
    doc["mean"] = report.mean;
    doc["variance"] = report.variance;
    doc["mean_sq_diff"] = report.mean_sq_diff;
    doc["lag1_autocorr"] =
        report.lag1_autocorr ? nlohmann::json(*report.lag1_autocorr) : nlohmann::json(nullptr);
    doc["display_score"] = report.display_score;
    doc["min"] = report.min;
    doc["max"] = report.max;
    doc["duration"] = report.duration_s;
    auto windows = nlohmann::json::array();
    for (const WindowScore& w : report.per_second_scores) {
        windows.push_back({{"window_index", w.window_index}, {"score", w.score}});
    }
    doc["per_second_scores"] = std::move(windows);
    return doc;
}

nlohmann::json summary_json(const ClimbRecord& record) {
    return {{"id", record.id},
            {"title", record.title},
            {"recorded_at_ms", record.recorded_at_ms},
            {"duration", record.trace.duration_s()},
            {"display_score", analyze(record).display_score}};
}

nlohmann::json video_json(const VideoLink& link) {
    return {{"filename", link.filename}, {"offset_ms", link.offset_ms}, {"fps", link.fps}};
}

nlohmann::json record_json(const ClimbRecord& record) {
    nlohmann::json doc = to_json(record);
    doc["id"] = record.id;
    return doc;
}

}  // namespace climbtrace
