#pragma once

#include <json.hpp>

#include "climbtrace/metrics.hpp"
#include "climbtrace/store.hpp"

namespace climbtrace {

// JSON shapes shared by the CLI and the review service, so both surfaces
// print the same numbers for the same climb.

SmoothnessReport analyze(const ClimbRecord& record);

nlohmann::json report_json(const SmoothnessReport& report);

// {id, title, recorded_at_ms, duration, display_score}
nlohmann::json summary_json(const ClimbRecord& record);

nlohmann::json video_json(const VideoLink& link);

// Climb file document plus its id.
nlohmann::json record_json(const ClimbRecord& record);

}  // namespace climbtrace
