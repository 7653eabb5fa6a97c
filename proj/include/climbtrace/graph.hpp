#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "climbtrace/ingest.hpp"
#include "climbtrace/metrics.hpp"

namespace climbtrace {

enum class GraphMode { Thumbnail, Detail };

inline constexpr double kDetailPxPerSecond = 100.0;

struct Box {
    int width = 300;
    int height = 150;
};

struct GraphPoint {
    double x;
    double y;
};

struct ShadeBand {
    std::size_t window_index;
    double darkness;  // [0, 1]
    std::int64_t score;
    double x0;
    double x1;
};

struct AxisTick {
    double x;
    int second;
};

struct GraphSpec {
    GraphMode mode = GraphMode::Detail;
    int width = 0;
    int height = 0;
    double px_per_second = 0.0;
    double y_max = 0.0;
    std::vector<GraphPoint> points;
    std::vector<ShadeBand> shading;
    std::vector<AxisTick> ticks;  // detail mode only, one per second
};

/// Lays the trace out in screen space (y grows downward).
///
/// Detail mode places samples at 100 px per second of trace time and sizes
/// the canvas to ceil(100 * duration); only box.height is used. Thumbnail
/// mode stretches the samples across exactly box.width. In both modes y
/// maps [0, max(trace)] onto [height, 0].
GraphSpec layout(const ClimbTrace& trace, GraphMode mode, Box box);

// darkness = min(score / 100, 1) per window.
std::vector<double> shade(std::span<const WindowScore> scores);

struct RenderOptions {
    bool score_labels = false;
};

std::string render_svg(const GraphSpec& spec, RenderOptions options = {});

nlohmann::json to_json(const GraphSpec& spec);

std::string to_string(GraphMode mode);
GraphMode parse_graph_mode(std::string_view text);

}  // namespace climbtrace
