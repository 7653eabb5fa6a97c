#include "climbtrace/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "climbtrace/error.hpp"

namespace climbtrace {

namespace {

constexpr double kDarknessSaturation = 100.0;

// Fixed two-decimal rendering with trailing zeros dropped.
std::string num(double v) {
    if (std::abs(v) < 0.005) v = 0.0;
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s(buf);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

}  // namespace

std::vector<double> shade(std::span<const WindowScore> scores) {
    std::vector<double> darkness;
    darkness.reserve(scores.size());
    for (const WindowScore& s : scores) {
        const double d = static_cast<double>(s.score) / kDarknessSaturation;
        darkness.push_back(std::clamp(d, 0.0, 1.0));
    }
    return darkness;
}

GraphSpec layout(const ClimbTrace& trace, GraphMode mode, Box box) {
    if (trace.size() == 0) throw Error(ErrorCode::EmptyTrace, "cannot lay out an empty trace");
    if (box.width <= 0 || box.height <= 0) {
        throw Error(ErrorCode::InvalidArgument, "graph box must be positive");
    }
    const auto values = trace.magnitudes.values();
    const double rate = trace.magnitudes.sample_rate();
    const std::size_t n = values.size();
    const double duration = trace.duration_s();

    GraphSpec spec;
    spec.mode = mode;
    spec.height = box.height;
    spec.y_max = *std::max_element(values.begin(), values.end());
    if (mode == GraphMode::Detail) {
        spec.px_per_second = kDetailPxPerSecond;
        spec.width = std::max(1, static_cast<int>(std::ceil(kDetailPxPerSecond * duration - 1e-9)));
    } else {
        spec.width = box.width;
        spec.px_per_second = duration > 0.0 ? box.width / duration : 0.0;
    }

    spec.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x;
        if (mode == GraphMode::Detail) {
            x = kDetailPxPerSecond * static_cast<double>(i) / rate;
        } else {
            x = n > 1 ? static_cast<double>(box.width) * static_cast<double>(i) /
                            static_cast<double>(n - 1)
                      : 0.0;
        }
        const double y = spec.y_max > 0.0
                             ? spec.height - values[i] / spec.y_max * spec.height
                             : static_cast<double>(spec.height);
        spec.points.push_back({x, y});
    }

    if (n >= 2) {
        const auto scores = per_second_scores(trace.magnitudes);
        const auto darkness = shade(scores);
        for (std::size_t k = 0; k < scores.size(); ++k) {
            const double start = static_cast<double>(scores[k].window_index);
            const double x0 = std::min(start * spec.px_per_second, double(spec.width));
            const double x1 = std::min((start + 1.0) * spec.px_per_second, double(spec.width));
            spec.shading.push_back({scores[k].window_index, darkness[k], scores[k].score, x0, x1});
        }
    }

    if (mode == GraphMode::Detail) {
        for (int s = 0; s <= static_cast<int>(std::floor(duration + 1e-9)); ++s) {
            spec.ticks.push_back({kDetailPxPerSecond * s, s});
        }
    }
    return spec;
}

std::string render_svg(const GraphSpec& spec, RenderOptions options) {
    const std::string w = std::to_string(spec.width);
    const std::string h = std::to_string(spec.height);
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + w +
           "\" height=\"" + h + "\" viewBox=\"0 0 " + w + " " + h + "\">\n";

    for (const ShadeBand& band : spec.shading) {
        out += "  <rect x=\"" + num(band.x0) + "\" y=\"0\" width=\"" + num(band.x1 - band.x0) +
               "\" height=\"" + h + "\" fill=\"#000000\" fill-opacity=\"" + num(band.darkness) +
               "\"/>\n";
    }

    if (!spec.ticks.empty()) {
        out += "  <g stroke=\"#888888\" stroke-width=\"1\">\n";
        for (const AxisTick& tick : spec.ticks) {
            out += "    <line x1=\"" + num(tick.x) + "\" y1=\"" + h + "\" x2=\"" + num(tick.x) +
                   "\" y2=\"" + std::to_string(spec.height - 6) + "\"/>\n";
        }
        out += "  </g>\n";
        out += "  <g font-family=\"sans-serif\" font-size=\"10\" fill=\"#444444\">\n";
        for (const AxisTick& tick : spec.ticks) {
            out += "    <text x=\"" + num(tick.x + 2) + "\" y=\"" +
                   std::to_string(spec.height - 8) + "\">" + std::to_string(tick.second) +
                   "s</text>\n";
        }
        out += "  </g>\n";
    }

    out += "  <polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < spec.points.size(); ++i) {
        if (i) out += ' ';
        out += num(spec.points[i].x) + "," + num(spec.points[i].y);
    }
    out += "\"/>\n";

    if (options.score_labels && !spec.shading.empty()) {
        out += "  <g font-family=\"sans-serif\" font-size=\"8\" fill=\"#c03000\">\n";
        for (const ShadeBand& band : spec.shading) {
            out += "    <text x=\"" + num(band.x0 + 2) + "\" y=\"10\">" +
                   std::to_string(band.score) + "</text>\n";
        }
        out += "  </g>\n";
    }
    out += "</svg>\n";
    return out;
}

nlohmann::json to_json(const GraphSpec& spec) {
    nlohmann::json doc;
    doc["mode"] = to_string(spec.mode);
    doc["width"] = spec.width;
    doc["height"] = spec.height;
    doc["px_per_second"] = spec.px_per_second;
    doc["y_max"] = spec.y_max;
    auto points = nlohmann::json::array();
    for (const GraphPoint& p : spec.points) points.push_back({p.x, p.y});
    doc["points"] = std::move(points);
    auto shading = nlohmann::json::array();
    for (const ShadeBand& b : spec.shading) {
        shading.push_back({{"window_index", b.window_index},
                           {"darkness", b.darkness},
                           {"score", b.score},
                           {"x0", b.x0},
                           {"x1", b.x1}});
    }
    doc["shading"] = std::move(shading);
    auto ticks = nlohmann::json::array();
    for (const AxisTick& t : spec.ticks) ticks.push_back({{"x", t.x}, {"second", t.second}});
    doc["ticks"] = std::move(ticks);
    return doc;
}

std::string to_string(GraphMode mode) {
    return mode == GraphMode::Detail ? "detail" : "thumbnail";
}

GraphMode parse_graph_mode(std::string_view text) {
    if (text == "detail") return GraphMode::Detail;
    if (text == "thumbnail") return GraphMode::Thumbnail;
    throw Error(ErrorCode::InvalidArgument, "graph mode must be 'detail' or 'thumbnail'");
}

}  // namespace climbtrace
