#include "climbtrace/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>

#include "climbtrace/error.hpp"

namespace climbtrace {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

std::optional<double> parse_number(std::string_view field) {
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end || field.empty() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

enum class Layout { Axes, Magnitude };

}  // namespace

double magnitude(double ax, double ay, double az) {
    if (!std::isfinite(ax) || !std::isfinite(ay) || !std::isfinite(az)) {
        throw Error(ErrorCode::NonFiniteInput, "accelerometer axes must be finite");
    }
    return std::hypot(ax, ay, az);
}

double ClimbTrace::duration_s() const {
    if (magnitudes.empty()) return 0.0;
    return static_cast<double>(magnitudes.size() - 1) / magnitudes.sample_rate();
}

double ClimbTrace::sample_time_s(std::size_t i) const {
    return static_cast<double>(i) / magnitudes.sample_rate();
}

std::int64_t ClimbTrace::sample_time_ms(std::size_t i) const {
    return std::llround(static_cast<double>(i) * 1000.0 / magnitudes.sample_rate());
}

RawSampleLog parse_csv(std::string_view text) {
    RawSampleLog log;
    std::optional<Layout> layout;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto newline = text.find('\n', pos);
        if (newline == std::string_view::npos) newline = text.size();
        const std::string_view line = trim(text.substr(pos, newline - pos));
        pos = newline + 1;
        ++line_no;
        if (line.empty()) continue;

        auto fields = split_fields(line);
        if (!layout) {
            std::vector<std::string> names;
            for (auto f : fields) {
                std::string name(f);
                std::transform(name.begin(), name.end(), name.begin(),
                               [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
                names.push_back(std::move(name));
            }
            if (names == std::vector<std::string>{"t", "ax", "ay", "az"}) {
                layout = Layout::Axes;
            } else if (names == std::vector<std::string>{"t", "mag"}) {
                layout = Layout::Magnitude;
            } else {
                throw Error(ErrorCode::UnknownHeader,
                            "expected 't,ax,ay,az' or 't,mag', got '" + std::string(line) + "'");
            }
            continue;
        }

        const std::size_t expected = *layout == Layout::Axes ? 4 : 2;
        if (fields.size() != expected) {
            throw Error(ErrorCode::MalformedRow,
                        "line " + std::to_string(line_no) + ": expected " +
                            std::to_string(expected) + " fields",
                        line_no);
        }
        std::vector<double> numbers;
        for (auto f : fields) {
            const auto value = parse_number(f);
            if (!value) {
                throw Error(ErrorCode::MalformedRow,
                            "line " + std::to_string(line_no) + ": '" + std::string(f) +
                                "' is not a finite number",
                            line_no);
            }
            numbers.push_back(*value);
        }
        RawSample sample{numbers[0], 0.0, std::nullopt};
        if (*layout == Layout::Axes) {
            sample.axes = std::array<double, 3>{numbers[1], numbers[2], numbers[3]};
            sample.magnitude = magnitude(numbers[1], numbers[2], numbers[3]);
        } else {
            if (numbers[1] < 0.0) {
                throw Error(ErrorCode::MalformedRow,
                            "line " + std::to_string(line_no) + ": negative magnitude", line_no);
            }
            sample.magnitude = numbers[1];
        }
        log.samples.push_back(sample);
    }
    if (!layout) throw Error(ErrorCode::UnknownHeader, "missing header row");
    return log;
}

RawSampleLog trim_lead(const RawSampleLog& log, double lead_s) {
    if (!(lead_s > 0.0) || log.samples.empty()) return log;
    RawSampleLog out;
    out.source_epoch_ms = log.source_epoch_ms;
    const double cutoff = log.samples.front().t + lead_s;
    for (const auto& s : log.samples) {
        if (s.t >= cutoff) out.samples.push_back(s);
    }
    return out;
}

ClimbTrace resample(const RawSampleLog& log, double sample_rate) {
    const auto& raw = log.samples;
    if (raw.size() < 2) {
        throw Error(ErrorCode::TooFewSamples, "resampling needs at least 2 raw samples");
    }
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!std::isfinite(raw[i].t) || !std::isfinite(raw[i].magnitude) || raw[i].magnitude < 0) {
            throw Error(ErrorCode::NonFiniteInput,
                        "raw sample " + std::to_string(i) + " is not finite");
        }
        if (i > 0 && !(raw[i].t > raw[i - 1].t)) {
            throw Error(ErrorCode::NonMonotonicTimestamps,
                        "timestamp at sample " + std::to_string(i) + " does not increase");
        }
    }

    const double t0 = raw.front().t;
    const double span = raw.back().t - t0;
    // Tolerance absorbs grid points that land on the last timestamp up to rounding.
    const auto count = static_cast<std::size_t>(std::floor(span * sample_rate + 1e-9)) + 1;

    std::vector<double> values;
    values.reserve(count);
    std::size_t seg = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const double t = t0 + static_cast<double>(k) / sample_rate;
        while (seg + 2 < raw.size() && raw[seg + 1].t <= t) ++seg;
        const RawSample& a = raw[seg];
        const RawSample& b = raw[seg + 1];
        double v;
        if (t <= a.t) {
            v = a.magnitude;
        } else if (t >= b.t) {
            v = b.magnitude;
        } else {
            v = a.magnitude + (b.magnitude - a.magnitude) * ((t - a.t) / (b.t - a.t));
        }
        values.push_back(std::max(0.0, v));
    }

    ClimbTrace trace;
    trace.magnitudes = MagnitudeSeries(std::move(values), sample_rate);
    trace.start_epoch_ms = log.source_epoch_ms + std::llround(t0 * 1000.0);
    const double duration = trace.duration_s();
    for (std::size_t i = 0; i + 1 < raw.size(); ++i) {
        if (raw[i + 1].t - raw[i].t > kGapThresholdS) {
            trace.gap_flags.push_back(
                {std::min(raw[i].t - t0, duration), std::min(raw[i + 1].t - t0, duration)});
        }
    }
    return trace;
}

RawSampleLog synth_climb(const SynthParams& params) {
    if (!(params.duration_s > 0.0) || !(params.jerk_rate >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "synth_climb needs duration > 0 and jerk_rate >= 0");
    }
    constexpr double kNoiseSd = 0.03;
    constexpr double kPulseSigmaS = 0.06;

    // Independent streams so that seed-matched logs share timing and noise
    // regardless of jerk_rate.
    std::mt19937_64 sampling_rng(params.seed);
    std::mt19937_64 event_rng(params.seed ^ 0x9e3779b97f4a7c15ULL);

    struct Event {
        double t;
        double amplitude;
        std::array<double, 3> dir;
    };
    std::vector<Event> events;
    if (params.jerk_rate > 0.0) {
        std::exponential_distribution<double> gap(params.jerk_rate);
        std::uniform_real_distribution<double> scale(0.6, 1.0);
        std::normal_distribution<double> axis(0.0, 1.0);
        for (double t = gap(event_rng); t < params.duration_s; t += gap(event_rng)) {
            std::array<double, 3> d{axis(event_rng), axis(event_rng), axis(event_rng)};
            const double norm = std::max(std::hypot(d[0], d[1], d[2]), 1e-12);
            for (double& c : d) c /= norm;
            events.push_back({t, params.jerk_amplitude * scale(event_rng), d});
        }
    }

    RawSampleLog log;
    log.source_epoch_ms = params.start_epoch_ms;
    std::uniform_real_distribution<double> step(0.004, 0.006);
    std::normal_distribution<double> noise(0.0, kNoiseSd);
    std::size_t first_event = 0;
    for (double t = 0.0; t <= params.duration_s; t += step(sampling_rng)) {
        std::array<double, 3> a{noise(sampling_rng), noise(sampling_rng), 1.0 + noise(sampling_rng)};
        while (first_event < events.size() && events[first_event].t < t - 5 * kPulseSigmaS) {
            ++first_event;
        }
        for (std::size_t e = first_event; e < events.size() && events[e].t <= t + 5 * kPulseSigmaS;
             ++e) {
            const double z = (t - events[e].t) / kPulseSigmaS;
            const double w = events[e].amplitude * std::exp(-0.5 * z * z);
            for (int c = 0; c < 3; ++c) a[c] += w * events[e].dir[c];
        }
        log.samples.push_back({t, magnitude(a[0], a[1], a[2]), a});
    }
    return log;
}

}  // namespace climbtrace
