#include "climbtrace/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "climbtrace/error.hpp"

namespace climbtrace {

namespace {

// Neumaier-compensated sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            compensation_ += (sum_ - t) + x;
        } else {
            compensation_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

void require_at_least(const MagnitudeSeries& series, std::size_t n, const char* op) {
    if (series.empty()) {
        throw Error(ErrorCode::EmptySeries, std::string(op) + " of an empty series");
    }
    if (series.size() < n) {
        throw Error(ErrorCode::DegenerateSeries,
                    std::string(op) + " needs at least " + std::to_string(n) + " samples");
    }
}

}  // namespace

MagnitudeSeries::MagnitudeSeries(std::vector<double> values, double sample_rate)
    : values_(std::move(values)), sample_rate_(sample_rate) {
    if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_)) {
        throw Error(ErrorCode::InvalidSeries, "sample rate must be positive");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
            throw Error(ErrorCode::InvalidSeries,
                        "value at index " + std::to_string(i) + " is negative or not finite");
        }
    }
}

MagnitudeSeries MagnitudeSeries::slice(std::size_t first, std::size_t count) const {
    first = std::min(first, values_.size());
    count = std::min(count, values_.size() - first);
    const auto begin = values_.begin() + static_cast<std::ptrdiff_t>(first);
    return MagnitudeSeries(std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(count)),
                           sample_rate_);
}

double mean(const MagnitudeSeries& series) {
    require_at_least(series, 1, "mean");
    CompensatedSum sum;
    for (double v : series.values()) sum.add(v);
    return sum.value() / static_cast<double>(series.size());
}

double variance(const MagnitudeSeries& series) {
    require_at_least(series, 2, "variance");
    // Welford's update; m2 accumulates the sum of squared deviations.
    double running_mean = 0.0;
    double m2 = 0.0;
    std::size_t n = 0;
    for (double v : series.values()) {
        ++n;
        const double delta = v - running_mean;
        running_mean += delta / static_cast<double>(n);
        m2 += delta * (v - running_mean);
    }
    return std::max(0.0, m2 / static_cast<double>(n - 1));
}

double mean_sq_diff(const MagnitudeSeries& series) {
    require_at_least(series, 2, "mean_sq_diff");
    const auto v = series.values();
    CompensatedSum sum;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const double d = v[i] - v[i + 1];
        sum.add(d * d);
    }
    return sum.value() / static_cast<double>(v.size());
}

double lag_autocorr(const MagnitudeSeries& series, std::size_t lag) {
    if (lag == 0) {
        throw Error(ErrorCode::InvalidArgument, "autocorrelation lag must be positive");
    }
    require_at_least(series, 1, "lag_autocorr");
    if (series.size() <= lag) {
        throw Error(ErrorCode::DegenerateSeries,
                    "lag " + std::to_string(lag) + " needs more than " + std::to_string(lag) +
                        " samples");
    }
    const double m = mean(series);
    const auto v = series.values();
    CompensatedSum numerator;
    CompensatedSum denominator;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double d = v[i] - m;
        denominator.add(d * d);
        if (i + lag < v.size()) numerator.add(d * (v[i + lag] - m));
    }
    if (!(denominator.value() > 0.0)) {
        throw Error(ErrorCode::DegenerateSeries, "autocorrelation of a constant series");
    }
    return numerator.value() / denominator.value();
}

std::int64_t display_score(double variance) {
    return static_cast<std::int64_t>(std::llround(100.0 * variance));
}

BasicStats basic_stats(const MagnitudeSeries& series) {
    require_at_least(series, 1, "basic_stats");
    const auto [lo, hi] = std::minmax_element(series.values().begin(), series.values().end());
    return {*lo, *hi, static_cast<double>(series.size() - 1) / series.sample_rate()};
}

std::vector<WindowScore> per_second_scores(const MagnitudeSeries& series) {
    require_at_least(series, 2, "per_second_scores");
    const auto window = static_cast<std::size_t>(std::llround(series.sample_rate()));
    const std::size_t min_tail = (window + 1) / 2;
    std::vector<WindowScore> scores;
    for (std::size_t start = 0, index = 0; start < series.size(); start += window, ++index) {
        const std::size_t count = std::min(window, series.size() - start);
        if (count < window && (count < min_tail || count < 2)) break;
        scores.push_back({index, display_score(variance(series.slice(start, count)))});
    }
    return scores;
}

SmoothnessReport analyze(const MagnitudeSeries& series) {
    require_at_least(series, 2, "analyze");
    SmoothnessReport report{};
    report.mean = mean(series);
    report.variance = variance(series);
    report.mean_sq_diff = mean_sq_diff(series);
    if (report.variance > 0.0) {
        try {
            report.lag1_autocorr = lag_autocorr(series, 1);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateSeries) throw;
        }
    }
    report.display_score = display_score(report.variance);
    const BasicStats stats = basic_stats(series);
    report.min = stats.min;
    report.max = stats.max;
    report.duration_s = stats.duration_s;
    report.per_second_scores = per_second_scores(series);
    return report;
}

std::string to_string(ClimbStyle style) {
    switch (style) {
    case ClimbStyle::Static: return "static";
    case ClimbStyle::Hybrid: return "hybrid";
    case ClimbStyle::Dynamic: return "dynamic";
    }
    return "unknown";
}

OrderingResult metric_style_ordering(std::span<const StyleRow> rows) {
    // Route order of first appearance keeps the violation list stable.
    std::vector<std::string> routes;
    std::map<std::string, std::vector<const StyleRow*>> by_route;
    for (const StyleRow& row : rows) {
        auto [it, inserted] = by_route.try_emplace(row.route);
        if (inserted) routes.push_back(row.route);
        it->second.push_back(&row);
    }

    OrderingResult result;
    for (const std::string& route : routes) {
        const auto& members = by_route[route];
        for (const StyleRow* lower : members) {
            for (const StyleRow* higher : members) {
                if (static_cast<int>(lower->style) >= static_cast<int>(higher->style)) continue;
                if (!(lower->value < higher->value)) {
                    result.holds = false;
                    result.violations.push_back(
                        {route, lower->style, lower->value, higher->style, higher->value});
                }
            }
        }
    }
    return result;
}

}  // namespace climbtrace
