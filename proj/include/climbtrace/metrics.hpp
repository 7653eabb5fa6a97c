#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace climbtrace {

inline constexpr double kSampleRateHz = 20.0;

/// Acceleration magnitudes (multiples of g) on a uniform time grid.
///
/// Construction validates that every value is finite and non-negative and
/// that the rate is positive; a MagnitudeSeries is immutable afterwards.
class MagnitudeSeries {
public:
    explicit MagnitudeSeries(std::vector<double> values, double sample_rate = kSampleRateHz);

    std::span<const double> values() const noexcept { return values_; }
    double sample_rate() const noexcept { return sample_rate_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    // Copy of samples [first, first + count).
    MagnitudeSeries slice(std::size_t first, std::size_t count) const;

private:
    std::vector<double> values_;
    double sample_rate_;
};

double mean(const MagnitudeSeries& series);

// Sample variance with an N-1 divisor.
double variance(const MagnitudeSeries& series);

// Sum of squared successive differences divided by N (not N-1).
double mean_sq_diff(const MagnitudeSeries& series);

// Lag-k autocorrelation: numerator over i < N-k, denominator over all N.
double lag_autocorr(const MagnitudeSeries& series, std::size_t lag = 1);

// round(100 * variance), half away from zero.
std::int64_t display_score(double variance);

struct BasicStats {
    double min;
    double max;
    double duration_s;
};

BasicStats basic_stats(const MagnitudeSeries& series);

struct WindowScore {
    std::size_t window_index;
    std::int64_t score;

    bool operator==(const WindowScore&) const = default;
};

/// Splits the series into consecutive one-second windows and scores each
/// one with display_score(variance(window)). A trailing partial window is
/// kept only when it holds at least half a second of samples.
std::vector<WindowScore> per_second_scores(const MagnitudeSeries& series);

struct SmoothnessReport {
    double mean;
    double variance;
    double mean_sq_diff;
    std::optional<double> lag1_autocorr;  // absent for constant series
    std::int64_t display_score;
    double min;
    double max;
    double duration_s;
    std::vector<WindowScore> per_second_scores;
};

SmoothnessReport analyze(const MagnitudeSeries& series);

enum class ClimbStyle { Static, Hybrid, Dynamic };

struct StyleRow {
    std::string route;
    ClimbStyle style;
    double value;
};

struct OrderingViolation {
    std::string route;
    ClimbStyle lower_style;   // style expected to score lower
    double lower_value;
    ClimbStyle higher_style;  // style expected to score higher
    double higher_value;
};

struct OrderingResult {
    bool holds = true;
    std::vector<OrderingViolation> violations;
};

/// Checks that, within every route, each static value is strictly below each
/// hybrid value, which is strictly below each dynamic value. Only styles that
/// are present in a route are compared.
OrderingResult metric_style_ordering(std::span<const StyleRow> rows);

std::string to_string(ClimbStyle style);

}  // namespace climbtrace
