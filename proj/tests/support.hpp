#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "climbtrace/ingest.hpp"
#include "climbtrace/store.hpp"

namespace climbtrace::testing {

// Removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() /
                ("climbtrace_test_" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

// Naive references, written straight from the textbook formulas with plain
// loops. Kept independent of the library's summation and update schemes.
namespace oracle {

inline double mean(const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i];
    return s / static_cast<double>(x.size());
}

inline double variance(const std::vector<double>& x) {
    const double m = mean(x);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - m) * (x[i] - m);
    return s / static_cast<double>(x.size() - 1);
}

inline double mean_sq_diff(const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += (x[i - 1] - x[i]) * (x[i - 1] - x[i]);
    return s / static_cast<double>(x.size());
}

inline double lag_autocorr(const std::vector<double>& x, std::size_t k) {
    const double m = mean(x);
    double num = 0.0;
    for (std::size_t i = 0; i + k < x.size(); ++i) num += (x[i] - m) * (x[i + k] - m);
    double den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) den += (x[i] - m) * (x[i] - m);
    return num / den;
}

}  // namespace oracle

inline double relative_error(double actual, double expected) {
    if (actual == expected) return 0.0;
    return std::abs(actual - expected) / std::abs(expected);
}

inline std::vector<double> random_series(std::mt19937_64& rng, std::size_t n, double hi = 15.0) {
    std::uniform_real_distribution<double> value(0.0, hi);
    std::vector<double> x(n);
    for (double& v : x) v = value(rng);
    return x;
}

// Uniform 20 Hz trace from explicit magnitudes.
inline ClimbTrace make_trace(std::vector<double> values, std::int64_t start_epoch_ms = 0) {
    ClimbTrace trace;
    trace.magnitudes = MagnitudeSeries(std::move(values));
    trace.start_epoch_ms = start_epoch_ms;
    return trace;
}

inline ClimbRecord synthetic_record(std::uint64_t seed, double duration_s, double jerk_rate,
                                    std::int64_t recorded_at_ms) {
    SynthParams p;
    p.seed = seed;
    p.duration_s = duration_s;
    p.jerk_rate = jerk_rate;
    p.start_epoch_ms = recorded_at_ms;
    return make_record(resample(synth_climb(p)));
}

}  // namespace climbtrace::testing
