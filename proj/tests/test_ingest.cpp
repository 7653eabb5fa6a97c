#include <doctest.h>

#include <cmath>
#include <random>

#include "climbtrace/error.hpp"
#include "climbtrace/ingest.hpp"
#include "support.hpp"

using namespace climbtrace;
using namespace climbtrace::testing;

namespace {

template <typename Fn>
const Error capture(Fn fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e;
    }
    FAIL("expected an Error");
    return Error(ErrorCode::InvalidArgument, "");
}

RawSampleLog magnitude_log(const std::vector<std::pair<double, double>>& points) {
    RawSampleLog log;
    for (auto [t, m] : points) log.samples.push_back({t, m, std::nullopt});
    return log;
}

}  // namespace

TEST_CASE("magnitude") {
    CHECK(magnitude(0, 0, 0) == 0.0);
    CHECK(magnitude(0, 0, 1) == 1.0);
    CHECK(magnitude(3, 4, 0) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(capture([] { magnitude(INFINITY, 0, 0); }).code() == ErrorCode::NonFiniteInput);
}

TEST_CASE("magnitude is rotation invariant") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> axis(-3.0, 3.0);
    for (int trial = 0; trial < 1000; ++trial) {
        // Random rotation from a normalized random quaternion.
        double q[4] = {g(rng), g(rng), g(rng), g(rng)};
        const double n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
        for (double& c : q) c /= n;
        const double w = q[0], x = q[1], y = q[2], z = q[3];
        const double r[3][3] = {
            {1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
            {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
            {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}};
        const double v[3] = {axis(rng), axis(rng), axis(rng)};
        double rv[3];
        for (int i = 0; i < 3; ++i) rv[i] = r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2];
        CHECK(relative_error(magnitude(rv[0], rv[1], rv[2]), magnitude(v[0], v[1], v[2])) < 1e-9);
    }
}

TEST_CASE("parse_csv accepts both layouts") {
    const auto axes = parse_csv("t,ax,ay,az\n0.0,0,0,1\n0.05,0,0,1\n");
    REQUIRE(axes.samples.size() == 2);
    CHECK(axes.samples[0].magnitude == 1.0);
    CHECK(axes.samples[1].magnitude == 1.0);
    CHECK(axes.samples[1].t == 0.05);
    REQUIRE(axes.samples[0].axes.has_value());

    const auto mags = parse_csv("t,mag\n0,1\n0.05,1.2\n");
    REQUIRE(mags.samples.size() == 2);
    CHECK(mags.samples[1].magnitude == 1.2);
    CHECK_FALSE(mags.samples[1].axes.has_value());

    // CRLF, spaces and a trailing blank line are tolerated.
    const auto crlf = parse_csv("t, mag\r\n0, 1\r\n0.05 ,2\r\n\r\n");
    CHECK(crlf.samples.size() == 2);
}

TEST_CASE("parse_csv errors") {
    const auto bad = capture([] { parse_csv("t,mag\n0,1\n0.05,abc\n"); });
    CHECK(bad.code() == ErrorCode::MalformedRow);
    CHECK(bad.line() == 3u);

    CHECK(capture([] { parse_csv("t,ax,ay,az\n0,0,0\n"); }).line() == 2u);
    CHECK(capture([] { parse_csv("t,mag\n0,-1\n"); }).code() == ErrorCode::MalformedRow);
    CHECK(capture([] { parse_csv("t,mag\n0,nan\n"); }).code() == ErrorCode::MalformedRow);
    CHECK(capture([] { parse_csv("time,x,y,z\n0,0,0,1\n"); }).code() == ErrorCode::UnknownHeader);
    CHECK(capture([] { parse_csv(""); }).code() == ErrorCode::UnknownHeader);
}

TEST_CASE("resample reproduces linear signals") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> step(0.003, 0.02);
    std::vector<std::pair<double, double>> points;
    for (double t = 0.0; t < 5.0; t += step(rng)) points.push_back({t, 1.0 + 0.2 * t});
    const ClimbTrace trace = resample(magnitude_log(points));
    REQUIRE(trace.size() > 90);
    for (std::size_t i = 0; i < trace.size(); ++i) {
        CHECK(std::abs(trace.magnitudes.values()[i] - (1.0 + 0.2 * trace.sample_time_s(i))) <
              1e-9);
    }
    CHECK(trace.sample_time_s(trace.size() - 1) <= points.back().first);
    CHECK(trace.gap_flags.empty());
}

TEST_CASE("resample grid spacing is 50 ms") {
    const ClimbTrace trace = resample(synth_climb({3.0, 1.0, 1.5, 4}));
    for (std::size_t i = 1; i < trace.size(); ++i) {
        CHECK(trace.sample_time_ms(i) - trace.sample_time_ms(i - 1) == 50);
        CHECK(std::abs(trace.sample_time_s(i) - trace.sample_time_s(i - 1) - 0.05) < 1e-12);
    }
}

TEST_CASE("resample flags long sampling gaps") {
    std::vector<std::pair<double, double>> points;
    double t = 0.0;
    for (int i = 0; i < 200; ++i, t += 0.005) points.push_back({t, 1.0});
    const double gap_start = points.back().first;
    t = gap_start + 0.5;
    for (int i = 0; i < 200; ++i, t += 0.005) points.push_back({t, 1.0});
    const ClimbTrace trace = resample(magnitude_log(points));
    REQUIRE(trace.gap_flags.size() == 1);
    CHECK(trace.gap_flags[0].start_s == doctest::Approx(gap_start));
    CHECK(trace.gap_flags[0].end_s == doctest::Approx(gap_start + 0.5));
    CHECK(trace.gap_flags[0].end_s <= trace.duration_s());
}

TEST_CASE("resample leaves 4-6 ms jitter unflagged") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> step(0.004, 0.006);
    std::vector<std::pair<double, double>> points;
    for (double t = 0.0; t < 10.0; t += step(rng)) points.push_back({t, 1.0});
    CHECK(resample(magnitude_log(points)).gap_flags.empty());
}

TEST_CASE("resample of a uniform log is identity") {
    std::mt19937_64 rng(43);
    const auto values = random_series(rng, 400, 4.0);
    std::vector<std::pair<double, double>> points;
    for (std::size_t i = 0; i < values.size(); ++i) points.push_back({i / 20.0, values[i]});
    const ClimbTrace trace = resample(magnitude_log(points));
    REQUIRE(trace.size() == values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        CHECK(std::abs(trace.magnitudes.values()[i] - values[i]) < 1e-12);
    }
}

TEST_CASE("resample anchors the grid at the first sample") {
    auto log = magnitude_log({{2.0, 1.0}, {2.1, 2.0}});
    log.source_epoch_ms = 1000;
    const ClimbTrace trace = resample(log);
    CHECK(trace.start_epoch_ms == 3000);
    REQUIRE(trace.size() == 3);
    CHECK(trace.magnitudes.values()[1] == doctest::Approx(1.5));
}

TEST_CASE("resample errors") {
    CHECK(capture([] { resample(magnitude_log({{0, 1}})); }).code() == ErrorCode::TooFewSamples);
    CHECK(capture([] { resample(magnitude_log({{0, 1}, {0.1, 1}, {0.1, 1}})); }).code() ==
          ErrorCode::NonMonotonicTimestamps);
    CHECK(capture([] { resample(magnitude_log({{0.2, 1}, {0.1, 1}})); }).code() ==
          ErrorCode::NonMonotonicTimestamps);
}

TEST_CASE("trim_lead drops the countdown") {
    const auto log = magnitude_log({{0.0, 5}, {1.0, 5}, {5.0, 1}, {5.5, 1}, {6.0, 1}});
    const auto trimmed = trim_lead(log, 5.0);
    REQUIRE(trimmed.samples.size() == 3);
    CHECK(trimmed.samples.front().t == 5.0);
    CHECK(trim_lead(log, 0.0).samples.size() == 5);
}

TEST_CASE("synth_climb is deterministic") {
    const SynthParams p{10.0, 2.0, 1.5, 99};
    const auto a = synth_climb(p);
    const auto b = synth_climb(p);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].t == b.samples[i].t);
        CHECK(a.samples[i].magnitude == b.samples[i].magnitude);
    }
    CHECK(a.samples.back().t >= 9.9);
    CHECK(a.samples.back().t <= 10.0);
}

TEST_CASE("synth_climb jerk rate raises variance") {
    const auto calm = resample(synth_climb({10.0, 0.0, 1.5, 7}));
    const auto jerky = resample(synth_climb({10.0, 2.0, 1.5, 7}));
    CHECK(variance(calm.magnitudes) < variance(jerky.magnitudes));
    CHECK(capture([] { synth_climb({0.0, 1.0, 1.0, 1}); }).code() == ErrorCode::InvalidArgument);
}
