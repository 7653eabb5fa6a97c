#include <doctest.h>

#include <algorithm>
#include <random>

#include "climbtrace/error.hpp"
#include "climbtrace/metrics.hpp"
#include "support.hpp"

using namespace climbtrace;
using namespace climbtrace::testing;

namespace {

MagnitudeSeries series(std::vector<double> v) { return MagnitudeSeries(std::move(v)); }

template <typename Fn>
ErrorCode error_of(Fn fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("series construction rejects invalid values") {
    CHECK(error_of([] { series({1.0, -0.1}); }) == ErrorCode::InvalidSeries);
    CHECK(error_of([] { series({1.0, std::nan("")}); }) == ErrorCode::InvalidSeries);
    CHECK(error_of([] { MagnitudeSeries({1.0}, 0.0); }) == ErrorCode::InvalidSeries);
}

TEST_CASE("mean") {
    CHECK(mean(series({1, 1, 1, 1})) == 1.0);
    CHECK(mean(series({1, 2, 3})) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(error_of([] { mean(series({})); }) == ErrorCode::EmptySeries);
}

TEST_CASE("variance") {
    CHECK(variance(series({5, 5, 5, 5})) == 0.0);
    CHECK(variance(series({1, 2, 3})) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(error_of([] { variance(series({1.0})); }) == ErrorCode::DegenerateSeries);
    CHECK(error_of([] { variance(series({})); }) == ErrorCode::EmptySeries);

    std::mt19937_64 rng(7);
    const auto x = random_series(rng, 1000);
    CHECK(relative_error(variance(series(x)), oracle::variance(x)) < 1e-9);
}

TEST_CASE("mean squared successive difference") {
    CHECK(mean_sq_diff(series({5, 5, 5})) == 0.0);
    // (1 + 1) / 3
    CHECK(mean_sq_diff(series({1, 2, 3})) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(error_of([] { mean_sq_diff(series({2.0})); }) == ErrorCode::DegenerateSeries);

    std::mt19937_64 rng(11);
    const auto x = random_series(rng, 777);
    CHECK(relative_error(mean_sq_diff(series(x)), oracle::mean_sq_diff(x)) < 1e-9);
}

TEST_CASE("lag autocorrelation") {
    CHECK(error_of([] { lag_autocorr(series({3, 3, 3, 3}), 1); }) == ErrorCode::DegenerateSeries);
    // numerator (-1)(0) + (0)(1) = 0
    CHECK(lag_autocorr(series({1, 2, 3}), 1) == 0.0);
    CHECK(error_of([] { lag_autocorr(series({1, 2}), 2); }) == ErrorCode::DegenerateSeries);
    CHECK(error_of([] { lag_autocorr(series({1, 2, 3}), 0); }) == ErrorCode::InvalidArgument);

    std::mt19937_64 rng(13);
    for (std::size_t k : {1u, 2u, 5u}) {
        const auto x = random_series(rng, 500);
        CHECK(relative_error(lag_autocorr(series(x), k), oracle::lag_autocorr(x, k)) < 1e-9);
    }
}

TEST_CASE("display score rounds half away from zero") {
    CHECK(display_score(0.21234) == 21);
    CHECK(display_score(0.17018) == 17);
    CHECK(display_score(0.0) == 0);
    CHECK(display_score(0.125) == 13);
    CHECK(display_score(2.4) == 240);
}

TEST_CASE("display score is monotone in variance") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> v(0.0, 5.0);
    std::vector<double> xs(2000);
    for (double& x : xs) x = v(rng);
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 1; i < xs.size(); ++i) {
        CHECK(display_score(xs[i - 1]) <= display_score(xs[i]));
    }
}

TEST_CASE("basic stats") {
    const auto s = basic_stats(series({0.5, 2.0, 1.0}));
    CHECK(s.min == 0.5);
    CHECK(s.max == 2.0);
    CHECK(s.duration_s == doctest::Approx(0.1).epsilon(1e-15));

    const auto single = basic_stats(series({7}));
    CHECK(single.min == 7);
    CHECK(single.max == 7);
    CHECK(single.duration_s == 0.0);

    CHECK(basic_stats(series(std::vector<double>(201, 1.0))).duration_s == 10.0);
    CHECK(error_of([] { basic_stats(series({})); }) == ErrorCode::EmptySeries);
}

TEST_CASE("per-second scores") {
    const auto flat = per_second_scores(series(std::vector<double>(40, 1.0)));
    CHECK(flat == std::vector<WindowScore>{{0, 0}, {1, 0}});

    std::mt19937_64 rng(5);
    CHECK(per_second_scores(series(random_series(rng, 45))).size() == 2);
    const auto kept = per_second_scores(series(random_series(rng, 50)));
    REQUIRE(kept.size() == 3);
    CHECK(kept[2].window_index == 2);
    CHECK(per_second_scores(series(random_series(rng, 9))).empty());
    CHECK(per_second_scores(series(random_series(rng, 10))).size() == 1);
    CHECK(error_of([] { per_second_scores(series({1.0})); }) == ErrorCode::DegenerateSeries);
}

TEST_CASE("per-second window scores match the windowed variance") {
    std::mt19937_64 rng(17);
    const auto x = random_series(rng, 60, 3.0);
    const auto scores = per_second_scores(series(x));
    REQUIRE(scores.size() == 3);
    for (std::size_t w = 0; w < 3; ++w) {
        const std::vector<double> window(x.begin() + 20 * w, x.begin() + 20 * (w + 1));
        CHECK(scores[w].score == display_score(oracle::variance(window)));
    }
}

TEST_CASE("concatenated windows keep their scores") {
    std::mt19937_64 rng(19);
    const auto a = random_series(rng, 20, 2.0);
    const auto b = random_series(rng, 20, 2.0);
    std::vector<double> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    const auto joined = per_second_scores(series(ab));
    REQUIRE(joined.size() == 2);
    CHECK(joined[0].score == per_second_scores(series(a))[0].score);
    CHECK(joined[1].score == per_second_scores(series(b))[0].score);
}

TEST_CASE("scale and shift properties") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> coef(0.1, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto x = random_series(rng, 2 + rng() % 300);
        const double c = coef(rng);
        const double b = coef(rng);
        std::vector<double> scaled, shifted, affine;
        for (double v : x) {
            scaled.push_back(c * v);
            shifted.push_back(v + b);
            affine.push_back(c * v + b);
        }
        CHECK(relative_error(variance(series(scaled)), c * c * variance(series(x))) < 1e-9);
        CHECK(relative_error(variance(series(shifted)), variance(series(x))) < 1e-9);
        CHECK(relative_error(mean(series(shifted)), mean(series(x)) + b) < 1e-9);
        if (x.size() > 2) {
            CHECK(relative_error(lag_autocorr(series(affine)), lag_autocorr(series(x))) < 1e-9);
        }
    }
}

TEST_CASE("mean and variance are permutation invariant") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        auto x = random_series(rng, 2 + rng() % 500);
        const double m = mean(series(x));
        const double v = variance(series(x));
        std::shuffle(x.begin(), x.end(), rng);
        CHECK(relative_error(mean(series(x)), m) < 1e-12);
        CHECK(relative_error(variance(series(x)), v) < 1e-9);
    }
}

TEST_CASE("analyze assembles the report") {
    const auto report = analyze(series({1, 2, 3}));
    CHECK(report.mean == doctest::Approx(2.0));
    CHECK(report.variance == doctest::Approx(1.0));
    CHECK(report.display_score == 100);
    REQUIRE(report.lag1_autocorr.has_value());
    CHECK(*report.lag1_autocorr == 0.0);
    CHECK(report.min <= report.mean);
    CHECK(report.mean <= report.max);

    const auto flat = analyze(series(std::vector<double>(30, 1.0)));
    CHECK_FALSE(flat.lag1_autocorr.has_value());
    CHECK(flat.display_score == 0);
}

TEST_CASE("style ordering") {
    const std::vector<StyleRow> ordered{{"r", ClimbStyle::Static, 0.1},
                                        {"r", ClimbStyle::Hybrid, 0.2},
                                        {"r", ClimbStyle::Dynamic, 0.3},
                                        {"q", ClimbStyle::Static, 0.5},
                                        {"q", ClimbStyle::Dynamic, 0.6}};
    CHECK(metric_style_ordering(ordered).holds);

    const std::vector<StyleRow> tied{{"r", ClimbStyle::Static, 0.1},
                                     {"r", ClimbStyle::Hybrid, 0.1}};
    const auto result = metric_style_ordering(tied);
    CHECK_FALSE(result.holds);
    REQUIRE(result.violations.size() == 1);
    CHECK(result.violations[0].lower_style == ClimbStyle::Static);

    // Routes are compared only within themselves.
    const std::vector<StyleRow> separate{{"a", ClimbStyle::Dynamic, 0.1},
                                         {"b", ClimbStyle::Static, 0.9},
                                         {"a", ClimbStyle::Static, 0.05}};
    CHECK(metric_style_ordering(separate).holds);
}
