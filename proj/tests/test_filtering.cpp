#include <doctest.h>

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "saak/filtering.hpp"
#include "saak/transform.hpp"
#include "test_util.hpp"

using namespace saak;

namespace {

CoefficientTensor single_position(std::vector<double> channels) {
    CoefficientTensor c;
    c.height = 1;
    c.width = 1;
    c.channels = static_cast<int>(channels.size());
    c.stage = 1;
    c.data = std::move(channels);
    return c;
}

SaakModel trained(int s, int stages, int c, std::uint64_t seed, int side) {
    std::vector<ImageTensor> imgs;
    for (int i = 0; i < 8; ++i) imgs.push_back(testutil::random_image(side, side, c, seed + i));
    return train_model(imgs, {s, stages, c}, 200000, seed);
}

}  // namespace

TEST_SUITE_BEGIN("filtering");

TEST_CASE("truncate zeroes exactly the last N channels") {
    auto c = apply_filter(single_position({5, 4, 3, 2, 1}),
                          {FilterStrategy::Truncate, 2, 0.0});
    CHECK(c.data == std::vector<double>{5, 4, 3, 0, 0});
}

TEST_CASE("scale multiplies the last N channels by the factor") {
    auto c = apply_filter(single_position({5, 4, 3, 2, 1}),
                          {FilterStrategy::Scale, 2, 0.25});
    CHECK(c.data == std::vector<double>{5, 4, 3, 0.5, 0.25});
}

TEST_CASE("clip clamps the last N channels symmetrically") {
    auto c = apply_filter(single_position({5, 4, 3, 0.5, -0.7}),
                          {FilterStrategy::Clip, 2, 0.02});
    CHECK(c.data == std::vector<double>{5, 4, 3, 0.02, -0.02});
    // small values pass through unchanged
    auto d = apply_filter(single_position({1, 0.01, -0.015}),
                          {FilterStrategy::Clip, 2, 0.02});
    CHECK(d.data == std::vector<double>{1, 0.01, -0.015});
}

TEST_CASE("count out of range is rejected") {
    CHECK_THROWS_AS(apply_filter(single_position({1, 2, 3}), {FilterStrategy::Truncate, 4, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_filter(single_position({1, 2, 3}), {FilterStrategy::Truncate, -1, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_filter({FilterStrategy::Scale, 1, 1.5}, 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_filter({FilterStrategy::Clip, 1, 0.0}, 3),
                    std::invalid_argument);
}

TEST_CASE("truncate and clip are idempotent, scale composes to factor^2") {
    auto g = testutil::rng(7);
    CoefficientTensor c;
    c.height = 2;
    c.width = 2;
    c.channels = 9;
    c.stage = 1;
    for (int i = 0; i < 36; ++i) c.data.push_back(testutil::uniform(g, -2, 2));

    for (auto strat : {FilterStrategy::Truncate, FilterStrategy::Clip}) {
        FilterSpec spec{strat, 4, 0.02};
        auto once = apply_filter(c, spec);
        auto twice = apply_filter(once, spec);
        CHECK(twice.data == once.data);
    }
    FilterSpec half{FilterStrategy::Scale, 4, 0.5};
    auto twice = apply_filter(apply_filter(c, half), half);
    auto quarter = apply_filter(c, {FilterStrategy::Scale, 4, 0.25});
    CHECK(testutil::max_abs_diff(twice.data, quarter.data) < 1e-15);
}

TEST_CASE("channels below the cut are bit-identical for every strategy") {
    auto g = testutil::rng(8);
    CoefficientTensor c;
    c.height = 4;
    c.width = 4;
    c.channels = 13;
    c.stage = 1;
    for (std::size_t i = 0; i < 4 * 4 * 13u; ++i) c.data.push_back(testutil::uniform(g, -3, 3));
    for (auto strat : {FilterStrategy::Scale, FilterStrategy::Truncate, FilterStrategy::Clip}) {
        auto f = apply_filter(c, {strat, 5, 0.25});
        for (int p = 0; p < 16; ++p)
            CHECK(std::memcmp(f.data.data() + p * 13, c.data.data() + p * 13,
                              (13 - 5) * sizeof(double)) == 0);
    }
}

TEST_CASE("defend with an identity filter returns the image") {
    auto m = trained(2, 2, 3, 60, 16);
    auto img = testutil::random_image(16, 16, 3, 61);
    for (FilterSpec spec : {FilterSpec{FilterStrategy::Truncate, 0, 0.0},
                            FilterSpec{FilterStrategy::Scale, 20, 1.0}}) {
        auto out = defend(img, m, spec, false);
        double err = 0.0;
        for (std::size_t i = 0; i < img.data.size(); ++i)
            err = std::max(err, std::fabs(out.data[i] - img.data[i]));
        CHECK(err < 1e-8);
    }
}

TEST_CASE("defend truncation error matches the removed coefficient energy") {
    auto m = trained(2, 2, 3, 62, 16);
    auto img = testutil::random_image(16, 16, 3, 63);
    const int N = 30;
    auto coeffs = forward(img, m);
    double removed = 0.0;
    for (int p = 0; p < coeffs.height * coeffs.width; ++p)
        for (int ch = coeffs.channels - N; ch < coeffs.channels; ++ch) {
            const double v = coeffs.data[static_cast<std::size_t>(p) * coeffs.channels + ch];
            removed += v * v;
        }
    auto out = defend(img, m, {FilterStrategy::Truncate, N, 0.0}, false);
    double err2 = 0.0;
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const double d = out.data[i] - img.data[i];
        err2 += d * d;
    }
    CHECK(err2 == doctest::Approx(removed).epsilon(1e-9));
}

TEST_CASE("truncation reconstruction error grows with N") {
    auto m = trained(2, 2, 3, 64, 16);
    auto img = testutil::random_image(16, 16, 3, 65);
    double prev = -1.0;
    for (int n : {0, 5, 15, 30, 45}) {
        auto out = defend(img, m, {FilterStrategy::Truncate, n, 0.0}, false);
        double err2 = 0.0;
        for (std::size_t i = 0; i < img.data.size(); ++i) {
            const double d = out.data[i] - img.data[i];
            err2 += d * d;
        }
        CHECK(err2 >= prev - 1e-12);
        prev = err2;
    }
}

TEST_CASE("strategy names parse both ways") {
    CHECK(parse_strategy("truncate") == FilterStrategy::Truncate);
    CHECK(strategy_name(parse_strategy("clip")) == "clip");
    CHECK_THROWS_AS(parse_strategy("zero"), std::invalid_argument);
}

TEST_SUITE_END();
