#include <doctest.h>

#include <stdexcept>

#include "saak/covariance.hpp"
#include "test_util.hpp"

using namespace saak;

namespace {

CuboidBatch make_batch(std::vector<std::vector<double>> rows) {
    CuboidBatch b;
    b.count = static_cast<std::int64_t>(rows.size());
    b.dim = rows.empty() ? 0 : static_cast<int>(rows[0].size());
    for (const auto& r : rows) b.data.insert(b.data.end(), r.begin(), r.end());
    return b;
}

}  // namespace

TEST_SUITE_BEGIN("covariance");

TEST_CASE("hand-computed 2d covariance") {
    CovarianceAccumulator acc(2);
    acc.accumulate(make_batch({{1, 0}, {-1, 0}}));
    auto c = acc.covariance();
    CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c[1] == 0.0);
    CHECK(c[2] == 0.0);
    CHECK(c[3] == 0.0);
    auto m = acc.mean();
    CHECK(m[0] == 0.0);
    CHECK(m[1] == 0.0);
}

TEST_CASE("empty batch leaves the accumulator unchanged") {
    CovarianceAccumulator acc(3);
    acc.accumulate(make_batch({{1, 2, 3}}));
    const auto before_sum = acc.sum();
    CuboidBatch empty;
    empty.dim = 3;
    acc.accumulate(empty);
    CHECK(acc.count() == 1);
    CHECK(acc.sum() == before_sum);
}

TEST_CASE("dimension mismatch is rejected") {
    CovarianceAccumulator acc(3);
    CHECK_THROWS_AS(acc.accumulate(make_batch({{1, 2}})), std::invalid_argument);
    CovarianceAccumulator other(4);
    CHECK_THROWS_AS(acc.merge(other), std::invalid_argument);
}

TEST_CASE("covariance of zero rows is undefined") {
    CovarianceAccumulator acc(2);
    CHECK_THROWS_AS(acc.covariance(), std::runtime_error);
}

TEST_CASE("merged split accumulators match a single pass within 1e-12") {
    const int d = 6;
    auto g = testutil::rng(31);
    CuboidBatch all;
    all.dim = d;
    all.count = 400;
    for (int i = 0; i < 400 * d; ++i) all.data.push_back(testutil::uniform(g, -2, 2));

    CovarianceAccumulator single(d);
    single.accumulate(all);

    CovarianceAccumulator left(d), right(d);
    CuboidBatch first, second;
    first.dim = second.dim = d;
    first.count = 137;
    second.count = 400 - 137;
    first.data.assign(all.data.begin(), all.data.begin() + 137 * d);
    second.data.assign(all.data.begin() + 137 * d, all.data.end());
    left.accumulate(first);
    right.accumulate(second);
    left.merge(right);

    CHECK(left.count() == single.count());
    CHECK(testutil::max_abs_diff(left.covariance(), single.covariance()) < 1e-12);
}

TEST_SUITE_END();
