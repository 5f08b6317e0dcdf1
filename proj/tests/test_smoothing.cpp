#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "saak/smoothing.hpp"
#include "test_util.hpp"

using namespace saak;

namespace {

// brute-force oracle with the same anchoring/mirroring contract
int mirror_oracle(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * n - 2 - i;
    }
    return i;
}

double window_reduce(const ImageTensor& img, int y, int x, int c, int k, bool median) {
    std::vector<double> w;
    const int off = k == 2 ? 0 : -1;
    for (int dy = 0; dy < k; ++dy)
        for (int dx = 0; dx < k; ++dx)
            w.push_back(img.at(mirror_oracle(y + off + dy, img.height),
                               mirror_oracle(x + off + dx, img.width), c));
    std::sort(w.begin(), w.end());
    if (median)
        return w.size() % 2 == 1 ? w[w.size() / 2]
                                 : 0.5 * (w[w.size() / 2 - 1] + w[w.size() / 2]);
    double s = 0.0;
    for (double v : w) s += v;
    return s / w.size();
}

}  // namespace

TEST_SUITE_BEGIN("smoothing");

TEST_CASE("constant images are fixed points") {
    auto img = ImageTensor::zeros(5, 7, 3);
    for (auto& v : img.data) v = 0.37;
    for (int k : {2, 3}) {
        CHECK(median_smooth(img, k).data == img.data);  // order statistics are exact
        auto mean = mean_smooth(img, k);
        for (double v : mean.data) CHECK(v == doctest::Approx(0.37).epsilon(1e-15));
    }
}

TEST_CASE("hand-traced 1x4 row with k=2 mean") {
    auto img = ImageTensor::zeros(1, 4, 1);
    img.data = {0, 0, 1, 0};
    auto out = mean_smooth(img, 2);
    CHECK(out.data[0] == 0.0);
    CHECK(out.data[1] == 0.5);
    CHECK(out.data[2] == 0.5);
    CHECK(out.data[3] == 0.5);  // reflective right edge brings the 1 back
}

TEST_CASE("median of an even window averages the middle order statistics") {
    auto img = ImageTensor::zeros(2, 2, 1);
    img.data = {0, 0, 1, 1};
    auto out = median_smooth(img, 2);
    CHECK(out.at(0, 0, 0) == 0.5);
}

TEST_CASE("unsupported kernel sizes are rejected") {
    auto img = ImageTensor::zeros(4, 4, 1);
    CHECK_THROWS_AS(median_smooth(img, 4), std::invalid_argument);
    CHECK_THROWS_AS(mean_smooth(img, 1), std::invalid_argument);
}

TEST_CASE("smoothers match the brute-force window oracle on random images") {
    for (int k : {2, 3}) {
        auto img = testutil::random_image(9, 6, 3, 200 + k);
        auto med = median_smooth(img, k);
        auto avg = mean_smooth(img, k);
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                for (int c = 0; c < img.channels; ++c) {
                    CHECK(med.at(y, x, c) ==
                          doctest::Approx(window_reduce(img, y, x, c, k, true)).epsilon(1e-15));
                    CHECK(avg.at(y, x, c) ==
                          doctest::Approx(window_reduce(img, y, x, c, k, false)).epsilon(1e-15));
                }
    }
}

TEST_CASE("median kills isolated impulses away from edges") {
    auto img = ImageTensor::zeros(8, 8, 1);
    img.at(4, 4, 0) = 1.0;
    auto out = median_smooth(img, 3);
    CHECK(out.at(4, 4, 0) == 0.0);
}

TEST_SUITE_END();
