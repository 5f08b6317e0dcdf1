#include <doctest.h>

#include <stdexcept>

#include "saak/tensor.hpp"
#include "test_util.hpp"

using namespace saak;

TEST_SUITE_BEGIN("tensor");

TEST_CASE("partition of a single 2x2 block flattens in index order") {
    auto t = ImageTensor::zeros(2, 2, 1);
    t.data = {1, 2, 3, 4};
    auto b = partition_into_cuboids(t, 2);
    CHECK(b.count == 1);
    CHECK(b.dim == 4);
    CHECK(b.data == std::vector<double>{1, 2, 3, 4});
}

TEST_CASE("cuboids enumerate the block grid row-major") {
    auto t = ImageTensor::zeros(4, 4, 1);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) t.at(y, x, 0) = y * 4 + x;
    auto b = partition_into_cuboids(t, 2);
    REQUIRE(b.count == 4);
    // block (0,0), (0,1), (1,0), (1,1)
    CHECK(b.row(0)[0] == 0);
    CHECK(b.row(1)[0] == 2);
    CHECK(b.row(2)[0] == 8);
    CHECK(b.row(3)[0] == 10);
    CHECK(b.row(3)[3] == 15);
}

TEST_CASE("partition rejects non-divisible sides naming the axis") {
    auto t = ImageTensor::zeros(6, 4, 1);
    CHECK_THROWS_WITH_AS(partition_into_cuboids(t, 4),
                         doctest::Contains("height"), std::invalid_argument);
    auto u = ImageTensor::zeros(4, 6, 1);
    CHECK_THROWS_WITH_AS(partition_into_cuboids(u, 4),
                         doctest::Contains("width"), std::invalid_argument);
}

TEST_CASE("assemble is the exact inverse of partition") {
    for (int s : {2, 4}) {
        auto t = testutil::random_image(8, 8, 3, 17 + s);
        auto b = partition_into_cuboids(t, s);
        auto back = assemble_image_from_cuboids(b, 8, 8, 3, s);
        CHECK(back.data == t.data);
    }
}

TEST_CASE("assemble of a single cuboid rebuilds the block") {
    CuboidBatch b;
    b.count = 1;
    b.dim = 4;
    b.data = {1, 2, 3, 4};
    auto t = assemble_image_from_cuboids(b, 2, 2, 1, 2);
    CHECK(t.at(0, 0, 0) == 1);
    CHECK(t.at(0, 1, 0) == 2);
    CHECK(t.at(1, 0, 0) == 3);
    CHECK(t.at(1, 1, 0) == 4);
}

TEST_CASE("assemble rejects mismatched count and dim") {
    CuboidBatch b;
    b.count = 2;
    b.dim = 4;
    b.data.assign(8, 0.0);
    CHECK_THROWS_AS(assemble_image_from_cuboids(b, 2, 2, 1, 2), std::invalid_argument);
    b.count = 1;
    b.dim = 8;
    CHECK_THROWS_AS(assemble_image_from_cuboids(b, 2, 2, 1, 2), std::invalid_argument);
}

TEST_CASE("partition/assemble are mutually inverse on random tensors") {
    auto g = testutil::rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const int s = (g() % 2 == 0) ? 2 : 4;
        const int h = s * static_cast<int>(1 + g() % (32 / s));
        const int w = s * static_cast<int>(1 + g() % (32 / s));
        const int c = 1 + static_cast<int>(g() % 3);
        auto t = testutil::random_image(h, w, c, g());
        auto b = partition_into_cuboids(t, s);
        CHECK(b.count == static_cast<std::int64_t>(h / s) * (w / s));
        CHECK(b.dim == s * s * c);
        auto back = assemble_image_from_cuboids(b, h, w, c, s);
        CHECK(back.data == t.data);
    }
}

TEST_CASE("a single moved pixel changes exactly one entry of one cuboid row") {
    auto t = testutil::random_image(8, 8, 3, 4);
    auto base = partition_into_cuboids(t, 2);
    auto g = testutil::rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const int y = static_cast<int>(g() % 8), x = static_cast<int>(g() % 8),
                  c = static_cast<int>(g() % 3);
        auto u = t;
        u.at(y, x, c) += 1.0;
        auto moved = partition_into_cuboids(u, 2);
        int changed = 0;
        std::int64_t changed_row = -1;
        for (std::int64_t r = 0; r < base.count; ++r)
            for (int k = 0; k < base.dim; ++k)
                if (base.row(r)[k] != moved.row(r)[k]) {
                    ++changed;
                    changed_row = r;
                }
        CHECK(changed == 1);
        CHECK(changed_row == (y / 2) * 4 + (x / 2));
    }
}

TEST_CASE("normalize maps bytes to exact fractions") {
    std::vector<std::uint8_t> raw = {0, 255, 128};
    auto t = normalize_pixels(raw, 1, 1, 3);
    CHECK(t.data[0] == 0.0);
    CHECK(t.data[1] == 1.0);
    CHECK(t.data[2] == doctest::Approx(128.0 / 255.0).epsilon(1e-15));
}

TEST_CASE("denormalize clamps out-of-range values") {
    auto t = ImageTensor::zeros(1, 1, 3);
    t.data = {1.2, -0.3, 0.5};
    auto raw = denormalize_clamp(t);
    CHECK(raw[0] == 255);
    CHECK(raw[1] == 0);
    CHECK(raw[2] == 128);
}

TEST_CASE("byte -> real -> byte round-trip is the identity for all 256 values") {
    std::vector<std::uint8_t> raw(256);
    for (int i = 0; i < 256; ++i) raw[i] = static_cast<std::uint8_t>(i);
    auto t = normalize_pixels(raw, 16, 16, 1);
    auto back = denormalize_clamp(t);
    CHECK(back == raw);
}

TEST_CASE("normalize rejects length mismatch") {
    std::vector<std::uint8_t> raw(5);
    CHECK_THROWS_AS(normalize_pixels(raw, 2, 2, 2), std::invalid_argument);
}

TEST_SUITE_END();
