#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "saak/binary_io.hpp"
#include "saak/kernels.hpp"
#include "saak/transform.hpp"
#include "test_util.hpp"

using namespace saak;

namespace {

CuboidBatch random_batch(std::int64_t count, int dim, std::uint64_t seed) {
    auto g = testutil::rng(seed);
    CuboidBatch b;
    b.count = count;
    b.dim = dim;
    b.data.resize(static_cast<std::size_t>(count) * dim);
    for (auto& v : b.data) v = testutil::uniform(g, -1, 1);
    return b;
}

// Two-pass residual covariance (per-cuboid mean removed, then population
// centered), the oracle train_stage must diagonalize.
std::vector<double> residual_covariance(const CuboidBatch& b) {
    const int d = b.dim;
    const auto n = static_cast<std::size_t>(b.count);
    std::vector<double> centered(n * d);
    for (std::size_t r = 0; r < n; ++r) {
        const double* src = b.data.data() + r * d;
        double mean = 0.0;
        for (int j = 0; j < d; ++j) mean += src[j];
        mean /= d;
        for (int j = 0; j < d; ++j) centered[r * d + j] = src[j] - mean;
    }
    std::vector<double> mu(d, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (int j = 0; j < d; ++j) mu[j] += centered[r * d + j];
    for (int j = 0; j < d; ++j) mu[j] /= static_cast<double>(n);
    std::vector<double> cov(static_cast<std::size_t>(d) * d, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                cov[static_cast<std::size_t>(i) * d + j] +=
                    (centered[r * d + i] - mu[i]) * (centered[r * d + j] - mu[j]);
    for (auto& v : cov) v /= static_cast<double>(n);
    return cov;
}

double max_orthonormality_error(const StageKernels& k) {
    double worst = 0.0;
    for (int i = 0; i < k.dim; ++i)
        for (int j = i; j < k.dim; ++j) {
            double dot = 0.0;
            for (int t = 0; t < k.dim; ++t) dot += k.kernel_row(i)[t] * k.kernel_row(j)[t];
            worst = std::max(worst, std::fabs(dot - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

std::filesystem::path temp_path(const char* name) {
    auto dir = std::filesystem::temp_directory_path() / "saak_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_SUITE_BEGIN("kernels");

TEST_CASE("constant cuboids train to all-zero eigenvalues") {
    CuboidBatch b;
    b.count = 8;
    b.dim = 4;
    for (int r = 0; r < 8; ++r)
        for (int j = 0; j < 4; ++j) b.data.push_back(3.25 + r);  // constant per cuboid
    auto k = train_stage(b, 1, 2, 1);
    for (double v : k.eigenvalues) CHECK(v <= 1e-12);
    CHECK(max_orthonormality_error(k) < 1e-8);
}

TEST_CASE("single-axis residuals give exactly one nonzero eigenvalue") {
    // cuboids t * e0: residual after mean removal is t*(e0 - 1/4), rank 1
    CuboidBatch b;
    b.count = 16;
    b.dim = 4;
    for (int r = 0; r < 16; ++r) {
        const double t = (r % 2 == 0) ? 1.0 : -1.0;
        b.data.push_back(t);
        for (int j = 1; j < 4; ++j) b.data.push_back(0.0);
    }
    auto k = train_stage(b, 1, 2, 1);
    CHECK(k.eigenvalues[0] > 1e-6);
    for (int i = 1; i < 4; ++i) CHECK(std::fabs(k.eigenvalues[i]) < 1e-12);
}

TEST_CASE("kernels diagonalize the empirical residual covariance") {
    auto b = random_batch(500, 4, 11);
    auto k = train_stage(b, 1, 2, 1);
    auto cov = residual_covariance(b);
    // rebuild K' diag(lambda) K and compare
    std::vector<double> rebuilt(16, 0.0);
    for (int i = 0; i < 4; ++i)
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                rebuilt[r * 4 + c] += k.eigenvalues[i] * k.kernel_row(i)[r] * k.kernel_row(i)[c];
    CHECK(testutil::max_abs_diff(rebuilt, cov) < 1e-8);
    CHECK(max_orthonormality_error(k) < 1e-8);
}

TEST_CASE("snapshot path (count < dim) matches the direct covariance oracle") {
    // 12 cuboids of dim 48 forces the Gram-matrix route
    auto b = random_batch(12, 48, 13);
    auto k = train_stage(b, 1, 4, 3);
    CHECK(max_orthonormality_error(k) < 1e-8);
    auto cov = residual_covariance(b);
    std::vector<double> rebuilt(48 * 48, 0.0);
    for (int i = 0; i < 48; ++i) {
        if (k.eigenvalues[i] == 0.0) continue;
        for (int r = 0; r < 48; ++r)
            for (int c = 0; c < 48; ++c)
                rebuilt[r * 48 + c] +=
                    k.eigenvalues[i] * k.kernel_row(i)[r] * k.kernel_row(i)[c];
    }
    CHECK(testutil::max_abs_diff(rebuilt, cov) < 1e-8);
    // rank can be at most count-1 after double centering
    for (int i = 11; i < 48; ++i) CHECK(k.eigenvalues[i] <= 1e-10 * k.eigenvalues[0]);
}

TEST_CASE("empty batch is rejected") {
    CuboidBatch b;
    b.dim = 4;
    CHECK_THROWS_AS(train_stage(b, 1, 2, 1), std::invalid_argument);
}

TEST_CASE("basis completion extends orthonormal rows to a full basis") {
    const int d = 10;
    // two orthonormal rows
    std::vector<double> rows(2 * d, 0.0);
    for (int j = 0; j < d; ++j) rows[j] = 1.0 / std::sqrt(d);
    rows[d + 0] = 1.0 / std::sqrt(2.0);
    rows[d + 1] = -1.0 / std::sqrt(2.0);
    auto full = complete_orthonormal_basis(rows, 2, d);
    REQUIRE(full.size() == static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            double dot = 0.0;
            for (int t = 0; t < d; ++t) dot += full[i * d + t] * full[j * d + t];
            CHECK(std::fabs(dot - (i == j ? 1.0 : 0.0)) < 1e-12);
        }
    // first rows preserved up to sign
    for (int i = 0; i < 2; ++i) {
        double dot = 0.0;
        for (int t = 0; t < d; ++t) dot += full[i * d + t] * rows[i * d + t];
        CHECK(std::fabs(std::fabs(dot) - 1.0) < 1e-12);
    }
}

TEST_CASE("trained model reproduces the published spectral dimensions") {
    std::vector<ImageTensor> imgs;
    for (int i = 0; i < 12; ++i) imgs.push_back(testutil::random_image(32, 32, 3, 100 + i));

    SUBCASE("(2-2) -> 53 channels") {
        auto m = train_model(imgs, {2, 2, 3}, 200000, 7);
        CHECK(m.stages.back().out_channels() == 53);
        CHECK(m.stages.back().out_channels() == spectral_dim(2, 2, 3));
        validate_model(m);
    }
    SUBCASE("(4-2) -> 785 channels") {
        auto m = train_model(imgs, {4, 2, 3}, 200000, 7);
        CHECK(m.stages.back().out_channels() == 785);
        validate_model(m);
    }
}

TEST_CASE("single constant image trains with all-zero eigenvalues") {
    auto img = ImageTensor::zeros(8, 8, 3);
    for (auto& v : img.data) v = 0.5;
    auto m = train_model({img}, {2, 2, 3}, 200000, 0);
    for (const auto& st : m.stages)
        for (double v : st.eigenvalues) CHECK(v <= 1e-12);
}

TEST_CASE("determinism: same data, seed and cap give bit-identical models") {
    std::vector<ImageTensor> imgs;
    for (int i = 0; i < 6; ++i) imgs.push_back(testutil::random_image(16, 16, 3, 40 + i));
    auto a = train_model(imgs, {2, 2, 3}, 500, 123, "tag");
    auto b = train_model(imgs, {2, 2, 3}, 500, 123, "tag");
    CHECK(a.meta.digest == b.meta.digest);
    REQUIRE(a.stages.size() == b.stages.size());
    for (std::size_t i = 0; i < a.stages.size(); ++i) {
        CHECK(a.stages[i].eigenvalues == b.stages[i].eigenvalues);
        CHECK(a.stages[i].ac_kernels == b.stages[i].ac_kernels);
    }
    auto c = train_model(imgs, {2, 2, 3}, 500, 124, "tag");
    CHECK(a.meta.digest != c.meta.digest);
}

TEST_CASE("sample cap limits the cuboids consumed per stage") {
    std::vector<ImageTensor> imgs;
    for (int i = 0; i < 4; ++i) imgs.push_back(testutil::random_image(16, 16, 3, 60 + i));
    auto m = train_model(imgs, {2, 1, 3}, 100, 5);
    CHECK(m.meta.sample_count == 100);
}

TEST_CASE("model save/load round-trips bit-for-bit and validates") {
    std::vector<ImageTensor> imgs;
    for (int i = 0; i < 8; ++i) imgs.push_back(testutil::random_image(16, 16, 3, 70 + i));
    auto m = train_model(imgs, {2, 2, 3}, 200000, 9, "unit");
    const auto path = temp_path("model_roundtrip.saak");
    save_model(m, path);
    auto loaded = load_model(path);
    CHECK(loaded.config.spatial == 2);
    CHECK(loaded.config.stages == 2);
    CHECK(loaded.meta.sample_count == m.meta.sample_count);
    CHECK(loaded.meta.digest == m.meta.digest);
    for (std::size_t i = 0; i < m.stages.size(); ++i) {
        CHECK(loaded.stages[i].eigenvalues == m.stages[i].eigenvalues);
        CHECK(loaded.stages[i].ac_kernels == m.stages[i].ac_kernels);
    }
    // saving the loaded model reproduces the same bytes
    const auto path2 = temp_path("model_roundtrip2.saak");
    save_model(loaded, path2);
    CHECK(io::read_file(path) == io::read_file(path2));
    std::filesystem::remove(path);
    std::filesystem::remove(path2);
}

TEST_CASE("loader rejects corrupted files") {
    std::vector<ImageTensor> imgs;
    for (int i = 0; i < 4; ++i) imgs.push_back(testutil::random_image(8, 8, 3, 80 + i));
    auto m = train_model(imgs, {2, 1, 3}, 200000, 2);
    const auto path = temp_path("model_corrupt.saak");
    save_model(m, path);

    auto bytes = io::read_file(path);
    SUBCASE("bad magic") {
        bytes[0] = 'X';
        io::atomic_write(path, bytes);
        CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("magic"),
                             std::runtime_error);
    }
    SUBCASE("truncated") {
        bytes.resize(bytes.size() / 2);
        io::atomic_write(path, bytes);
        CHECK_THROWS_AS(load_model(path), std::runtime_error);
    }
    SUBCASE("kernel payload perturbed breaks orthonormality") {
        // exponent byte of a kernel entry: header 20 + stage header 12 +
        // 12 eigenvalues, then 6 doubles into the kernel matrix
        const std::size_t off = 20 + 12 + 96 + 48 + 7;
        bytes[off] ^= 0x7f;
        io::atomic_write(path, bytes);
        CHECK_THROWS_AS(load_model(path), std::runtime_error);
    }
    std::filesystem::remove(path);
}

TEST_SUITE_END();
