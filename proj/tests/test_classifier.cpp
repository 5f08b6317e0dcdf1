#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "saak/classifier.hpp"
#include "test_util.hpp"

using namespace saak;

namespace {

ImageTensor point2d(double a, double b) {
    auto t = ImageTensor::zeros(1, 1, 2);
    t.data = {a, b};
    return t;
}

}  // namespace

TEST_SUITE_BEGIN("classifier");

TEST_CASE("linearly separable two-class toy set trains to accuracy 1.0") {
    std::vector<ImageTensor> xs;
    std::vector<int> ys;
    auto g = testutil::rng(90);
    for (int i = 0; i < 60; ++i) {
        const double off = testutil::uniform(g, 0.05, 0.4);
        xs.push_back(point2d(0.5 + off, 0.5 - off));
        ys.push_back(0);
        xs.push_back(point2d(0.5 - off, 0.5 + off));
        ys.push_back(1);
    }
    double acc = 0.0;
    auto f = train_classifier(xs, ys, 2, {.epochs = 60, .learning_rate = 0.5, .seed = 3}, &acc);
    CHECK(acc == 1.0);
}

TEST_CASE("single-class data is rejected") {
    std::vector<ImageTensor> xs = {point2d(1, 0), point2d(0, 1)};
    CHECK_THROWS_AS(train_classifier(xs, {0, 0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(train_classifier(xs, {0, 0}, 2), std::invalid_argument);  // class 1 missing
    CHECK_THROWS_AS(train_classifier({}, {}, 2), std::invalid_argument);
}

TEST_CASE("hand-computed gradient at the symmetric point") {
    SoftmaxClassifier f;
    f.num_classes = 2;
    f.input_dim = 2;
    f.weights = {1, 0, 0, 0};  // W = [[1,0],[0,0]]
    f.bias = {0, 0};
    auto x = point2d(0, 0);
    auto grad = loss_gradient_wrt_input(f, x, 0);
    // p = (0.5, 0.5): grad = W'(p - e0) = (-0.5, 0)
    CHECK(grad[0] == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(grad[1] == 0.0);
}

TEST_CASE("saturated softmax has near-zero gradient") {
    SoftmaxClassifier f;
    f.num_classes = 2;
    f.input_dim = 2;
    f.weights = {40, 0, -40, 0};
    f.bias = {0, 0};
    auto x = point2d(1, 0);
    auto grad = loss_gradient_wrt_input(f, x, 0);
    CHECK(std::fabs(grad[0]) < 1e-10);
    CHECK(std::fabs(grad[1]) < 1e-10);
}

TEST_CASE("analytic input gradient matches central finite differences") {
    auto g = testutil::rng(91);
    SoftmaxClassifier f;
    f.num_classes = 3;
    f.input_dim = 12;
    for (int i = 0; i < 36; ++i) f.weights.push_back(testutil::uniform(g, -1, 1));
    for (int i = 0; i < 3; ++i) f.bias.push_back(testutil::uniform(g, -0.5, 0.5));

    auto x = ImageTensor::zeros(2, 2, 3);
    for (auto& v : x.data) v = testutil::uniform(g);
    const int label = 1;
    auto grad = loss_gradient_wrt_input(f, x, label);

    const double h = 1e-5;
    for (int probe = 0; probe < 12; ++probe) {
        auto hi = x, lo = x;
        hi.data[probe] += h;
        lo.data[probe] -= h;
        const double fd =
            (cross_entropy_loss(f, hi.data, label) - cross_entropy_loss(f, lo.data, label)) /
            (2 * h);
        CHECK(grad[probe] == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("training is deterministic for a fixed seed") {
    std::vector<ImageTensor> xs;
    std::vector<int> ys;
    auto g = testutil::rng(92);
    for (int i = 0; i < 40; ++i) {
        auto t = ImageTensor::zeros(2, 2, 1);
        for (auto& v : t.data) v = testutil::uniform(g);
        xs.push_back(t);
        ys.push_back(i % 2);
    }
    auto a = train_classifier(xs, ys, 2, {.epochs = 5, .seed = 11});
    auto b = train_classifier(xs, ys, 2, {.epochs = 5, .seed = 11});
    CHECK(a.weights == b.weights);
    CHECK(a.bias == b.bias);
}

TEST_CASE("classifier file round-trips") {
    SoftmaxClassifier f;
    f.num_classes = 2;
    f.input_dim = 3;
    f.weights = {0.5, -1.25, 3.0, 0.0, 2.0, -0.125};
    f.bias = {0.25, -0.75};
    auto dir = std::filesystem::temp_directory_path() / "saak_tests";
    std::filesystem::create_directories(dir);
    const auto path = dir / "clf_roundtrip.bin";
    save_classifier(f, path);
    auto back = load_classifier(path);
    CHECK(back.weights == f.weights);
    CHECK(back.bias == f.bias);
    CHECK(back.num_classes == 2);
    CHECK(back.input_dim == 3);
    std::filesystem::remove(path);
}

TEST_CASE("prediction ties break to the lowest index") {
    SoftmaxClassifier f;
    f.num_classes = 3;
    f.input_dim = 1;
    f.weights = {0, 0, 0};
    f.bias = {1, 1, 1};
    auto x = point2d(0.5, 0.5);
    x.channels = 1;
    x.data = {0.5};
    CHECK(f.predict(std::span(x.data)) == 0);
}

TEST_SUITE_END();
