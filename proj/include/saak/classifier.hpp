// Desk-scale differentiable target model: multinomial logistic regression on
// flattened normalized images, trained by mini-batch gradient descent. Its
// gradients are exact, which keeps the attack generators honest.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "saak/tensor.hpp"

namespace saak {

struct SoftmaxClassifier {
    int num_classes = 0;
    int input_dim = 0;
    std::vector<double> weights;  // num_classes x input_dim, row-major
    std::vector<double> bias;     // num_classes

    std::vector<double> logits(std::span<const double> x) const;
    std::vector<double> probabilities(std::span<const double> x) const;
    // argmax with lowest-index tie-break
    int predict(std::span<const double> x) const;
    int predict(const ImageTensor& img) const { return predict(std::span(img.data)); }
};

struct ClassifierTrainOptions {
    int epochs = 30;
    double learning_rate = 0.1;
    int batch_size = 64;
    std::uint64_t seed = 1;
};

// Labels must lie in [0, num_classes) and every class must appear at least
// once; num_classes must be >= 2. Deterministic for a fixed seed. Returns the
// final full-pass training accuracy through *out_train_accuracy if given.
SoftmaxClassifier train_classifier(const std::vector<ImageTensor>& images,
                                   const std::vector<int>& labels, int num_classes,
                                   const ClassifierTrainOptions& opts = {},
                                   double* out_train_accuracy = nullptr);

double cross_entropy_loss(const SoftmaxClassifier& f, std::span<const double> x, int label);

// Exact analytic gradient of the cross-entropy at (x, y): W' (softmax(Wx+b) - e_y).
std::vector<double> loss_gradient_wrt_input(const SoftmaxClassifier& f,
                                            const ImageTensor& x, int label);

void save_classifier(const SoftmaxClassifier& f, const std::filesystem::path& path);
SoftmaxClassifier load_classifier(const std::filesystem::path& path);

}  // namespace saak
