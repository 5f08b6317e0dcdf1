#include "saak/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "saak/binary_io.hpp"
#include "internal_math.hpp"

namespace saak {
namespace {

using detail::dot4;

constexpr std::uint32_t kClassifierVersion = 1;

void softmax_inplace(std::vector<double>& z) {
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        sum += v;
    }
    for (double& v : z) v /= sum;
}

}  // namespace

std::vector<double> SoftmaxClassifier::logits(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != input_dim)
        throw std::invalid_argument("classifier: input dim " + std::to_string(x.size()) +
                                    " does not match " + std::to_string(input_dim));
    std::vector<double> z(num_classes);
    for (int c = 0; c < num_classes; ++c)
        z[c] = dot4(weights.data() + static_cast<std::size_t>(c) * input_dim, x.data(),
                    input_dim) +
               bias[c];
    return z;
}

std::vector<double> SoftmaxClassifier::probabilities(std::span<const double> x) const {
    auto z = logits(x);
    softmax_inplace(z);
    return z;
}

int SoftmaxClassifier::predict(std::span<const double> x) const {
    const auto z = logits(x);
    int best = 0;
    for (int c = 1; c < num_classes; ++c)
        if (z[c] > z[best]) best = c;
    return best;
}

SoftmaxClassifier train_classifier(const std::vector<ImageTensor>& images,
                                   const std::vector<int>& labels, int num_classes,
                                   const ClassifierTrainOptions& opts,
                                   double* out_train_accuracy) {
    if (images.empty()) throw std::invalid_argument("train_classifier: empty training set");
    if (images.size() != labels.size())
        throw std::invalid_argument("train_classifier: images/labels size mismatch");
    if (num_classes < 2)
        throw std::invalid_argument("train_classifier: need at least two classes");
    if (opts.epochs < 1 || opts.batch_size < 1 || !(opts.learning_rate > 0.0))
        throw std::invalid_argument("train_classifier: bad training options");

    const int dim = static_cast<int>(images[0].data.size());
    std::vector<int> seen(num_classes, 0);
    for (std::size_t i = 0; i < images.size(); ++i) {
        if (static_cast<int>(images[i].data.size()) != dim)
            throw std::invalid_argument("train_classifier: images must share dimensions");
        if (labels[i] < 0 || labels[i] >= num_classes)
            throw std::invalid_argument("train_classifier: label " +
                                        std::to_string(labels[i]) + " out of range");
        seen[labels[i]] = 1;
    }
    for (int c = 0; c < num_classes; ++c)
        if (!seen[c])
            throw std::invalid_argument("train_classifier: class " + std::to_string(c) +
                                        " has no samples");

    SoftmaxClassifier f;
    f.num_classes = num_classes;
    f.input_dim = dim;
    f.weights.assign(static_cast<std::size_t>(num_classes) * dim, 0.0);
    f.bias.assign(num_classes, 0.0);

    const std::size_t n = images.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(opts.seed);

    std::vector<double> grad_w(static_cast<std::size_t>(num_classes) * dim);
    std::vector<double> grad_b(num_classes);
    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        // Fisher-Yates with the raw generator keeps shuffles portable
        for (std::size_t i = n; i > 1; --i) {
            const std::size_t j = rng() % i;
            std::swap(order[i - 1], order[j]);
        }
        for (std::size_t start = 0; start < n; start += opts.batch_size) {
            const std::size_t stop = std::min(n, start + opts.batch_size);
            std::fill(grad_w.begin(), grad_w.end(), 0.0);
            std::fill(grad_b.begin(), grad_b.end(), 0.0);
            for (std::size_t i = start; i < stop; ++i) {
                const auto& x = images[order[i]].data;
                auto p = f.probabilities(x);
                p[labels[order[i]]] -= 1.0;
                for (int c = 0; c < num_classes; ++c) {
                    const double pc = p[c];
                    if (pc == 0.0) continue;
                    if (!std::isfinite(pc))
                        throw std::runtime_error("train_classifier: non-finite loss gradient");
                    double* gw = grad_w.data() + static_cast<std::size_t>(c) * dim;
                    for (int j = 0; j < dim; ++j) gw[j] += pc * x[j];
                    grad_b[c] += pc;
                }
            }
            const double step = opts.learning_rate / static_cast<double>(stop - start);
            for (std::size_t j = 0; j < f.weights.size(); ++j) f.weights[j] -= step * grad_w[j];
            for (int c = 0; c < num_classes; ++c) f.bias[c] -= step * grad_b[c];
        }
    }

    if (out_train_accuracy) {
        std::size_t correct = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (f.predict(std::span(images[i].data)) == labels[i]) ++correct;
        *out_train_accuracy = static_cast<double>(correct) / static_cast<double>(n);
    }
    return f;
}

double cross_entropy_loss(const SoftmaxClassifier& f, std::span<const double> x, int label) {
    if (label < 0 || label >= f.num_classes)
        throw std::invalid_argument("loss: label out of range");
    auto z = f.logits(x);
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - zmax);
    return std::log(sum) - (z[label] - zmax);
}

std::vector<double> loss_gradient_wrt_input(const SoftmaxClassifier& f,
                                            const ImageTensor& x, int label) {
    if (label < 0 || label >= f.num_classes)
        throw std::invalid_argument("gradient: label out of range");
    auto p = f.probabilities(x.data);
    p[label] -= 1.0;
    std::vector<double> g(f.input_dim, 0.0);
    for (int c = 0; c < f.num_classes; ++c) {
        const double pc = p[c];
        if (pc == 0.0) continue;
        const double* wc = f.weights.data() + static_cast<std::size_t>(c) * f.input_dim;
        for (int j = 0; j < f.input_dim; ++j) g[j] += pc * wc[j];
    }
    return g;
}

void save_classifier(const SoftmaxClassifier& f, const std::filesystem::path& path) {
    io::ByteWriter w;
    w.raw("SCLF", 4);
    w.u32(kClassifierVersion);
    w.u32(static_cast<std::uint32_t>(f.num_classes));
    w.u32(static_cast<std::uint32_t>(f.input_dim));
    w.f64_array(f.bias);
    w.f64_array(f.weights);
    io::atomic_write(path, w.bytes);
}

SoftmaxClassifier load_classifier(const std::filesystem::path& path) {
    const auto bytes = io::read_file(path);
    io::ByteReader r(bytes);
    char magic[4];
    r.raw(magic, 4);
    if (std::string(magic, 4) != "SCLF")
        throw std::runtime_error(path.string() + ": not a classifier file (bad magic)");
    if (r.u32() != kClassifierVersion)
        throw std::runtime_error(path.string() + ": unsupported classifier version");
    SoftmaxClassifier f;
    f.num_classes = static_cast<int>(r.u32());
    f.input_dim = static_cast<int>(r.u32());
    if (f.num_classes < 2 || f.num_classes > 4096 || f.input_dim < 1 ||
        f.input_dim > (1 << 26))
        throw std::runtime_error(path.string() + ": implausible classifier dimensions");
    f.bias.resize(f.num_classes);
    r.f64_array(f.bias);
    f.weights.resize(static_cast<std::size_t>(f.num_classes) * f.input_dim);
    r.f64_array(f.weights);
    if (!r.at_end())
        throw std::runtime_error(path.string() + ": trailing bytes after classifier payload");
    for (double v : f.bias)
        if (!std::isfinite(v)) throw std::runtime_error(path.string() + ": non-finite bias");
    for (double v : f.weights)
        if (!std::isfinite(v)) throw std::runtime_error(path.string() + ": non-finite weight");
    return f;
}

}  // namespace saak
