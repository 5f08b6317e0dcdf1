#include "saak/attack.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace saak {
namespace {

double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

AttackKind parse_attack_kind(const std::string& name) {
    if (name == "fgsm") return AttackKind::Fgsm;
    if (name == "bim") return AttackKind::Bim;
    throw std::invalid_argument("unknown attack kind '" + name + "' (expected fgsm or bim)");
}

std::string attack_kind_name(AttackKind k) {
    return k == AttackKind::Fgsm ? "fgsm" : "bim";
}

void validate_attack(const AttackSpec& spec) {
    if (!(spec.epsilon > 0.0)) throw std::invalid_argument("attack: epsilon must be > 0");
    if (spec.kind == AttackKind::Bim) {
        if (!(spec.step_size > 0.0))
            throw std::invalid_argument("attack: BIM step size must be > 0");
        if (spec.steps < 1) throw std::invalid_argument("attack: BIM needs steps >= 1");
        if (spec.step_size > spec.epsilon)
            throw std::invalid_argument("attack: BIM step size must not exceed epsilon");
    }
}

ImageTensor fgsm(const SoftmaxClassifier& f, const ImageTensor& x, int label,
                 double epsilon) {
    if (!(epsilon >= 0.0)) throw std::invalid_argument("fgsm: epsilon must be >= 0");
    const auto g = loss_gradient_wrt_input(f, x, label);
    ImageTensor out = x;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const double v = out.data[i] + epsilon * sign0(g[i]);
        out.data[i] = std::min(1.0, std::max(0.0, v));
    }
    return out;
}

ImageTensor bim(const SoftmaxClassifier& f, const ImageTensor& x, int label,
                const AttackSpec& spec) {
    if (spec.kind != AttackKind::Bim) throw std::invalid_argument("bim: wrong attack kind");
    validate_attack(spec);
    ImageTensor cur = x;
    for (int step = 0; step < spec.steps; ++step) {
        const auto g = loss_gradient_wrt_input(f, cur, label);
        for (std::size_t i = 0; i < cur.data.size(); ++i) {
            double v = cur.data[i] + spec.step_size * sign0(g[i]);
            // project into the eps-ball around x, then into the pixel range
            v = std::min(x.data[i] + spec.epsilon, std::max(x.data[i] - spec.epsilon, v));
            cur.data[i] = std::min(1.0, std::max(0.0, v));
        }
    }
    return cur;
}

ImageTensor run_attack(const SoftmaxClassifier& f, const ImageTensor& x, int label,
                       const AttackSpec& spec) {
    validate_attack(spec);
    return spec.kind == AttackKind::Fgsm ? fgsm(f, x, label, spec.epsilon)
                                         : bim(f, x, label, spec);
}

double evaluate_accuracy(const SoftmaxClassifier& f, const std::vector<ImageTensor>& images,
                         const std::vector<int>& labels, const Preprocess& preprocess) {
    if (images.empty()) throw std::invalid_argument("evaluate: empty image set");
    if (images.size() != labels.size())
        throw std::invalid_argument("evaluate: images/labels size mismatch");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < images.size(); ++i) {
        const int pred =
            preprocess ? f.predict(preprocess(images[i])) : f.predict(images[i]);
        if (pred == labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(images.size());
}

std::vector<std::size_t> select_seed_set(const SoftmaxClassifier& f,
                                         const std::vector<ImageTensor>& images,
                                         const std::vector<int>& labels,
                                         std::size_t count) {
    if (images.size() != labels.size())
        throw std::invalid_argument("seed set: images/labels size mismatch");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < images.size() && out.size() < count; ++i)
        if (f.predict(images[i]) == labels[i]) out.push_back(i);
    if (out.size() < count)
        throw std::runtime_error("seed set: only " + std::to_string(out.size()) + " of " +
                                 std::to_string(count) + " correctly classified samples");
    return out;
}

}  // namespace saak
