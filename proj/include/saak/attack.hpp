// Gradient-sign attack generators against the softmax classifier, plus the
// seed-set protocol and accuracy evaluation with an optional preprocessing
// defense. Every generated example stays inside the L-inf budget and [0,1].

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "saak/classifier.hpp"
#include "saak/tensor.hpp"

namespace saak {

enum class AttackKind { Fgsm, Bim };

struct AttackSpec {
    AttackKind kind = AttackKind::Fgsm;
    double epsilon = 8.0 / 255.0;  // L-inf budget in normalized pixel units
    double step_size = 2.0 / 255.0;  // BIM only
    int steps = 10;                  // BIM only
};

AttackKind parse_attack_kind(const std::string& name);  // "fgsm"|"bim"
std::string attack_kind_name(AttackKind k);
void validate_attack(const AttackSpec& spec);

// x' = clamp_[0,1](x + eps * sign(grad L)); sign(0) = 0.
ImageTensor fgsm(const SoftmaxClassifier& f, const ImageTensor& x, int label,
                 double epsilon);

// Iterated sign steps projected back into the eps-ball and [0,1].
ImageTensor bim(const SoftmaxClassifier& f, const ImageTensor& x, int label,
                const AttackSpec& spec);

ImageTensor run_attack(const SoftmaxClassifier& f, const ImageTensor& x, int label,
                       const AttackSpec& spec);

using Preprocess = std::function<ImageTensor(const ImageTensor&)>;

// Fraction of images whose (optionally defended) prediction matches the label.
double evaluate_accuracy(const SoftmaxClassifier& f, const std::vector<ImageTensor>& images,
                         const std::vector<int>& labels, const Preprocess& preprocess = {});

// Indices of the first `count` images the classifier gets right (the seed-set
// protocol); throws if fewer exist.
std::vector<std::size_t> select_seed_set(const SoftmaxClassifier& f,
                                         const std::vector<ImageTensor>& images,
                                         const std::vector<int>& labels, std::size_t count);

}  // namespace saak
