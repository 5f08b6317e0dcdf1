// Deterministic synthetic image sets in CIFAR-10 layout: each class is a
// smooth low-frequency prototype, each sample adds a smooth per-sample
// variation field and iid pixel noise. Gives the pipeline class-structured,
// learnable data in environments where no real dataset is available.

#pragma once

#include <cstdint>

#include "saak/dataset.hpp"

namespace saak {

struct SyntheticSpec {
    int num_classes = 2;
    int count = 2000;  // total images, classes round-robin
    int height = 32;
    int width = 32;
    int channels = 3;
    std::uint64_t class_seed = 42;  // fixes the class prototypes; share across splits
    std::uint64_t seed = 1;         // per-sample noise; vary per split
    double contrast = 0.16;     // prototype mode amplitude
    double variation = 0.08;    // per-sample smooth variation amplitude
    double pixel_noise = 0.06;  // iid gaussian sigma
    int modes = 4;              // cosine modes per class prototype
};

LabeledImages make_synthetic(const SyntheticSpec& spec);

}  // namespace saak
