#include "saak/synthetic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace saak {
namespace {

constexpr double kTau = 6.283185307179586;

// Raw-stream uniform and Box-Muller normal: portable across standard
// libraries, unlike std::normal_distribution.
double uniform(std::mt19937_64& g) { return (g() >> 11) * 0x1.0p-53; }

double gaussian(std::mt19937_64& g) {
    double u1 = uniform(g);
    while (u1 <= 0.0) u1 = uniform(g);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTau * uniform(g));
}

struct CosineMode {
    double fy, fx, phase, amp;
    double channel_shift;
};

}  // namespace

LabeledImages make_synthetic(const SyntheticSpec& spec) {
    if (spec.num_classes < 1 || spec.num_classes > 10)
        throw std::invalid_argument("synthetic: classes must be in [1,10]");
    if (spec.count < 1) throw std::invalid_argument("synthetic: count must be >= 1");
    if (spec.height < 2 || spec.width < 2 || spec.channels < 1)
        throw std::invalid_argument("synthetic: bad dimensions");
    if (spec.modes < 1) throw std::invalid_argument("synthetic: modes must be >= 1");

    std::mt19937_64 rng(spec.seed);

    // prototypes depend only on class_seed so different splits (different
    // sample seeds) draw from the same class-conditional distributions
    std::mt19937_64 proto_rng(spec.class_seed);
    std::vector<std::vector<CosineMode>> prototypes(spec.num_classes);
    for (int c = 0; c < spec.num_classes; ++c) {
        for (int m = 0; m < spec.modes; ++m) {
            CosineMode mode;
            mode.fy = std::floor(uniform(proto_rng) * 4.0);
            mode.fx = std::floor(uniform(proto_rng) * 4.0);
            if (mode.fy == 0.0 && mode.fx == 0.0) mode.fx = 1.0;
            mode.phase = kTau * uniform(proto_rng);
            mode.amp = spec.contrast * (0.6 + 0.8 * uniform(proto_rng));
            mode.channel_shift = kTau * uniform(proto_rng);
            prototypes[c].push_back(mode);
        }
    }

    LabeledImages out;
    out.images.reserve(spec.count);
    out.labels.reserve(spec.count);
    const double inv_h = 1.0 / spec.height, inv_w = 1.0 / spec.width;
    for (int i = 0; i < spec.count; ++i) {
        const int label = i % spec.num_classes;
        // per-sample smooth variation field
        CosineMode vary[2];
        for (auto& v : vary) {
            v.fy = std::floor(uniform(rng) * 3.0);
            v.fx = std::floor(uniform(rng) * 3.0);
            v.phase = kTau * uniform(rng);
            v.amp = spec.variation * uniform(rng);
            v.channel_shift = kTau * uniform(rng);
        }
        auto img = ImageTensor::zeros(spec.height, spec.width, spec.channels);
        for (int y = 0; y < spec.height; ++y)
            for (int x = 0; x < spec.width; ++x)
                for (int ch = 0; ch < spec.channels; ++ch) {
                    double v = 0.5;
                    for (const auto& m : prototypes[label])
                        v += m.amp * std::cos(kTau * (m.fy * y * inv_h + m.fx * x * inv_w) +
                                              m.phase + m.channel_shift * ch);
                    for (const auto& m : vary)
                        v += m.amp * std::cos(kTau * (m.fy * y * inv_h + m.fx * x * inv_w) +
                                              m.phase + m.channel_shift * ch);
                    v += spec.pixel_noise * gaussian(rng);
                    img.at(y, x, ch) = std::min(1.0, std::max(0.0, v));
                }
        out.images.push_back(std::move(img));
        out.labels.push_back(label);
    }
    return out;
}

}  // namespace saak
