#include "saak/transform.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "internal_math.hpp"

namespace saak {
namespace {

using detail::dot4;

void check_stage_geometry(int h, int w, int c, const StageKernels& k, int stage_label) {
    const int s = k.spatial;
    if (c != k.in_channels)
        throw std::invalid_argument("stage " + std::to_string(stage_label) + ": input has " +
                                    std::to_string(c) + " channels, kernels expect " +
                                    std::to_string(k.in_channels));
    if (h % s != 0 || w % s != 0)
        throw std::invalid_argument("stage " + std::to_string(stage_label) + ": " +
                                    std::to_string(h) + "x" + std::to_string(w) +
                                    " not divisible by block side " + std::to_string(s));
}

CoefficientTensor forward_stage_impl(int h, int w, int c, const std::vector<double>& data,
                                     const StageKernels& k, int out_stage) {
    check_stage_geometry(h, w, c, k, out_stage);
    const int s = k.spatial;
    const int d = k.dim;
    const int s2 = s * s;
    const int k_in = k.in_channels;
    const int live_ch = k.live_in();
    const double g_val = 1.0 / std::sqrt(static_cast<double>(s2) * live_ch);
    // kernels for the trailing channels span the DC direction and the dead
    // coordinates; their projections vanish on valid inputs, written as 0
    const int ac_live = d - k.dead_out();

    CuboidBatch b = partition_into_cuboids(h, w, c, data, s);

    auto out = CoefficientTensor::zeros(h / s, w / s, d + 1, out_stage);
    std::vector<double> residual(d);
    for (std::int64_t i = 0; i < b.count; ++i) {
        const double* cub = b.data.data() + static_cast<std::size_t>(i) * d;
        double sum = 0.0;
        for (int p = 0; p < s2; ++p) {
            const double* q = cub + static_cast<std::size_t>(p) * k_in;
            for (int ch = 0; ch < live_ch; ++ch) sum += q[ch];
        }
        const double dc = g_val * sum;
        const double shift = dc * g_val;
        for (int p = 0; p < s2; ++p) {
            const double* q = cub + static_cast<std::size_t>(p) * k_in;
            double* o = residual.data() + static_cast<std::size_t>(p) * k_in;
            int ch = 0;
            for (; ch < live_ch; ++ch) o[ch] = q[ch] - shift;
            for (; ch < k_in; ++ch) o[ch] = q[ch];
        }

        double* dst = out.data.data() + static_cast<std::size_t>(i) * (d + 1);
        dst[0] = dc;
        for (int r = 0; r < ac_live; ++r)
            dst[1 + r] = dot4(k.kernel_row(r), residual.data(), d);
    }
    return out;
}

}  // namespace

int spectral_dim(int s, int stages, int in_channels) {
    if (s < 2) throw std::invalid_argument("spectral_dim: block side must be >= 2");
    if (stages < 1) throw std::invalid_argument("spectral_dim: stages must be >= 1");
    if (in_channels < 1) throw std::invalid_argument("spectral_dim: channels must be >= 1");
    long long k = in_channels;
    for (int i = 0; i < stages; ++i) {
        k = static_cast<long long>(s) * s * k + 1;
        if (k > (1LL << 31))
            throw std::invalid_argument("spectral_dim: dimension overflow");
    }
    return static_cast<int>(k);
}

CoefficientTensor forward_stage(const ImageTensor& t, const StageKernels& k) {
    return forward_stage_impl(t.height, t.width, t.channels, t.data, k, k.stage_index);
}

CoefficientTensor forward_stage(const CoefficientTensor& t, const StageKernels& k) {
    return forward_stage_impl(t.height, t.width, t.channels, t.data, k, k.stage_index);
}

CoefficientTensor inverse_stage(const CoefficientTensor& c, const StageKernels& k) {
    if (c.channels != k.out_channels())
        throw std::invalid_argument("inverse stage " + std::to_string(k.stage_index) +
                                    ": coefficient tensor has " + std::to_string(c.channels) +
                                    " channels, kernels produce " +
                                    std::to_string(k.out_channels()));
    const int s = k.spatial;
    const int d = k.dim;
    const int s2 = s * s;
    const int k_in = k.in_channels;
    const int live_ch = k.live_in();
    const double g_val = 1.0 / std::sqrt(static_cast<double>(s2) * live_ch);

    CuboidBatch b;
    b.count = static_cast<std::int64_t>(c.height) * c.width;
    b.dim = d;
    b.data.assign(static_cast<std::size_t>(b.count) * d, 0.0);

    for (std::int64_t i = 0; i < b.count; ++i) {
        const double* src = c.data.data() + static_cast<std::size_t>(i) * (d + 1);
        double* cub = b.data.data() + static_cast<std::size_t>(i) * d;
        for (int r = 0; r < d; ++r) {
            const double ac = src[1 + r];
            if (ac == 0.0) continue;
            const double* krow = k.kernel_row(r);
            for (int j = 0; j < d; ++j) cub[j] += ac * krow[j];
        }
        const double dc_term = src[0] * g_val;
        for (int p = 0; p < s2; ++p) {
            double* q = cub + static_cast<std::size_t>(p) * k_in;
            for (int ch = 0; ch < live_ch; ++ch) q[ch] += dc_term;
        }
    }
    return assemble_coefficients_from_cuboids(b, c.height * s, c.width * s, k.in_channels,
                                              s, c.stage - 1);
}

CoefficientTensor forward(const ImageTensor& img, const SaakModel& m) {
    if (m.stages.empty()) throw std::invalid_argument("forward: model has no stages");
    if (img.channels != m.config.in_channels)
        throw std::invalid_argument("forward: image has " + std::to_string(img.channels) +
                                    " channels, model expects " +
                                    std::to_string(m.config.in_channels));
    CoefficientTensor cur = forward_stage(img, m.stages[0]);
    for (std::size_t i = 1; i < m.stages.size(); ++i)
        cur = forward_stage(cur, m.stages[i]);
    return cur;
}

ImageTensor inverse(const CoefficientTensor& coeffs, const SaakModel& m, bool clamp) {
    if (m.stages.empty()) throw std::invalid_argument("inverse: model has no stages");
    const auto& last = m.stages.back();
    if (coeffs.channels != last.out_channels() ||
        coeffs.stage != static_cast<int>(m.stages.size()))
        throw std::invalid_argument(
            "inverse: coefficient tensor does not match the model's final stage");
    CoefficientTensor cur = coeffs;
    for (std::size_t i = m.stages.size(); i-- > 0;)
        cur = inverse_stage(cur, m.stages[i]);

    ImageTensor img;
    img.height = cur.height;
    img.width = cur.width;
    img.channels = cur.channels;
    img.data = std::move(cur.data);
    if (clamp)
        for (double& v : img.data) v = std::min(1.0, std::max(0.0, v));
    return img;
}

}  // namespace saak
