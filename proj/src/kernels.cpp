#include "saak/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "saak/binary_io.hpp"
#include "saak/covariance.hpp"
#include "saak/digest.hpp"
#include "saak/eigensolver.hpp"
#include "saak/transform.hpp"
#include "internal_math.hpp"

namespace saak {
namespace {

using detail::dot4;

constexpr std::uint32_t kModelVersion = 1;
constexpr double kNegativeEigenTol = -1e-10;
constexpr double kOrthoTol = 1e-8;

// First component with magnitude above 1e-12 made positive; matches the
// eigensolver's convention so both training paths produce canonical signs.
void canonicalize_sign(double* row, int d) {
    for (int k = 0; k < d; ++k) {
        if (std::fabs(row[k]) > 1e-12) {
            if (row[k] < 0.0)
                for (int j = 0; j < d; ++j) row[j] = -row[j];
            return;
        }
    }
}

// Geometry of one stage's DC direction: uniform over the live cuboid
// coordinates, zero on the structurally-dead trailing input channels.
struct DcDirection {
    int s2 = 0;       // s*s spatial positions per cuboid
    int k_in = 0;     // input channels
    int live_ch = 0;  // live input channels
    double g_val = 0.0;

    static DcDirection make(int spatial, int in_channels, int dead_in) {
        DcDirection g;
        g.s2 = spatial * spatial;
        g.k_in = in_channels;
        g.live_ch = in_channels - dead_in;
        g.g_val = 1.0 / std::sqrt(static_cast<double>(g.s2) * g.live_ch);
        return g;
    }
    double dot(const double* cuboid) const {
        double sum = 0.0;
        for (int p = 0; p < s2; ++p) {
            const double* q = cuboid + static_cast<std::size_t>(p) * k_in;
            for (int c = 0; c < live_ch; ++c) sum += q[c];
        }
        return g_val * sum;
    }
    // dst = src - <g, src> g
    void remove(const double* src, double* dst) const {
        const double dc = dot(src) * g_val;
        for (int p = 0; p < s2; ++p) {
            const double* q = src + static_cast<std::size_t>(p) * k_in;
            double* o = dst + static_cast<std::size_t>(p) * k_in;
            int c = 0;
            for (; c < live_ch; ++c) o[c] = q[c] - dc;
            for (; c < k_in; ++c) o[c] = q[c];
        }
    }
};

void check_raw_eigenvalues(const std::vector<double>& values) {
    for (double v : values)
        if (v < kNegativeEigenTol)
            throw std::runtime_error("train_stage: eigenvalue " + std::to_string(v) +
                                     " below tolerance, numerical failure");
}

struct TrainedSpectrum {
    std::vector<double> values;  // positive eigenvalues, descending
    std::vector<double> rows;    // matching eigenvector rows, size() = values.size() * d
};

// Positive spectral directions via the dense residual covariance; used when
// the batch has at least dim rows.
TrainedSpectrum spectrum_direct(const CuboidBatch& cuboids, int d, const DcDirection& g,
                                int max_positive) {
    CovarianceAccumulator acc(d);
    constexpr std::int64_t kChunk = 2048;
    CuboidBatch chunk;
    chunk.dim = d;
    for (std::int64_t start = 0; start < cuboids.count; start += kChunk) {
        const std::int64_t n = std::min(kChunk, cuboids.count - start);
        chunk.count = n;
        chunk.data.resize(static_cast<std::size_t>(n) * d);
        for (std::int64_t r = 0; r < n; ++r)
            g.remove(cuboids.data.data() + static_cast<std::size_t>(start + r) * d,
                     chunk.data.data() + static_cast<std::size_t>(r) * d);
        acc.accumulate(chunk);
    }
    auto eig = symmetric_eigendecomposition(acc.covariance(), d, 1e-12);
    check_raw_eigenvalues(eig.values);

    const double lambda_max = std::max(eig.values[0], 0.0);
    int npos = 0;
    while (npos < d && npos < max_positive && eig.values[npos] > lambda_max * 1e-9)
        ++npos;
    TrainedSpectrum out;
    out.values.assign(eig.values.begin(), eig.values.begin() + npos);
    out.rows.assign(eig.vectors.begin(),
                    eig.vectors.begin() + static_cast<std::size_t>(npos) * d);
    return out;
}

// Snapshot path for count < dim: eigendecompose the count x count Gram matrix
// of the centered residuals and lift its eigenvectors back to R^dim. Same
// postconditions as the direct path at a fraction of the cost when the
// covariance is strongly rank-deficient.
TrainedSpectrum spectrum_snapshot(const CuboidBatch& cuboids, int d, const DcDirection& g,
                                  int max_positive) {
    const int n = static_cast<int>(cuboids.count);

    std::vector<double> z(static_cast<std::size_t>(n) * d);
    for (int r = 0; r < n; ++r)
        g.remove(cuboids.data.data() + static_cast<std::size_t>(r) * d,
                 z.data() + static_cast<std::size_t>(r) * d);
    std::vector<double> mu(d, 0.0);
    for (int r = 0; r < n; ++r) {
        const double* zr = z.data() + static_cast<std::size_t>(r) * d;
        for (int j = 0; j < d; ++j) mu[j] += zr[j];
    }
    for (int j = 0; j < d; ++j) mu[j] /= n;
    for (int r = 0; r < n; ++r) {
        double* zr = z.data() + static_cast<std::size_t>(r) * d;
        for (int j = 0; j < d; ++j) zr[j] -= mu[j];
    }

    std::vector<double> gram(static_cast<std::size_t>(n) * n);
    const double inv_n = 1.0 / n;
    for (int i = 0; i < n; ++i) {
        const double* zi = z.data() + static_cast<std::size_t>(i) * d;
        for (int j = i; j < n; ++j) {
            const double gij =
                dot4(zi, z.data() + static_cast<std::size_t>(j) * d, d) * inv_n;
            gram[static_cast<std::size_t>(i) * n + j] = gij;
            gram[static_cast<std::size_t>(j) * n + i] = gij;
        }
    }
    auto eig = symmetric_eigendecomposition(gram, n, 1e-12);
    check_raw_eigenvalues(eig.values);

    const double sigma_max = std::max(eig.values[0], 0.0);
    int rank = 0;
    while (rank < n && rank < max_positive && eig.values[rank] > sigma_max * 1e-9)
        ++rank;

    TrainedSpectrum out;
    out.values.assign(eig.values.begin(), eig.values.begin() + rank);
    out.rows.assign(static_cast<std::size_t>(rank) * d, 0.0);
    for (int i = 0; i < rank; ++i) {
        double* vi = out.rows.data() + static_cast<std::size_t>(i) * d;
        const auto gi = eig.vector(i);
        for (int r = 0; r < n; ++r) {
            const double w = gi[r];
            if (w == 0.0) continue;
            const double* zr = z.data() + static_cast<std::size_t>(r) * d;
            for (int j = 0; j < d; ++j) vi[j] += w * zr[j];
        }
        const double norm = std::sqrt(dot4(vi, vi, d));
        if (norm == 0.0)
            throw std::runtime_error("train_stage: degenerate snapshot eigenvector");
        const double inv = 1.0 / norm;
        for (int j = 0; j < d; ++j) vi[j] *= inv;
    }
    return out;
}

}  // namespace

std::vector<double> complete_orthonormal_basis(const std::vector<double>& rows, int r,
                                               int d) {
    if (r < 0 || d < 1 || r > d)
        throw std::invalid_argument("basis completion: need 0 <= r <= d");
    if (rows.size() != static_cast<std::size_t>(r) * d)
        throw std::invalid_argument("basis completion: rows size mismatch");

    // Column j of the d x r factor A is input row j; Householder QR of A,
    // then the full Q gives the completed basis (columns 0..r-1 equal the
    // inputs up to sign because they are already orthonormal).
    std::vector<double> a(rows);  // column-major d x r == row-major r x d
    std::vector<double> beta(r, 0.0);
    for (int j = 0; j < r; ++j) {
        double* col = a.data() + static_cast<std::size_t>(j) * d;
        double sigma = 0.0;
        for (int i = j + 1; i < d; ++i) sigma += col[i] * col[i];
        const double x0 = col[j];
        if (sigma == 0.0) {
            beta[j] = x0 >= 0.0 ? 0.0 : 2.0;
            col[j] = 1.0;
        } else {
            const double mu = std::sqrt(x0 * x0 + sigma);
            const double v0 = x0 <= 0.0 ? x0 - mu : -sigma / (x0 + mu);
            beta[j] = 2.0 * v0 * v0 / (sigma + v0 * v0);
            const double inv_v0 = 1.0 / v0;
            col[j] = 1.0;
            for (int i = j + 1; i < d; ++i) col[i] *= inv_v0;
        }
        if (beta[j] == 0.0) continue;
        for (int k = j + 1; k < r; ++k) {
            double* ck = a.data() + static_cast<std::size_t>(k) * d;
            double w = 0.0;
            for (int i = j; i < d; ++i) w += col[i] * ck[i];
            w *= beta[j];
            for (int i = j; i < d; ++i) ck[i] -= w * col[i];
        }
    }

    // Accumulate Q row-major, then transpose so output rows are Q's columns.
    std::vector<double> q(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) q[static_cast<std::size_t>(i) * d + i] = 1.0;
    std::vector<double> tmp(d);
    for (int j = r - 1; j >= 0; --j) {
        if (beta[j] == 0.0) continue;
        const double* v = a.data() + static_cast<std::size_t>(j) * d;
        std::fill(tmp.begin(), tmp.end(), 0.0);
        for (int i = j; i < d; ++i) {
            const double vi = v[i];
            if (vi == 0.0) continue;
            const double* qi = q.data() + static_cast<std::size_t>(i) * d;
            for (int k = 0; k < d; ++k) tmp[k] += vi * qi[k];
        }
        for (int i = j; i < d; ++i) {
            const double bv = beta[j] * v[i];
            if (bv == 0.0) continue;
            double* qi = q.data() + static_cast<std::size_t>(i) * d;
            for (int k = 0; k < d; ++k) qi[k] -= bv * tmp[k];
        }
    }

    std::vector<double> out(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k)
            out[static_cast<std::size_t>(k) * d + i] = q[static_cast<std::size_t>(i) * d + k];
    return out;
}

StageKernels train_stage(const CuboidBatch& cuboids, int stage_index, int spatial,
                         int in_channels, int dead_in) {
    if (stage_index < 1) throw std::invalid_argument("train_stage: stage_index must be >= 1");
    if (spatial < 2) throw std::invalid_argument("train_stage: block side must be >= 2");
    if (in_channels < 1) throw std::invalid_argument("train_stage: channels must be >= 1");
    if (dead_in < 0 || dead_in >= in_channels)
        throw std::invalid_argument("train_stage: dead_in out of range");
    const int d = spatial * spatial * in_channels;
    if (cuboids.count == 0) throw std::invalid_argument("train_stage: empty cuboid batch");
    if (cuboids.dim != d)
        throw std::invalid_argument("train_stage: cuboid dim " + std::to_string(cuboids.dim) +
                                    " does not match stage geometry " + std::to_string(d));
    if (cuboids.count < d)
        std::cerr << "train_stage: warning: stage " << stage_index << " has "
                  << cuboids.count << " cuboids for dim " << d
                  << ", covariance is rank-deficient\n";

    const auto g = DcDirection::make(spatial, in_channels, dead_in);
    const int n_dead_coords = g.s2 * dead_in;
    const int max_positive = d - n_dead_coords - 1;

    TrainedSpectrum spec = cuboids.count >= d
                               ? spectrum_direct(cuboids, d, g, max_positive)
                               : spectrum_snapshot(cuboids, d, g, max_positive);
    const int npos = static_cast<int>(spec.values.size());

    // Scrub the DC direction and the dead coordinates out of the positive
    // rows (they carry only eigensolver noise there), then complete to a full
    // basis with the structural null directions pinned: the trailing output
    // channels become exactly the DC direction and the dead coordinates.
    for (int i = 0; i < npos; ++i) {
        double* v = spec.rows.data() + static_cast<std::size_t>(i) * d;
        const double gdot = g.dot(v) * g.g_val;
        for (int p = 0; p < g.s2; ++p) {
            double* q = v + static_cast<std::size_t>(p) * g.k_in;
            int c = 0;
            for (; c < g.live_ch; ++c) q[c] -= gdot;
            for (; c < g.k_in; ++c) q[c] = 0.0;
        }
        const double norm = std::sqrt(dot4(v, v, d));
        if (norm < 0.5)
            throw std::runtime_error("train_stage: positive eigenvector collapsed");
        const double inv = 1.0 / norm;
        for (int j = 0; j < d; ++j) v[j] *= inv;
    }

    const int r = 1 + n_dead_coords + npos;
    std::vector<double> seed(static_cast<std::size_t>(r) * d, 0.0);
    for (int p = 0; p < g.s2; ++p)
        for (int c = 0; c < g.live_ch; ++c)
            seed[static_cast<std::size_t>(p) * g.k_in + c] = g.g_val;
    int row = 1;
    for (int p = 0; p < g.s2; ++p)
        for (int c = g.live_ch; c < g.k_in; ++c)
            seed[static_cast<std::size_t>(row++) * d + static_cast<std::size_t>(p) * g.k_in + c] = 1.0;
    std::copy(spec.rows.begin(), spec.rows.end(),
              seed.begin() + static_cast<std::size_t>(row) * d);

    const auto full = complete_orthonormal_basis(seed, r, d);

    // Row order: positives, unseen completions, DC direction, dead coords.
    StageKernels k;
    k.stage_index = stage_index;
    k.spatial = spatial;
    k.in_channels = in_channels;
    k.dead_in = dead_in;
    k.dim = d;
    k.ac_kernels.resize(static_cast<std::size_t>(d) * d);
    k.eigenvalues.assign(d, 0.0);
    const auto row_at = [&](int i) { return full.data() + static_cast<std::size_t>(i) * d; };
    double* dst = k.ac_kernels.data();
    for (int i = 0; i < npos; ++i, dst += d) {
        std::copy(row_at(1 + n_dead_coords + i), row_at(1 + n_dead_coords + i) + d, dst);
        k.eigenvalues[i] = std::max(spec.values[i], 0.0);
    }
    for (int i = r; i < d; ++i, dst += d) std::copy(row_at(i), row_at(i) + d, dst);
    std::copy(row_at(0), row_at(0) + d, dst);
    dst += d;
    for (int i = 1; i <= n_dead_coords; ++i, dst += d)
        std::copy(row_at(i), row_at(i) + d, dst);

    for (int i = 0; i < d; ++i)
        canonicalize_sign(k.ac_kernels.data() + static_cast<std::size_t>(i) * d, d);
    return k;
}

SaakModel train_model(const std::vector<ImageTensor>& images, const SaakConfig& config,
                      std::int64_t sample_cap, std::uint64_t seed,
                      const std::string& dataset_tag) {
    if (config.spatial < 2) throw std::invalid_argument("train_model: block side must be >= 2");
    if (config.stages < 1) throw std::invalid_argument("train_model: stages must be >= 1");
    if (config.in_channels < 1)
        throw std::invalid_argument("train_model: channels must be >= 1");
    if (images.empty()) throw std::invalid_argument("train_model: no training images");
    if (sample_cap < 1) throw std::invalid_argument("train_model: sample_cap must be >= 1");

    const int h = images[0].height, w = images[0].width, c = images[0].channels;
    if (c != config.in_channels)
        throw std::invalid_argument("train_model: images have " + std::to_string(c) +
                                    " channels, config expects " +
                                    std::to_string(config.in_channels));
    long long side = 1;
    for (int t = 0; t < config.stages; ++t) side *= config.spatial;
    if (h % side != 0 || w % side != 0)
        throw std::invalid_argument("train_model: " + std::to_string(h) + "x" +
                                    std::to_string(w) + " not divisible by s^T = " +
                                    std::to_string(side));
    for (const auto& img : images) {
        if (img.height != h || img.width != w || img.channels != c)
            throw std::invalid_argument("train_model: images must share dimensions");
        if (img.data.size() != static_cast<std::size_t>(h) * w * c)
            throw std::invalid_argument("train_model: image data length mismatch");
    }

    Sha256 digest;
    digest.update("SAAK-TRAIN-1", 12);
    digest.update_u32(static_cast<std::uint32_t>(config.spatial));
    digest.update_u32(static_cast<std::uint32_t>(config.stages));
    digest.update_u32(static_cast<std::uint32_t>(config.in_channels));
    digest.update_u64(seed);
    digest.update_u64(static_cast<std::uint64_t>(sample_cap));
    digest.update_u64(images.size());
    for (const auto& img : images) {
        digest.update_u32(static_cast<std::uint32_t>(img.height));
        digest.update_u32(static_cast<std::uint32_t>(img.width));
        digest.update_u32(static_cast<std::uint32_t>(img.channels));
        digest.update(img.data.data(), img.data.size() * sizeof(double));
    }
    digest.update(dataset_tag.data(), dataset_tag.size());

    SaakModel model;
    model.config = config;
    model.meta.seed = seed;
    model.meta.dataset_tag = dataset_tag;

    // Stage 0 view of the training set; replaced by stage outputs as we go.
    std::vector<CoefficientTensor> current(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) {
        current[i].height = h;
        current[i].width = w;
        current[i].channels = c;
        current[i].stage = 0;
        current[i].data = images[i].data;
    }

    const int s = config.spatial;
    std::uint64_t total_used = 0;
    int dead = 0;
    for (int t = 1; t <= config.stages; ++t) {
        const int ch = current[0].height, cw = current[0].width, cc = current[0].channels;
        const int gy = ch / s, gx = cw / s;
        const std::int64_t per_image = static_cast<std::int64_t>(gy) * gx;
        const std::int64_t total = per_image * static_cast<std::int64_t>(current.size());
        const int d = s * s * cc;

        const std::int64_t take = std::min<std::int64_t>(total, sample_cap);
        CuboidBatch batch;
        batch.dim = d;
        batch.count = take;
        batch.data.resize(static_cast<std::size_t>(take) * d);

        // Uniform subsample without replacement in enumeration order
        // (selection sampling), seeded per stage.
        std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(t)));
        std::int64_t need = take;
        double* dst = batch.data.data();
        const std::size_t row_stride = static_cast<std::size_t>(cw) * cc;
        for (std::int64_t idx = 0; idx < total && need > 0; ++idx) {
            const std::int64_t remaining = total - idx;
            bool pick = remaining == need;
            if (!pick) {
                const double u = (rng() >> 11) * 0x1.0p-53;
                pick = u * static_cast<double>(remaining) < static_cast<double>(need);
            }
            if (!pick) continue;
            const std::int64_t img_i = idx / per_image;
            const std::int64_t blk = idx % per_image;
            const int by = static_cast<int>(blk / gx), bx = static_cast<int>(blk % gx);
            const double* base = current[img_i].data.data() +
                                 (static_cast<std::size_t>(by) * s * cw +
                                  static_cast<std::size_t>(bx) * s) * cc;
            for (int y = 0; y < s; ++y) {
                const double* src = base + y * row_stride;
                for (int k = 0; k < s * cc; ++k) *dst++ = src[k];
            }
            --need;
        }
        total_used += static_cast<std::uint64_t>(take);

        model.stages.push_back(train_stage(batch, t, s, cc, dead));
        const StageKernels& k = model.stages.back();
        dead = k.dead_out();
        for (auto& tensor : current) tensor = forward_stage(tensor, k);
    }

    model.meta.sample_count = total_used;
    model.meta.digest = digest.finish();
    return model;
}

void validate_model(const SaakModel& model) {
    const auto& cfg = model.config;
    if (cfg.spatial < 2 || cfg.stages < 1 || cfg.in_channels < 1)
        throw std::runtime_error("model: invalid config");
    if (static_cast<int>(model.stages.size()) != cfg.stages)
        throw std::runtime_error("model: stage count does not match config");

    int expected_in = cfg.in_channels;
    int expected_dead = 0;
    for (std::size_t i = 0; i < model.stages.size(); ++i) {
        const auto& st = model.stages[i];
        const std::string where = "model stage " + std::to_string(i + 1) + ": ";
        if (st.stage_index != static_cast<int>(i + 1))
            throw std::runtime_error(where + "bad stage index");
        if (st.spatial != cfg.spatial) throw std::runtime_error(where + "bad block side");
        if (st.in_channels != expected_in)
            throw std::runtime_error(where + "channel chaining broken: expected " +
                                     std::to_string(expected_in) + ", got " +
                                     std::to_string(st.in_channels));
        if (st.dead_in != expected_dead)
            throw std::runtime_error(where + "dead-channel chaining broken");
        if (st.dim != st.spatial * st.spatial * st.in_channels)
            throw std::runtime_error(where + "dim does not match geometry");
        if (st.eigenvalues.size() != static_cast<std::size_t>(st.dim) ||
            st.ac_kernels.size() != static_cast<std::size_t>(st.dim) * st.dim)
            throw std::runtime_error(where + "payload size mismatch");

        double prev = std::numeric_limits<double>::infinity();
        for (double v : st.eigenvalues) {
            if (!std::isfinite(v)) throw std::runtime_error(where + "non-finite eigenvalue");
            if (v < kNegativeEigenTol)
                throw std::runtime_error(where + "negative eigenvalue " + std::to_string(v));
            if (v > prev) throw std::runtime_error(where + "eigenvalues not non-increasing");
            prev = v;
        }
        if (st.eigenvalues.back() > 1e-8 * st.eigenvalues.front())
            throw std::runtime_error(where +
                                     "smallest eigenvalue too large for a mean-removed "
                                     "covariance");
        for (int t = st.dim - st.dead_out(); t < st.dim; ++t)
            if (st.eigenvalues[t] > 1e-8 * std::max(st.eigenvalues.front(), 0.0))
                throw std::runtime_error(where + "structurally-dead channel " +
                                         std::to_string(t + 1) +
                                         " has a non-zero eigenvalue");
        for (double v : st.ac_kernels)
            if (!std::isfinite(v)) throw std::runtime_error(where + "non-finite kernel entry");

        const int d = st.dim;
        if (d <= 1024) {
            for (int r = 0; r < d; ++r) {
                const double* vr = st.kernel_row(r);
                for (int q = r; q < d; ++q) {
                    const double g = dot4(vr, st.kernel_row(q), d) - (r == q ? 1.0 : 0.0);
                    if (std::fabs(g) > kOrthoTol)
                        throw std::runtime_error(where + "kernels not orthonormal (|K K' - I| = " +
                                                 std::to_string(std::fabs(g)) + ")");
                }
            }
        } else {
            // Too large for the exact pairwise check at load time: verify all
            // row norms plus K'(K x) = x on seeded probes.
            for (int r = 0; r < d; ++r) {
                const double g = dot4(st.kernel_row(r), st.kernel_row(r), d) - 1.0;
                if (std::fabs(g) > kOrthoTol)
                    throw std::runtime_error(where + "kernel row " + std::to_string(r) +
                                             " not unit norm");
            }
            std::mt19937_64 rng(0x5aa5c0ffee ^ static_cast<std::uint64_t>(i));
            std::vector<double> x(d), kx(d), back(d);
            for (int probe = 0; probe < 16; ++probe) {
                double norm = 0.0;
                for (int j = 0; j < d; ++j) {
                    x[j] = ((rng() >> 11) * 0x1.0p-53) - 0.5;
                    norm += x[j] * x[j];
                }
                norm = std::sqrt(norm);
                for (int r = 0; r < d; ++r) kx[r] = dot4(st.kernel_row(r), x.data(), d);
                std::fill(back.begin(), back.end(), 0.0);
                for (int r = 0; r < d; ++r) {
                    const double* vr = st.kernel_row(r);
                    const double w = kx[r];
                    for (int j = 0; j < d; ++j) back[j] += w * vr[j];
                }
                double err = 0.0;
                for (int j = 0; j < d; ++j) err = std::max(err, std::fabs(back[j] - x[j]));
                if (err > kOrthoTol * norm)
                    throw std::runtime_error(where + "kernels fail the orthonormality probe");
            }
        }
        expected_in = st.out_channels();
        expected_dead = st.dead_out();
    }
    if (expected_in != spectral_dim(cfg.spatial, cfg.stages, cfg.in_channels))
        throw std::runtime_error("model: final spectral dimension mismatch");
}

void save_model(const SaakModel& model, const std::filesystem::path& path) {
    io::ByteWriter w;
    w.raw("SAAK", 4);
    w.u32(kModelVersion);
    w.u32(static_cast<std::uint32_t>(model.config.spatial));
    w.u32(static_cast<std::uint32_t>(model.config.stages));
    w.u32(static_cast<std::uint32_t>(model.config.in_channels));
    for (const auto& st : model.stages) {
        w.u32(static_cast<std::uint32_t>(st.stage_index));
        w.u32(static_cast<std::uint32_t>(st.in_channels));
        w.u32(static_cast<std::uint32_t>(st.dim));
        w.f64_array(st.eigenvalues);
        w.f64_array(st.ac_kernels);
    }
    w.u64(model.meta.sample_count);
    w.raw(model.meta.digest.data(), model.meta.digest.size());
    io::atomic_write(path, w.bytes);
}

SaakModel load_model(const std::filesystem::path& path) {
    const auto bytes = io::read_file(path);
    io::ByteReader r(bytes);
    char magic[4];
    r.raw(magic, 4);
    if (std::string(magic, 4) != "SAAK")
        throw std::runtime_error(path.string() + ": not a model file (bad magic)");
    const auto version = r.u32();
    if (version != kModelVersion)
        throw std::runtime_error(path.string() + ": unsupported model version " +
                                 std::to_string(version));
    SaakModel m;
    m.config.spatial = static_cast<int>(r.u32());
    m.config.stages = static_cast<int>(r.u32());
    m.config.in_channels = static_cast<int>(r.u32());
    if (m.config.spatial < 2 || m.config.spatial > 64 || m.config.stages < 1 ||
        m.config.stages > 16 || m.config.in_channels < 1 || m.config.in_channels > 4096)
        throw std::runtime_error(path.string() + ": implausible model config");

    int dead = 0;
    for (int i = 0; i < m.config.stages; ++i) {
        StageKernels st;
        st.stage_index = static_cast<int>(r.u32());
        st.in_channels = static_cast<int>(r.u32());
        st.dim = static_cast<int>(r.u32());
        st.spatial = m.config.spatial;
        st.dead_in = dead;  // derived, not serialized
        dead = st.dead_out();
        if (st.dim < 1 || st.dim > (1 << 20))
            throw std::runtime_error(path.string() + ": implausible stage dim");
        st.eigenvalues.resize(st.dim);
        r.f64_array(st.eigenvalues);
        st.ac_kernels.resize(static_cast<std::size_t>(st.dim) * st.dim);
        r.f64_array(st.ac_kernels);
        m.stages.push_back(std::move(st));
    }
    m.meta.sample_count = r.u64();
    r.raw(m.meta.digest.data(), m.meta.digest.size());
    if (!r.at_end())
        throw std::runtime_error(path.string() + ": trailing bytes after model payload");
    validate_model(m);
    return m;
}

}  // namespace saak
