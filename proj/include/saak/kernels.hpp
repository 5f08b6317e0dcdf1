// Data-driven transform kernels: per-stage orthonormal AC bases learned from
// the eigendecomposition of mean-removed cuboid covariance, plus the
// serializable multi-stage model.
//
// Channel rule per stage: 1 DC channel plus d learned AC channels, so
// out_channels = s*s*in_channels + 1. The trailing dead_out() output channels
// are structurally zero on every valid input: the DC-direction channel plus
// the images of the previous stage's dead channels. The DC direction is
// uniform over the live cuboid coordinates only (at stage 1 that is the
// classic (1/sqrt(d))*1), which keeps every stage's residual inside the valid
// subspace; reconstruction error of filtered coefficients then matches the
// removed coefficient energy exactly, stage after stage.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "saak/tensor.hpp"

namespace saak {

struct SaakConfig {
    int spatial = 2;      // block side s
    int stages = 1;       // T; the paper-style name of a config is "(s-T)"
    int in_channels = 3;  // C
};

struct StageKernels {
    int stage_index = 0;  // 1-based
    int spatial = 0;
    int in_channels = 0;
    int dead_in = 0;  // trailing structurally-zero input channels (0 at stage 1)
    int dim = 0;      // s*s*in_channels
    std::vector<double> ac_kernels;   // dim x dim, row i = eigenvector of the
                                      // residual covariance, i-th largest eigenvalue
    std::vector<double> eigenvalues;  // length dim, non-increasing, >= 0

    int out_channels() const { return dim + 1; }
    int live_in() const { return in_channels - dead_in; }
    // structurally-zero trailing output channels: DC direction + inherited
    int dead_out() const { return spatial * spatial * dead_in + 1; }
    const double* kernel_row(int i) const {
        return ac_kernels.data() + static_cast<std::size_t>(i) * dim;
    }
};

struct TrainingMeta {
    std::uint64_t sample_count = 0;  // cuboids consumed across all stages
    std::string dataset_tag;         // in-memory provenance, not serialized
    std::uint64_t seed = 0;
    std::array<std::uint8_t, 32> digest{};  // SHA-256 over the training inputs
};

struct SaakModel {
    SaakConfig config;
    std::vector<StageKernels> stages;
    TrainingMeta meta;
};

// Learns one stage from raw (not yet mean-removed) cuboids. Removes the
// per-cuboid DC component, eigendecomposes the residual covariance and returns
// the full orthonormal AC basis (data-positive directions first, then the
// basis completion of unseen directions, then the DC direction and the dead
// coordinates). Warns on stderr when count < dim (rank-deficient covariance)
// but proceeds via the Gram-matrix route.
StageKernels train_stage(const CuboidBatch& cuboids, int stage_index, int spatial,
                         int in_channels, int dead_in = 0);

// Trains all stages bottom-up: stage i consumes the forward outputs of stages
// 1..i-1 on the training images. At most sample_cap cuboids per stage are
// used (seeded uniform subsample in enumeration order).
SaakModel train_model(const std::vector<ImageTensor>& images, const SaakConfig& config,
                      std::int64_t sample_cap = 200000, std::uint64_t seed = 0,
                      const std::string& dataset_tag = "");

// Extends r orthonormal rows of length d to a full orthonormal d x d basis
// (Householder QR completion). The first r output rows equal the inputs up
// to sign.
std::vector<double> complete_orthonormal_basis(const std::vector<double>& rows, int r,
                                               int d);

// Checks every StageKernels and model-level invariant; throws on violation.
void validate_model(const SaakModel& model);

// Binary model file: magic "SAAK", version, config, per-stage eigenvalues and
// kernels, sample count and digest. Little-endian, written atomically.
void save_model(const SaakModel& model, const std::filesystem::path& path);
SaakModel load_model(const std::filesystem::path& path);

}  // namespace saak
