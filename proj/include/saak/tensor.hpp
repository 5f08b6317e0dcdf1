// Dense tensor types shared by the whole pipeline: images, coefficient
// cuboids and the flattened cuboid batches the kernel trainer consumes.
//
// Index order is the single source of truth everywhere: a value at
// (y, x, c) lives at data[(y*width + x)*channels + c], channel fastest.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace saak {

// Pixel-domain tensor, values normalized to [0,1] for well-formed images.
struct ImageTensor {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;

    static ImageTensor zeros(int height, int width, int channels);

    double& at(int y, int x, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    double at(int y, int x, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::size_t size() const { return data.size(); }
};

// Spatial-spectral tensor produced by the transform. Channel 0 is DC,
// channels 1..K-1 are AC ordered by non-increasing training eigenvalue.
// stage == 0 denotes a pixel-domain buffer mid-inversion.
struct CoefficientTensor {
    int height = 0;
    int width = 0;
    int channels = 0;
    int stage = 0;
    std::vector<double> data;

    static CoefficientTensor zeros(int height, int width, int channels, int stage);

    double& at(int y, int x, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    double at(int y, int x, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::size_t size() const { return data.size(); }
};

// count x dim matrix of flattened s x s x K cuboids, one per row.
// Row layout ((y*s + x)*K + c); rows enumerate the block grid row-major.
struct CuboidBatch {
    std::int64_t count = 0;
    int dim = 0;
    std::vector<double> data;

    std::span<double> row(std::int64_t i) {
        return {data.data() + i * dim, static_cast<std::size_t>(dim)};
    }
    std::span<const double> row(std::int64_t i) const {
        return {data.data() + i * dim, static_cast<std::size_t>(dim)};
    }
};

CuboidBatch partition_into_cuboids(const ImageTensor& t, int s);
CuboidBatch partition_into_cuboids(const CoefficientTensor& t, int s);
CuboidBatch partition_into_cuboids(int height, int width, int channels,
                                   std::span<const double> data, int s);

ImageTensor assemble_image_from_cuboids(const CuboidBatch& b, int height, int width,
                                        int channels, int s);
CoefficientTensor assemble_coefficients_from_cuboids(const CuboidBatch& b, int height,
                                                     int width, int channels, int s,
                                                     int stage);

// v -> v/255 exactly; raw is H*W*C bytes already in channel-fastest order.
ImageTensor normalize_pixels(std::span<const std::uint8_t> raw, int height, int width,
                             int channels);

// v -> round(255 * clamp(v, 0, 1)).
std::vector<std::uint8_t> denormalize_clamp(const ImageTensor& t);

}  // namespace saak
