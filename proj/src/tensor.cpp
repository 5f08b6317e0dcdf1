#include "saak/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace saak {
namespace {

void check_positive_dims(int height, int width, int channels) {
    if (height <= 0 || width <= 0 || channels <= 0)
        throw std::invalid_argument("tensor dimensions must be positive, got " +
                                    std::to_string(height) + "x" + std::to_string(width) +
                                    "x" + std::to_string(channels));
}

CuboidBatch partition_impl(int height, int width, int channels,
                           std::span<const double> data, int s) {
    if (s <= 0) throw std::invalid_argument("block side must be positive");
    if (height % s != 0)
        throw std::invalid_argument("height " + std::to_string(height) +
                                    " not divisible by block side " + std::to_string(s));
    if (width % s != 0)
        throw std::invalid_argument("width " + std::to_string(width) +
                                    " not divisible by block side " + std::to_string(s));
    if (data.size() != static_cast<std::size_t>(height) * width * channels)
        throw std::invalid_argument("tensor data length does not match dimensions");

    const int by = height / s;
    const int bx = width / s;
    CuboidBatch b;
    b.count = static_cast<std::int64_t>(by) * bx;
    b.dim = s * s * channels;
    b.data.resize(static_cast<std::size_t>(b.count) * b.dim);

    const std::size_t row_stride = static_cast<std::size_t>(width) * channels;
    double* out = b.data.data();
    for (int gy = 0; gy < by; ++gy) {
        for (int gx = 0; gx < bx; ++gx) {
            const double* block =
                data.data() + (static_cast<std::size_t>(gy) * s * width + static_cast<std::size_t>(gx) * s) * channels;
            for (int y = 0; y < s; ++y) {
                const double* src = block + y * row_stride;
                for (int k = 0; k < s * channels; ++k) *out++ = src[k];
            }
        }
    }
    return b;
}

std::vector<double> assemble_impl(const CuboidBatch& b, int height, int width,
                                  int channels, int s) {
    if (s <= 0) throw std::invalid_argument("block side must be positive");
    check_positive_dims(height, width, channels);
    if (height % s != 0 || width % s != 0)
        throw std::invalid_argument("target dimensions not divisible by block side");
    const int by = height / s;
    const int bx = width / s;
    if (b.count != static_cast<std::int64_t>(by) * bx)
        throw std::invalid_argument("cuboid count " + std::to_string(b.count) +
                                    " does not match " + std::to_string(by) + "x" +
                                    std::to_string(bx) + " block grid");
    if (b.dim != s * s * channels)
        throw std::invalid_argument("cuboid dim " + std::to_string(b.dim) +
                                    " does not match s*s*channels = " +
                                    std::to_string(s * s * channels));
    if (b.data.size() != static_cast<std::size_t>(b.count) * b.dim)
        throw std::invalid_argument("cuboid batch data length does not match count*dim");

    std::vector<double> out(static_cast<std::size_t>(height) * width * channels);
    const std::size_t row_stride = static_cast<std::size_t>(width) * channels;
    const double* in = b.data.data();
    for (int gy = 0; gy < by; ++gy) {
        for (int gx = 0; gx < bx; ++gx) {
            double* block =
                out.data() + (static_cast<std::size_t>(gy) * s * width + static_cast<std::size_t>(gx) * s) * channels;
            for (int y = 0; y < s; ++y) {
                double* dst = block + y * row_stride;
                for (int k = 0; k < s * channels; ++k) dst[k] = *in++;
            }
        }
    }
    return out;
}

}  // namespace

ImageTensor ImageTensor::zeros(int height, int width, int channels) {
    check_positive_dims(height, width, channels);
    ImageTensor t;
    t.height = height;
    t.width = width;
    t.channels = channels;
    t.data.assign(static_cast<std::size_t>(height) * width * channels, 0.0);
    return t;
}

CoefficientTensor CoefficientTensor::zeros(int height, int width, int channels, int stage) {
    check_positive_dims(height, width, channels);
    CoefficientTensor t;
    t.height = height;
    t.width = width;
    t.channels = channels;
    t.stage = stage;
    t.data.assign(static_cast<std::size_t>(height) * width * channels, 0.0);
    return t;
}

CuboidBatch partition_into_cuboids(const ImageTensor& t, int s) {
    return partition_impl(t.height, t.width, t.channels, t.data, s);
}

CuboidBatch partition_into_cuboids(int height, int width, int channels,
                                   std::span<const double> data, int s) {
    return partition_impl(height, width, channels, data, s);
}

CuboidBatch partition_into_cuboids(const CoefficientTensor& t, int s) {
    return partition_impl(t.height, t.width, t.channels, t.data, s);
}

ImageTensor assemble_image_from_cuboids(const CuboidBatch& b, int height, int width,
                                        int channels, int s) {
    ImageTensor t;
    t.height = height;
    t.width = width;
    t.channels = channels;
    t.data = assemble_impl(b, height, width, channels, s);
    return t;
}

CoefficientTensor assemble_coefficients_from_cuboids(const CuboidBatch& b, int height,
                                                     int width, int channels, int s,
                                                     int stage) {
    CoefficientTensor t;
    t.height = height;
    t.width = width;
    t.channels = channels;
    t.stage = stage;
    t.data = assemble_impl(b, height, width, channels, s);
    return t;
}

ImageTensor normalize_pixels(std::span<const std::uint8_t> raw, int height, int width,
                             int channels) {
    check_positive_dims(height, width, channels);
    if (raw.size() != static_cast<std::size_t>(height) * width * channels)
        throw std::invalid_argument("raw byte length " + std::to_string(raw.size()) +
                                    " does not match dimensions");
    ImageTensor t;
    t.height = height;
    t.width = width;
    t.channels = channels;
    t.data.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) t.data[i] = raw[i] / 255.0;
    return t;
}

std::vector<std::uint8_t> denormalize_clamp(const ImageTensor& t) {
    std::vector<std::uint8_t> out(t.data.size());
    for (std::size_t i = 0; i < t.data.size(); ++i) {
        const double v = std::min(1.0, std::max(0.0, t.data[i]));
        out[i] = static_cast<std::uint8_t>(std::lround(255.0 * v));
    }
    return out;
}

}  // namespace saak
