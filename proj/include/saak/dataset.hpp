// Dataset and tensor-file I/O: CIFAR-10 binary batches (3073-byte records,
// planar R/G/B), raw tensor files ("STNS": magic, version, rank, dims,
// float64 payload in image index order), and the JSON label sidecar used by
// the CLI pipelines.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "saak/tensor.hpp"

namespace saak {

struct LabeledImages {
    std::vector<ImageTensor> images;
    std::vector<int> labels;
};

// Reads every 3073-byte record: label byte then 1024 R, 1024 G, 1024 B pixel
// bytes, transposed into channel-fastest [0,1] tensors. Rejects truncated
// files and labels >= 10.
LabeledImages load_cifar10_batch(const std::filesystem::path& path);

// Inverse of the loader (image values are denormalized with clamping); used
// by the synthetic-data generator and round-trip tests.
void write_cifar10_batch(const std::filesystem::path& path, const LabeledImages& data);

struct RawTensor {
    std::vector<std::uint32_t> dims;
    std::vector<double> data;
};

void write_tensor(const std::filesystem::path& path, const RawTensor& t);
void write_tensor(const std::filesystem::path& path, const ImageTensor& t);
RawTensor read_tensor(const std::filesystem::path& path);
ImageTensor read_image_tensor(const std::filesystem::path& path);  // requires rank 3

// labels.json: filename -> label map kept next to exported tensor files.
void write_labels(const std::filesystem::path& path,
                  const std::map<std::string, int>& labels);
std::map<std::string, int> read_labels(const std::filesystem::path& path);

}  // namespace saak
