// Little-endian binary encoding helpers shared by the model, tensor and
// classifier file formats, plus atomic file replacement (temp + rename).

#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace saak::io {

struct ByteWriter {
    std::vector<std::uint8_t> bytes;

    void raw(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        bytes.insert(bytes.end(), b, b + n);
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void f64_array(std::span<const double> a) {
        for (double v : a) f64(v);
    }
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint32_t u32();
    std::uint64_t u64();
    double f64() { return std::bit_cast<double>(u64()); }
    void f64_array(std::span<double> out);
    void raw(void* p, std::size_t n);
    std::size_t remaining() const { return bytes_.size() - pos_; }
    bool at_end() const { return pos_ == bytes_.size(); }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

// Writes to a sibling temp file and renames over the target.
void atomic_write(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace saak::io
