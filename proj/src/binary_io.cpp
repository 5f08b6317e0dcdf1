#include "saak/binary_io.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace saak::io {

std::uint32_t ByteReader::u32() {
    if (remaining() < 4) throw std::runtime_error("truncated file: expected 4 more bytes");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
}

std::uint64_t ByteReader::u64() {
    if (remaining() < 8) throw std::runtime_error("truncated file: expected 8 more bytes");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
}

void ByteReader::f64_array(std::span<double> out) {
    for (double& v : out) v = f64();
}

void ByteReader::raw(void* p, std::size_t n) {
    if (remaining() < n)
        throw std::runtime_error("truncated file: expected " + std::to_string(n) +
                                 " more bytes");
    std::memcpy(p, bytes_.data() + pos_, n);
    pos_ += n;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    f.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(f.tellg());
    f.seekg(0);
    std::vector<std::uint8_t> bytes(size);
    if (size > 0) f.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
    if (!f) throw std::runtime_error("failed reading " + path.string());
    return bytes;
}

void atomic_write(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f.write(reinterpret_cast<const char*>(bytes.data()),
                static_cast<std::streamsize>(bytes.size()));
        if (!f) throw std::runtime_error("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace saak::io
