#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace saak {

// Thin streaming wrapper over the system SHA-256.
class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(const void* data, std::size_t n);
    void update_u32(std::uint32_t v);
    void update_u64(std::uint64_t v);
    std::array<std::uint8_t, 32> finish();

private:
    void* ctx_;
};

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data);

}  // namespace saak
