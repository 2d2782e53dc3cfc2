#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace qsr {

// Minimal FIPS 180-4 SHA-256. Used for content-addressing QUBO problems in
// replay files and for input hashes in run manifests.
class Sha256 {
public:
    Sha256();
    void update(const void* data, std::size_t len);
    std::array<std::uint8_t, 32> finish();

    static std::array<std::uint8_t, 32> digest(const void* data, std::size_t len);
    static std::string hex(const std::array<std::uint8_t, 32>& d);

private:
    void process_block(const std::uint8_t* block);

    std::uint32_t state_[8];
    std::uint64_t total_len_ = 0;
    std::uint8_t buffer_[64];
    std::size_t buffered_ = 0;
};

std::string sha256_file_hex(const std::string& path);

} // namespace qsr
