#pragma once

#include <string>

#include "cusp/network.hpp"
#include "cusp/patterns.hpp"

#include "json.hpp"

namespace cusp {

struct Checkpoint {
    SurrogateModel model;
    PatternSet patterns;
    nlohmann::json metadata;  // epochs run, final losses, seed, ...
};

// Layout: 8-byte magic "CUSPCKPT", u32 LE version, u64 LE header length,
// UTF-8 JSON header (architecture, m, K, bit-packed patterns as base64,
// metadata), little-endian f64 parameter blob, u32 LE CRC32 of everything
// prior. Byte-for-byte deterministic for identical contents.
void save_checkpoint(const SurrogateModel& model, const PatternSet& patterns,
                     const nlohmann::json& metadata, const std::string& path);

Checkpoint load_checkpoint(const std::string& path);

std::uint32_t crc32(const unsigned char* data, std::size_t len);

}  // namespace cusp
