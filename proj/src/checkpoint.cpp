#include "cusp/checkpoint.hpp"

#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "cusp/errors.hpp"

namespace cusp {
namespace {

constexpr char kMagic[8] = {'C', 'U', 'S', 'P', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

const char* kB64Alphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::vector<unsigned char>& data) {
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    for (std::size_t i = 0; i < data.size(); i += 3) {
        std::uint32_t block = std::uint32_t(data[i]) << 16;
        if (i + 1 < data.size()) block |= std::uint32_t(data[i + 1]) << 8;
        if (i + 2 < data.size()) block |= std::uint32_t(data[i + 2]);
        out.push_back(kB64Alphabet[(block >> 18) & 0x3F]);
        out.push_back(kB64Alphabet[(block >> 12) & 0x3F]);
        out.push_back(i + 1 < data.size() ? kB64Alphabet[(block >> 6) & 0x3F] : '=');
        out.push_back(i + 2 < data.size() ? kB64Alphabet[block & 0x3F] : '=');
    }
    return out;
}

std::vector<unsigned char> base64_decode(const std::string& s) {
    std::array<int, 256> rev;
    rev.fill(-1);
    for (int i = 0; i < 64; ++i) {
        rev[static_cast<unsigned char>(kB64Alphabet[i])] = i;
    }
    std::vector<unsigned char> out;
    std::uint32_t block = 0;
    int bits = 0;
    for (char c : s) {
        if (c == '=') break;
        const int v = rev[static_cast<unsigned char>(c)];
        if (v < 0) throw DataError("invalid base64 in checkpoint header");
        block = (block << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<unsigned char>((block >> bits) & 0xFF));
        }
    }
    return out;
}

std::vector<unsigned char> pack_bits(const std::vector<std::uint8_t>& bits) {
    std::vector<unsigned char> packed((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) packed[i / 8] |= static_cast<unsigned char>(1u << (i % 8));
    }
    return packed;
}

std::vector<std::uint8_t> unpack_bits(const std::vector<unsigned char>& packed,
                                      std::size_t n_bits) {
    if (packed.size() < (n_bits + 7) / 8) {
        throw DataError("checkpoint pattern bits truncated");
    }
    std::vector<std::uint8_t> bits(n_bits);
    for (std::size_t i = 0; i < n_bits; ++i) {
        bits[i] = (packed[i / 8] >> (i % 8)) & 1u;
    }
    return bits;
}

template <typename T>
void append_le(std::vector<unsigned char>& buf, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    // Hosts here are little-endian; the format is defined LE.
    buf.insert(buf.end(), raw, raw + sizeof(T));
}

}  // namespace

std::uint32_t crc32(const unsigned char* data, std::size_t len) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) {
                c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            }
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i) {
        crc = table[(crc ^ data[i]) & 0xFF] ^ (crc >> 8);
    }
    return crc ^ 0xFFFFFFFFu;
}

void save_checkpoint(const SurrogateModel& model, const PatternSet& patterns,
                     const nlohmann::json& metadata, const std::string& path) {
    patterns.validate();
    nlohmann::json header;
    header["arch"] = model.arch();
    header["input_shape"] = model.input_shape();
    header["m"] = model.m();
    header["K"] = model.class_count();
    header["pattern_kind"] = pattern_kind_name(patterns.kind);
    header["pattern_side"] = patterns.side();
    nlohmann::json pats = nlohmann::json::array();
    for (const Pattern& p : patterns.patterns) {
        pats.push_back(base64_encode(pack_bits(p.bits)));
    }
    header["patterns"] = pats;
    header["metadata"] = metadata;
    const std::string header_text = header.dump();

    std::vector<unsigned char> buf;
    buf.insert(buf.end(), kMagic, kMagic + 8);
    append_le(buf, kVersion);
    append_le(buf, static_cast<std::uint64_t>(header_text.size()));
    buf.insert(buf.end(), header_text.begin(), header_text.end());
    for (double v : model.flatten_parameters()) {
        append_le(buf, v);
    }
    append_le(buf, crc32(buf.data(), buf.size()));

    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write checkpoint: " + path);
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size()));
        if (!out) throw DataError("failed writing checkpoint: " + path);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw DataError("cannot move checkpoint into place: " + path);
    }
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + path);
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());

    if (buf.size() < 8 + 4 + 8 + 4 || std::memcmp(buf.data(), kMagic, 8) != 0) {
        throw DataError("not a checkpoint: " + path);
    }
    std::uint32_t version;
    std::memcpy(&version, buf.data() + 8, 4);
    if (version != kVersion) {
        throw DataError("unsupported checkpoint version " + std::to_string(version) +
                        " in " + path);
    }
    std::uint32_t stored_crc;
    std::memcpy(&stored_crc, buf.data() + buf.size() - 4, 4);
    if (stored_crc != crc32(buf.data(), buf.size() - 4)) {
        throw DataError("checkpoint checksum failure: " + path);
    }

    std::uint64_t header_len;
    std::memcpy(&header_len, buf.data() + 12, 8);
    const std::size_t header_off = 20;
    if (header_off + header_len + 4 > buf.size()) {
        throw DataError("truncated checkpoint: " + path);
    }
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(buf.begin() + static_cast<std::ptrdiff_t>(header_off),
                                       buf.begin() + static_cast<std::ptrdiff_t>(header_off + header_len));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("corrupt checkpoint header in " + path + ": " + e.what());
    }

    Checkpoint ckpt;
    const int m = header.at("m").get<int>();
    const int K = header.at("K").get<int>();
    ckpt.model = SurrogateModel::build(header.at("arch").get<std::string>(),
                                       header.at("input_shape").get<std::vector<int>>(),
                                       m, K, /*seed=*/0);
    ckpt.metadata = header.value("metadata", nlohmann::json::object());

    ckpt.patterns.kind = pattern_kind_from_name(header.at("pattern_kind").get<std::string>());
    const int side = header.at("pattern_side").get<int>();
    const auto pats = header.at("patterns");
    if (static_cast<int>(pats.size()) != K) {
        throw DataError("checkpoint pattern count does not match K in " + path);
    }
    for (int k = 0; k < K; ++k) {
        Pattern p;
        p.side = side;
        p.class_id = k;
        p.bits = unpack_bits(base64_decode(pats[static_cast<std::size_t>(k)].get<std::string>()),
                             static_cast<std::size_t>(side * side));
        ckpt.patterns.patterns.push_back(std::move(p));
    }
    ckpt.patterns.validate();

    const std::size_t blob_off = header_off + header_len;
    const std::size_t blob_bytes = buf.size() - 4 - blob_off;
    if (blob_bytes != ckpt.model.parameter_count() * sizeof(double)) {
        throw DataError("checkpoint parameter blob length mismatch in " + path);
    }
    std::vector<double> params(ckpt.model.parameter_count());
    std::memcpy(params.data(), buf.data() + blob_off, blob_bytes);
    ckpt.model.load_parameters(params);
    return ckpt;
}

}  // namespace cusp
