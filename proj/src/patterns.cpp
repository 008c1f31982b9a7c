#include "cusp/patterns.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "cusp/errors.hpp"

namespace cusp {

int Pattern::bright_count() const {
    int n = 0;
    for (auto b : bits) n += b;
    return n;
}

const Pattern& PatternSet::of_class(int k) const {
    if (k < 0 || k >= class_count()) {
        throw UsageError("pattern class " + std::to_string(k) + " out of range");
    }
    return patterns[static_cast<std::size_t>(k)];
}

void PatternSet::validate() const {
    if (patterns.empty()) throw ConfigError("pattern set is empty");
    const int s = patterns[0].side;
    for (std::size_t k = 0; k < patterns.size(); ++k) {
        const Pattern& p = patterns[k];
        if (p.side != s) throw ConfigError("pattern sizes are not uniform");
        if (p.class_id != static_cast<int>(k)) {
            throw ConfigError("pattern class ids are not 0..K-1 in order");
        }
        if (static_cast<int>(p.bits.size()) != s * s) {
            throw ConfigError("pattern bit count does not match side^2");
        }
        for (auto b : p.bits) {
            if (b != 0 && b != 1) throw ConfigError("pattern bit not in {0,1}");
        }
    }
    if (kind == PatternKind::Orthogonal) {
        for (std::size_t i = 0; i < patterns.size(); ++i) {
            for (std::size_t j = i + 1; j < patterns.size(); ++j) {
                if (dot(patterns[i], patterns[j]) != 0) {
                    throw ConfigError("orthogonal set has overlapping patterns");
                }
            }
        }
    }
}

const char* pattern_kind_name(PatternKind kind) {
    switch (kind) {
        case PatternKind::Orthogonal: return "orthogonal";
        case PatternKind::Glyph: return "glyph";
        case PatternKind::Symbol: return "symbol";
        case PatternKind::Custom: return "custom";
    }
    return "?";
}

PatternKind pattern_kind_from_name(const std::string& name) {
    if (name == "orthogonal") return PatternKind::Orthogonal;
    if (name == "glyph") return PatternKind::Glyph;
    if (name == "symbol") return PatternKind::Symbol;
    if (name == "custom") return PatternKind::Custom;
    throw ConfigError("unknown pattern kind '" + name + "'");
}

PatternSet gen_orthogonal(int K, int side) {
    const int m = side * side;
    if (K < 1 || K > m) throw ConfigError("orthogonal patterns need 1 <= K <= m");
    if (m % K != 0) {
        throw ConfigError("orthogonal patterns need m=" + std::to_string(m) +
                          " divisible by K=" + std::to_string(K));
    }
    PatternSet set;
    set.kind = PatternKind::Orthogonal;
    const int block = m / K;
    for (int k = 0; k < K; ++k) {
        Pattern p;
        p.side = side;
        p.class_id = k;
        p.bits.assign(static_cast<std::size_t>(m), 0);
        for (int i = k * block; i < (k + 1) * block; ++i) {
            p.bits[static_cast<std::size_t>(i)] = 1;
        }
        set.patterns.push_back(std::move(p));
    }
    return set;
}

namespace {

// 8x8 digit glyphs, one byte per row, MSB = leftmost pixel (classic CGA font).
constexpr std::uint8_t kDigitRows[10][8] = {
    {0x7C, 0xC6, 0xCE, 0xDE, 0xF6, 0xE6, 0x7C, 0x00},  // 0
    {0x30, 0x70, 0x30, 0x30, 0x30, 0x30, 0xFC, 0x00},  // 1
    {0x78, 0xCC, 0x0C, 0x38, 0x60, 0xCC, 0xFC, 0x00},  // 2
    {0x78, 0xCC, 0x0C, 0x38, 0x0C, 0xCC, 0x78, 0x00},  // 3
    {0x1C, 0x3C, 0x6C, 0xCC, 0xFE, 0x0C, 0x1E, 0x00},  // 4
    {0xFC, 0xC0, 0xF8, 0x0C, 0x0C, 0xCC, 0x78, 0x00},  // 5
    {0x38, 0x60, 0xC0, 0xF8, 0xCC, 0xCC, 0x78, 0x00},  // 6
    {0xFC, 0xCC, 0x0C, 0x18, 0x30, 0x30, 0x30, 0x00},  // 7
    {0x78, 0xCC, 0xCC, 0x78, 0xCC, 0xCC, 0x78, 0x00},  // 8
    {0x78, 0xCC, 0xCC, 0x7C, 0x0C, 0x18, 0x70, 0x00},  // 9
};

std::uint8_t digit_pixel(int digit, int y8, int x8) {
    return (kDigitRows[digit][y8] >> (7 - x8)) & 1u;
}

}  // namespace

PatternSet gen_glyph_digits(int K, int side) {
    if (K < 1 || K > 10) throw ConfigError("digit glyphs support K <= 10");
    if (side < 8) throw ConfigError("digit glyphs need side >= 8");
    PatternSet set;
    set.kind = PatternKind::Glyph;
    for (int k = 0; k < K; ++k) {
        Pattern p;
        p.side = side;
        p.class_id = k;
        p.bits.resize(static_cast<std::size_t>(side * side));
        for (int y = 0; y < side; ++y) {
            for (int x = 0; x < side; ++x) {
                const int sy = y * 8 / side;
                const int sx = x * 8 / side;
                p.bits[static_cast<std::size_t>(y * side + x)] =
                    digit_pixel(k, sy, sx);
            }
        }
        set.patterns.push_back(std::move(p));
    }
    return set;
}

namespace {

constexpr int kBankSize = 12;

std::uint8_t bank_pixel(int index, int side, int y, int x) {
    const double c = (side - 1) / 2.0;
    const double dx = x - c, dy = y - c;
    const double r = std::sqrt(dx * dx + dy * dy);
    const int th = std::max(1, side / 6);
    const int band = std::max(1, side / 4);
    switch (index) {
        case 0:  // plus
            return (std::abs(x - c) <= th || std::abs(y - c) <= th) ? 1 : 0;
        case 1:  // square outline
            return std::min(std::min(x, y), std::min(side - 1 - x, side - 1 - y)) < th;
        case 2:  // filled disk
            return r <= 0.35 * side ? 1 : 0;
        case 3:  // filled triangle, apex up
            return (y >= side / 6 && y <= side - 1 - side / 8 &&
                    std::abs(x - c) <= (y - side / 6) * 0.6)
                       ? 1
                       : 0;
        case 4:  // horizontal bars
            return (y / band) % 2 == 0 ? 1 : 0;
        case 5:  // checkerboard
            return ((x / band) + (y / band)) % 2 == 0 ? 1 : 0;
        case 6:  // diagonal cross
            return (std::abs(x - y) <= th || std::abs(x + y - (side - 1)) <= th) ? 1 : 0;
        case 7:  // ring
            return (r >= 0.22 * side && r <= 0.42 * side) ? 1 : 0;
        case 8:  // vertical bars
            return (x / band) % 2 == 0 ? 1 : 0;
        case 9:  // diamond outline
            return std::abs(std::abs(x - c) + std::abs(y - c) - 0.46 * side) <= th
                       ? 1
                       : 0;
        case 10:  // left half
            return x < side / 2 ? 1 : 0;
        case 11:  // corner L
            return (x < 2 * th || y > side - 1 - 2 * th) ? 1 : 0;
    }
    return 0;
}

}  // namespace

int symbol_bank_size() { return kBankSize; }

std::vector<std::uint8_t> render_symbol(int index, int side) {
    if (index < 0 || index >= kBankSize) {
        throw UsageError("symbol bank index out of range");
    }
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(side * side));
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            bits[static_cast<std::size_t>(y * side + x)] =
                bank_pixel(index, side, y, x);
        }
    }
    return bits;
}

int hamming(const Pattern& a, const Pattern& b) {
    int d = 0;
    for (std::size_t i = 0; i < a.bits.size(); ++i) d += a.bits[i] != b.bits[i];
    return d;
}

int dot(const Pattern& a, const Pattern& b) {
    int d = 0;
    for (std::size_t i = 0; i < a.bits.size(); ++i) d += a.bits[i] & b.bits[i];
    return d;
}

PatternSet gen_symbols(int K, int side, std::uint64_t seed) {
    if (K < 2) throw ConfigError("symbol patterns need K >= 2");
    if (side < 4) throw ConfigError("symbol patterns need side >= 4");
    const int m = side * side;
    const int min_dist = m / 8;

    PatternSet set;
    set.kind = PatternKind::Symbol;
    Rng rng(seed);
    for (int k = 0; k < K; ++k) {
        Pattern p;
        p.side = side;
        p.class_id = k;
        if (k < kBankSize) {
            p.bits = render_symbol(k, side);
            for (const Pattern& prev : set.patterns) {
                if (hamming(prev, p) < min_dist) {
                    throw ConfigError(
                        "symbol bank violates the minimum Hamming separation "
                        "at side " +
                        std::to_string(side));
                }
            }
        } else {
            bool placed = false;
            for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
                p.bits.resize(static_cast<std::size_t>(m));
                for (auto& b : p.bits) b = rng.uniform() < 0.5 ? 1 : 0;
                placed = true;
                for (const Pattern& prev : set.patterns) {
                    if (hamming(prev, p) < min_dist) {
                        placed = false;
                        break;
                    }
                }
            }
            if (!placed) {
                throw NumericError(
                    "could not satisfy the minimum pattern distance after "
                    "1000 retries");
            }
        }
        set.patterns.push_back(std::move(p));
    }
    return set;
}

PairwiseStats pairwise_stats(const PatternSet& set) {
    set.validate();
    const int K = set.class_count();
    PairwiseStats stats;
    stats.dot.assign(static_cast<std::size_t>(K),
                     std::vector<int>(static_cast<std::size_t>(K), 0));
    for (int i = 0; i < K; ++i) {
        stats.density.push_back(
            static_cast<double>(set.patterns[static_cast<std::size_t>(i)].bright_count()) /
            set.pixel_count());
        for (int j = 0; j < K; ++j) {
            stats.dot[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                dot(set.patterns[static_cast<std::size_t>(i)],
                    set.patterns[static_cast<std::size_t>(j)]);
        }
    }
    return stats;
}

Pattern load_pattern_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open pattern file: " + path);

    // P1 tokenizer: '#' starts a comment through end of line.
    auto next_token = [&in, &path]() -> std::string {
        std::string tok;
        char c;
        while (in.get(c)) {
            if (c == '#') {
                std::string line;
                std::getline(in, line);
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                if (!tok.empty()) return tok;
                continue;
            }
            tok.push_back(c);
        }
        if (tok.empty()) throw DataError("truncated pattern file: " + path);
        return tok;
    };

    if (next_token() != "P1") throw DataError("not a P1 bitmap: " + path);
    int w = 0, h = 0;
    try {
        w = std::stoi(next_token());
        h = std::stoi(next_token());
    } catch (const std::exception&) {
        throw DataError("malformed P1 header in " + path);
    }
    if (w <= 0 || h <= 0) throw DataError("malformed P1 dimensions in " + path);
    if (w != h) throw DataError("non-square pattern in " + path);

    Pattern p;
    p.side = w;
    p.bits.resize(static_cast<std::size_t>(w * h));
    for (auto& b : p.bits) {
        const std::string tok = next_token();
        if (tok == "0") {
            b = 0;
        } else if (tok == "1") {
            b = 1;
        } else {
            throw DataError("non-binary pixel value '" + tok + "' in " + path);
        }
    }
    return p;
}

void save_pattern_file(const Pattern& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write pattern file: " + path);
    out << "P1\n" << p.side << " " << p.side << "\n";
    for (int y = 0; y < p.side; ++y) {
        for (int x = 0; x < p.side; ++x) {
            out << (x ? " " : "") << int(p.bits[static_cast<std::size_t>(y * p.side + x)]);
        }
        out << "\n";
    }
    if (!out) throw DataError("failed writing pattern file: " + path);
}

}  // namespace cusp
