#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cusp/rng.hpp"

namespace cusp {

// Square binary bitmap used as a per-class reconstruction target.
struct Pattern {
    int side = 0;
    int class_id = 0;
    std::vector<std::uint8_t> bits;  // side*side values in {0,1}, row-major

    int pixel_count() const { return side * side; }
    int bright_count() const;
};

enum class PatternKind { Orthogonal, Glyph, Symbol, Custom };

struct PatternSet {
    PatternKind kind = PatternKind::Custom;
    std::vector<Pattern> patterns;  // index == class id

    int class_count() const { return static_cast<int>(patterns.size()); }
    int side() const { return patterns.empty() ? 0 : patterns[0].side; }
    int pixel_count() const { return side() * side(); }

    const Pattern& of_class(int k) const;

    // Checks bit values, uniform sizes, class ids, and for kind=Orthogonal
    // that off-diagonal dot products are zero. Throws ConfigError.
    void validate() const;
};

const char* pattern_kind_name(PatternKind kind);
PatternKind pattern_kind_from_name(const std::string& name);

// Disjoint-support block patterns: class k occupies indices
// [k*m/K, (k+1)*m/K). Requires m % K == 0 and K <= m.
PatternSet gen_orthogonal(int K, int side);

// Built-in digit glyphs 0..K-1 scaled from a fixed 8x8 bank. K <= 10,
// side >= 8.
PatternSet gen_glyph_digits(int K, int side);

// Visual symbols from a fixed procedural bank, topped up with seeded random
// 50%-density patterns when K exceeds the bank. Enforces pairwise Hamming
// distance >= m/8 with up to 1000 seeded retries per fill pattern.
PatternSet gen_symbols(int K, int side, std::uint64_t seed);

// Fixed symbol bank shared with the synthetic dataset generator.
int symbol_bank_size();
std::vector<std::uint8_t> render_symbol(int index, int side);

int hamming(const Pattern& a, const Pattern& b);
int dot(const Pattern& a, const Pattern& b);

struct PairwiseStats {
    std::vector<std::vector<int>> dot;  // K x K, symmetric
    std::vector<double> density;        // bright fraction per pattern
};
PairwiseStats pairwise_stats(const PatternSet& set);

// Plain-text portable bitmap (P1); requires width == height.
Pattern load_pattern_file(const std::string& path);
void save_pattern_file(const Pattern& p, const std::string& path);

}  // namespace cusp
