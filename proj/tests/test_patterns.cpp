#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "cusp/errors.hpp"
#include "cusp/patterns.hpp"

using namespace cusp;

TEST_CASE("orthogonal K=4 side=4 has disjoint supports") {
    PatternSet set = gen_orthogonal(4, 4);
    set.validate();
    for (const Pattern& p : set.patterns) CHECK(p.bright_count() == 4);
    const PairwiseStats stats = pairwise_stats(set);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            CHECK(stats.dot[i][j] == (i == j ? 4 : 0));
        }
    }
}

TEST_CASE("orthogonal rejects m not divisible by K") {
    CHECK_THROWS_AS(gen_orthogonal(10, 16), ConfigError);
}

TEST_CASE("orthogonal K=100 side=20 is extremely sparse") {
    PatternSet set = gen_orthogonal(100, 20);
    for (const Pattern& p : set.patterns) CHECK(p.bright_count() == 4);
    const PairwiseStats stats = pairwise_stats(set);
    for (double d : stats.density) CHECK(d == doctest::Approx(4.0 / 400.0));
}

TEST_CASE("digit glyphs are distinct and deterministic") {
    PatternSet a = gen_glyph_digits(10, 16);
    PatternSet b = gen_glyph_digits(10, 16);
    a.validate();
    for (int i = 0; i < 10; ++i) {
        CHECK(a.patterns[i].bits == b.patterns[i].bits);
        for (int j = i + 1; j < 10; ++j) {
            CHECK(hamming(a.patterns[i], a.patterns[j]) > 0);
        }
    }
}

TEST_CASE("digits 8 and 3 overlap but differ") {
    PatternSet set = gen_glyph_digits(10, 16);
    CHECK(hamming(set.patterns[8], set.patterns[3]) > 0);
    CHECK(dot(set.patterns[8], set.patterns[3]) > 0);
}

TEST_CASE("glyphs reject K > 10") {
    CHECK_THROWS_AS(gen_glyph_digits(11, 16), ConfigError);
}

TEST_CASE("symbol sets keep the minimum Hamming separation") {
    PatternSet set = gen_symbols(4, 16, 0);
    set.validate();
    const int min_dist = 16 * 16 / 8;
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            CHECK(hamming(set.patterns[i], set.patterns[j]) >= min_dist);
        }
    }
}

TEST_CASE("cross and square are visually distinct and non-orthogonal") {
    PatternSet set = gen_symbols(2, 16, 0);
    CHECK(hamming(set.patterns[0], set.patterns[1]) > 0);
    CHECK(dot(set.patterns[0], set.patterns[1]) > 0);
}

TEST_CASE("seeded random fills beyond the bank are reproducible") {
    PatternSet a = gen_symbols(40, 16, 7);
    PatternSet b = gen_symbols(40, 16, 7);
    REQUIRE(a.class_count() == 40);
    for (int k = 0; k < 40; ++k) {
        CHECK(a.patterns[k].bits == b.patterns[k].bits);
    }
}

TEST_CASE("full bank at side 16 satisfies the separation constraint") {
    CHECK_NOTHROW(gen_symbols(symbol_bank_size(), 16, 1));
}

TEST_CASE("P1 file round-trips and rejects bad input") {
    const std::string path = "test_pattern_tmp.pbm";

    SUBCASE("direct 2x2 read") {
        std::ofstream out(path);
        out << "P1\n# comment\n2 2\n1 0\n0 1\n";
        out.close();
        Pattern p = load_pattern_file(path);
        CHECK(p.side == 2);
        CHECK(p.bits == std::vector<std::uint8_t>{1, 0, 0, 1});
    }

    SUBCASE("non-square is rejected") {
        std::ofstream out(path);
        out << "P1\n3 2\n1 0 1\n0 1 0\n";
        out.close();
        CHECK_THROWS_AS(load_pattern_file(path), DataError);
    }

    SUBCASE("non-binary pixel is rejected") {
        std::ofstream out(path);
        out << "P1\n2 2\n1 0\n0 2\n";
        out.close();
        CHECK_THROWS_AS(load_pattern_file(path), DataError);
    }

    SUBCASE("bad magic is rejected") {
        std::ofstream out(path);
        out << "P2\n2 2\n255\n1 0 0 1\n";
        out.close();
        CHECK_THROWS_AS(load_pattern_file(path), DataError);
    }

    SUBCASE("save then load is bit-exact") {
        PatternSet set = gen_glyph_digits(3, 8);
        save_pattern_file(set.patterns[2], path);
        Pattern back = load_pattern_file(path);
        CHECK(back.side == 8);
        CHECK(back.bits == set.patterns[2].bits);
    }

    std::remove(path.c_str());
}

TEST_CASE("pairwise stats of duplicated patterns equal the bright count") {
    PatternSet set = gen_glyph_digits(2, 16);
    PatternSet dup;
    dup.kind = PatternKind::Custom;
    dup.patterns = {set.patterns[0], set.patterns[0]};
    dup.patterns[1].class_id = 1;
    const PairwiseStats stats = pairwise_stats(dup);
    CHECK(stats.dot[0][1] == set.patterns[0].bright_count());
}

TEST_CASE("glyph set has overlapping strokes somewhere") {
    const PairwiseStats stats = pairwise_stats(gen_glyph_digits(10, 16));
    bool any_overlap = false;
    for (int i = 0; i < 10; ++i) {
        for (int j = i + 1; j < 10; ++j) {
            any_overlap |= stats.dot[i][j] > 0;
        }
    }
    CHECK(any_overlap);
}

TEST_CASE("validation rejects non-binary values") {
    PatternSet set = gen_orthogonal(2, 2);
    set.patterns[0].bits[0] = 2;
    CHECK_THROWS_AS(set.validate(), ConfigError);
}
