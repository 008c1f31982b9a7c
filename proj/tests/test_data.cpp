#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "cusp/data.hpp"
#include "cusp/errors.hpp"

using namespace cusp;

namespace {

void put_u32_be(std::ofstream& out, std::uint32_t v) {
    const unsigned char bytes[4] = {
        static_cast<unsigned char>(v >> 24),
        static_cast<unsigned char>(v >> 16),
        static_cast<unsigned char>(v >> 8),
        static_cast<unsigned char>(v),
    };
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

void write_idx_images(const std::string& path, std::uint32_t magic, int count,
                      int rows, int cols, const std::vector<unsigned char>& pixels) {
    std::ofstream out(path, std::ios::binary);
    put_u32_be(out, magic);
    put_u32_be(out, static_cast<std::uint32_t>(count));
    put_u32_be(out, static_cast<std::uint32_t>(rows));
    put_u32_be(out, static_cast<std::uint32_t>(cols));
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
}

void write_idx_labels(const std::string& path, std::uint32_t magic, int count,
                      const std::vector<unsigned char>& labels) {
    std::ofstream out(path, std::ios::binary);
    put_u32_be(out, magic);
    put_u32_be(out, static_cast<std::uint32_t>(count));
    out.write(reinterpret_cast<const char*>(labels.data()),
              static_cast<std::streamsize>(labels.size()));
}

}  // namespace

TEST_CASE("idx loader round-trips hand-written bytes") {
    const std::string img_path = "test_idx_images.bin";
    const std::string lbl_path = "test_idx_labels.bin";
    std::vector<unsigned char> pixels = {0, 255, 128, 64,   //
                                         255, 0, 0, 255};   // two 2x2 images
    write_idx_images(img_path, 2051, 2, 2, 2, pixels);
    write_idx_labels(lbl_path, 2049, 2, {3, 7});

    Dataset ds = load_idx(img_path, lbl_path);
    CHECK(ds.size() == 2);
    CHECK(ds.side == 2);
    CHECK(ds.labels == std::vector<int>{3, 7});
    CHECK(ds.class_count == 8);
    CHECK(ds.images[0][0] == 0.0);
    CHECK(ds.images[0][1] == 1.0);
    CHECK(ds.images[0][2] == doctest::Approx(128.0 / 255.0));
    CHECK(ds.images[1][3] == 1.0);

    std::remove(img_path.c_str());
    std::remove(lbl_path.c_str());
}

TEST_CASE("idx loader rejects malformed files") {
    const std::string img_path = "test_idx_images.bin";
    const std::string lbl_path = "test_idx_labels.bin";
    std::vector<unsigned char> pixels(8, 0);

    SUBCASE("wrong image magic") {
        write_idx_images(img_path, 2052, 2, 2, 2, pixels);
        write_idx_labels(lbl_path, 2049, 2, {0, 1});
        CHECK_THROWS_AS(load_idx(img_path, lbl_path), DataError);
    }

    SUBCASE("wrong label magic") {
        write_idx_images(img_path, 2051, 2, 2, 2, pixels);
        write_idx_labels(lbl_path, 2051, 2, {0, 1});
        CHECK_THROWS_AS(load_idx(img_path, lbl_path), DataError);
    }

    SUBCASE("count mismatch between files") {
        write_idx_images(img_path, 2051, 2, 2, 2, pixels);
        write_idx_labels(lbl_path, 2049, 3, {0, 1, 0});
        CHECK_THROWS_AS(load_idx(img_path, lbl_path), DataError);
    }

    SUBCASE("truncated pixel payload") {
        std::vector<unsigned char> short_pixels(5, 0);
        write_idx_images(img_path, 2051, 2, 2, 2, short_pixels);
        write_idx_labels(lbl_path, 2049, 2, {0, 1});
        CHECK_THROWS_AS(load_idx(img_path, lbl_path), DataError);
    }

    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_idx("no_such_file.bin", "also_missing.bin"), DataError);
    }

    std::remove(img_path.c_str());
    std::remove(lbl_path.c_str());
}

TEST_CASE("synthetic dataset is balanced and bounded") {
    Dataset ds = make_synthetic(5, 12, 7, 0.1, 3);
    ds.validate();
    CHECK(ds.size() == 35);
    CHECK(ds.class_count == 5);
    std::vector<int> counts(5, 0);
    for (int y : ds.labels) counts[static_cast<std::size_t>(y)]++;
    for (int c : counts) CHECK(c == 7);
    for (const Tensor& img : ds.images) {
        for (std::size_t i = 0; i < img.numel(); ++i) {
            CHECK(img[i] >= 0.0);
            CHECK(img[i] <= 1.0);
        }
    }
}

TEST_CASE("sigma zero makes all same-class images identical") {
    Dataset ds = make_synthetic(3, 8, 4, 0.0, 5);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t j = i + 1; j < ds.size(); ++j) {
            if (ds.labels[i] == ds.labels[j]) {
                CHECK(ds.images[i].vec() == ds.images[j].vec());
            }
        }
    }
}

TEST_CASE("synthetic generation is seed-deterministic") {
    Dataset a = make_synthetic(4, 8, 6, 0.2, 9);
    Dataset b = make_synthetic(4, 8, 6, 0.2, 9);
    Dataset c = make_synthetic(4, 8, 6, 0.2, 10);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.images[i].vec() == b.images[i].vec());
    }
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        any_diff |= a.images[i].vec() != c.images[i].vec();
    }
    CHECK(any_diff);
}

TEST_CASE("symbol offset changes the rendered domain") {
    Dataset a = make_synthetic(3, 8, 2, 0.0, 1, 0);
    Dataset b = make_synthetic(3, 8, 2, 0.0, 1, 3);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        any_diff |= a.images[i].vec() != b.images[i].vec();
    }
    CHECK(any_diff);
}

TEST_CASE("10:1:1 split has the documented part sizes") {
    Dataset ds = make_synthetic(4, 8, 300, 0.05, 2);  // N = 1200
    SplitPlan plan = split_ratio_10_1_1(ds, 7);
    REQUIRE(plan.indices.size() == 3);
    CHECK(plan.indices[0].size() == 1000);
    CHECK(plan.indices[1].size() == 100);
    CHECK(plan.indices[2].size() == 100);

    std::vector<int> seen(ds.size(), 0);
    for (const auto& part : plan.indices) {
        for (std::size_t idx : part) seen[idx]++;
    }
    for (int s : seen) CHECK(s == 1);
}

TEST_CASE("10:1:1 remainder lands in the training part") {
    Dataset ds = make_synthetic(2, 8, 61, 0.0, 3);  // N = 122 = 12*10 + 2
    SplitPlan plan = split_ratio_10_1_1(ds, 7);
    CHECK(plan.indices[0].size() == 102);
    CHECK(plan.indices[1].size() == 10);
    CHECK(plan.indices[2].size() == 10);
}

TEST_CASE("train/test split is exact and seeded") {
    Dataset ds = make_synthetic(2, 8, 50, 0.05, 4);  // N = 100
    SplitPlan a = split_train_test(ds, 0.2, 11);
    SplitPlan b = split_train_test(ds, 0.2, 11);
    CHECK(a.indices[1].size() == 20);
    CHECK(a.indices[0].size() == 80);
    CHECK(a.indices[0] == b.indices[0]);
    CHECK(a.indices[1] == b.indices[1]);
}

TEST_CASE("class-half split relabels and separates") {
    Dataset ds = make_synthetic(6, 8, 10, 0.05, 5);
    ClassSplit cs = split_class_half(ds, 13);
    CHECK(cs.in_classes.size() == 3);
    CHECK(cs.out_classes.size() == 3);
    for (int c : cs.in_classes) {
        for (int o : cs.out_classes) CHECK(c != o);
    }
    CHECK(cs.in_domain.class_count == 3);
    CHECK(cs.in_domain.size() == 30);
    CHECK(cs.out_domain.size() == 30);
    for (int y : cs.in_domain.labels) {
        CHECK(y >= 0);
        CHECK(y < 3);
    }

    ClassSplit again = split_class_half(ds, 13);
    CHECK(again.in_classes == cs.in_classes);
}

TEST_CASE("class-half split rejects odd class counts") {
    Dataset ds = make_synthetic(5, 8, 4, 0.05, 5);
    CHECK_THROWS_AS(split_class_half(ds, 1), UsageError);
}

TEST_CASE("subset keeps image/label pairing") {
    Dataset ds = make_synthetic(3, 8, 4, 0.1, 6);
    Dataset sub = subset(ds, {0, 5, 11});
    CHECK(sub.size() == 3);
    CHECK(sub.labels[0] == ds.labels[0]);
    CHECK(sub.labels[1] == ds.labels[5]);
    CHECK(sub.labels[2] == ds.labels[11]);
    CHECK(sub.images[2].vec() == ds.images[11].vec());
}
