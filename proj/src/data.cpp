#include "cusp/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "cusp/errors.hpp"
#include "cusp/patterns.hpp"
#include "cusp/rng.hpp"

namespace cusp {

void Dataset::validate() const {
    if (images.size() != labels.size()) {
        throw DataError("dataset image/label count mismatch");
    }
    for (int l : labels) {
        if (l < 0 || l >= class_count) throw DataError("dataset label out of range");
    }
    for (const Tensor& img : images) {
        if (img.shape() != std::vector<int>{1, side, side}) {
            throw DataError("dataset image shape mismatch");
        }
        for (double v : img.vec()) {
            if (v < 0.0 || v > 1.0 || !std::isfinite(v)) {
                throw DataError("dataset pixel outside [0,1]");
            }
        }
    }
}

namespace {

std::uint32_t read_be_u32(std::ifstream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) {
        throw DataError("truncated IDX file: " + path);
    }
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream imgs(images_path, std::ios::binary);
    if (!imgs) throw DataError("cannot open IDX image file: " + images_path);
    std::ifstream labs(labels_path, std::ios::binary);
    if (!labs) throw DataError("cannot open IDX label file: " + labels_path);

    if (read_be_u32(imgs, images_path) != 2051) {
        throw DataError("wrong IDX image magic in " + images_path);
    }
    const std::uint32_t n_images = read_be_u32(imgs, images_path);
    const std::uint32_t rows = read_be_u32(imgs, images_path);
    const std::uint32_t cols = read_be_u32(imgs, images_path);
    if (rows != cols) throw DataError("non-square IDX images in " + images_path);

    if (read_be_u32(labs, labels_path) != 2049) {
        throw DataError("wrong IDX label magic in " + labels_path);
    }
    const std::uint32_t n_labels = read_be_u32(labs, labels_path);
    if (n_images != n_labels) {
        throw DataError("IDX count mismatch: " + std::to_string(n_images) +
                        " images vs " + std::to_string(n_labels) + " labels");
    }

    Dataset ds;
    ds.side = static_cast<int>(rows);
    ds.provenance = images_path;
    std::vector<unsigned char> buf(rows * cols);
    int max_label = 0;
    for (std::uint32_t i = 0; i < n_images; ++i) {
        if (!imgs.read(reinterpret_cast<char*>(buf.data()),
                       static_cast<std::streamsize>(buf.size()))) {
            throw DataError("truncated IDX image data in " + images_path);
        }
        Tensor img({1, ds.side, ds.side});
        for (std::size_t p = 0; p < buf.size(); ++p) {
            img[p] = buf[p] / 255.0;
        }
        ds.images.push_back(std::move(img));

        char lb;
        if (!labs.get(lb)) {
            throw DataError("truncated IDX label data in " + labels_path);
        }
        const int label = static_cast<unsigned char>(lb);
        max_label = std::max(max_label, label);
        ds.labels.push_back(label);
    }
    ds.class_count = max_label + 1;
    return ds;
}

Dataset make_synthetic(int K, int side, int n_per_class, double noise_sigma,
                       std::uint64_t seed, int symbol_offset) {
    if (K < 2) throw ConfigError("synthetic dataset needs K >= 2");
    if (noise_sigma < 0.0) throw ConfigError("noise sigma must be >= 0");

    // Base bitmaps per class; past the fixed bank use index-keyed random
    // bitmaps so a given offset always names the same "domain".
    std::vector<std::vector<std::uint8_t>> bases;
    for (int k = 0; k < K; ++k) {
        const int idx = k + symbol_offset;
        if (idx < symbol_bank_size()) {
            bases.push_back(render_symbol(idx, side));
        } else {
            Rng fill(0xC05FEEDULL + static_cast<std::uint64_t>(idx));
            std::vector<std::uint8_t> bits(static_cast<std::size_t>(side * side));
            for (auto& b : bits) b = fill.uniform() < 0.5 ? 1 : 0;
            bases.push_back(std::move(bits));
        }
    }

    Dataset ds;
    ds.side = side;
    ds.class_count = K;
    ds.provenance = "synthetic(K=" + std::to_string(K) +
                    ",offset=" + std::to_string(symbol_offset) + ")";
    Rng rng(seed);
    for (int k = 0; k < K; ++k) {
        ds.class_names.push_back("symbol_" + std::to_string(k + symbol_offset));
        for (int i = 0; i < n_per_class; ++i) {
            Tensor img({1, side, side});
            for (std::size_t p = 0; p < img.numel(); ++p) {
                const double v = bases[static_cast<std::size_t>(k)][p] +
                                 (noise_sigma > 0.0 ? rng.normal(0.0, noise_sigma) : 0.0);
                img[p] = std::clamp(v, 0.0, 1.0);
            }
            ds.images.push_back(std::move(img));
            ds.labels.push_back(k);
        }
    }
    return ds;
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.side = ds.side;
    out.class_count = ds.class_count;
    out.class_names = ds.class_names;
    out.provenance = ds.provenance;
    for (std::size_t i : indices) {
        if (i >= ds.size()) throw UsageError("subset index out of range");
        out.images.push_back(ds.images[i]);
        out.labels.push_back(ds.labels[i]);
    }
    return out;
}

namespace {

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    Rng rng(seed);
    shuffle(idx, rng);
    return idx;
}

}  // namespace

SplitPlan split_ratio_10_1_1(const Dataset& ds, std::uint64_t seed) {
    const std::size_t n = ds.size();
    if (n < 12) throw ConfigError("10:1:1 split needs at least 12 samples");
    const auto idx = shuffled_indices(n, seed);
    const std::size_t part = n / 12;
    SplitPlan plan;
    plan.kind = "ratio-10-1-1";
    plan.seed = seed;
    // Remainder stays with the first (training) part.
    const std::size_t first = n - 2 * part;
    plan.indices.resize(3);
    plan.indices[0].assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(first));
    plan.indices[1].assign(idx.begin() + static_cast<std::ptrdiff_t>(first),
                           idx.begin() + static_cast<std::ptrdiff_t>(first + part));
    plan.indices[2].assign(idx.begin() + static_cast<std::ptrdiff_t>(first + part),
                           idx.end());
    return plan;
}

SplitPlan split_train_test(const Dataset& ds, double test_fraction,
                           std::uint64_t seed) {
    if (test_fraction <= 0.0 || test_fraction >= 1.0) {
        throw ConfigError("test fraction must be in (0,1)");
    }
    const std::size_t n = ds.size();
    const auto idx = shuffled_indices(n, seed);
    const std::size_t n_test =
        static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(n)));
    if (n_test == 0 || n_test >= n) throw ConfigError("degenerate train/test split");
    SplitPlan plan;
    plan.kind = "train-test";
    plan.seed = seed;
    plan.indices.resize(2);
    plan.indices[0].assign(idx.begin(), idx.end() - static_cast<std::ptrdiff_t>(n_test));
    plan.indices[1].assign(idx.end() - static_cast<std::ptrdiff_t>(n_test), idx.end());
    return plan;
}

ClassSplit split_class_half(const Dataset& ds, std::uint64_t seed) {
    const int K = ds.class_count;
    if (K < 2 || K % 2 != 0) {
        throw ConfigError("class half-split needs an even class count");
    }
    std::vector<int> classes(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) classes[static_cast<std::size_t>(k)] = k;
    Rng rng(seed);
    shuffle(classes, rng);

    ClassSplit split;
    split.in_classes.assign(classes.begin(), classes.begin() + K / 2);
    split.out_classes.assign(classes.begin() + K / 2, classes.end());

    std::vector<int> relabel(static_cast<std::size_t>(K), -1);
    for (int i = 0; i < K / 2; ++i) {
        relabel[static_cast<std::size_t>(split.in_classes[static_cast<std::size_t>(i)])] = i;
    }

    auto& in = split.in_domain;
    auto& out = split.out_domain;
    in.side = out.side = ds.side;
    in.class_count = K / 2;
    out.class_count = K;
    in.provenance = ds.provenance + "/in-half";
    out.provenance = ds.provenance + "/out-half";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const int r = relabel[static_cast<std::size_t>(ds.labels[i])];
        if (r >= 0) {
            in.images.push_back(ds.images[i]);
            in.labels.push_back(r);
        } else {
            out.images.push_back(ds.images[i]);
            out.labels.push_back(ds.labels[i]);
        }
    }
    return split;
}

}  // namespace cusp
