#include "cusp/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cusp/checkpoint.hpp"
#include "cusp/errors.hpp"
#include "cusp/metrics.hpp"
#include "cusp/network.hpp"
#include "cusp/objective.hpp"
#include "cusp/perturb.hpp"
#include "cusp/pgm.hpp"
#include "cusp/scoring.hpp"
#include "cusp/train.hpp"

namespace cusp::harness {

namespace fs = std::filesystem;

void write_text_atomic(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + path);
        out << text;
        if (!out) throw DataError("failed writing " + path);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw DataError("cannot move into place: " + path);
    }
}

namespace {

class Timings {
  public:
    explicit Timings(std::string path) : path_(std::move(path)) {
        start_ = std::chrono::steady_clock::now();
    }
    void mark(const std::string& label) {
        const auto now = std::chrono::steady_clock::now();
        const double ms =
            std::chrono::duration<double, std::milli>(now - start_).count();
        lines_ += label + ": " + std::to_string(ms) + " ms\n";
        start_ = now;
    }
    ~Timings() {
        // Kept out of report.json so reports stay byte-identical across runs.
        try {
            std::ofstream out(path_, std::ios::trunc);
            out << lines_;
        } catch (...) {
        }
    }

  private:
    std::string path_;
    std::string lines_;
    std::chrono::steady_clock::time_point start_;
};

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory " + dir);
}

void write_report(const json& report, const std::string& path) {
    write_text_atomic(path, report.dump(2) + "\n");
}

std::uint64_t seed_of(const json& cfg) {
    return cfg.value("seed", std::uint64_t{0});
}

TrainConfig train_config_from(const json& cfg, std::uint64_t seed) {
    TrainConfig tc;
    const json t = cfg.value("train", json::object());
    tc.alpha = t.value("alpha", 0.5);
    tc.epochs = t.value("epochs", 30);
    tc.batch_size = t.value("batch_size", 64);
    tc.learning_rate = t.value("learning_rate", 1e-3);
    tc.optimizer = optimizer_from_name(t.value("optimizer", std::string("adam")));
    tc.seed = t.value("seed", seed);
    tc.validate();
    return tc;
}

json train_config_echo(const TrainConfig& tc) {
    return {{"alpha", tc.alpha},
            {"epochs", tc.epochs},
            {"batch_size", tc.batch_size},
            {"learning_rate", tc.learning_rate},
            {"optimizer", optimizer_name(tc.optimizer)},
            {"seed", tc.seed}};
}

// Mean surrogate activation per class, over at most `cap` samples per class.
std::vector<std::vector<double>> class_mean_surrogates(const SurrogateModel& model,
                                                       const Dataset& ds,
                                                       std::size_t cap) {
    const int K = model.class_count();
    std::vector<std::vector<double>> mean(
        static_cast<std::size_t>(K),
        std::vector<double>(static_cast<std::size_t>(model.m()), 0.0));
    std::vector<std::size_t> counts(static_cast<std::size_t>(K), 0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto k = static_cast<std::size_t>(ds.labels[i]);
        if (k >= static_cast<std::size_t>(K) || counts[k] >= cap) continue;
        const Prediction pred = model.predict(ds.images[i]);
        for (std::size_t j = 0; j < pred.surrogate.numel(); ++j) {
            mean[k][j] += pred.surrogate[j];
        }
        ++counts[k];
    }
    for (std::size_t k = 0; k < mean.size(); ++k) {
        if (counts[k] == 0) continue;
        for (double& v : mean[k]) v /= static_cast<double>(counts[k]);
    }
    return mean;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    if (va <= 0.0 || vb <= 0.0) return 0.0;
    return cov / std::sqrt(va * vb);
}

struct MethodScores {
    std::vector<int> predicted;
    std::map<std::string, std::vector<double>> scores;
};

// Scores every image with every requested method. `truth` may be empty;
// `domain_flags` (0 in / 1 out), when non-empty, drive the oracle.
MethodScores score_dataset(SurrogateModel& model, const PatternSet& patterns,
                           const std::vector<Tensor>& images,
                           const std::vector<int>& truth,
                           const std::vector<int>& domain_flags,
                           const std::vector<std::string>& methods,
                           const json& odin_cfg, Rng& rng) {
    MethodScores out;
    const double odin_t = odin_cfg.value("temperature", 1000.0);
    const double odin_eps = odin_cfg.value("epsilon", 0.0014);

    for (std::size_t i = 0; i < images.size(); ++i) {
        const Prediction pred = model.predict(images[i]);
        const auto& y = pred.class_probs.vec();
        const int argmax =
            static_cast<int>(std::max_element(y.begin(), y.end()) - y.begin());
        out.predicted.push_back(argmax);

        for (const std::string& method : methods) {
            double score = 0.0;
            if (method == "cusp-mse") {
                score = cusp_score(pred.surrogate, patterns.of_class(argmax),
                                   ScoreDelta::Mse);
            } else if (method == "cusp-bce") {
                score = cusp_score(pred.surrogate, patterns.of_class(argmax),
                                   ScoreDelta::Bce);
            } else if (method == "entropy") {
                score = baseline_entropy(pred.class_probs);
            } else if (method == "largest") {
                score = baseline_largest(pred.class_probs);
            } else if (method == "functional") {
                score = baseline_functional(pred.class_probs);
            } else if (method == "geometrical") {
                score = geometrical_margin(pred.class_logits,
                                           model.classifier_weights(),
                                           model.classifier_bias());
            } else if (method == "odin") {
                score = odin_score(model, images[i], odin_t, odin_eps);
            } else if (method == "random") {
                score = baseline_random(rng);
            } else if (method == "oracle") {
                bool certain;
                if (!domain_flags.empty()) {
                    certain = domain_flags[i] == 0;
                } else if (!truth.empty()) {
                    certain = argmax == truth[i];
                } else {
                    throw UsageError("oracle method needs ground truth or domain flags");
                }
                score = baseline_oracle(certain);
            } else {
                throw ConfigError("unknown score method '" + method + "'");
            }
            out.scores[method].push_back(score);
        }
    }
    return out;
}

std::vector<std::string> methods_from(const json& cfg,
                                      std::vector<std::string> defaults) {
    if (!cfg.contains("methods")) return defaults;
    return cfg.at("methods").get<std::vector<std::string>>();
}

struct PrimarySetup {
    SurrogateModel model;
    PatternSet patterns;
    TrainConfig train_cfg;
};

PrimarySetup build_primary(const json& cfg, const Dataset& ds, std::uint64_t seed) {
    PrimarySetup setup;
    setup.patterns = patterns_from_config(cfg.value("patterns", json::object()),
                                          ds.class_count);
    const int m = setup.patterns.pixel_count();
    setup.train_cfg = train_config_from(cfg, seed);
    setup.model = SurrogateModel::build(cfg.value("arch", std::string("small-conv")),
                                        {1, ds.side, ds.side}, m, ds.class_count,
                                        seed);
    return setup;
}

}  // namespace

Dataset dataset_from_config(const json& cfg, std::uint64_t default_seed) {
    if (!cfg.is_object() || !cfg.contains("type")) {
        throw ConfigError("dataset config needs a 'type'");
    }
    const std::string type = cfg.at("type").get<std::string>();
    Dataset ds;
    if (type == "synthetic") {
        ds = make_synthetic(cfg.value("K", 10), cfg.value("side", 16),
                            cfg.value("n_per_class", 200),
                            cfg.value("noise_sigma", 0.1),
                            cfg.value("seed", default_seed),
                            cfg.value("symbol_offset", 0));
    } else if (type == "idx") {
        ds = load_idx(cfg.at("images").get<std::string>(),
                      cfg.at("labels").get<std::string>());
    } else {
        throw ConfigError("unknown dataset type '" + type + "'");
    }
    if (cfg.contains("limit")) {
        const std::size_t limit = cfg.at("limit").get<std::size_t>();
        if (limit < ds.size()) {
            std::vector<std::size_t> idx(ds.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            Rng rng(cfg.value("limit_seed", default_seed));
            shuffle(idx, rng);
            idx.resize(limit);
            ds = subset(ds, idx);
        }
    }
    return ds;
}

PatternSet patterns_from_config(const json& cfg, int K) {
    const std::string kind = cfg.value("kind", std::string("glyph"));
    const int side = cfg.value("side", 16);
    if (kind == "orthogonal") return gen_orthogonal(K, side);
    if (kind == "glyph") return gen_glyph_digits(K, side);
    if (kind == "symbol") return gen_symbols(K, side, cfg.value("seed", std::uint64_t{0}));
    if (kind == "custom") {
        PatternSet set;
        set.kind = PatternKind::Custom;
        const auto files = cfg.at("files").get<std::vector<std::string>>();
        if (static_cast<int>(files.size()) != K) {
            throw ConfigError("custom patterns need exactly K files");
        }
        for (int k = 0; k < K; ++k) {
            Pattern p = load_pattern_file(files[static_cast<std::size_t>(k)]);
            p.class_id = k;
            set.patterns.push_back(std::move(p));
        }
        set.validate();
        return set;
    }
    throw ConfigError("unknown pattern kind '" + kind + "'");
}

json cmd_train(const json& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    Timings timings(out_dir + "/timings.txt");
    const std::uint64_t seed = seed_of(cfg);

    Dataset ds = dataset_from_config(cfg.at("dataset"), seed);
    ds.validate();
    PrimarySetup setup = build_primary(cfg, ds, seed);
    timings.mark("setup");

    const int dump_every = cfg.value("dump_every", 5);
    std::vector<std::string> dump_files;
    const int total_epochs = setup.train_cfg.epochs;
    EpochCallback on_epoch = [&](int epoch, const SurrogateModel& model) {
        const bool logged =
            (epoch + 1) % dump_every == 0 || epoch + 1 == total_epochs;
        if (!logged) return;
        const auto means = class_mean_surrogates(model, ds, 50);
        for (int k = 0; k < model.class_count(); ++k) {
            char name[64];
            std::snprintf(name, sizeof(name), "epoch_%03d_class_%d.pgm", epoch + 1, k);
            write_pgm(out_dir + "/" + name, setup.patterns.side(),
                      means[static_cast<std::size_t>(k)]);
            dump_files.push_back(name);
        }
    };

    const TrainReport tr = train(setup.model, ds, setup.patterns, setup.train_cfg,
                                 on_epoch);
    timings.mark("train");

    json metadata = {{"alpha", setup.train_cfg.alpha},
                     {"epochs_run", setup.train_cfg.epochs},
                     {"seed", setup.train_cfg.seed},
                     {"optimizer", optimizer_name(setup.train_cfg.optimizer)},
                     {"final_loss", tr.epochs.back().loss_total},
                     {"final_accuracy", tr.epochs.back().accuracy}};
    const std::string ckpt_path = out_dir + "/checkpoint.cusp";
    save_checkpoint(setup.model, setup.patterns, metadata, ckpt_path);
    timings.mark("checkpoint");

    json epochs = json::array();
    for (const EpochStats& e : tr.epochs) {
        epochs.push_back({{"loss", e.loss_total},
                          {"loss_classification", e.loss_classification},
                          {"loss_reconstruction", e.loss_reconstruction},
                          {"accuracy", e.accuracy}});
    }
    json report = {{"command", "train"},
                   {"config", cfg},
                   {"train", train_config_echo(setup.train_cfg)},
                   {"alpha_zero", setup.train_cfg.alpha == 0.0},
                   {"epochs", epochs},
                   {"checkpoint", "checkpoint.cusp"},
                   {"pattern_dumps", dump_files}};
    write_report(report, out_dir + "/train_report.json");
    return report;
}

json cmd_eval_ood(const json& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    Timings timings(out_dir + "/timings.txt");
    const std::uint64_t seed = seed_of(cfg);

    Checkpoint ckpt = load_checkpoint(cfg.at("checkpoint").get<std::string>());
    Dataset in_ds = dataset_from_config(cfg.at("in_dataset"), seed + 1);
    Dataset out_ds = dataset_from_config(cfg.at("out_dataset"), seed + 2);
    if (in_ds.class_count > ckpt.model.class_count()) {
        throw ConfigError("in-domain set has more classes than the checkpoint");
    }
    if (out_ds.side != in_ds.side) {
        throw ConfigError("out-domain image shape does not match in-domain");
    }
    timings.mark("load");

    std::vector<Tensor> images = in_ds.images;
    images.insert(images.end(), out_ds.images.begin(), out_ds.images.end());
    std::vector<int> domain(in_ds.size(), 0);
    domain.insert(domain.end(), out_ds.size(), 1);

    const auto methods = methods_from(
        cfg, {"cusp-mse", "cusp-bce", "entropy", "largest", "functional",
              "geometrical", "odin", "random", "oracle"});
    Rng rng(seed ^ 0x0DDC0DE5ULL);
    const MethodScores ms =
        score_dataset(ckpt.model, ckpt.patterns, images, {}, domain, methods,
                      cfg.value("odin", json::object()), rng);
    timings.mark("score");

    // In-domain classification accuracy alongside the detection AUCs.
    std::vector<int> in_pred(ms.predicted.begin(),
                             ms.predicted.begin() + static_cast<std::ptrdiff_t>(in_ds.size()));
    const double in_acc = accuracy(in_pred, in_ds.labels);

    json per_method = json::object();
    json roc_files = json::object();
    for (const auto& [method, scores] : ms.scores) {
        const double method_auc = auc(scores, domain);
        per_method[method] = method_auc;
        const RocCurve curve = roc_100(minmax_normalize(scores), domain);
        const std::string roc_name = "roc_" + method + ".csv";
        curve.write_csv(out_dir + "/" + roc_name);
        roc_files[method] = roc_name;
    }
    timings.mark("metrics");

    json report = {{"command", "eval-ood"},
                   {"config", cfg},
                   {"counts", {{"in", in_ds.size()}, {"out", out_ds.size()}}},
                   {"in_domain_accuracy", in_acc},
                   {"auc", per_method},
                   {"roc_files", roc_files}};
    write_report(report, out_dir + "/report.json");
    return report;
}

json cmd_eval_flip(const json& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    Timings timings(out_dir + "/timings.txt");
    const std::uint64_t seed = seed_of(cfg);

    Dataset ds = dataset_from_config(cfg.at("dataset"), seed);
    const json fj = cfg.at("flip");
    FlipSpec spec;
    for (const auto& pair : fj.at("pairs")) {
        spec.pairs.emplace_back(pair.at(0).get<int>(), pair.at(1).get<int>());
    }
    spec.rate = fj.value("rate", 0.3);
    spec.seed = fj.value("seed", seed ^ 0xF11BED5ULL);
    const FlipResult flip = flip_labels(ds.labels, spec);

    Dataset flipped_ds = ds;
    flipped_ds.labels = flip.labels;

    PrimarySetup setup = build_primary(cfg, ds, seed);
    timings.mark("setup");
    train(setup.model, flipped_ds, setup.patterns, setup.train_cfg);
    timings.mark("train");

    // Scores against the *trained-on* (possibly flipped) labels' patterns of
    // the predicted class, on the training samples themselves.
    const ScoreDelta delta =
        score_delta_from_name(cfg.value("delta", std::string("mse")));
    std::vector<double> scores(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const Prediction pred = setup.model.predict(ds.images[i]);
        const auto& y = pred.class_probs.vec();
        const int argmax =
            static_cast<int>(std::max_element(y.begin(), y.end()) - y.begin());
        scores[i] = cusp_score(pred.surrogate, setup.patterns.of_class(argmax), delta);
    }
    timings.mark("score");

    auto stats_of = [&scores](const std::vector<std::size_t>& idx) {
        json stats;
        if (idx.empty()) {
            return json{{"count", 0}};
        }
        std::vector<double> vals;
        for (std::size_t i : idx) vals.push_back(scores[i]);
        std::sort(vals.begin(), vals.end());
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= static_cast<double>(vals.size());
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        var = vals.size() > 1 ? var / static_cast<double>(vals.size() - 1) : 0.0;
        const double median = vals.size() % 2 == 1
                                  ? vals[vals.size() / 2]
                                  : (vals[vals.size() / 2 - 1] + vals[vals.size() / 2]) / 2.0;
        return json{{"count", vals.size()},
                    {"mean", mean},
                    {"median", median},
                    {"stderr", std::sqrt(var / static_cast<double>(vals.size()))}};
    };

    std::vector<std::size_t> flipped_idx, clean_idx;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        (flip.flipped[i] ? flipped_idx : clean_idx).push_back(i);
    }
    const json flipped_stats = stats_of(flipped_idx);
    const json clean_stats = stats_of(clean_idx);

    json per_pair = json::array();
    for (const auto& [from, to] : spec.pairs) {
        std::vector<std::size_t> pair_flipped, pair_clean;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (ds.labels[i] != from) continue;
            (flip.flipped[i] ? pair_flipped : pair_clean).push_back(i);
        }
        per_pair.push_back({{"from", from},
                            {"to", to},
                            {"flipped", stats_of(pair_flipped)},
                            {"clean_same_class", stats_of(pair_clean)}});
    }

    double gap = 0.0, gap_stderr = 0.0;
    if (!flipped_idx.empty() && !clean_idx.empty()) {
        gap = flipped_stats["mean"].get<double>() - clean_stats["mean"].get<double>();
        const double se_f = flipped_stats["stderr"].get<double>();
        const double se_c = clean_stats["stderr"].get<double>();
        gap_stderr = std::sqrt(se_f * se_f + se_c * se_c);
    }

    json report = {{"command", "eval-flip"},
                   {"config", cfg},
                   {"delta", cfg.value("delta", std::string("mse"))},
                   {"flipped", flipped_stats},
                   {"clean", clean_stats},
                   {"mean_gap", gap},
                   {"mean_gap_stderr", gap_stderr},
                   {"per_pair", per_pair}};
    write_report(report, out_dir + "/report.json");
    return report;
}

json cmd_eval_adv(const json& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    Timings timings(out_dir + "/timings.txt");
    const std::uint64_t seed = seed_of(cfg);

    Checkpoint cusp_ckpt = load_checkpoint(cfg.at("cusp_checkpoint").get<std::string>());
    Checkpoint plain_ckpt = load_checkpoint(cfg.at("plain_checkpoint").get<std::string>());
    if (cusp_ckpt.model.arch() != plain_ckpt.model.arch()) {
        throw ConfigError("checkpoints use different architecture families");
    }
    Dataset ds = dataset_from_config(cfg.at("dataset"), seed + 3);
    auto epsilons = cfg.value("epsilons", std::vector<double>{0.0, 0.05, 0.1});
    timings.mark("load");

    // Each model is attacked through its own training objective.
    const double cusp_alpha = cusp_ckpt.metadata.value("alpha", 0.5);
    auto attacked_accuracy = [&ds](Checkpoint& ckpt, double eps,
                                   const PatternSet* patterns, double alpha) {
        AttackConfig atk;
        atk.epsilon = eps;
        std::vector<int> preds;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const Tensor x_adv = fgm_attack(ckpt.model, ds.images[i], ds.labels[i],
                                            atk, patterns, alpha);
            const Prediction pred = ckpt.model.predict(x_adv);
            const auto& y = pred.class_probs.vec();
            preds.push_back(static_cast<int>(
                std::max_element(y.begin(), y.end()) - y.begin()));
        }
        return accuracy(preds, ds.labels);
    };

    json rows = json::array();
    std::string csv = "epsilon,cusp_accuracy,plain_accuracy\n";
    double prev_cusp = 1.0, prev_plain = 1.0;
    bool monotonic = true;
    std::vector<double> eps_sorted = epsilons;
    std::sort(eps_sorted.begin(), eps_sorted.end());
    for (double eps : eps_sorted) {
        const double acc_cusp =
            attacked_accuracy(cusp_ckpt, eps, &cusp_ckpt.patterns, cusp_alpha);
        const double acc_plain = attacked_accuracy(plain_ckpt, eps, nullptr, 0.0);
        rows.push_back({{"epsilon", eps},
                        {"cusp_accuracy", acc_cusp},
                        {"plain_accuracy", acc_plain}});
        std::ostringstream line;
        line.precision(17);
        line << eps << "," << acc_cusp << "," << acc_plain << "\n";
        csv += line.str();
        if (acc_cusp > prev_cusp + 1e-12 || acc_plain > prev_plain + 1e-12) {
            monotonic = false;
        }
        prev_cusp = acc_cusp;
        prev_plain = acc_plain;
    }
    timings.mark("attack");

    write_text_atomic(out_dir + "/accuracy_vs_epsilon.csv", csv);
    json report = {{"command", "eval-adv"},
                   {"config", cfg},
                   {"table", rows},
                   {"csv", "accuracy_vs_epsilon.csv"},
                   {"monotonic_warning", monotonic ? json() : json("accuracy increased with epsilon")}};
    write_report(report, out_dir + "/report.json");
    return report;
}

json cmd_eval_detector(const json& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    Timings timings(out_dir + "/timings.txt");
    const std::uint64_t seed = seed_of(cfg);

    Dataset ds = dataset_from_config(cfg.at("dataset"), seed);
    const SplitPlan plan = split_ratio_10_1_1(ds, seed ^ 0x5417AB1EULL);
    const Dataset train_ds = subset(ds, plan.indices[0]);
    const Dataset record_ds = subset(ds, plan.indices[1]);
    const Dataset test_ds = subset(ds, plan.indices[2]);

    PrimarySetup setup = build_primary(cfg, train_ds, seed);
    timings.mark("setup");
    train(setup.model, train_ds, setup.patterns, setup.train_cfg);
    timings.mark("train_primary");

    auto record_of = [&setup](const Tensor& image, int truth) {
        const Prediction pred = setup.model.predict(image);
        const auto& y = pred.class_probs.vec();
        const int argmax =
            static_cast<int>(std::max_element(y.begin(), y.end()) - y.begin());
        return make_detector_record(pred.surrogate, setup.patterns.of_class(argmax),
                                    argmax == truth ? 1 : 0);
    };

    std::vector<DetectorRecord> records;
    for (std::size_t i = 0; i < record_ds.size(); ++i) {
        records.push_back(record_of(record_ds.images[i], record_ds.labels[i]));
    }

    DetectorTrainConfig dcfg;
    const json dj = cfg.value("detector", json::object());
    dcfg.gamma = dj.value("gamma", 2.0);
    dcfg.epochs = dj.value("epochs", 30);
    dcfg.batch_size = dj.value("batch_size", 32);
    dcfg.learning_rate = dj.value("learning_rate", 1e-3);
    dcfg.filters1 = dj.value("filters1", 8);
    dcfg.filters2 = dj.value("filters2", 16);
    dcfg.seed = dj.value("seed", seed);
    const DetectorModel detector = train_detector(records, dcfg);
    timings.mark("train_detector");

    // Positive class on part 3: the primary prediction is incorrect.
    std::vector<double> bce_scores, mse_scores, det_scores;
    std::vector<int> incorrect;
    for (std::size_t i = 0; i < test_ds.size(); ++i) {
        const Prediction pred = setup.model.predict(test_ds.images[i]);
        const auto& y = pred.class_probs.vec();
        const int argmax =
            static_cast<int>(std::max_element(y.begin(), y.end()) - y.begin());
        const Pattern& pat = setup.patterns.of_class(argmax);
        const double mse = cusp_score(pred.surrogate, pat, ScoreDelta::Mse);
        bce_scores.push_back(cusp_score(pred.surrogate, pat, ScoreDelta::Bce));
        mse_scores.push_back(mse);
        det_scores.push_back(detector_score(detector, pred.surrogate, pat, mse));
        incorrect.push_back(argmax == test_ds.labels[i] ? 0 : 1);
    }
    timings.mark("score");

    json aucs = json::object();
    json roc_files = json::object();
    const std::vector<std::pair<std::string, const std::vector<double>*>> tracks = {
        {"bce", &bce_scores}, {"mse", &mse_scores}, {"detector", &det_scores}};
    for (const auto& [name, scores] : tracks) {
        aucs[name] = auc(*scores, incorrect);
        const RocCurve curve = roc_100(minmax_normalize(*scores), incorrect);
        const std::string roc_name = "roc_" + name + ".csv";
        curve.write_csv(out_dir + "/" + roc_name);
        roc_files[name] = roc_name;
    }

    json report = {{"command", "eval-detector"},
                   {"config", cfg},
                   {"counts",
                    {{"train", train_ds.size()},
                     {"records", records.size()},
                     {"test", test_ds.size()}}},
                   {"auc", aucs},
                   {"roc_files", roc_files}};
    write_report(report, out_dir + "/report.json");
    return report;
}

json cmd_dump_patterns(const json& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    Timings timings(out_dir + "/timings.txt");
    const std::uint64_t seed = seed_of(cfg);

    Checkpoint ckpt = load_checkpoint(cfg.at("checkpoint").get<std::string>());
    Dataset ds = dataset_from_config(cfg.at("dataset"), seed);
    const auto means = class_mean_surrogates(ckpt.model, ds, 200);
    timings.mark("compute");

    json files = json::array();
    json correlations = json::object();
    const int side = ckpt.patterns.side();
    for (int k = 0; k < ckpt.model.class_count(); ++k) {
        const Pattern& pat = ckpt.patterns.of_class(k);
        std::vector<double> target(pat.bits.begin(), pat.bits.end());
        const std::string tname = "class_" + std::to_string(k) + "_target.pgm";
        const std::string rname = "class_" + std::to_string(k) + "_recon.pgm";
        write_pgm(out_dir + "/" + tname, side, target);
        write_pgm(out_dir + "/" + rname, side, means[static_cast<std::size_t>(k)]);
        files.push_back(tname);
        files.push_back(rname);
        correlations[std::to_string(k)] =
            pearson(target, means[static_cast<std::size_t>(k)]);
    }

    json report = {{"command", "dump-patterns"},
                   {"config", cfg},
                   {"files", files},
                   {"pearson_r", correlations}};
    write_report(report, out_dir + "/report.json");
    return report;
}

}  // namespace cusp::harness
