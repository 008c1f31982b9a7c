#pragma once

#include <string>

#include "cusp/data.hpp"
#include "cusp/patterns.hpp"

#include "json.hpp"

namespace cusp::harness {

using json = nlohmann::json;

// Builds the dataset named by a config block:
//   {"type":"synthetic","K":..,"side":..,"n_per_class":..,"noise_sigma":..,
//    "symbol_offset":..,"seed":..}
//   {"type":"idx","images":..,"labels":..,"limit":..,"limit_seed":..}
Dataset dataset_from_config(const json& cfg, std::uint64_t default_seed);

// {"kind":"orthogonal"|"glyph"|"symbol"|"custom","side":..,"seed":..,
//  "files":[..]} for K classes.
PatternSet patterns_from_config(const json& cfg, int K);

// Experiment commands. Each returns the report that was written to
// <out_dir>/report.json (train: train_report.json). Reports echo the config
// and are byte-identical across reruns of the same config+seed; wall-clock
// timings go to <out_dir>/timings.txt instead.
json cmd_train(const json& cfg, const std::string& out_dir);
json cmd_eval_ood(const json& cfg, const std::string& out_dir);
json cmd_eval_flip(const json& cfg, const std::string& out_dir);
json cmd_eval_adv(const json& cfg, const std::string& out_dir);
json cmd_eval_detector(const json& cfg, const std::string& out_dir);
json cmd_dump_patterns(const json& cfg, const std::string& out_dir);

// Writes via a temp name and renames on success.
void write_text_atomic(const std::string& path, const std::string& text);

}  // namespace cusp::harness
