// Copyright 2026 The alpnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "alpnet/config.hpp"
#include "alpnet/demo.hpp"
#include "alpnet/error.hpp"
#include "alpnet/evaluation.hpp"
#include "alpnet/phantom.hpp"
#include "alpnet/png.hpp"
#include "alpnet/pseudolabel.hpp"
#include "alpnet/train.hpp"

namespace fs = std::filesystem;
using namespace alpnet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::string default_data_root(const std::string& flag_value,
                              const std::string& config_value) {
  if (!flag_value.empty()) return flag_value;
  if (!config_value.empty()) return config_value;
  const char* env = std::getenv("ALPNET_DATA_ROOT");
  return env != nullptr ? env : "";
}

struct CommonArgs {
  std::string config_path;
  std::string data_root;
  std::string format;
  uint64_t seed = 0;
  bool seed_set = false;
};

RunConfig resolve_config(const CommonArgs& args) {
  RunConfig cfg;
  if (!args.config_path.empty()) cfg = load_run_config(args.config_path);
  cfg.data_root = default_data_root(args.data_root, cfg.data_root);
  if (!args.format.empty()) cfg.data_format = args.format;
  if (args.seed_set) {
    cfg.seed = args.seed;
    cfg.train.seed = args.seed;
  }
  return cfg;
}

int cmd_gen_superpixels(const CommonArgs& common, const std::string& store_root,
                        std::optional<int> min_size,
                        std::optional<double> scale) {
  RunConfig cfg = resolve_config(common);
  if (min_size) cfg.superpixel.min_size = *min_size;
  if (scale) cfg.superpixel.scale = *scale;
  cfg.validate();
  if (cfg.data_root.empty() || !fs::is_directory(cfg.data_root)) {
    std::cerr << "error: data root not found: '" << cfg.data_root << "'\n";
    return kExitUsage;
  }

  const std::vector<Volume> dataset =
      load_dataset(cfg.data_root, cfg.data_format, cfg.target_size, cfg.preprocess);
  int failures = 0;
  for (const Volume& v : dataset) {
    try {
      const std::string hash = pseudolabel_input_hash(v, cfg.superpixel);
      if (stored_input_hash(store_root, v.id) == hash) {
        std::cout << "[gen-superpixels] " << v.id << ": unchanged, skipped\n";
        continue;
      }
      const PseudolabelSet set = build_pseudolabel_set(v, cfg.superpixel);
      write_pseudolabel_store(set, store_root, hash);
      int usable = 0;
      for (const auto& s : set.slices) usable += s.degenerate ? 0 : 1;
      std::cout << "[gen-superpixels] " << v.id << ": " << set.slices.size()
                << " slices, " << usable << " usable\n";
    } catch (const std::exception& e) {
      std::cerr << "error: volume " << v.id << ": " << e.what() << "\n";
      ++failures;
    }
  }
  if (failures > 0) {
    std::cerr << "gen-superpixels: " << failures
              << " volume(s) failed; partial stores kept\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_train_ssl(const CommonArgs& common, const std::string& store_root,
                  const std::string& out_dir, const std::string& resume,
                  std::optional<int64_t> iterations,
                  const std::string& mode_override,
                  std::optional<int> setting_override,
                  const std::vector<int>& test_group_override) {
  RunConfig cfg = resolve_config(common);
  if (iterations) cfg.train.iterations = *iterations;
  if (!mode_override.empty()) cfg.mode = mode_override;
  if (setting_override) cfg.setting = *setting_override;
  if (!test_group_override.empty()) cfg.test_group = test_group_override;
  cfg.validate();
  if (cfg.data_root.empty() || !fs::is_directory(cfg.data_root)) {
    std::cerr << "error: data root not found: '" << cfg.data_root << "'\n";
    return kExitUsage;
  }

  const std::vector<Volume> dataset =
      load_dataset(cfg.data_root, cfg.data_format, cfg.target_size, cfg.preprocess);
  const std::set<int> test_group(cfg.test_group.begin(), cfg.test_group.end());
  const DatasetSplit split =
      partition(dataset, cfg.fold, cfg.setting, test_group, cfg.n_folds);

  std::map<std::string, PseudolabelSet> stores;
  for (const std::string& id : split.train_ids) {
    if (stored_input_hash(store_root, id).empty()) {
      std::cerr << "error: no pseudolabel store for volume " << id << " under "
                << store_root << "; run `alpnet gen-superpixels` first\n";
      return kExitUsage;
    }
    stores.emplace(id, read_pseudolabel_store(store_root, id));
  }

  std::map<std::string, int> vocab;
  for (const Volume& v : dataset) {
    for (const auto& [cid, grid] : v.labels) {
      (void)grid;
      vocab["class_" + std::to_string(cid)] = cid;
    }
  }

  ConvEncoder enc(cfg.encoder);
  Rng init_rng = Rng(cfg.seed).fork(2);
  enc.init_params(init_rng);

  TrainData data{&dataset, &split, &stores};
  TrainOptions opts;
  opts.transforms = cfg.transforms;
  opts.alp_train = cfg.alp_train();
  opts.alp_infer = cfg.alp_infer();
  opts.loss = cfg.loss;
  opts.train = cfg.train;
  opts.out_dir = out_dir;
  opts.config_hash = config_hash(cfg);
  opts.class_vocab = vocab;
  opts.resume_from = resume;

  const TrainResult result = train_ssl(enc, data, opts);
  std::cout << "[train-ssl] checkpoint: " << result.checkpoint_path << "\n";
  std::cout << "[train-ssl] log: " << result.log_path << "\n";
  return kExitOk;
}

int cmd_evaluate(const CommonArgs& common, const std::string& checkpoint_path,
                 const std::string& out_path, std::optional<int> setting_override,
                 const std::vector<int>& classes_override,
                 std::optional<int> chunks_override, bool overlays, bool force) {
  RunConfig cfg = resolve_config(common);
  if (setting_override) cfg.setting = *setting_override;
  if (!classes_override.empty()) cfg.eval_classes = classes_override;
  if (chunks_override) cfg.chunks = *chunks_override;
  cfg.validate();
  if (cfg.data_root.empty() || !fs::is_directory(cfg.data_root)) {
    std::cerr << "error: data root not found: '" << cfg.data_root << "'\n";
    return kExitUsage;
  }

  const Checkpoint ck = load_checkpoint(checkpoint_path);
  if (!ck.config_hash.empty() && ck.config_hash != config_hash(cfg) && !force) {
    std::cerr << "error: checkpoint was trained under a different config "
                 "(hash mismatch); pass --force to evaluate anyway\n";
    return kExitUsage;
  }

  const std::vector<Volume> dataset =
      load_dataset(cfg.data_root, cfg.data_format, cfg.target_size, cfg.preprocess);

  std::vector<int> classes = cfg.eval_classes;
  if (classes.empty()) classes = cfg.test_group;
  if (classes.empty()) {
    std::cerr << "error: no evaluation classes given (eval.classes/test_group)\n";
    return kExitUsage;
  }
  for (int cid : classes) {
    bool known = false;
    for (const auto& [name, vid] : ck.class_vocab) {
      (void)name;
      if (vid == cid) known = true;
    }
    if (!known && !ck.class_vocab.empty()) {
      std::cerr << "error: class " << cid
                << " is not in the checkpoint's class vocabulary\n";
      return kExitUsage;
    }
  }

  const std::set<int> test_group(cfg.test_group.begin(), cfg.test_group.end());
  const DatasetSplit split =
      partition(dataset, cfg.fold, cfg.setting, test_group, cfg.n_folds);

  ConvEncoder enc(ck.encoder_spec);
  enc.load_flat_params(ck.params);

  const fs::path out = out_path.empty() ? fs::path("eval_report.json")
                                        : fs::path(out_path);
  PairCallback on_pair;
  if (overlays) {
    const fs::path overlay_root = out.parent_path() / "overlays";
    on_pair = [&dataset, overlay_root](int cid, const std::string& sid,
                                       const std::string& qid,
                                       const ClassEval& ev) {
      const Volume* query = nullptr;
      for (const Volume& v : dataset) {
        if (v.id == qid) query = &v;
      }
      if (query == nullptr) return;
      const fs::path dir = overlay_root / ("class_" + std::to_string(cid)) /
                           (sid + "__" + qid);
      fs::create_directories(dir);
      const int h = query->height(), w = query->width();
      for (int s = ev.extent_lo; s <= ev.extent_hi; ++s) {
        Tensor pred({h, w});
        const double* src =
            ev.pred.data() + static_cast<size_t>(s - ev.extent_lo) * h * w;
        std::copy(src, src + static_cast<size_t>(h) * w, pred.data());
        const Tensor gt = query->label_slice(cid, s);
        char name[32];
        std::snprintf(name, sizeof(name), "slice_%04d.png", s);
        write_overlay_png((dir / name).string(), query->slice(s), pred, &gt);
      }
    };
  }

  EvalReport report = run_evaluation(enc, ck.alp_infer, dataset, split, classes,
                                     cfg.chunks, on_pair);
  report.seed = cfg.seed;
  report.config_snapshot = run_config_to_json(cfg);
  report.config_hash = config_hash(cfg);

  std::ofstream os(out);
  if (!os) throw IoError("evaluate: cannot write " + out.string());
  os << report.to_json().dump(2) << "\n";
  std::cout << "[evaluate] report: " << out.string() << "\n";
  for (const auto& [cid, mean] : report.class_mean) {
    std::cout << "[evaluate] class " << cid << " mean Dice: " << mean << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-supervised few-shot segmentation with superpixel "
               "pseudolabels and adaptive local prototype pooling"};
  app.require_subcommand(1);

  CommonArgs common;
  std::string store_root = "pseudolabels";
  std::string out_dir = "train_out";
  std::string resume, mode_override, checkpoint_path, report_path;
  std::optional<int64_t> iterations;
  std::optional<int> min_size, setting_override, chunks_override;
  std::optional<double> scale;
  std::vector<int> test_group_override, classes_override;
  bool overlays = false, force = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "Run configuration JSON");
    sub->add_option("--data-root", common.data_root,
                    "Dataset directory (default: $ALPNET_DATA_ROOT)");
    sub->add_option("--format", common.format, "Dataset format: raw | nifti");
    sub->add_option("--seed", common.seed, "Override the run seed")
        ->each([&](const std::string&) { common.seed_set = true; });
  };

  CLI::App* gen = app.add_subcommand(
      "gen-superpixels", "Build pseudolabel stores for every volume");
  add_common(gen);
  gen->add_option("--out", store_root, "Pseudolabel store root");
  gen->add_option("--min-size", min_size, "Override superpixel.min_size");
  gen->add_option("--scale", scale, "Override superpixel.scale");

  CLI::App* train = app.add_subcommand("train-ssl", "Episodic SSL training");
  add_common(train);
  train->add_option("--stores", store_root, "Pseudolabel store root");
  train->add_option("--out", out_dir, "Output directory (checkpoint + log)");
  train->add_option("--resume", resume, "Resume from a checkpoint");
  train->add_option("--iterations", iterations, "Override train.iterations");
  train->add_option("--mode", mode_override,
                    "alpnet | class_prototype_only");
  train->add_option("--setting", setting_override, "Evaluation setting (1|2)");
  train->add_option("--test-group", test_group_override,
                    "Class ids excluded in setting 2");

  CLI::App* eval = app.add_subcommand("evaluate", "Chunk-protocol evaluation");
  add_common(eval);
  eval->add_option("--checkpoint", checkpoint_path, "Trained checkpoint")
      ->required();
  eval->add_option("--out", report_path, "Report path (JSON)");
  eval->add_option("--setting", setting_override, "Evaluation setting (1|2)");
  eval->add_option("--classes", classes_override, "Class ids to evaluate");
  eval->add_option("--chunks", chunks_override, "Chunk count C");
  eval->add_flag("--overlays", overlays, "Write per-slice prediction overlays");
  eval->add_flag("--force", force, "Ignore config hash mismatches");

  DemoConfig demo;
  CLI::App* demo_cmd = app.add_subcommand(
      "demo-synthetic", "End-to-end desk-scale run on phantom volumes");
  demo_cmd->add_option("--out", demo.out_dir, "Working directory")->required();
  demo_cmd->add_option("--seed", demo.seed, "Run seed");
  demo_cmd->add_option("--iterations", demo.iterations, "Training iterations");
  demo_cmd->add_option("--mode", demo.mode, "alpnet | class_prototype_only");
  demo_cmd->add_option("--volumes", demo.n_volumes, "Phantom volume count");
  demo_cmd->add_option("--slices", demo.n_slices, "Slices per volume");
  demo_cmd->add_option("--size", demo.size, "Slice size (pixels)");
  demo_cmd->add_option("--classes", demo.n_classes, "Phantom organ classes");
  demo_cmd->add_option("--held-out", demo.held_out_class, "Held-out class id");
  demo_cmd->add_option("--min-size", demo.superpixel.min_size,
                       "Superpixel min size");
  bool no_geo = false, no_inten = false;
  demo_cmd->add_flag("--disable-geometric", no_geo,
                     "Disable geometric transforms");
  demo_cmd->add_flag("--disable-intensity", no_inten,
                     "Disable intensity transforms");
  demo_cmd->add_flag("--quiet", demo.quiet, "Suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      return cmd_gen_superpixels(common, store_root, min_size, scale);
    }
    if (train->parsed()) {
      return cmd_train_ssl(common, store_root, out_dir, resume, iterations,
                           mode_override, setting_override,
                           test_group_override);
    }
    if (eval->parsed()) {
      return cmd_evaluate(common, checkpoint_path, report_path,
                          setting_override, classes_override, chunks_override,
                          overlays, force);
    }
    if (demo_cmd->parsed()) {
      demo.enable_geometric = !no_geo;
      demo.enable_intensity = !no_inten;
      const DemoResult result = run_synthetic_demo(demo);
      std::printf("demo-synthetic: mean Dice %.2f (class %d, seed %llu)\n",
                  result.mean_dice, demo.held_out_class,
                  static_cast<unsigned long long>(demo.seed));
      return kExitOk;
    }
  } catch (const ValidationError& e) {
    std::cerr << "config/usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
