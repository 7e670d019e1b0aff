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

// End-to-end coverage of the command-line surface against the built binary.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "alpnet/phantom.hpp"
#include "alpnet/rng.hpp"
#include "alpnet/volume.hpp"

using namespace alpnet;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int exit_code;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const fs::path out = fs::temp_directory_path() / "alpnet_cli_out.txt";
  const std::string cmd =
      std::string(ALPNET_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out);
  std::ostringstream os;
  os << in.rdbuf();
  return {WEXITSTATUS(status), os.str()};
}

// Shared workspace: a small phantom dataset written once per process.
const fs::path& workspace() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "alpnet_cli_ws";
    fs::remove_all(d);
    fs::create_directories(d / "data");
    Rng rng(2024);
    const auto dataset = make_phantom_dataset(10, 10, 32, 2, rng);
    for (const Volume& v : dataset) {
      save_volume_raw(v, (d / "data" / v.id).string(),
                      {{"organ_1", 1}, {"organ_2", 2}});
    }
    json cfg{{"seed", 11},
             {"data", {{"root", (d / "data").string()}, {"target_size", 32}}},
             {"superpixel", {{"scale", 100.0}, {"min_size", 20}}},
             {"train", {{"iterations", 25}, {"checkpoint_every", 25}}},
             {"eval", {{"setting", 2}, {"test_group", {2}}, {"classes", {2}}}}};
    std::ofstream((d / "config.json").string()) << cfg.dump(2);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("no-such-command").exit_code == 2);
  const auto r = run_cli("gen-superpixels --data-root /definitely/not/here");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("/definitely/not/here") != std::string::npos);
}

TEST_CASE("train-ssl without stores points at gen-superpixels") {
  const fs::path& ws = workspace();
  const auto r = run_cli("train-ssl --config " + (ws / "config.json").string() +
                         " --stores " + (ws / "no_stores").string() + " --out " +
                         (ws / "t0").string());
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("gen-superpixels") != std::string::npos);
}

TEST_CASE("gen-superpixels builds, skips unchanged, honors --min-size") {
  const fs::path& ws = workspace();
  const std::string stores = (ws / "stores").string();
  const std::string base = "gen-superpixels --config " +
                           (ws / "config.json").string() + " --out " + stores;

  const auto first = run_cli(base);
  CHECK(first.exit_code == 0);
  CHECK(first.output.find("usable") != std::string::npos);
  REQUIRE(fs::exists(fs::path(stores) / "phantom00" / "manifest.json"));

  // idempotent rerun: every volume skipped
  const auto second = run_cli(base);
  CHECK(second.exit_code == 0);
  CHECK(second.output.find("skipped") != std::string::npos);
  CHECK(second.output.find("usable") == std::string::npos);

  // an override lands in the manifest and invalidates the skip
  const auto forced = run_cli(base + " --min-size 13");
  CHECK(forced.exit_code == 0);
  CHECK(forced.output.find("usable") != std::string::npos);
  json manifest;
  std::ifstream(fs::path(stores) / "phantom00" / "manifest.json") >> manifest;
  CHECK(manifest["config"]["min_size"] == 13);

  // restore the config's stores for the training test below
  CHECK(run_cli(base).exit_code == 0);
}

TEST_CASE("train-ssl then evaluate: checkpoint, report, hash guard") {
  const fs::path& ws = workspace();
  const std::string stores = (ws / "stores").string();
  const std::string cfg = (ws / "config.json").string();

  // stores may not exist if test order changes
  REQUIRE(run_cli("gen-superpixels --config " + cfg + " --out " + stores)
              .exit_code == 0);

  const std::string train_out = (ws / "train").string();
  const auto tr = run_cli("train-ssl --config " + cfg + " --stores " + stores +
                          " --out " + train_out);
  CHECK(tr.exit_code == 0);
  const std::string ckpt = train_out + "/checkpoint.json";
  REQUIRE(fs::exists(ckpt));
  REQUIRE(fs::exists(train_out + "/checkpoint.bin"));
  REQUIRE(fs::exists(train_out + "/train_log.jsonl"));

  const std::string report = (ws / "eval_report.json").string();
  const auto ev = run_cli("evaluate --config " + cfg + " --checkpoint " + ckpt +
                          " --out " + report + " --overlays");
  CHECK(ev.exit_code == 0);
  CHECK(ev.output.find(report) != std::string::npos);  // path printed
  REQUIRE(fs::exists(report));
  json rep;
  std::ifstream(report) >> rep;
  const double mean = rep["classes"]["2"]["mean"].get<double>();
  CHECK(mean >= 0.0);
  CHECK(mean <= 100.0);

  // overlays: one PNG per evaluated query slice
  bool found_png = false;
  const fs::path overlay_root = ws / "overlays";
  if (fs::exists(overlay_root)) {
    for (const auto& e : fs::recursive_directory_iterator(overlay_root)) {
      if (e.path().extension() == ".png") found_png = true;
    }
  }
  CHECK(found_png);

  // a mismatched config is refused without --force
  const auto bad = run_cli("evaluate --config " + cfg + " --checkpoint " + ckpt +
                           " --out " + report + " --seed 999");
  CHECK(bad.exit_code == 2);
  CHECK(bad.output.find("--force") != std::string::npos);
  const auto forced = run_cli("evaluate --config " + cfg + " --checkpoint " +
                              ckpt + " --out " + report + " --seed 999 --force");
  CHECK(forced.exit_code == 0);
}

TEST_CASE("demo-synthetic runs end to end and prints a Dice in range") {
  const fs::path out = fs::temp_directory_path() / "alpnet_cli_demo";
  fs::remove_all(out);
  const auto r = run_cli(
      "demo-synthetic --out " + out.string() +
      " --volumes 10 --slices 10 --size 32 --classes 2 --held-out 2"
      " --iterations 25 --min-size 20 --seed 3 --quiet");
  CHECK(r.exit_code == 0);
  const auto pos = r.output.find("mean Dice ");
  REQUIRE(pos != std::string::npos);
  const double d = std::stod(r.output.substr(pos + 10));
  CHECK(d >= 0.0);
  CHECK(d <= 100.0);
  CHECK(fs::exists(out / "eval_report.json"));
  CHECK(fs::exists(out / "train" / "checkpoint.json"));
  CHECK(fs::exists(out / "pseudolabels"));
  fs::remove_all(out);
}
