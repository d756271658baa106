// Copyright 2026 The tapem Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Subcommands of the tapem tool. Each takes a plain argument struct so the
// same code runs from the command line and from tests.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tapem/eval.hpp"
#include "tapem/hetgraph.hpp"
#include "tapem/model.hpp"
#include "tapem/objective.hpp"

namespace tapem::cli {

using std::filesystem::path;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kDataDirEnv = "TAPEM_DATA_DIR";
inline constexpr double kGradCheckTolerance = 1e-4;
// Candidate seed used for validation during training, so every model and
// training seed is selected on the same candidate sets.
inline constexpr std::uint64_t kValidationCandidateSeed = 0;

struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::vector<path> inputs;
  std::vector<path> outputs;
  double wall_seconds = 0.0;
  // Digests are computed when serializing.
  nlohmann::json to_json() const;
  void write(const path& file) const;
};

// Split year and split seed recorded in a dataset's meta.json.
struct DatasetInfo {
  int split_year = 0;
  std::uint64_t split_seed = 0;
};
DatasetInfo load_dataset_info(const path& data_dir);

struct SynthArgs {
  std::optional<path> config;
  path out_dir;
  std::uint64_t seed = 0;
};
struct SynthResult {
  std::size_t authors = 0, papers = 0, venues = 0, edges = 0;
};
SynthResult cmd_synth(const SynthArgs& args, std::ostream& out);

struct TrainArgs {
  path data_dir;
  std::optional<path> config;
  path out_dir;
  model::ModelKind model = model::ModelKind::Tapem;
  std::uint64_t seed = 0;
  std::optional<path> resume;
  std::optional<std::size_t> epochs;
  train::Execution execution = train::Execution::Parallel;
};
struct TrainResult {
  std::size_t epochs_run = 0;
  std::size_t last_epoch = 0;
  std::size_t best_epoch = 0;
  double best_validation_recall = 0.0;
  path checkpoint;
  path last_checkpoint;
  std::vector<train::TrainStats> stats;
};
// Writes checkpoint.bin (best validation Recall@5), last.bin (latest epoch),
// train_log.jsonl and manifest.json into out_dir.
TrainResult cmd_train(const TrainArgs& args, std::ostream& out);

enum class SplitName { Validation, Test };

struct EvalArgs {
  path checkpoint;
  path data_dir;
  SplitName split = SplitName::Test;
  eval::CandidateMode mode = eval::CandidateMode::Sampled;
  bool inactive_slice = false;
  std::size_t inactive_threshold = eval::kDefaultInactiveThreshold;
  std::optional<std::size_t> candidates;
  std::optional<eval::ScoreRule> rule;
  std::uint64_t seed = 0;
  // When set, metrics.json, rankings.tsv and manifest.json go here.
  std::optional<path> out_dir;
  bool parallel = true;
};
eval::MetricsReport cmd_eval(const EvalArgs& args, std::ostream& out);

struct RankArgs {
  path checkpoint;
  path abstract_file;
  std::size_t top = 10;
};
struct RankedAuthor {
  std::string author;
  double score = 0.0;
};
std::vector<RankedAuthor> cmd_rank(const RankArgs& args, std::ostream& out);

struct ExportArgs {
  path checkpoint;
  path out_path;
  std::string what = "authors";
  // Required for pairs: the dataset and a TSV of paper<TAB>author lines.
  std::optional<path> data_dir;
  std::optional<path> pairs_file;
};
std::size_t cmd_export(const ExportArgs& args);

struct GradcheckArgs {
  std::optional<path> config;
  std::uint64_t seed = 0;
  std::size_t probes = 60;
  // Test hook: scales the analytic gradient of this group by 1.1.
  std::optional<std::string> corrupt_group;
};
struct GradcheckGroup {
  std::string model;
  std::string group;
  double max_relative_error = 0.0;
  std::size_t probes = 0;
  std::size_t skipped = 0;
  std::string worst;
};
struct GradcheckReport {
  std::vector<GradcheckGroup> groups;
  double tolerance = kGradCheckTolerance;
  double wall_seconds = 0.0;
  bool passed() const;
};
GradcheckReport cmd_gradcheck(const GradcheckArgs& args, std::ostream& out);

struct WalkArgs {
  path data_dir;
  std::string metapath = "APA";
  path out;
  std::size_t walks_per_node = 5;
  std::size_t walk_length = 20;
  std::uint64_t seed = 0;
  std::optional<path> pairs_out;
  std::size_t tau = 3;
};
std::size_t cmd_walk(const WalkArgs& args, std::ostream& out);

// Three papers, four authors, two venues; used by gradcheck and tests.
graph::HeteroGraph toy_graph();

}  // namespace tapem::cli
