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

#include <omp.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "tapem/commands.hpp"
#include "tapem/errors.hpp"

namespace {

using namespace tapem;

template <typename T>
std::optional<T> opt_if(const CLI::Option* o, const T& value) {
  return o->count() ? std::optional<T>(value) : std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Task-guided pair embedding for author identification"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 0;
  int threads = 0;
  app.add_option("--seed", seed, "Seed for every random stream")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads (0 = OpenMP default)")
      ->check(CLI::NonNegativeNumber);
  app.set_version_flag("--version", cli::kVersion);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic academic network");
  cli::SynthArgs synth_args;
  std::string synth_config;
  auto* synth_config_opt = synth->add_option("--config", synth_config, "Generator config JSON")
                               ->check(CLI::ExistingFile);
  synth->add_option("--out", synth_args.out_dir, "Output directory")->required();

  // train
  auto* train = app.add_subcommand("train", "Train TaPEm, an ablation, or the skip-gram baseline");
  cli::TrainArgs train_args;
  std::string train_config, train_resume, model_name = "tapem";
  std::size_t train_epochs = 0;
  train->add_option("--data", train_args.data_dir, "Dataset directory")
      ->envname(cli::kDataDirEnv)
      ->required();
  auto* train_config_opt =
      train->add_option("--config", train_config, "Training config JSON")->check(CLI::ExistingFile);
  train->add_option("--out", train_args.out_dir, "Output directory")->required();
  train->add_option("--model", model_name, "tapem | tapem-npv | tapem-no-attn | tapem-no-bigru | baseline")
      ->capture_default_str();
  auto* resume_opt =
      train->add_option("--resume", train_resume, "Continue from a checkpoint")->check(CLI::ExistingFile);
  auto* epochs_opt = train->add_option("--epochs", train_epochs, "Override the epoch count")
                         ->check(CLI::PositiveNumber);

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on the validation or test papers");
  cli::EvalArgs eval_args;
  std::string split = "test", candidates = "sampled", slice = "all", score_rule, eval_out;
  std::size_t pool = 0;
  ev->add_option("--checkpoint", eval_args.checkpoint, "Checkpoint file")
      ->required()
      ->check(CLI::ExistingFile);
  ev->add_option("--data", eval_args.data_dir, "Dataset directory")->envname(cli::kDataDirEnv)->required();
  ev->add_option("--split", split, "val | test")->check(CLI::IsMember({"val", "test"}))->capture_default_str();
  ev->add_option("--candidates", candidates, "sampled | whole")
      ->check(CLI::IsMember({"sampled", "whole"}))
      ->capture_default_str();
  ev->add_option("--slice", slice, "all | inactive")
      ->check(CLI::IsMember({"all", "inactive"}))
      ->capture_default_str();
  ev->add_option("--threshold", eval_args.inactive_threshold, "Inactive-author publication limit")
      ->capture_default_str();
  auto* pool_opt = ev->add_option("--pool", pool, "Candidates per paper in sampled mode")
                       ->check(CLI::PositiveNumber);
  auto* score_opt = ev->add_option("--score", score_rule, "classifier | dot")
                        ->check(CLI::IsMember({"classifier", "dot"}));
  auto* eval_out_opt = ev->add_option("--out", eval_out, "Write metrics.json and rankings.tsv here");

  // rank
  auto* rank = app.add_subcommand("rank", "Rank every author for an abstract");
  cli::RankArgs rank_args;
  rank->add_option("--checkpoint", rank_args.checkpoint, "Checkpoint file")
      ->required()
      ->check(CLI::ExistingFile);
  rank->add_option("--abstract", rank_args.abstract_file, "Whitespace-tokenized abstract")
      ->required()
      ->check(CLI::ExistingFile);
  rank->add_option("--top", rank_args.top, "Rows to print")->capture_default_str();

  // export
  auto* exp = app.add_subcommand("export", "Export author or pair embeddings as TSV");
  cli::ExportArgs export_args;
  std::string export_data, export_pairs;
  exp->add_option("--checkpoint", export_args.checkpoint, "Checkpoint file")
      ->required()
      ->check(CLI::ExistingFile);
  exp->add_option("--out", export_args.out_path, "Output TSV")->required();
  exp->add_option("--what", export_args.what, "authors | pairs")
      ->check(CLI::IsMember({"authors", "pairs"}))
      ->capture_default_str();
  auto* export_data_opt = exp->add_option("--data", export_data, "Dataset directory (pairs)")
                              ->envname(cli::kDataDirEnv);
  auto* export_pairs_opt = exp->add_option("--pairs", export_pairs, "paper<TAB>author list (pairs)")
                               ->check(CLI::ExistingFile);

  // gradcheck
  auto* gc = app.add_subcommand("gradcheck", "Finite-difference check of every gradient");
  cli::GradcheckArgs gc_args;
  std::string gc_config, gc_corrupt;
  auto* gc_config_opt =
      gc->add_option("--config", gc_config, "Training config JSON")->check(CLI::ExistingFile);
  gc->add_option("--probes", gc_args.probes, "Probes per parameter group")->capture_default_str();
  auto* gc_corrupt_opt =
      gc->add_option("--corrupt-group", gc_corrupt, "Test hook: corrupt this group's gradient");

  // walk dump
  auto* walk = app.add_subcommand("walk", "Meta-path walk utilities");
  walk->require_subcommand(1);
  auto* dump = walk->add_subcommand("dump", "Write meta-path guided walks");
  cli::WalkArgs walk_args;
  std::string walk_pairs;
  dump->add_option("--data", walk_args.data_dir, "Dataset directory")->envname(cli::kDataDirEnv)->required();
  dump->add_option("--metapath", walk_args.metapath, "Meta-path such as APA or APVPA")->capture_default_str();
  dump->add_option("--out", walk_args.out, "Output walk file")->required();
  dump->add_option("--walks-per-node", walk_args.walks_per_node)->capture_default_str();
  dump->add_option("--walk-length", walk_args.walk_length)->capture_default_str();
  dump->add_option("--tau", walk_args.tau, "Pair window")->capture_default_str();
  auto* walk_pairs_opt = dump->add_option("--pairs", walk_pairs, "Also write pair-path instances (JSONL)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (threads > 0) omp_set_num_threads(threads);
  try {
    if (*synth) {
      synth_args.seed = seed;
      synth_args.config = opt_if<std::filesystem::path>(synth_config_opt, synth_config);
      cli::cmd_synth(synth_args, std::cout);
    } else if (*train) {
      train_args.seed = seed;
      train_args.model = model::parse_model_kind(model_name);
      train_args.config = opt_if<std::filesystem::path>(train_config_opt, train_config);
      train_args.resume = opt_if<std::filesystem::path>(resume_opt, train_resume);
      train_args.epochs = opt_if(epochs_opt, train_epochs);
      cli::cmd_train(train_args, std::cout);
    } else if (*ev) {
      eval_args.seed = seed;
      eval_args.split = split == "val" ? cli::SplitName::Validation : cli::SplitName::Test;
      eval_args.mode = candidates == "whole" ? eval::CandidateMode::Whole : eval::CandidateMode::Sampled;
      eval_args.inactive_slice = slice == "inactive";
      eval_args.candidates = opt_if(pool_opt, pool);
      if (score_opt->count())
        eval_args.rule = score_rule == "dot" ? eval::ScoreRule::Dot : eval::ScoreRule::Classifier;
      eval_args.out_dir = opt_if<std::filesystem::path>(eval_out_opt, eval_out);
      cli::cmd_eval(eval_args, std::cout);
    } else if (*rank) {
      cli::cmd_rank(rank_args, std::cout);
    } else if (*exp) {
      export_args.data_dir = opt_if<std::filesystem::path>(export_data_opt, export_data);
      export_args.pairs_file = opt_if<std::filesystem::path>(export_pairs_opt, export_pairs);
      const auto rows = cli::cmd_export(export_args);
      std::cout << "wrote " << rows << " rows to " << export_args.out_path.string() << "\n";
    } else if (*gc) {
      gc_args.seed = seed;
      gc_args.config = opt_if<std::filesystem::path>(gc_config_opt, gc_config);
      gc_args.corrupt_group = opt_if(gc_corrupt_opt, gc_corrupt);
      if (!cli::cmd_gradcheck(gc_args, std::cout).passed()) return 3;
    } else if (*dump) {
      walk_args.seed = seed;
      walk_args.pairs_out = opt_if<std::filesystem::path>(walk_pairs_opt, walk_pairs);
      cli::cmd_walk(walk_args, std::cout);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
