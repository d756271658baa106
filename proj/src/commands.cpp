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

#include "tapem/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

#include "tapem/errors.hpp"
#include "tapem/gradcheck.hpp"
#include "tapem/io.hpp"
#include "tapem/params.hpp"
#include "tapem/synthetic.hpp"
#include "tapem/walker.hpp"

namespace tapem::cli {

using json = nlohmann::json;
using graph::HeteroGraph;
using graph::NodeId;
using graph::NodeType;
using model::Model;
using model::ModelKind;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

json read_json(const path& file, const char* what) {
  try {
    return json::parse(io::read_file(file));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(what) + " " + file.string() + " is not valid JSON: " + e.what());
  }
}

void ensure_dir(const path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create directory " + dir.string() + (ec ? ": " + ec.message() : ""));
}

std::vector<path> dataset_files(const path& dir) {
  const auto p = graph::DatasetPaths::in(dir);
  std::vector<path> files{p.nodes, p.edges, p.abstracts};
  if (std::filesystem::exists(dir / "meta.json")) files.push_back(dir / "meta.json");
  return files;
}

std::vector<NodeId> with_authors(const HeteroGraph& g, std::span<const NodeId> papers) {
  std::vector<NodeId> out;
  for (NodeId p : papers)
    if (!g.typed_neighbors(p, NodeType::Author).empty()) out.push_back(p);
  return out;
}

struct Restored {
  Model model;
  train::TrainingConfig config;
  json meta;
};

Restored restore_checkpoint(const path& file) {
  num::Checkpoint ck = num::load_checkpoint(file);
  if (!ck.meta.contains("model") || !ck.meta.contains("config"))
    throw IntegrityError("checkpoint " + file.string() + " lacks model metadata");
  train::TrainingConfig config = train::TrainingConfig::from_json(ck.meta.at("config"));
  Model m = Model::restore(ck.meta.at("model"), std::move(ck.params));
  return {std::move(m), std::move(config), std::move(ck.meta)};
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(precision) << v;
  return ss.str();
}

}  // namespace

// --- manifest ------------------------------------------------------------------

json RunManifest::to_json() const {
  json j;
  j["tool"] = "tapem";
  j["version"] = kVersion;
  j["command"] = command;
  j["seed"] = seed;
  j["config"] = config;
  j["inputs"] = json::object();
  for (const auto& p : inputs) j["inputs"][p.string()] = io::sha256_file(p);
  j["outputs"] = json::object();
  for (const auto& p : outputs) j["outputs"][p.string()] = io::sha256_file(p);
  j["wall_seconds"] = wall_seconds;
  return j;
}

void RunManifest::write(const path& file) const { io::write_file_atomic(file, to_json().dump(2) + "\n"); }

DatasetInfo load_dataset_info(const path& data_dir) {
  const path file = data_dir / "meta.json";
  if (!std::filesystem::exists(file))
    throw ConfigError("dataset " + data_dir.string() + " has no meta.json with a split_year");
  const json j = read_json(file, "dataset metadata");
  DatasetInfo info;
  try {
    info.split_year = j.at("split_year").get<int>();
    info.split_seed = j.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw ConfigError("dataset metadata " + file.string() + ": " + e.what());
  }
  return info;
}

// --- synth -----------------------------------------------------------------------

SynthResult cmd_synth(const SynthArgs& args, std::ostream& out) {
  const auto start = Clock::now();
  graph::SynthConfig config;
  if (args.config) config = graph::SynthConfig::from_json(read_json(*args.config, "synthetic config"));
  config.validate();
  auto [g, split] = graph::generate_synthetic(config, args.seed);
  ensure_dir(args.out_dir);
  graph::write_dataset(args.out_dir, g, config, args.seed);

  SynthResult r{g.count(NodeType::Author), g.count(NodeType::Paper), g.count(NodeType::Venue),
                g.edges().size()};
  RunManifest m;
  m.command = "synth";
  m.config = config.to_json();
  m.seed = args.seed;
  if (args.config) m.inputs.push_back(*args.config);
  m.outputs = dataset_files(args.out_dir);
  m.wall_seconds = seconds_since(start);
  m.write(args.out_dir / "manifest.json");
  out << "wrote " << r.authors << " authors, " << r.papers << " papers, " << r.venues
      << " venues, " << r.edges << " edges to " << args.out_dir.string() << "\n"
      << "split year " << split.split_year << ": " << split.train.size() << " train, "
      << split.validation.size() << " validation, " << split.test.size() << " test papers\n";
  return r;
}

// --- train -----------------------------------------------------------------------

TrainResult cmd_train(const TrainArgs& args, std::ostream& out) {
  const auto start = Clock::now();
  train::TrainingConfig config;
  std::optional<Restored> resumed;
  if (args.resume) {
    resumed.emplace(restore_checkpoint(*args.resume));
    config = resumed->config;
    if (resumed->model.kind() != args.model)
      throw ConfigError("checkpoint holds model '" +
                        std::string(model::to_string(resumed->model.kind())) + "', not '" +
                        std::string(model::to_string(args.model)) + "'");
  } else {
    if (args.config) config = train::TrainingConfig::load(*args.config);
    config.seed = args.seed;
  }
  if (args.epochs) config.epochs = *args.epochs;
  config.validate();

  const HeteroGraph full = graph::load_dataset(args.data_dir);
  const DatasetInfo info = load_dataset_info(args.data_dir);
  const graph::CorpusSplit split = graph::temporal_split(full, info.split_year, info.split_seed);
  const HeteroGraph train_graph = full.restrict_to_papers(split.train);
  const std::vector<NodeId> validation = with_authors(full, split.validation);
  if (validation.empty()) throw ConfigError("validation split has no paper with an author");

  Model model = resumed ? std::move(resumed->model)
                        : Model::create(args.model, config.dims(), train_graph, config.seed);
  model.attach(train_graph);
  train::Trainer trainer(model, train_graph, split.train, config, args.execution);

  ensure_dir(args.out_dir);
  TrainResult result;
  result.checkpoint = args.out_dir / "checkpoint.bin";
  result.last_checkpoint = args.out_dir / "last.bin";
  const path log = args.out_dir / "train_log.jsonl";
  std::size_t first_epoch = 1, stale = 0;
  double best = -1.0;
  if (resumed) {
    const json& m = resumed->meta;
    first_epoch = m.at("epoch").get<std::size_t>() + 1;
    best = m.at("best_validation_recall").get<double>();
    result.best_epoch = m.at("best_epoch").get<std::size_t>();
    stale = m.at("stale_epochs").get<std::size_t>();
  } else {
    std::filesystem::remove(log);
  }
  out << "model " << model::to_string(model.kind()) << ": "
      << model.params().parameter_count() << " parameters, "
      << (model.is_baseline() ? trainer.skipgram_pair_count() : trainer.instances().size())
      << (model.is_baseline() ? " skip-gram pairs" : " pair-path instances") << " from "
      << trainer.walks().size() << " walks\n";

  eval::EvalOptions vopts;
  vopts.candidates = config.eval_candidates;
  vopts.seed = kValidationCandidateSeed;
  vopts.parallel = args.execution == train::Execution::Parallel;
  const std::array<std::size_t, 1> at5{5};

  for (std::size_t epoch = first_epoch; epoch <= config.epochs && stale < config.patience; ++epoch) {
    const train::TrainStats stats = trainer.train_epoch(epoch);
    const auto lists = eval::rank_papers(model, full, validation, vopts);
    const double recall5 = eval::metrics(lists, at5).recall.at(5);
    train::append_stats(log, stats, {{"validation_recall_at_5", recall5}});
    result.stats.push_back(stats);
    ++result.epochs_run;
    result.last_epoch = epoch;

    const bool improved = recall5 > best;
    if (improved) {
      best = recall5;
      result.best_epoch = epoch;
      stale = 0;
    } else {
      ++stale;
    }
    json meta;
    meta["format"] = "tapem-checkpoint";
    meta["model"] = model.meta();
    meta["config"] = config.to_json();
    meta["epoch"] = epoch;
    meta["best_epoch"] = result.best_epoch;
    meta["best_validation_recall"] = best;
    meta["stale_epochs"] = stale;
    meta["split"] = {{"year", info.split_year}, {"seed", info.split_seed}};
    if (improved) num::save_checkpoint(result.checkpoint, model.params(), meta);
    num::save_checkpoint(result.last_checkpoint, model.params(), meta);

    out << "epoch " << epoch << "  loss " << fmt(stats.mean_total) << " (ctx " << fmt(stats.mean_ctx)
        << ", pv " << fmt(stats.mean_pv) << ", metric " << fmt(stats.mean_metric)
        << ")  val R@5 " << fmt(recall5) << (improved ? " *" : "") << "  "
        << fmt(stats.wall_seconds, 1) << "s\n";
    out.flush();
  }
  result.best_validation_recall = best;
  if (result.epochs_run == 0 && !std::filesystem::exists(result.checkpoint))
    throw ConfigError("no epochs left to train (epochs = " + std::to_string(config.epochs) + ")");

  RunManifest m;
  m.command = "train --model " + std::string(model::to_string(args.model));
  m.config = config.to_json();
  m.seed = config.seed;
  m.inputs = dataset_files(args.data_dir);
  if (args.config) m.inputs.push_back(*args.config);
  if (args.resume) m.inputs.push_back(*args.resume);
  m.outputs = {result.checkpoint, result.last_checkpoint, log};
  m.wall_seconds = seconds_since(start);
  m.write(args.out_dir / "manifest.json");
  out << "best validation R@5 " << fmt(best) << " at epoch " << result.best_epoch << "; "
      << result.checkpoint.string() << "\n";
  return result;
}

// --- eval ------------------------------------------------------------------------

namespace {

void print_report(const eval::MetricsReport& r, std::ostream& out) {
  out << "slice " << r.slice << ", " << r.candidates << " candidates, " << r.papers << " papers";
  if (r.excluded) out << " (" << r.excluded << " without true authors excluded)";
  out << "\n";
  out << std::left << std::setw(8) << "N" << std::setw(12) << "Recall" << std::setw(12)
      << "Precision" << "F1\n";
  for (std::size_t n : r.n_values)
    out << std::setw(8) << n << std::setw(12) << fmt(r.recall.at(n)) << std::setw(12)
        << fmt(r.precision.at(n)) << fmt(r.f1.at(n)) << "\n";
  out << std::right << "AUC " << fmt(r.auc) << "\n";
  if (r.rank_violations)
    out << "rank violations " << fmt(*r.rank_violations) << " (over " << r.violation_papers
        << " papers)\n";
}

}  // namespace

eval::MetricsReport cmd_eval(const EvalArgs& args, std::ostream& out) {
  const auto start = Clock::now();
  Restored r = restore_checkpoint(args.checkpoint);
  Model& model = r.model;
  const HeteroGraph full = graph::load_dataset(args.data_dir);
  model.attach(full);
  const DatasetInfo info = load_dataset_info(args.data_dir);
  const graph::CorpusSplit split = graph::temporal_split(full, info.split_year, info.split_seed);
  const auto& chosen = args.split == SplitName::Test ? split.test : split.validation;
  const std::vector<NodeId> papers = [&] {
    auto p = with_authors(full, chosen);
    std::sort(p.begin(), p.end());
    return p;
  }();

  eval::EvalOptions opts;
  opts.mode = args.mode;
  opts.candidates = args.candidates.value_or(r.config.eval_candidates);
  opts.seed = args.seed;
  opts.rule = args.rule;
  opts.parallel = args.parallel;
  const eval::ScoreRule rule = args.rule.value_or(eval::default_rule(model));
  auto lists = eval::rank_papers(model, full, papers, opts);

  // Frequently co-occurring false authors come from walks over the full
  // graph, since evaluation papers are absent from the training walks.
  walk::WalkOptions wopts;
  wopts.walks_per_node = r.config.walks_per_node;
  wopts.walk_length = r.config.walk_length;
  wopts.seed = args.seed;
  const auto mp = walk::MetaPath::parse(r.config.metapaths.front());
  const auto walks = args.parallel ? walk::generate_walks(full, mp, wopts)
                                   : walk::generate_walks_serial(full, mp, wopts);
  walk::CooccurrenceCounts counts = walk::cooccurrence_counts(walks, r.config.tau, full);
  std::vector<eval::RankedList> vlists(papers.size());
  for (std::size_t i = 0; i < papers.size(); ++i) {
    const NodeId v = papers[i];
    counts[v];
    const auto truth = full.typed_neighbors(v, NodeType::Author);
    std::vector<NodeId> authors(truth.begin(), truth.end());
    for (NodeId a : eval::frequent_false_authors(full, counts, v, truth.size())) authors.push_back(a);
    std::vector<char> mask(authors.size(), 0);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(truth.size()), 1);
    std::vector<num::Index> rows;
    for (NodeId a : authors) rows.push_back(model.row(a));
    const num::Vector p = model::encode_paper(model.params(), model.encoder, full.abstract(v), nullptr);
    vlists[i] = eval::make_ranked_list(v, authors, mask, eval::score_rows(model, p, rows, rule), rule);
  }

  if (args.inactive_slice) {
    const auto keep = eval::inactive_authors(full, split, args.inactive_threshold);
    lists = eval::slice_lists(lists, keep);
    vlists = eval::slice_lists(vlists, keep);
  }
  eval::MetricsReport report = eval::metrics(lists, eval::default_n_values(args.mode));
  report.slice = args.inactive_slice ? "inactive" : "all";
  report.candidates = args.mode == eval::CandidateMode::Whole ? "whole" : "sampled";
  const auto violations = eval::rank_violations(full, vlists, counts);
  report.rank_violations = violations.average;
  report.violation_papers = violations.papers;
  print_report(report, out);

  if (args.out_dir) {
    ensure_dir(*args.out_dir);
    json j = report.to_json();
    j["model"] = model::to_string(model.kind());
    j["split"] = args.split == SplitName::Test ? "test" : "val";
    j["seed"] = args.seed;
    j["candidate_count"] = opts.mode == eval::CandidateMode::Whole ? full.count(NodeType::Author)
                                                                  : opts.candidates;
    if (args.inactive_slice) j["inactive_threshold"] = args.inactive_threshold;
    const path metrics_file = *args.out_dir / "metrics.json";
    const path rankings_file = *args.out_dir / "rankings.tsv";
    io::write_file_atomic(metrics_file, j.dump(2) + "\n");
    eval::write_rankings(rankings_file, lists, full);
    RunManifest m;
    m.command = "eval";
    m.config = {{"split", j["split"]},
                {"candidates", report.candidates},
                {"slice", report.slice},
                {"candidate_count", j["candidate_count"]}};
    m.seed = args.seed;
    m.inputs = dataset_files(args.data_dir);
    m.inputs.push_back(args.checkpoint);
    m.outputs = {metrics_file, rankings_file};
    m.wall_seconds = seconds_since(start);
    m.write(*args.out_dir / "manifest.json");
  }
  return report;
}

// --- rank ------------------------------------------------------------------------

std::vector<RankedAuthor> cmd_rank(const RankArgs& args, std::ostream& out) {
  if (args.top == 0) throw ConfigError("--top must be positive");
  Restored r = restore_checkpoint(args.checkpoint);
  const Model& model = r.model;
  std::istringstream text(io::read_file(args.abstract_file));
  std::vector<graph::TokenId> tokens;
  for (std::string tok; text >> tok;) tokens.push_back(model.vocab().lookup(tok));
  if (tokens.empty()) throw InputError("abstract " + args.abstract_file.string() + " is empty");

  const num::Vector p = model::encode_paper(model.params(), model.encoder, tokens, nullptr);
  std::vector<num::Index> rows(model.author_ids().size());
  std::iota(rows.begin(), rows.end(), 0);
  const auto rule = eval::default_rule(model);
  const auto keys = eval::score_rows(model, p, rows, rule);
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] > keys[b]; });
  std::vector<RankedAuthor> ranked;
  for (std::size_t i = 0; i < std::min(args.top, order.size()); ++i)
    ranked.push_back({model.author_ids()[order[i]], eval::key_to_score(keys[order[i]], rule)});
  out << "rank\tauthor\tscore\n" << std::setprecision(6);
  for (std::size_t i = 0; i < ranked.size(); ++i)
    out << i + 1 << '\t' << ranked[i].author << '\t' << ranked[i].score << '\n';
  return ranked;
}

// --- export ------------------------------------------------------------------------

std::size_t cmd_export(const ExportArgs& args) {
  const auto start = Clock::now();
  Restored r = restore_checkpoint(args.checkpoint);
  Model& model = r.model;
  std::ostringstream ss;
  ss << std::setprecision(17);
  std::size_t rows = 0;
  RunManifest m;
  m.inputs.push_back(args.checkpoint);
  if (args.what == "authors") {
    const auto& table = model.params().value(model.author_table);
    for (std::size_t i = 0; i < model.author_ids().size(); ++i) {
      ss << model.author_ids()[i];
      for (num::Index c = 0; c < table.cols(); ++c) ss << '\t' << table(static_cast<num::Index>(i), c);
      ss << '\n';
      ++rows;
    }
  } else if (args.what == "pairs") {
    if (!args.data_dir || !args.pairs_file)
      throw ConfigError("pair export needs a dataset directory and a pairs file");
    if (model.is_baseline()) throw ConfigError("the baseline has no pair embedder");
    const HeteroGraph g = graph::load_dataset(*args.data_dir);
    model.attach(g);
    std::istringstream in(io::read_file(*args.pairs_file));
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos)
        throw ParseError(args.pairs_file->string(), line_no, "expected paper<TAB>author");
      const std::string pid = line.substr(0, tab), aid = line.substr(tab + 1);
      const NodeId v = g.node(pid), u = g.node(aid);
      if (g.type(v) != NodeType::Paper) throw TypeError("'" + pid + "' is not a paper");
      if (g.type(u) != NodeType::Author) throw TypeError("'" + aid + "' is not an author");
      const num::Vector p = model::encode_paper(model.params(), model.encoder, g.abstract(v), nullptr);
      const num::Vector emb =
          model::embed_pair(model.params(), model.pair, p, model.node_vector(u), false, nullptr, nullptr);
      ss << pid << '\t' << aid;
      for (num::Index c = 0; c < emb.size(); ++c) ss << '\t' << emb[c];
      ss << '\n';
      ++rows;
    }
    m.inputs.push_back(*args.pairs_file);
    for (const auto& f : dataset_files(*args.data_dir)) m.inputs.push_back(f);
  } else {
    throw ConfigError("unknown export '" + args.what + "' (expected authors or pairs)");
  }
  io::write_file_atomic(args.out_path, ss.str());
  m.command = "export --what " + args.what;
  m.outputs = {args.out_path};
  m.wall_seconds = seconds_since(start);
  path manifest = args.out_path;
  manifest += ".manifest.json";
  m.write(manifest);
  return rows;
}

// --- gradcheck -----------------------------------------------------------------------

HeteroGraph toy_graph() {
  graph::GraphBuilder b;
  std::vector<NodeId> a, p, v;
  for (int i = 0; i < 4; ++i) a.push_back(b.add_node("a" + std::to_string(i), NodeType::Author));
  for (int i = 0; i < 3; ++i) p.push_back(b.add_node("p" + std::to_string(i), NodeType::Paper));
  for (int i = 0; i < 2; ++i) v.push_back(b.add_node("v" + std::to_string(i), NodeType::Venue));
  const std::vector<std::vector<int>> writers{{0, 1}, {1, 2}, {2, 3, 0}};
  for (std::size_t i = 0; i < 3; ++i)
    for (int w : writers[i]) b.add_edge(a[static_cast<std::size_t>(w)], p[i], graph::EdgeType::Writes);
  b.add_edge(p[0], v[0], graph::EdgeType::PublishesIn);
  b.add_edge(p[1], v[1], graph::EdgeType::PublishesIn);
  b.add_edge(p[2], v[0], graph::EdgeType::PublishesIn);
  b.add_edge(p[1], p[0], graph::EdgeType::Cites);
  b.add_edge(p[2], p[1], graph::EdgeType::Cites);
  b.set_abstract(p[0], 2010, {"graph", "walk", "embedding", "graph"});
  b.set_abstract(p[1], 2011, {"pair", "embedding", "author", "walk", "rank"});
  b.set_abstract(p[2], 2012, {"author", "rank", "graph"});
  return std::move(b).build(1);
}

bool GradcheckReport::passed() const {
  return std::all_of(groups.begin(), groups.end(),
                     [&](const GradcheckGroup& g) { return g.max_relative_error < tolerance; });
}

GradcheckReport cmd_gradcheck(const GradcheckArgs& args, std::ostream& out) {
  const auto start = Clock::now();
  train::TrainingConfig config;
  if (args.config) {
    config = train::TrainingConfig::load(*args.config);
  } else {
    config.embedding_dim = 6;
    config.pair_dim = 5;
    config.pair_hidden = 7;
    config.classifier_hidden = 4;
    config.negative_paths = 2;
    config.walks_per_node = 2;
    config.walk_length = 8;
  }
  config.dropout = 0.0;
  const HeteroGraph g = toy_graph();
  const auto authors = g.nodes_of_type(NodeType::Author);

  walk::WalkOptions wopts{config.walks_per_node, config.walk_length, args.seed};
  const auto walks = walk::generate_walks_serial(g, walk::MetaPath::parse("APA"), wopts);
  const auto instances = walk::extract_all_pairs(walks, config.tau, g);
  if (instances.empty()) throw ContractViolation("toy graph produced no pair instances");
  const train::ContextPathPool pool(instances);
  Rng rng = make_rng(args.seed, "gradcheck");

  // A handful of instances of both labels plus one validity-only pair.
  std::vector<train::BatchItem> items;
  std::size_t pos = 0, neg = 0;
  for (const auto& inst : instances) {
    if ((inst.label && pos >= 3) || (!inst.label && neg >= 3)) continue;
    (inst.label ? pos : neg)++;
    train::BatchItem item;
    item.paper = inst.paper;
    item.author = inst.author;
    item.label = inst.label ? 1 : 0;
    item.path = &inst.path;
    for (std::size_t j : train::sample_negative_paths(pool, config.negative_paths, inst.paper, inst.author, rng))
      item.negatives.push_back(&pool.path(j));
    if (inst.label)
      for (NodeId a : authors)
        if (!g.has_authorship(inst.paper, a)) {
          item.metric_negative = a;
          break;
        }
    items.push_back(std::move(item));
  }
  {
    train::BatchItem extra;
    extra.paper = instances.front().paper;
    for (NodeId a : authors)
      if (!g.has_authorship(extra.paper, a)) extra.author = a;
    items.push_back(extra);
  }

  std::vector<train::SkipGramItem> sg_items;
  for (const auto& name : {"APA", "APVPA", "APPA"}) {
    const auto w = walk::generate_walks_serial(g, walk::MetaPath::parse(name), wopts);
    for (const auto& walk : w)
      for (std::size_t i = 0; i + 1 < walk.nodes.size() && sg_items.size() < 12; i += 2) {
        train::SkipGramItem item{walk.nodes[i], walk.nodes[i + 1], {}};
        const auto pool_of_type = g.nodes_of_type(g.type(item.context));
        for (int j = 0; j < 2; ++j)
          item.negatives.push_back(pool_of_type[uniform_index(rng, pool_of_type.size())]);
        sg_items.push_back(std::move(item));
      }
  }

  GradcheckReport report;
  const std::array<ModelKind, 5> kinds{ModelKind::Tapem, ModelKind::TapemNpv, ModelKind::TapemNoAttn,
                                       ModelKind::TapemNoBiGru, ModelKind::Baseline};
  out << std::left << std::setw(16) << "model" << std::setw(22) << "group" << std::setw(14)
      << "max rel err" << std::setw(8) << "probes" << "status\n";
  for (ModelKind kind : kinds) {
    Model m = Model::create(kind, config.dims(), g, args.seed);
    train::BatchWorkspace ws(m.params());
    const auto groups = m.parameter_groups();
    for (const auto& [group, ids] : groups) {
      const bool corrupt = args.corrupt_group && *args.corrupt_group == group;
      num::LossFunction loss = [&](num::GradBuffer* gb) {
        train::BatchLoss b =
            m.is_baseline()
                ? train::compute_skipgram_batch(m, g, sg_items, train::Execution::Serial, ws, gb)
                : train::compute_batch(m, g, items, config, false, train::Execution::Serial, ws, gb);
        if (gb && corrupt)
          for (num::ParamId id : ids) (*gb)[id] *= 1.1;
        return num::LossEval{b.total, b.pattern};
      };
      Rng probe_rng = make_rng(args.seed, "gradcheck_probes", static_cast<std::uint64_t>(kind));
      const auto res = num::grad_check(loss, m.params(), ids, args.probes, 1e-5, probe_rng);
      GradcheckGroup row{std::string(model::to_string(kind)), group, res.max_relative_error,
                         res.probes, res.skipped_kinks, res.worst};
      out << std::setw(16) << row.model << std::setw(22) << row.group << std::setw(14)
          << std::scientific << std::setprecision(2) << row.max_relative_error << std::defaultfloat
          << std::setw(8) << row.probes
          << (row.max_relative_error < report.tolerance ? "ok" : "FAIL " + row.worst) << "\n";
      report.groups.push_back(std::move(row));
    }
  }
  out << std::right;
  report.wall_seconds = seconds_since(start);
  out << (report.passed() ? "all groups below " : "tolerance breached: ") << report.tolerance
      << " (" << fmt(report.wall_seconds, 2) << "s)\n";
  return report;
}

// --- walk ------------------------------------------------------------------------

std::size_t cmd_walk(const WalkArgs& args, std::ostream& out) {
  const auto start = Clock::now();
  const HeteroGraph g = graph::load_dataset(args.data_dir);
  const auto mp = walk::MetaPath::parse(args.metapath);
  walk::WalkOptions opts{args.walks_per_node, args.walk_length, args.seed};
  const auto walks = walk::generate_walks(g, mp, opts);
  walk::write_walks(args.out, walks, g, mp, opts);
  RunManifest m;
  m.command = "walk dump";
  m.config = {{"metapath", mp.name()},
              {"walks_per_node", args.walks_per_node},
              {"walk_length", args.walk_length},
              {"tau", args.tau}};
  m.seed = args.seed;
  m.inputs = dataset_files(args.data_dir);
  m.outputs = {args.out};
  if (args.pairs_out) {
    walk::write_pairs(*args.pairs_out, walk::extract_all_pairs(walks, args.tau, g), g);
    m.outputs.push_back(*args.pairs_out);
  }
  m.wall_seconds = seconds_since(start);
  path manifest = args.out;
  manifest += ".manifest.json";
  m.write(manifest);
  out << "wrote " << walks.size() << " " << mp.name() << " walks to " << args.out.string() << "\n";
  return walks.size();
}

}  // namespace tapem::cli
