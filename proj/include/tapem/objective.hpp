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

// Training objective: context loss with sampled negative paths, pair
// validity loss, metric loss on the paper encoder, and the mini-batch
// training loop for both TaPEm variants and the skip-gram baseline.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tapem/hetgraph.hpp"
#include "tapem/model.hpp"
#include "tapem/walker.hpp"

namespace tapem::train {

using graph::HeteroGraph;
using graph::NodeId;
using model::Model;
using num::Vector;
using walk::PairPathInstance;

struct TrainingConfig {
  std::size_t embedding_dim = 128;
  std::size_t pair_dim = 100;
  std::size_t pair_hidden = 100;
  std::size_t pair_layers = 2;
  std::size_t classifier_hidden = 100;
  std::string encoder_pooling = "mean";
  std::size_t tau = 3;
  double dropout = 0.15;
  std::size_t negative_paths = 1;
  double margin = 0.1;
  std::size_t walks_per_node = 5;
  std::size_t walk_length = 20;
  std::vector<std::string> metapaths{"APA"};
  std::vector<std::string> baseline_metapaths{"APA", "APPA", "APVPA"};
  std::size_t baseline_negatives = 1;
  std::size_t batch_size = 64;
  std::size_t baseline_batch_size = 1024;
  std::size_t epochs = 50;
  std::size_t patience = 5;
  // 0 keeps every extracted instance; otherwise a per-epoch random subset.
  std::size_t instances_per_epoch = 0;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double metric_weight = 1.0;
  double pv_weight = 1.0;
  double pv_positive_weight = 1.0;
  std::size_t pv_random_negatives = 0;
  std::size_t eval_candidates = 100;
  std::uint64_t seed = 0;

  void validate() const;
  model::ModelDims dims() const;
  num::AdamConfig adam() const;
  nlohmann::json to_json() const;
  // Missing fields keep their defaults; unknown fields are rejected.
  static TrainingConfig from_json(const nlohmann::json& j);
  static TrainingConfig load(const std::filesystem::path& path);
};

// --- losses ------------------------------------------------------------------

// -log sigmoid(g . f) - sum_j log sigmoid(-g . f_j)
double loss_ctx(const Vector& g, const Vector& f_pos, std::span<const Vector> f_neg);

struct CtxLossGrad {
  double value = 0.0;
  Vector d_g, d_pos;
  std::vector<Vector> d_neg;
};
CtxLossGrad loss_ctx_grad(const Vector& g, const Vector& f_pos, std::span<const Vector> f_neg);

// Binary cross-entropy on a logit.
double loss_pv(double logit, int label);
// d loss_pv / d logit.
double loss_pv_grad(double logit, int label);

// max(0, xi + |p - q_true|^2 - |p - q_neg|^2)
double loss_metric(const Vector& p, const Vector& q_true, const Vector& q_neg, double xi);

struct MetricLossGrad {
  double value = 0.0;
  bool active = false;
  Vector d_p, d_true, d_neg;
};
MetricLossGrad loss_metric_grad(const Vector& p, const Vector& q_true, const Vector& q_neg,
                                double xi);

// --- negative path pool -----------------------------------------------------

class ContextPathPool {
 public:
  explicit ContextPathPool(std::span<const PairPathInstance> instances);
  std::size_t size() const { return paths_.size(); }
  const std::vector<NodeId>& path(std::size_t i) const { return *paths_[i]; }

 private:
  std::vector<const std::vector<NodeId>*> paths_;
};

inline constexpr std::size_t kNegativePathAttempts = 100;

// k uniform draws (indices into the pool). A draw whose endpoints equal
// (paper, author) is redrawn up to kNegativePathAttempts times, after which
// the last draw is kept.
std::vector<std::size_t> sample_negative_paths(const ContextPathPool& pool, std::size_t k,
                                               NodeId paper, NodeId author, Rng& rng);

// --- batches -----------------------------------------------------------------

enum class Execution { Serial, Parallel };

struct BatchItem {
  NodeId paper = 0;
  NodeId author = 0;
  int label = 0;
  // Context path; null for extra random validity pairs, which only carry
  // the validity loss.
  const std::vector<NodeId>* path = nullptr;
  std::vector<const std::vector<NodeId>*> negatives;
  std::optional<NodeId> metric_negative;
  std::uint64_t dropout_seed = 0;
};

struct SkipGramItem {
  NodeId center = 0;
  NodeId context = 0;
  std::vector<NodeId> negatives;
};

struct BatchLoss {
  double ctx = 0.0;
  double pv = 0.0;
  double metric = 0.0;
  double total = 0.0;
  std::size_t count = 0;
  std::uint64_t pattern = 0;
};

inline constexpr std::size_t kBatchShards = 8;

// Private gradient buffers, one per fixed shard of a batch. Shards are
// reduced in order, so results do not depend on the thread count.
class BatchWorkspace {
 public:
  explicit BatchWorkspace(const num::ParamStore& store);
  std::vector<num::GradBuffer>& shards() { return shards_; }

 private:
  std::vector<num::GradBuffer> shards_;
};

// Forward and backward over a batch. Overwrites the store's gradients with
// the batch gradient (sum over items), or `out` when given, and returns
// summed losses.
BatchLoss compute_batch(Model& model, const HeteroGraph& graph, std::span<const BatchItem> items,
                        const TrainingConfig& config, bool training, Execution exec,
                        BatchWorkspace& ws, num::GradBuffer* out = nullptr);
BatchLoss compute_skipgram_batch(Model& model, const HeteroGraph& graph,
                                 std::span<const SkipGramItem> items, Execution exec,
                                 BatchWorkspace& ws, num::GradBuffer* out = nullptr);

// --- training loop -------------------------------------------------------------

struct TrainStats {
  std::size_t epoch = 0;
  double mean_ctx = 0.0;
  double mean_pv = 0.0;
  double mean_metric = 0.0;
  double mean_total = 0.0;
  double wall_seconds = 0.0;
  std::size_t instances = 0;
  std::size_t batches = 0;
  nlohmann::json to_json() const;
};

class Trainer {
 public:
  // `graph` is the training graph; `train_papers` the papers whose
  // authorship is visible during training.
  Trainer(Model& model, const HeteroGraph& graph, std::span<const NodeId> train_papers,
          const TrainingConfig& config, Execution exec = Execution::Parallel);

  // One pass over the (shuffled) instances. RNG streams are keyed by the
  // epoch number, so resuming at epoch e reproduces an uninterrupted run.
  TrainStats train_epoch(std::size_t epoch);

  const std::vector<walk::Walk>& walks() const { return walks_; }
  const std::vector<PairPathInstance>& instances() const { return instances_; }
  std::size_t skipgram_pair_count() const { return skipgram_pairs_.size(); }

 private:
  TrainStats tapem_epoch(std::size_t epoch);
  TrainStats baseline_epoch(std::size_t epoch);
  NodeId random_non_author(NodeId paper, Rng& rng) const;

  Model& model_;
  const HeteroGraph& graph_;
  TrainingConfig config_;
  Execution exec_;
  std::vector<NodeId> train_papers_;
  std::vector<NodeId> authors_;
  std::vector<walk::Walk> walks_;
  std::vector<PairPathInstance> instances_;
  std::optional<ContextPathPool> pool_;
  std::vector<std::pair<NodeId, NodeId>> skipgram_pairs_;
  BatchWorkspace workspace_;
};

// Appends the stats, merged with `extra`, as one JSON line.
void append_stats(const std::filesystem::path& log, const TrainStats& stats,
                  const nlohmann::json& extra = nlohmann::json::object());

}  // namespace tapem::train
