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

#include "tapem/objective.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>
#include <unordered_map>

#include "tapem/errors.hpp"
#include "tapem/parallel.hpp"

namespace tapem::train {

using json = nlohmann::json;
using graph::NodeType;
using num::GradBuffer;
using num::Index;
using num::Matrix;
using num::ParamId;

// --- config --------------------------------------------------------------------

#define TAPEM_TRAIN_FIELDS(X)                                                               \
  X(embedding_dim) X(pair_dim) X(pair_hidden) X(pair_layers) X(classifier_hidden)             \
  X(encoder_pooling) X(tau) X(dropout) X(negative_paths) X(margin) X(walks_per_node)         \
  X(walk_length) X(metapaths) X(baseline_metapaths) X(baseline_negatives) X(batch_size)      \
  X(baseline_batch_size) X(epochs) X(patience) X(instances_per_epoch) X(learning_rate)       \
  X(beta1) X(beta2) X(adam_epsilon) X(metric_weight) X(pv_weight) X(pv_positive_weight)      \
  X(pv_random_negatives) X(eval_candidates) X(seed)

json TrainingConfig::to_json() const {
  json j;
#define X(f) j[#f] = f;
  TAPEM_TRAIN_FIELDS(X)
#undef X
  return j;
}

TrainingConfig TrainingConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("training config must be a JSON object");
  TrainingConfig c;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    try {
#define X(f)                               \
  if (key == #f) {                         \
    c.f = it.value().get<decltype(c.f)>(); \
    continue;                              \
  }
      TAPEM_TRAIN_FIELDS(X)
#undef X
    } catch (const json::exception& e) {
      throw ConfigError("training config field '" + key + "' has the wrong type: " + e.what());
    }
    throw ConfigError("unknown training config field '" + key + "'");
  }
  c.validate();
  return c;
}

TrainingConfig TrainingConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read training config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("training config " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

void TrainingConfig::validate() const {
  const auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw ConfigError(std::string("training config field '") + name + "' must be positive");
  };
  positive(embedding_dim, "embedding_dim");
  positive(pair_dim, "pair_dim");
  positive(pair_hidden, "pair_hidden");
  positive(pair_layers, "pair_layers");
  positive(classifier_hidden, "classifier_hidden");
  positive(tau, "tau");
  positive(walks_per_node, "walks_per_node");
  positive(walk_length, "walk_length");
  positive(batch_size, "batch_size");
  positive(baseline_batch_size, "baseline_batch_size");
  positive(epochs, "epochs");
  positive(patience, "patience");
  positive(eval_candidates, "eval_candidates");
  if (!(dropout >= 0.0 && dropout < 1.0))
    throw ConfigError("training config field 'dropout' must lie in [0, 1)");
  if (!(margin > 0.0)) throw ConfigError("training config field 'margin' must be positive");
  if (!(learning_rate >= 0.0))
    throw ConfigError("training config field 'learning_rate' must be non-negative");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw ConfigError("training config fields 'beta1' and 'beta2' must lie in [0, 1)");
  if (!(adam_epsilon > 0.0))
    throw ConfigError("training config field 'adam_epsilon' must be positive");
  if (!(metric_weight >= 0.0) || !(pv_weight >= 0.0) || !(pv_positive_weight > 0.0))
    throw ConfigError("training config loss weights must be non-negative");
  if (metapaths.empty()) throw ConfigError("training config field 'metapaths' is empty");
  if (baseline_metapaths.empty())
    throw ConfigError("training config field 'baseline_metapaths' is empty");
  for (const auto* list : {&metapaths, &baseline_metapaths})
    for (const auto& m : *list) {
      try {
        walk::MetaPath::parse(m);
      } catch (const Error& e) {
        throw ConfigError("training config meta-path '" + m + "': " + e.what());
      }
    }
  model::parse_pooling(encoder_pooling);
}

model::ModelDims TrainingConfig::dims() const {
  model::ModelDims d;
  d.embedding_dim = embedding_dim;
  d.pair_dim = pair_dim;
  d.pair_hidden = pair_hidden;
  d.pair_layers = pair_layers;
  d.classifier_hidden = classifier_hidden;
  d.dropout = dropout;
  d.encoder_pooling = model::parse_pooling(encoder_pooling);
  return d;
}

num::AdamConfig TrainingConfig::adam() const {
  return {learning_rate, beta1, beta2, adam_epsilon};
}

// --- losses ------------------------------------------------------------------

namespace {

void check_same(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size())
    throw ShapeError(std::string(what) + ": shapes " + num::shape_of(a) + " and " +
                     num::shape_of(b) + " differ");
}

void check_label(int label) {
  if (label != 0 && label != 1)
    throw ContractViolation("validity label " + std::to_string(label) + " is not 0 or 1");
}

}  // namespace

double loss_ctx(const Vector& g, const Vector& f_pos, std::span<const Vector> f_neg) {
  return loss_ctx_grad(g, f_pos, f_neg).value;
}

CtxLossGrad loss_ctx_grad(const Vector& g, const Vector& f_pos, std::span<const Vector> f_neg) {
  check_same(g, f_pos, "context loss");
  CtxLossGrad out;
  const double s = g.dot(f_pos);
  out.value = -num::log_sigmoid(s);
  const double gs = num::sigmoid(s) - 1.0;
  out.d_g = gs * f_pos;
  out.d_pos = gs * g;
  for (const Vector& f : f_neg) {
    check_same(g, f, "context loss");
    const double sn = g.dot(f);
    out.value -= num::log_sigmoid(-sn);
    const double gn = num::sigmoid(sn);
    out.d_g += gn * f;
    out.d_neg.push_back(gn * g);
  }
  return out;
}

double loss_pv(double logit, int label) {
  check_label(label);
  return num::softplus(logit) - static_cast<double>(label) * logit;
}

double loss_pv_grad(double logit, int label) {
  check_label(label);
  return num::sigmoid(logit) - static_cast<double>(label);
}

double loss_metric(const Vector& p, const Vector& q_true, const Vector& q_neg, double xi) {
  return loss_metric_grad(p, q_true, q_neg, xi).value;
}

MetricLossGrad loss_metric_grad(const Vector& p, const Vector& q_true, const Vector& q_neg,
                                double xi) {
  check_same(p, q_true, "metric loss");
  check_same(p, q_neg, "metric loss");
  if (!(xi > 0.0)) throw ConfigError("metric margin must be positive");
  MetricLossGrad out;
  const Vector dt = p - q_true;
  const Vector dn = p - q_neg;
  const double h = xi + dt.squaredNorm() - dn.squaredNorm();
  out.active = h > 0.0;
  out.value = out.active ? h : 0.0;
  if (out.active) {
    out.d_p = 2.0 * (dt - dn);
    out.d_true = -2.0 * dt;
    out.d_neg = 2.0 * dn;
  } else {
    out.d_p = out.d_true = out.d_neg = Vector::Zero(p.size());
  }
  return out;
}

// --- negative paths ----------------------------------------------------------

ContextPathPool::ContextPathPool(std::span<const PairPathInstance> instances) {
  paths_.reserve(instances.size());
  for (const auto& inst : instances) paths_.push_back(&inst.path);
}

std::vector<std::size_t> sample_negative_paths(const ContextPathPool& pool, std::size_t k,
                                               NodeId paper, NodeId author, Rng& rng) {
  if (pool.size() == 0) throw ContractViolation("cannot sample from an empty context-path pool");
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t pick = 0;
    for (std::size_t attempt = 0; attempt < kNegativePathAttempts; ++attempt) {
      pick = static_cast<std::size_t>(uniform_index(rng, pool.size()));
      const auto& path = pool.path(pick);
      if (!(path.front() == paper && path.back() == author)) break;
    }
    out.push_back(pick);
  }
  return out;
}

// --- batch computation -------------------------------------------------------

namespace {

struct PaperCache {
  std::unordered_map<NodeId, std::size_t> slot;
  std::vector<NodeId> papers;
  std::vector<Vector> p;
  std::vector<model::PaperTrace> traces;

  void add(NodeId v) {
    if (slot.emplace(v, papers.size()).second) papers.push_back(v);
  }
  std::size_t at(NodeId v) const { return slot.at(v); }

  void encode(const Model& m, const HeteroGraph& g, bool parallel) {
    p.resize(papers.size());
    traces.resize(papers.size());
    parallel_for(papers.size(), parallel, [&](std::size_t i) {
      p[i] = model::encode_paper(m.params(), m.encoder, g.abstract(papers[i]), &traces[i]);
    });
  }
};

struct ItemResult {
  BatchLoss loss;
  std::vector<std::pair<std::size_t, Vector>> d_papers;
};

std::size_t shard_begin(std::size_t n, std::size_t s) { return n * s / kBatchShards; }

void add_row(GradBuffer& gb, ParamId table, Index row, const Vector& d) {
  gb.touch_row(table, row);
  gb[table].row(row) += d.transpose();
}

// Sums per-item paper gradients in item order, backpropagates them through
// the encoder in fixed shards, then reduces all shards into `out`.
void finish_batch(Model& model, PaperCache& cache, std::vector<ItemResult>& results,
                  bool parallel, BatchWorkspace& ws, GradBuffer& out) {
  const auto k = static_cast<Index>(model.dims().embedding_dim);
  std::vector<Vector> d_p(cache.papers.size(), Vector::Zero(k));
  std::vector<char> used(cache.papers.size(), 0);
  for (auto& r : results)
    for (auto& [slot, d] : r.d_papers) {
      d_p[slot] += d;
      used[slot] = 1;
    }
  const std::size_t np = cache.papers.size();
  parallel_for(kBatchShards, parallel, [&](std::size_t s) {
    for (std::size_t i = shard_begin(np, s); i < shard_begin(np, s + 1); ++i)
      if (used[i])
        model::encode_paper_backward(model.params(), model.encoder, cache.traces[i], d_p[i],
                                     ws.shards()[s]);
  });
  out.zero();
  for (auto& shard : ws.shards()) out.accumulate(shard);
}

BatchLoss sum_results(const std::vector<ItemResult>& results) {
  BatchLoss total;
  for (const auto& r : results) {
    total.ctx += r.loss.ctx;
    total.pv += r.loss.pv;
    total.metric += r.loss.metric;
    total.total += r.loss.total;
    total.count += r.loss.count;
    total.pattern = (total.pattern ^ r.loss.pattern) * 0x100000001b3ULL;
  }
  return total;
}

class ItemContext {
 public:
  ItemContext(const Model& m, const HeteroGraph& g, const PaperCache& cache, GradBuffer& gb,
              ItemResult& result)
      : m_(m), g_(g), cache_(cache), gb_(gb), result_(result) {}

  Matrix path_matrix(const std::vector<NodeId>& nodes) const {
    Matrix x(static_cast<Index>(nodes.size()), static_cast<Index>(m_.dims().embedding_dim));
    for (std::size_t t = 0; t < nodes.size(); ++t) {
      if (g_.type(nodes[t]) == NodeType::Paper) {
        x.row(static_cast<Index>(t)) = cache_.p[cache_.at(nodes[t])].transpose();
      } else {
        x.row(static_cast<Index>(t)) = m_.node_vector(nodes[t]).transpose();
      }
    }
    return x;
  }

  void scatter_path(const std::vector<NodeId>& nodes, const Matrix& dx) {
    for (std::size_t t = 0; t < nodes.size(); ++t) {
      const Vector d = dx.row(static_cast<Index>(t)).transpose();
      if (g_.type(nodes[t]) == NodeType::Paper) {
        result_.d_papers.emplace_back(cache_.at(nodes[t]), d);
      } else {
        add_row(gb_, m_.table_for(nodes[t]), m_.row(nodes[t]), d);
      }
    }
  }

 private:
  const Model& m_;
  const HeteroGraph& g_;
  const PaperCache& cache_;
  GradBuffer& gb_;
  ItemResult& result_;
};

void run_item(const Model& model, const HeteroGraph& graph, const PaperCache& cache,
              const BatchItem& item, const TrainingConfig& config, bool training, GradBuffer& gb,
              ItemResult& result) {
  const auto& store = model.params();
  ItemContext ctx(model, graph, cache, gb, result);
  const std::size_t pslot = cache.at(item.paper);
  const Vector& p = cache.p[pslot];
  const Vector q = model.node_vector(item.author);
  const Index qrow = model.row(item.author);
  const auto k = p.size();
  Vector dp = Vector::Zero(k), dq = Vector::Zero(k);
  Rng rng(item.dropout_seed);
  BatchLoss& loss = result.loss;
  loss.count = 1;

  const bool need_g = item.path != nullptr || model.has_classifier();
  model::PairTrace pair_trace;
  Vector g, dg;
  if (need_g) {
    g = model::embed_pair(store, model.pair, p, q, training, &rng, &pair_trace);
    dg = Vector::Zero(g.size());
    loss.pattern = pair_trace.pattern;
  }

  if (item.path) {
    model::PathTrace pos;
    const Vector f_pos = model::embed_context_path(store, model.path, ctx.path_matrix(*item.path), &pos);
    std::vector<model::PathTrace> neg_traces(item.negatives.size());
    std::vector<Vector> f_neg;
    for (std::size_t j = 0; j < item.negatives.size(); ++j)
      f_neg.push_back(model::embed_context_path(store, model.path,
                                                ctx.path_matrix(*item.negatives[j]),
                                                &neg_traces[j]));
    const CtxLossGrad cg = loss_ctx_grad(g, f_pos, f_neg);
    loss.ctx = cg.value;
    dg += cg.d_g;
    Matrix dx;
    model::embed_context_path_backward(store, model.path, pos, cg.d_pos, gb, dx);
    ctx.scatter_path(*item.path, dx);
    for (std::size_t j = 0; j < item.negatives.size(); ++j) {
      model::embed_context_path_backward(store, model.path, neg_traces[j], cg.d_neg[j], gb, dx);
      ctx.scatter_path(*item.negatives[j], dx);
    }
  }

  const double class_weight = item.label == 1 ? config.pv_positive_weight : 1.0;
  if (model.has_classifier()) {
    model::ClassifierTrace ct;
    const double logit = model::validity_logit(store, model.classifier, g, &ct);
    loss.pv = class_weight * loss_pv(logit, item.label);
    const double d_logit = config.pv_weight * class_weight * loss_pv_grad(logit, item.label);
    Vector dg_pv;
    model::validity_logit_backward(store, model.classifier, ct, d_logit, gb, dg_pv);
    dg += dg_pv;
    loss.pattern ^= ct.pattern * 0x9e3779b97f4a7c15ULL;
  } else {
    const double logit = p.dot(q);
    loss.pv = class_weight * loss_pv(logit, item.label);
    const double d_logit = config.pv_weight * class_weight * loss_pv_grad(logit, item.label);
    dp += d_logit * q;
    dq += d_logit * p;
  }

  if (item.label == 1 && item.metric_negative && config.metric_weight > 0.0) {
    const Vector qn = model.node_vector(*item.metric_negative);
    const MetricLossGrad mg = loss_metric_grad(p, q, qn, config.margin);
    loss.metric = mg.value;
    model::mix_pattern(loss.pattern, mg.active);
    if (mg.active) {
      const double w = config.metric_weight;
      dp += w * mg.d_p;
      dq += w * mg.d_true;
      add_row(gb, model.table_for(*item.metric_negative), model.row(*item.metric_negative),
              w * mg.d_neg);
    }
  }

  if (need_g) {
    Vector dp_pair, dq_pair;
    model::embed_pair_backward(store, model.pair, pair_trace, dg, gb, dp_pair, dq_pair);
    dp += dp_pair;
    dq += dq_pair;
  }
  add_row(gb, model.author_table, qrow, dq);
  result.d_papers.emplace_back(pslot, std::move(dp));

  loss.total = loss.ctx + config.pv_weight * loss.pv + config.metric_weight * loss.metric;
  if (!std::isfinite(loss.total))
    throw NumericError("non-finite loss for pair (" + graph.external_id(item.paper) + ", " +
                       graph.external_id(item.author) + ")");
}

}  // namespace

BatchWorkspace::BatchWorkspace(const num::ParamStore& store) {
  for (std::size_t s = 0; s < kBatchShards; ++s) shards_.push_back(store.make_buffer());
}

BatchLoss compute_batch(Model& model, const HeteroGraph& graph, std::span<const BatchItem> items,
                        const TrainingConfig& config, bool training, Execution exec,
                        BatchWorkspace& ws, GradBuffer* out) {
  if (model.is_baseline()) throw ContractViolation("compute_batch needs a TaPEm model");
  const bool parallel = exec == Execution::Parallel;
  PaperCache cache;
  const auto add_papers = [&](const std::vector<NodeId>& nodes) {
    for (NodeId v : nodes)
      if (graph.type(v) == NodeType::Paper) cache.add(v);
  };
  for (const auto& item : items) {
    cache.add(item.paper);
    if (item.path) add_papers(*item.path);
    for (const auto* n : item.negatives) add_papers(*n);
  }
  cache.encode(model, graph, parallel);

  std::vector<ItemResult> results(items.size());
  for (auto& shard : ws.shards()) shard.zero();
  parallel_for(kBatchShards, parallel, [&](std::size_t s) {
    for (std::size_t i = shard_begin(items.size(), s); i < shard_begin(items.size(), s + 1); ++i)
      run_item(model, graph, cache, items[i], config, training, ws.shards()[s], results[i]);
  });
  finish_batch(model, cache, results, parallel, ws, out ? *out : model.params().grads());
  return sum_results(results);
}

BatchLoss compute_skipgram_batch(Model& model, const HeteroGraph& graph,
                                 std::span<const SkipGramItem> items, Execution exec,
                                 BatchWorkspace& ws, GradBuffer* out) {
  if (!model.is_baseline()) throw ContractViolation("compute_skipgram_batch needs the baseline");
  const bool parallel = exec == Execution::Parallel;
  PaperCache cache;
  for (const auto& item : items) {
    for (NodeId v : {item.center, item.context})
      if (graph.type(v) == NodeType::Paper) cache.add(v);
    for (NodeId v : item.negatives)
      if (graph.type(v) == NodeType::Paper) cache.add(v);
  }
  cache.encode(model, graph, parallel);

  const auto& store = model.params();
  std::vector<ItemResult> results(items.size());
  for (auto& shard : ws.shards()) shard.zero();
  parallel_for(kBatchShards, parallel, [&](std::size_t s) {
    GradBuffer& gb = ws.shards()[s];
    for (std::size_t i = shard_begin(items.size(), s); i < shard_begin(items.size(), s + 1); ++i) {
      const SkipGramItem& item = items[i];
      ItemResult& r = results[i];
      const NodeType ctx_type = graph.type(item.context);
      for (NodeId n : item.negatives)
        if (graph.type(n) != ctx_type)
          throw ContractViolation("negative " + graph.external_id(n) + " is a " +
                                  std::string(graph::to_string(graph.type(n))) +
                                  ", context is a " + std::string(graph::to_string(ctx_type)));
      const auto vec = [&](NodeId v, bool context) -> Vector {
        if (graph.type(v) == NodeType::Paper) return cache.p[cache.at(v)];
        const ParamId t = context ? model.context_table_for(v) : model.table_for(v);
        return store.value(t).row(model.row(v)).transpose();
      };
      const auto scatter = [&](NodeId v, bool context, Vector d) {
        if (graph.type(v) == NodeType::Paper) {
          r.d_papers.emplace_back(cache.at(v), std::move(d));
        } else {
          add_row(gb, context ? model.context_table_for(v) : model.table_for(v), model.row(v), d);
        }
      };
      std::vector<Vector> negs;
      for (NodeId n : item.negatives) negs.push_back(vec(n, true));
      const auto sg = model::baseline_skipgram_loss(vec(item.center, false), vec(item.context, true), negs);
      if (!std::isfinite(sg.value))
        throw NumericError("non-finite skip-gram loss for (" + graph.external_id(item.center) +
                           ", " + graph.external_id(item.context) + ")");
      scatter(item.center, false, sg.d_center);
      scatter(item.context, true, sg.d_context);
      for (std::size_t j = 0; j < item.negatives.size(); ++j)
        scatter(item.negatives[j], true, sg.d_negatives[j]);
      r.loss.ctx = r.loss.total = sg.value;
      r.loss.count = 1;
    }
  });
  finish_batch(model, cache, results, parallel, ws, out ? *out : model.params().grads());
  return sum_results(results);
}

// --- training loop -------------------------------------------------------------

json TrainStats::to_json() const {
  return {{"epoch", epoch},           {"loss_ctx", mean_ctx},     {"loss_pv", mean_pv},
          {"loss_metric", mean_metric}, {"loss_total", mean_total}, {"wall_seconds", wall_seconds},
          {"instances", instances},   {"batches", batches}};
}

void append_stats(const std::filesystem::path& log, const TrainStats& stats, const json& extra) {
  std::ofstream out(log, std::ios::app);
  if (!out) throw IoError("cannot append to training log " + log.string());
  json line = stats.to_json();
  line.update(extra);
  out << line.dump() << '\n';
}

namespace {

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

}  // namespace

Trainer::Trainer(Model& model, const HeteroGraph& graph, std::span<const NodeId> train_papers,
                 const TrainingConfig& config, Execution exec)
    : model_(model),
      graph_(graph),
      config_(config),
      exec_(exec),
      train_papers_(train_papers.begin(), train_papers.end()),
      workspace_(model.params()) {
  config_.validate();
  const auto authors = graph.nodes_of_type(NodeType::Author);
  authors_.assign(authors.begin(), authors.end());
  if (authors_.size() < 2) throw ConfigError("training needs at least two authors");
  if (train_papers_.empty()) throw ConfigError("training needs at least one paper");

  walk::WalkOptions opts;
  opts.walks_per_node = config_.walks_per_node;
  opts.walk_length = config_.walk_length;
  opts.seed = config_.seed;
  const auto& names = model.is_baseline() ? config_.baseline_metapaths : config_.metapaths;
  for (const auto& name : names) {
    const auto mp = walk::MetaPath::parse(name);
    auto w = exec == Execution::Parallel ? walk::generate_walks(graph, mp, opts)
                                         : walk::generate_walks_serial(graph, mp, opts);
    walks_.insert(walks_.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
  }

  if (model.is_baseline()) {
    const auto tau = static_cast<std::ptrdiff_t>(config_.tau);
    for (const auto& w : walks_) {
      const auto n = static_cast<std::ptrdiff_t>(w.nodes.size());
      for (std::ptrdiff_t i = 0; i < n; ++i)
        for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - tau); j <= std::min(n - 1, i + tau); ++j)
          if (j != i) skipgram_pairs_.emplace_back(w.nodes[i], w.nodes[j]);
    }
  } else {
    instances_ = walk::extract_all_pairs(walks_, config_.tau, graph);
    if (!instances_.empty()) pool_.emplace(instances_);
  }
}

NodeId Trainer::random_non_author(NodeId paper, Rng& rng) const {
  for (std::size_t attempt = 0; attempt < 1000; ++attempt) {
    const NodeId a = authors_[uniform_index(rng, authors_.size())];
    if (!graph_.has_authorship(paper, a)) return a;
  }
  throw ContractViolation("paper " + graph_.external_id(paper) + " has no non-author to sample");
}

TrainStats Trainer::train_epoch(std::size_t epoch) {
  return model_.is_baseline() ? baseline_epoch(epoch) : tapem_epoch(epoch);
}

namespace {

void finish_stats(TrainStats& s, const BatchLoss& sum,
                  std::chrono::steady_clock::time_point start) {
  s.instances = sum.count;
  if (sum.count > 0) {
    const double n = static_cast<double>(sum.count);
    s.mean_ctx = sum.ctx / n;
    s.mean_pv = sum.pv / n;
    s.mean_metric = sum.metric / n;
    s.mean_total = sum.total / n;
  }
  s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void add_loss(BatchLoss& acc, const BatchLoss& b) {
  acc.ctx += b.ctx;
  acc.pv += b.pv;
  acc.metric += b.metric;
  acc.total += b.total;
  acc.count += b.count;
}

}  // namespace

TrainStats Trainer::tapem_epoch(std::size_t epoch) {
  const auto start = std::chrono::steady_clock::now();
  TrainStats stats;
  stats.epoch = epoch;
  BatchLoss sum;
  if (instances_.empty()) {
    finish_stats(stats, sum, start);
    return stats;
  }
  std::vector<std::size_t> order(instances_.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng = make_rng(config_.seed, "shuffle", epoch);
  shuffle(order, shuffle_rng);
  if (config_.instances_per_epoch > 0 && order.size() > config_.instances_per_epoch)
    order.resize(config_.instances_per_epoch);

  Rng neg_rng = make_rng(config_.seed, "negatives", epoch);
  Rng drop_rng = make_rng(config_.seed, "dropout", epoch);
  std::vector<BatchItem> items;
  for (std::size_t begin = 0; begin < order.size(); begin += config_.batch_size) {
    const std::size_t end = std::min(order.size(), begin + config_.batch_size);
    items.clear();
    for (std::size_t i = begin; i < end; ++i) {
      const auto& inst = instances_[order[i]];
      BatchItem item;
      item.paper = inst.paper;
      item.author = inst.author;
      item.label = inst.label ? 1 : 0;
      item.path = &inst.path;
      for (std::size_t idx :
           sample_negative_paths(*pool_, config_.negative_paths, inst.paper, inst.author, neg_rng))
        item.negatives.push_back(&pool_->path(idx));
      if (item.label == 1 && config_.metric_weight > 0.0)
        item.metric_negative = random_non_author(inst.paper, neg_rng);
      item.dropout_seed = drop_rng();
      items.push_back(std::move(item));
      for (std::size_t r = 0; r < config_.pv_random_negatives; ++r) {
        BatchItem extra;
        extra.paper = inst.paper;
        extra.author = random_non_author(inst.paper, neg_rng);
        extra.dropout_seed = drop_rng();
        items.push_back(std::move(extra));
      }
    }
    BatchLoss b;
    try {
      b = compute_batch(model_, graph_, items, config_, true, exec_, workspace_);
    } catch (const NumericError& e) {
      throw NumericError("epoch " + std::to_string(epoch) + ", batch " +
                         std::to_string(stats.batches) + ": " + e.what());
    }
    num::adam_step(model_.params(), config_.adam());
    add_loss(sum, b);
    ++stats.batches;
  }
  finish_stats(stats, sum, start);
  return stats;
}

TrainStats Trainer::baseline_epoch(std::size_t epoch) {
  const auto start = std::chrono::steady_clock::now();
  TrainStats stats;
  stats.epoch = epoch;
  BatchLoss sum;
  if (skipgram_pairs_.empty()) {
    finish_stats(stats, sum, start);
    return stats;
  }
  std::vector<std::size_t> order(skipgram_pairs_.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng = make_rng(config_.seed, "shuffle", epoch);
  shuffle(order, shuffle_rng);
  if (config_.instances_per_epoch > 0 && order.size() > config_.instances_per_epoch)
    order.resize(config_.instances_per_epoch);

  const auto venues = graph_.nodes_of_type(NodeType::Venue);
  Rng neg_rng = make_rng(config_.seed, "negatives", epoch);
  const auto draw = [&](NodeType t) -> NodeId {
    switch (t) {
      case NodeType::Paper:
        return train_papers_[uniform_index(neg_rng, train_papers_.size())];
      case NodeType::Author:
        return authors_[uniform_index(neg_rng, authors_.size())];
      case NodeType::Venue:
        return venues[uniform_index(neg_rng, venues.size())];
    }
    return 0;
  };
  std::vector<SkipGramItem> items;
  for (std::size_t begin = 0; begin < order.size(); begin += config_.baseline_batch_size) {
    const std::size_t end = std::min(order.size(), begin + config_.baseline_batch_size);
    items.clear();
    for (std::size_t i = begin; i < end; ++i) {
      const auto [center, context] = skipgram_pairs_[order[i]];
      SkipGramItem item{center, context, {}};
      for (std::size_t j = 0; j < config_.baseline_negatives; ++j)
        item.negatives.push_back(draw(graph_.type(context)));
      items.push_back(std::move(item));
    }
    BatchLoss b;
    try {
      b = compute_skipgram_batch(model_, graph_, items, exec_, workspace_);
    } catch (const NumericError& e) {
      throw NumericError("epoch " + std::to_string(epoch) + ", batch " +
                         std::to_string(stats.batches) + ": " + e.what());
    }
    num::adam_step(model_.params(), config_.adam());
    add_loss(sum, b);
    ++stats.batches;
  }
  finish_stats(stats, sum, start);
  return stats;
}

}  // namespace tapem::train
