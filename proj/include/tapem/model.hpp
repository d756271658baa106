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

// Network components: paper encoder, pair embedder, context-path embedder,
// pair validity classifier and the skip-gram baseline. Every forward pass
// optionally records a trace; the matching backward pass consumes it and
// accumulates parameter gradients into a GradBuffer.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tapem/hetgraph.hpp"
#include "tapem/params.hpp"

namespace tapem::model {

using graph::NodeId;
using graph::TokenId;
using num::GradBuffer;
using num::Index;
using num::Matrix;
using num::ParamId;
using num::ParamStore;
using num::Vector;

enum class ModelKind { Tapem, TapemNpv, TapemNoAttn, TapemNoBiGru, Baseline };
std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

enum class Pooling { Mean, Last };
std::string_view to_string(Pooling p);
Pooling parse_pooling(std::string_view name);

struct ModelDims {
  std::size_t embedding_dim = 128;  // K
  std::size_t pair_dim = 100;       // d
  std::size_t pair_hidden = 100;
  std::size_t pair_layers = 2;
  std::size_t classifier_hidden = 100;
  double dropout = 0.15;
  Pooling encoder_pooling = Pooling::Mean;
};

// Mixes a ReLU / hinge branch decision into a pattern hash.
inline void mix_pattern(std::uint64_t& h, bool active) {
  h = (h ^ (active ? 0x9e3779b97f4a7c15ULL : 0x7f4a7c159e3779b9ULL)) * 0x100000001b3ULL;
}

// ---------------------------------------------------------------------------
// GRU
//
//   z = sigmoid(W_z x + U_z h' + b_z)
//   r = sigmoid(W_r x + U_r h' + b_r)
//   c = tanh(W_h x + U_h (r o h') + b_h)
//   h = z o h' + (1 - z) o c
//
// Gate weights are stacked: W = [W_z; W_r; W_h] (3H x I), U_zr = [U_z; U_r]
// (2H x H), b = [b_z; b_r; b_h] (3H x 1). The initial state is zero.

struct GruCell {
  ParamId w, u_zr, u_h, b;
  Index input = 0, hidden = 0;

  static GruCell create(ParamStore& store, const std::string& prefix, Index input, Index hidden,
                        Rng& rng);
  static GruCell bind(const ParamStore& store, const std::string& prefix);
};

struct GruTrace {
  Matrix x;  // T x I
  Matrix h;  // (T + 1) x H, row 0 is the initial state
  Matrix z, r, c;
};

// Hidden states after each input row (T x H).
Matrix gru_forward(const ParamStore& store, const GruCell& cell, const Matrix& x, GruTrace* trace);
void gru_backward(const ParamStore& store, const GruCell& cell, const GruTrace& trace,
                  const Matrix& d_states, GradBuffer& grads, Matrix* d_x);

// ---------------------------------------------------------------------------
// Paper encoder: GRU over the abstract's word vectors, pooled to a K-vector.

struct PaperEncoder {
  ParamId words;
  GruCell cell;
  Pooling pooling = Pooling::Mean;
};

struct PaperTrace {
  std::vector<TokenId> tokens;
  GruTrace gru;
};

Vector encode_paper(const ParamStore& store, const PaperEncoder& enc, std::span<const TokenId> tokens,
                    PaperTrace* trace);
void encode_paper_backward(const ParamStore& store, const PaperEncoder& enc,
                           const PaperTrace& trace, const Vector& d_p, GradBuffer& grads);

// ---------------------------------------------------------------------------
// Pair embedder g: [p; q; p o q; p - q] through an MLP. Hidden layers apply
// dropout -> affine -> ReLU; the last layer applies dropout -> affine.

Vector comb(const Vector& p, const Vector& q);

struct PairEmbedder {
  std::vector<ParamId> w, b;
  double dropout = 0.0;
};

struct PairTrace {
  Vector p, q;
  std::vector<Vector> masked;  // dropout(h^(l-1)) per layer
  std::vector<Vector> masks;
  std::vector<Vector> pre;     // W h + b per layer
  std::uint64_t pattern = 0;
};

Vector embed_pair(const ParamStore& store, const PairEmbedder& pe, const Vector& p, const Vector& q,
                  bool training, Rng* rng, PairTrace* trace);
void embed_pair_backward(const ParamStore& store, const PairEmbedder& pe, const PairTrace& trace,
                         const Vector& d_g, GradBuffer& grads, Vector& d_p, Vector& d_q);

// ---------------------------------------------------------------------------
// Context-path embedder f: per-node states from a BiGRU projected by
// W_proj [fwd; bwd] + b_proj (or a per-node linear map in the no-BiGRU
// ablation), pooled with softmax(k . h_t) weights (or uniform weights in the
// no-attention ablation), then mapped by W_attn.

enum class SequenceEncoder { BiGru, Linear };
enum class PathPooling { Attention, Mean };

struct ContextPathEmbedder {
  SequenceEncoder encoder = SequenceEncoder::BiGru;
  PathPooling pooling = PathPooling::Attention;
  GruCell fwd, bwd;
  ParamId proj_w, proj_b;
  ParamId lin_w, lin_b;
  ParamId key, attn_w;
};

struct PathTrace {
  Matrix x;
  GruTrace fwd, bwd;
  Matrix fwd_states, bwd_states;  // n x d, aligned to path positions
  Matrix h;                       // n x d
  Vector weights;
  Vector pooled;
};

Vector embed_context_path(const ParamStore& store, const ContextPathEmbedder& cpe,
                          const Matrix& node_vectors, PathTrace* trace);
void embed_context_path_backward(const ParamStore& store, const ContextPathEmbedder& cpe,
                                 const PathTrace& trace, const Vector& d_f, GradBuffer& grads,
                                 Matrix& d_nodes);

// ---------------------------------------------------------------------------
// Pair validity classifier pi: d -> hidden (ReLU) -> scalar logit.

struct ValidityClassifier {
  ParamId w1, b1, w2, b2;
};

struct ClassifierTrace {
  Vector g, pre;
  std::uint64_t pattern = 0;
};

double validity_logit(const ParamStore& store, const ValidityClassifier& vc, const Vector& g,
                      ClassifierTrace* trace);
void validity_logit_backward(const ParamStore& store, const ValidityClassifier& vc,
                             const ClassifierTrace& trace, double d_logit, GradBuffer& grads,
                             Vector& d_g);

// ---------------------------------------------------------------------------
// Skip-gram with negative sampling:
//   -log sigmoid(c . x) - sum_j log sigmoid(-c . n_j)

struct SkipGramLoss {
  double value = 0.0;
  Vector d_center, d_context;
  std::vector<Vector> d_negatives;
};

SkipGramLoss baseline_skipgram_loss(const Vector& center, const Vector& context,
                                    std::span<const Vector> negatives);

// ---------------------------------------------------------------------------
// Model bundle

class Model {
 public:
  static Model create(ModelKind kind, const ModelDims& dims, const graph::HeteroGraph& graph,
                      std::uint64_t seed);
  // Restores a model from checkpoint metadata and parameters.
  static Model restore(const nlohmann::json& meta, ParamStore params);
  nlohmann::json meta() const;

  // Maps the model's author and venue rows onto `graph` node ids. Throws
  // IntegrityError if the vocabulary or entity ids disagree.
  void attach(const graph::HeteroGraph& graph);

  ModelKind kind() const { return kind_; }
  const ModelDims& dims() const { return dims_; }
  bool has_classifier() const;
  bool is_baseline() const { return kind_ == ModelKind::Baseline; }

  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  const graph::Vocabulary& vocab() const { return vocab_; }
  const std::vector<std::string>& author_ids() const { return author_ids_; }
  const std::vector<std::string>& venue_ids() const { return venue_ids_; }

  // Embedding-table row of an attached author or venue node.
  Index row(NodeId node) const;
  // Author/venue embedding (center table for the baseline).
  Vector node_vector(NodeId node) const;
  ParamId table_for(NodeId node) const;
  ParamId context_table_for(NodeId node) const;

  // Groups of parameter ids, keyed by role, for gradient checking.
  std::vector<std::pair<std::string, std::vector<ParamId>>> parameter_groups() const;

  PaperEncoder encoder;
  ParamId author_table, venue_table;
  PairEmbedder pair;
  ContextPathEmbedder path;
  ValidityClassifier classifier;
  ParamId author_context, venue_context;

 private:
  void bind();

  ModelKind kind_ = ModelKind::Tapem;
  ModelDims dims_;
  ParamStore params_;
  graph::Vocabulary vocab_;
  std::vector<std::string> author_ids_, venue_ids_;
  std::vector<std::int64_t> row_of_node_;
  std::vector<graph::NodeType> type_of_node_;
};

}  // namespace tapem::model
