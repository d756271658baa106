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

#include "tapem/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "tapem/errors.hpp"

namespace tapem::model {

namespace {

constexpr std::array<std::pair<ModelKind, std::string_view>, 5> kKindNames{{
    {ModelKind::Tapem, "tapem"},
    {ModelKind::TapemNpv, "tapem-npv"},
    {ModelKind::TapemNoAttn, "tapem-no-attn"},
    {ModelKind::TapemNoBiGru, "tapem-no-bigru"},
    {ModelKind::Baseline, "baseline"},
}};

void check_size(const Vector& v, Index n, const char* what) {
  if (v.size() != n)
    throw ShapeError(std::string(what) + " has shape " + num::shape_of(v) + ", expected (" +
                     std::to_string(n) + ")");
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  std::string known;
  for (const auto& [k, n] : kKindNames) known += (known.empty() ? "" : ", ") + std::string(n);
  throw ConfigError("unknown model '" + std::string(name) + "' (expected one of " + known + ")");
}

std::string_view to_string(Pooling p) { return p == Pooling::Mean ? "mean" : "last"; }

Pooling parse_pooling(std::string_view name) {
  if (name == "mean") return Pooling::Mean;
  if (name == "last") return Pooling::Last;
  throw ConfigError("unknown pooling '" + std::string(name) + "' (expected mean or last)");
}

// --- paper encoder ---------------------------------------------------------

Vector encode_paper(const ParamStore& store, const PaperEncoder& enc, std::span<const TokenId> tokens,
                    PaperTrace* trace) {
  if (tokens.empty()) throw InputError("cannot encode a paper with no tokens");
  const Matrix& table = store.value(enc.words);
  const Index steps = static_cast<Index>(tokens.size());
  Matrix x(steps, table.cols());
  for (Index t = 0; t < steps; ++t) {
    const TokenId tok = tokens[static_cast<std::size_t>(t)];
    if (tok >= static_cast<TokenId>(table.rows()))
      throw InputError("token id " + std::to_string(tok) + " outside vocabulary of size " +
                       std::to_string(table.rows()));
    x.row(t) = table.row(tok);
  }
  GruTrace* gt = trace ? &trace->gru : nullptr;
  const Matrix states = gru_forward(store, enc.cell, x, gt);
  if (trace) trace->tokens.assign(tokens.begin(), tokens.end());
  if (enc.pooling == Pooling::Mean) return states.colwise().mean().transpose();
  return states.row(steps - 1).transpose();
}

void encode_paper_backward(const ParamStore& store, const PaperEncoder& enc,
                           const PaperTrace& trace, const Vector& d_p, GradBuffer& grads) {
  const Index steps = static_cast<Index>(trace.tokens.size());
  check_size(d_p, enc.cell.hidden, "paper gradient");
  Matrix d_states = Matrix::Zero(steps, enc.cell.hidden);
  if (enc.pooling == Pooling::Mean) {
    d_states.rowwise() = d_p.transpose() / static_cast<double>(steps);
  } else {
    d_states.row(steps - 1) = d_p.transpose();
  }
  Matrix d_x;
  gru_backward(store, enc.cell, trace.gru, d_states, grads, &d_x);
  Matrix& g = grads[enc.words];
  for (Index t = 0; t < steps; ++t) {
    const auto tok = static_cast<Index>(trace.tokens[static_cast<std::size_t>(t)]);
    grads.touch_row(enc.words, tok);
    g.row(tok) += d_x.row(t);
  }
}

// --- pair embedder -----------------------------------------------------------

Vector comb(const Vector& p, const Vector& q) {
  if (p.size() != q.size())
    throw ShapeError("comb operands have shapes " + num::shape_of(p) + " and " +
                     num::shape_of(q));
  const Index k = p.size();
  Vector out(4 * k);
  out.segment(0, k) = p;
  out.segment(k, k) = q;
  out.segment(2 * k, k) = p.cwiseProduct(q);
  out.segment(3 * k, k) = p - q;
  return out;
}

Vector embed_pair(const ParamStore& store, const PairEmbedder& pe, const Vector& p, const Vector& q,
                  bool training, Rng* rng, PairTrace* trace) {
  if (training && !rng) throw ContractViolation("training-mode pair embedding needs an RNG");
  Vector h = comb(p, q);
  const std::size_t layers = pe.w.size();
  if (trace) {
    trace->p = p;
    trace->q = q;
    trace->masked.clear();
    trace->masks.clear();
    trace->pre.clear();
    trace->pattern = 0;
  }
  for (std::size_t l = 0; l < layers; ++l) {
    const Matrix& w = store.value(pe.w[l]);
    if (w.cols() != h.size())
      throw ShapeError("pair layer " + std::to_string(l + 1) + " weight " + num::shape_of(w) +
                       " cannot take input " + num::shape_of(h));
    Vector in;
    Vector mask;
    if (training && pe.dropout > 0.0) {
      auto d = num::dropout(h, pe.dropout, true, *rng);
      in = std::move(d.output);
      mask = std::move(d.mask);
    } else {
      in = std::move(h);
    }
    Vector pre = w * in + store.value(pe.b[l]).col(0);
    if (l + 1 < layers) {
      h = pre.cwiseMax(0.0);
    } else {
      h = pre;
    }
    if (trace) {
      if (l + 1 < layers)
        for (Index i = 0; i < pre.size(); ++i) mix_pattern(trace->pattern, pre[i] > 0.0);
      trace->masked.push_back(std::move(in));
      trace->masks.push_back(std::move(mask));
      trace->pre.push_back(std::move(pre));
    }
  }
  return h;
}

void embed_pair_backward(const ParamStore& store, const PairEmbedder& pe, const PairTrace& trace,
                         const Vector& d_g, GradBuffer& grads, Vector& d_p, Vector& d_q) {
  const std::size_t layers = pe.w.size();
  Vector dh = d_g;
  for (std::size_t l = layers; l-- > 0;) {
    const Vector& pre = trace.pre[l];
    check_size(dh, pre.size(), "pair layer gradient");
    Vector dpre = dh;
    if (l + 1 < layers)
      for (Index i = 0; i < pre.size(); ++i)
        if (pre[i] <= 0.0) dpre[i] = 0.0;
    grads[pe.w[l]].noalias() += dpre * trace.masked[l].transpose();
    grads[pe.b[l]] += dpre;
    dh = store.value(pe.w[l]).transpose() * dpre;
    if (trace.masks[l].size() > 0) dh = dh.cwiseProduct(trace.masks[l]);
  }
  const Index k = trace.p.size();
  const auto a = dh.segment(0, k), b = dh.segment(k, k), c = dh.segment(2 * k, k),
             e = dh.segment(3 * k, k);
  d_p = a + c.cwiseProduct(trace.q) + e;
  d_q = b + c.cwiseProduct(trace.p) - e;
}

// --- context path embedder ---------------------------------------------------

Vector embed_context_path(const ParamStore& store, const ContextPathEmbedder& cpe,
                          const Matrix& node_vectors, PathTrace* trace) {
  const Index n = node_vectors.rows();
  if (n < 2)
    throw InputError("context path has " + std::to_string(n) + " nodes, expected at least 2");
  PathTrace local;
  PathTrace& tr = trace ? *trace : local;
  tr.x = node_vectors;

  if (cpe.encoder == SequenceEncoder::BiGru) {
    tr.fwd_states = gru_forward(store, cpe.fwd, node_vectors, &tr.fwd);
    const Matrix reversed = node_vectors.colwise().reverse();
    tr.bwd_states = gru_forward(store, cpe.bwd, reversed, &tr.bwd).colwise().reverse();
    const Matrix& wp = store.value(cpe.proj_w);
    const Index d = tr.fwd_states.cols();
    tr.h = tr.fwd_states * wp.leftCols(d).transpose() + tr.bwd_states * wp.rightCols(d).transpose();
    tr.h.rowwise() += store.value(cpe.proj_b).col(0).transpose();
  } else {
    const Matrix& wl = store.value(cpe.lin_w);
    if (wl.cols() != node_vectors.cols())
      throw ShapeError("path node vectors have shape " + num::shape_of(node_vectors) +
                       ", expected " + std::to_string(wl.cols()) + " columns");
    tr.h = node_vectors * wl.transpose();
    tr.h.rowwise() += store.value(cpe.lin_b).col(0).transpose();
  }

  if (cpe.pooling == PathPooling::Attention) {
    tr.weights = num::softmax(tr.h * store.value(cpe.key).col(0));
  } else {
    tr.weights = Vector::Constant(n, 1.0 / static_cast<double>(n));
  }
  tr.pooled = tr.h.transpose() * tr.weights;
  return store.value(cpe.attn_w) * tr.pooled;
}

void embed_context_path_backward(const ParamStore& store, const ContextPathEmbedder& cpe,
                                 const PathTrace& tr, const Vector& d_f, GradBuffer& grads,
                                 Matrix& d_nodes) {
  const Matrix& wa = store.value(cpe.attn_w);
  check_size(d_f, wa.rows(), "path gradient");
  grads[cpe.attn_w].noalias() += d_f * tr.pooled.transpose();
  const Vector d_pooled = wa.transpose() * d_f;
  Matrix d_h = tr.weights * d_pooled.transpose();
  if (cpe.pooling == PathPooling::Attention) {
    const Vector dw = tr.h * d_pooled;
    const Vector ds = (tr.weights.array() * (dw.array() - tr.weights.dot(dw))).matrix();
    grads[cpe.key] += tr.h.transpose() * ds;
    d_h.noalias() += ds * store.value(cpe.key).col(0).transpose();
  }

  if (cpe.encoder == SequenceEncoder::BiGru) {
    const Matrix& wp = store.value(cpe.proj_w);
    const Index d = tr.fwd_states.cols();
    Matrix& gp = grads[cpe.proj_w];
    gp.leftCols(d).noalias() += d_h.transpose() * tr.fwd_states;
    gp.rightCols(d).noalias() += d_h.transpose() * tr.bwd_states;
    grads[cpe.proj_b] += d_h.colwise().sum().transpose();
    const Matrix d_fwd = d_h * wp.leftCols(d);
    const Matrix d_bwd_rev = (d_h * wp.rightCols(d)).colwise().reverse();
    Matrix dx_fwd, dx_bwd;
    gru_backward(store, cpe.fwd, tr.fwd, d_fwd, grads, &dx_fwd);
    gru_backward(store, cpe.bwd, tr.bwd, d_bwd_rev, grads, &dx_bwd);
    d_nodes = dx_fwd + dx_bwd.colwise().reverse();
  } else {
    grads[cpe.lin_w].noalias() += d_h.transpose() * tr.x;
    grads[cpe.lin_b] += d_h.colwise().sum().transpose();
    d_nodes = d_h * store.value(cpe.lin_w);
  }
}

// --- classifier ----------------------------------------------------------------

double validity_logit(const ParamStore& store, const ValidityClassifier& vc, const Vector& g,
                      ClassifierTrace* trace) {
  const Matrix& w1 = store.value(vc.w1);
  if (w1.cols() != g.size())
    throw ShapeError("classifier input " + num::shape_of(g) + " does not match weight " +
                     num::shape_of(w1));
  Vector pre = w1 * g + store.value(vc.b1).col(0);
  const Vector hidden = pre.cwiseMax(0.0);
  const double logit = store.value(vc.w2).row(0).dot(hidden.transpose()) + store.value(vc.b2)(0, 0);
  if (trace) {
    trace->g = g;
    trace->pattern = 0;
    for (Index i = 0; i < pre.size(); ++i) mix_pattern(trace->pattern, pre[i] > 0.0);
    trace->pre = std::move(pre);
  }
  return logit;
}

void validity_logit_backward(const ParamStore& store, const ValidityClassifier& vc,
                             const ClassifierTrace& trace, double d_logit, GradBuffer& grads,
                             Vector& d_g) {
  const Vector hidden = trace.pre.cwiseMax(0.0);
  grads[vc.w2].row(0) += d_logit * hidden.transpose();
  grads[vc.b2](0, 0) += d_logit;
  Vector dpre = d_logit * store.value(vc.w2).row(0).transpose();
  for (Index i = 0; i < dpre.size(); ++i)
    if (trace.pre[i] <= 0.0) dpre[i] = 0.0;
  grads[vc.w1].noalias() += dpre * trace.g.transpose();
  grads[vc.b1] += dpre;
  d_g = store.value(vc.w1).transpose() * dpre;
}

// --- baseline ------------------------------------------------------------------

SkipGramLoss baseline_skipgram_loss(const Vector& center, const Vector& context,
                                    std::span<const Vector> negatives) {
  check_size(context, center.size(), "skip-gram context");
  SkipGramLoss out;
  const double s = center.dot(context);
  out.value = num::softplus(-s);
  const double gs = num::sigmoid(s) - 1.0;
  out.d_center = gs * context;
  out.d_context = gs * center;
  out.d_negatives.reserve(negatives.size());
  for (const Vector& neg : negatives) {
    check_size(neg, center.size(), "skip-gram negative");
    const double sn = center.dot(neg);
    out.value += num::softplus(sn);
    const double gn = num::sigmoid(sn);
    out.d_center += gn * neg;
    out.d_negatives.push_back(gn * center);
  }
  return out;
}

// --- model bundle --------------------------------------------------------------

bool Model::has_classifier() const {
  return kind_ != ModelKind::TapemNpv && kind_ != ModelKind::Baseline;
}

Model Model::create(ModelKind kind, const ModelDims& dims, const graph::HeteroGraph& graph,
                    std::uint64_t seed) {
  if (dims.embedding_dim == 0 || dims.pair_dim == 0 || dims.pair_hidden == 0 ||
      dims.classifier_hidden == 0 || dims.pair_layers == 0)
    throw ConfigError("model dimensions must be positive");
  Model m;
  m.kind_ = kind;
  m.dims_ = dims;
  m.vocab_ = graph.vocab();
  for (NodeId a : graph.nodes_of_type(graph::NodeType::Author))
    m.author_ids_.push_back(graph.external_id(a));
  for (NodeId v : graph.nodes_of_type(graph::NodeType::Venue))
    m.venue_ids_.push_back(graph.external_id(v));

  const auto k = static_cast<Index>(dims.embedding_dim);
  const auto d = static_cast<Index>(dims.pair_dim);
  const double emb = 0.5 / static_cast<double>(k);
  Rng rng = make_rng(seed, "model_init");
  ParamStore& ps = m.params_;
  const auto na = static_cast<Index>(m.author_ids_.size());
  const auto nv = static_cast<Index>(m.venue_ids_.size());

  ps.add("encoder.words", num::uniform_init(static_cast<Index>(m.vocab_.size()), k, emb, rng), true);
  GruCell::create(ps, "encoder.gru", k, k, rng);
  ps.add("author", num::uniform_init(na, k, emb, rng), true);
  ps.add("venue", num::uniform_init(nv, k, emb, rng), true);

  if (kind == ModelKind::Baseline) {
    ps.add("author_context", num::uniform_init(na, k, emb, rng), true);
    ps.add("venue_context", num::uniform_init(nv, k, emb, rng), true);
  } else {
    Index in = 4 * k;
    for (std::size_t l = 0; l < dims.pair_layers; ++l) {
      const Index out = l + 1 < dims.pair_layers ? static_cast<Index>(dims.pair_hidden) : d;
      ps.add("pair.W" + std::to_string(l + 1), num::fan_in_init(out, in, rng));
      ps.add("pair.b" + std::to_string(l + 1), Matrix::Zero(out, 1));
      in = out;
    }
    if (kind == ModelKind::TapemNoBiGru) {
      ps.add("path.lin.W", num::fan_in_init(d, k, rng));
      ps.add("path.lin.b", Matrix::Zero(d, 1));
    } else {
      GruCell::create(ps, "path.fwd", k, d, rng);
      GruCell::create(ps, "path.bwd", k, d, rng);
      ps.add("path.proj.W", num::fan_in_init(d, 2 * d, rng));
      ps.add("path.proj.b", Matrix::Zero(d, 1));
    }
    if (kind != ModelKind::TapemNoAttn)
      ps.add("path.attn.key", num::uniform_init(d, 1, 1.0 / std::sqrt(static_cast<double>(d)), rng));
    ps.add("path.attn.W", num::fan_in_init(d, d, rng));
    if (m.has_classifier()) {
      const auto hc = static_cast<Index>(dims.classifier_hidden);
      ps.add("classifier.W1", num::fan_in_init(hc, d, rng));
      ps.add("classifier.b1", Matrix::Zero(hc, 1));
      ps.add("classifier.W2", num::fan_in_init(1, hc, rng));
      ps.add("classifier.b2", Matrix::Zero(1, 1));
    }
  }
  m.bind();
  m.attach(graph);
  return m;
}

void Model::bind() {
  const ParamStore& ps = params_;
  encoder.words = ps.id("encoder.words");
  encoder.cell = GruCell::bind(ps, "encoder.gru");
  encoder.pooling = dims_.encoder_pooling;
  author_table = ps.id("author");
  venue_table = ps.id("venue");
  if (kind_ == ModelKind::Baseline) {
    author_context = ps.id("author_context");
    venue_context = ps.id("venue_context");
    return;
  }
  pair.w.clear();
  pair.b.clear();
  for (std::size_t l = 0; l < dims_.pair_layers; ++l) {
    pair.w.push_back(ps.id("pair.W" + std::to_string(l + 1)));
    pair.b.push_back(ps.id("pair.b" + std::to_string(l + 1)));
  }
  pair.dropout = dims_.dropout;
  if (kind_ == ModelKind::TapemNoBiGru) {
    path.encoder = SequenceEncoder::Linear;
    path.lin_w = ps.id("path.lin.W");
    path.lin_b = ps.id("path.lin.b");
  } else {
    path.encoder = SequenceEncoder::BiGru;
    path.fwd = GruCell::bind(ps, "path.fwd");
    path.bwd = GruCell::bind(ps, "path.bwd");
    path.proj_w = ps.id("path.proj.W");
    path.proj_b = ps.id("path.proj.b");
  }
  if (kind_ == ModelKind::TapemNoAttn) {
    path.pooling = PathPooling::Mean;
  } else {
    path.pooling = PathPooling::Attention;
    path.key = ps.id("path.attn.key");
  }
  path.attn_w = ps.id("path.attn.W");
  if (has_classifier()) {
    classifier.w1 = ps.id("classifier.W1");
    classifier.b1 = ps.id("classifier.b1");
    classifier.w2 = ps.id("classifier.W2");
    classifier.b2 = ps.id("classifier.b2");
  }
}

nlohmann::json Model::meta() const {
  return {
      {"model", to_string(kind_)},
      {"dims",
       {{"embedding_dim", dims_.embedding_dim},
        {"pair_dim", dims_.pair_dim},
        {"pair_hidden", dims_.pair_hidden},
        {"pair_layers", dims_.pair_layers},
        {"classifier_hidden", dims_.classifier_hidden},
        {"dropout", dims_.dropout},
        {"encoder_pooling", to_string(dims_.encoder_pooling)}}},
      {"vocab", vocab_.tokens()},
      {"authors", author_ids_},
      {"venues", venue_ids_},
  };
}

Model Model::restore(const nlohmann::json& meta, ParamStore params) {
  Model m;
  try {
    m.kind_ = parse_model_kind(meta.at("model").get<std::string>());
    const auto& d = meta.at("dims");
    m.dims_.embedding_dim = d.at("embedding_dim").get<std::size_t>();
    m.dims_.pair_dim = d.at("pair_dim").get<std::size_t>();
    m.dims_.pair_hidden = d.at("pair_hidden").get<std::size_t>();
    m.dims_.pair_layers = d.at("pair_layers").get<std::size_t>();
    m.dims_.classifier_hidden = d.at("classifier_hidden").get<std::size_t>();
    m.dims_.dropout = d.at("dropout").get<double>();
    m.dims_.encoder_pooling = parse_pooling(d.at("encoder_pooling").get<std::string>());
    m.vocab_ = graph::Vocabulary::from_tokens(meta.at("vocab").get<std::vector<std::string>>());
    m.author_ids_ = meta.at("authors").get<std::vector<std::string>>();
    m.venue_ids_ = meta.at("venues").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw IntegrityError(std::string("checkpoint metadata is malformed: ") + e.what());
  }
  m.params_ = std::move(params);
  try {
    m.bind();
  } catch (const LookupError& e) {
    throw IntegrityError(std::string("checkpoint does not match model layout: ") + e.what());
  }
  const auto k = static_cast<Index>(m.dims_.embedding_dim);
  const auto check_rows = [&](ParamId id, std::size_t rows) {
    const Matrix& v = m.params_.value(id);
    if (v.rows() != static_cast<Index>(rows) || v.cols() != k)
      throw IntegrityError("checkpoint parameter " + m.params_.name(id) + " has shape " +
                           num::shape_of(v) + ", expected (" + std::to_string(rows) + ", " +
                           std::to_string(k) + ")");
  };
  check_rows(m.encoder.words, m.vocab_.size());
  check_rows(m.author_table, m.author_ids_.size());
  check_rows(m.venue_table, m.venue_ids_.size());
  return m;
}

void Model::attach(const graph::HeteroGraph& graph) {
  if (!(graph.vocab() == vocab_))
    throw IntegrityError("graph vocabulary differs from the model vocabulary (" +
                         std::to_string(graph.vocab().size()) + " vs " +
                         std::to_string(vocab_.size()) + " tokens)");
  row_of_node_.assign(graph.num_nodes(), -1);
  type_of_node_.assign(graph.num_nodes(), graph::NodeType::Paper);
  const auto map_ids = [&](const std::vector<std::string>& ids, graph::NodeType type) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto node = graph.find(ids[i]);
      if (!node || graph.type(*node) != type)
        throw IntegrityError("model " + std::string(graph::to_string(type)) + " '" + ids[i] +
                             "' is not in the graph");
      row_of_node_[*node] = static_cast<std::int64_t>(i);
      type_of_node_[*node] = type;
    }
  };
  map_ids(author_ids_, graph::NodeType::Author);
  map_ids(venue_ids_, graph::NodeType::Venue);
}

Index Model::row(NodeId node) const {
  if (node >= row_of_node_.size() || row_of_node_[node] < 0)
    throw LookupError("node " + std::to_string(node) + " has no embedding row");
  return static_cast<Index>(row_of_node_[node]);
}

ParamId Model::table_for(NodeId node) const {
  row(node);
  return type_of_node_[node] == graph::NodeType::Author ? author_table : venue_table;
}

ParamId Model::context_table_for(NodeId node) const {
  if (!is_baseline()) throw ContractViolation("context tables exist only for the baseline");
  row(node);
  return type_of_node_[node] == graph::NodeType::Author ? author_context : venue_context;
}

Vector Model::node_vector(NodeId node) const {
  return params_.value(table_for(node)).row(row(node)).transpose();
}

std::vector<std::pair<std::string, std::vector<ParamId>>> Model::parameter_groups() const {
  const std::array<std::pair<std::string_view, std::string_view>, 7> prefixes{{
      {"encoder.", "paper encoder"},
      {"pair.", "pair MLP"},
      {"path.attn.", "attention"},
      {"path.", "path"},
      {"classifier.", "classifier"},
      {"author", "embeddings"},
      {"venue", "embeddings"},
  }};
  const std::string path_label =
      path.encoder == SequenceEncoder::BiGru ? "BiGRU" : "linear path encoder";
  std::vector<std::pair<std::string, std::vector<ParamId>>> groups;
  for (std::uint32_t i = 0; i < params_.size(); ++i) {
    const std::string& name = params_.name(ParamId{i});
    std::string group = "other";
    for (const auto& [prefix, label] : prefixes)
      if (name.starts_with(prefix)) {
        group = label == "path" ? path_label : std::string(label);
        break;
      }
    if (is_baseline()) group = "baseline";
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == group; });
    if (it == groups.end()) {
      groups.emplace_back(group, std::vector<ParamId>{});
      it = groups.end() - 1;
    }
    it->second.push_back(ParamId{i});
  }
  return groups;
}

}  // namespace tapem::model
