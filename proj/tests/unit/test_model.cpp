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

#include <cmath>

#include <gtest/gtest.h>

#include "tapem/commands.hpp"
#include "tapem/errors.hpp"
#include "tapem/gradcheck.hpp"
#include "tapem/model.hpp"

namespace tapem::model {
namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

ModelDims small_dims() {
  ModelDims d;
  d.embedding_dim = 6;
  d.pair_dim = 5;
  d.pair_hidden = 7;
  d.classifier_hidden = 4;
  d.dropout = 0.0;
  return d;
}

Model make(ModelKind kind, std::uint64_t seed = 1) {
  static const auto graph = cli::toy_graph();
  return Model::create(kind, small_dims(), graph, seed);
}

Matrix random_rows(Index n, Index k, std::uint64_t seed) {
  Rng rng = make_rng(seed, "rows");
  return num::uniform_init(n, k, 1.0, rng);
}

// Hand evaluation of the cell with scalar state.
TEST(Gru, UpdateGateKeepsOldState) {
  ParamStore s;
  Rng rng = make_rng(0, "gru");
  auto cell = GruCell::create(s, "g", 1, 1, rng);
  const double wz = 0.7, wr = -0.4, wh = 1.3, uz = 0.5, ur = -0.9, uh = 0.8;
  s.value(cell.w) << wz, wr, wh;
  s.value(cell.u_zr) << uz, ur;
  s.value(cell.u_h) << uh;
  s.value(cell.b).setZero();
  Matrix x(2, 1);
  x << 1.0, 0.0;
  Matrix h = gru_forward(s, cell, x, nullptr);

  auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  const double z1 = sig(wz), c1 = std::tanh(wh);
  const double h1 = (1 - z1) * c1;
  const double z2 = sig(uz * h1), r2 = sig(ur * h1), c2 = std::tanh(uh * r2 * h1);
  const double h2 = z2 * h1 + (1 - z2) * c2;
  EXPECT_NEAR(h(0, 0), h1, 1e-15);
  EXPECT_NEAR(h(1, 0), h2, 1e-15);
}

TEST(Gru, InputGradientMatchesFiniteDifferences) {
  ParamStore s;
  Rng rng = make_rng(1, "gru");
  auto cell = GruCell::create(s, "g", 3, 4, rng);
  Matrix x = random_rows(5, 3, 2);
  Matrix upstream = random_rows(5, 4, 3);
  auto loss = [&](const Matrix& in) { return gru_forward(s, cell, in, nullptr).cwiseProduct(upstream).sum(); };
  GruTrace tr;
  gru_forward(s, cell, x, &tr);
  GradBuffer g = s.make_buffer();
  Matrix dx;
  gru_backward(s, cell, tr, upstream, g, &dx);
  const double eps = 1e-6;
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) {
      Matrix xp = x, xm = x;
      xp(i, j) += eps;
      xm(i, j) -= eps;
      EXPECT_NEAR(dx(i, j), (loss(xp) - loss(xm)) / (2 * eps), 1e-8);
    }
}

TEST(Gru, RejectsWrongInputWidth) {
  ParamStore s;
  Rng rng = make_rng(1, "gru");
  auto cell = GruCell::create(s, "g", 3, 4, rng);
  EXPECT_THROW(gru_forward(s, cell, Matrix::Zero(2, 2), nullptr), ShapeError);
}

TEST(PaperEncoder, ZeroParametersGiveZeroVector) {
  Model m = make(ModelKind::Tapem);
  for (auto id : {m.encoder.cell.w, m.encoder.cell.u_zr, m.encoder.cell.u_h, m.encoder.cell.b})
    m.params().value(id).setZero();
  std::vector<TokenId> tokens{1};
  EXPECT_TRUE(encode_paper(m.params(), m.encoder, tokens, nullptr).isZero(0.0));
}

TEST(PaperEncoder, OrderSensitiveAndDeterministic) {
  Model m = make(ModelKind::Tapem);
  std::vector<TokenId> a{1, 2, 3}, b{3, 2, 1};
  const Vector pa = encode_paper(m.params(), m.encoder, a, nullptr);
  EXPECT_EQ(pa, encode_paper(m.params(), m.encoder, a, nullptr));
  EXPECT_GT((pa - encode_paper(m.params(), m.encoder, b, nullptr)).norm(), 1e-9);
  EXPECT_EQ(pa.size(), 6);
}

TEST(PaperEncoder, BadTokens) {
  Model m = make(ModelKind::Tapem);
  std::vector<TokenId> none, oov{static_cast<TokenId>(m.vocab().size())};
  EXPECT_THROW(encode_paper(m.params(), m.encoder, none, nullptr), InputError);
  EXPECT_THROW(encode_paper(m.params(), m.encoder, oov, nullptr), InputError);
}

TEST(PaperEncoder, LastStatePooling) {
  Model m = make(ModelKind::Tapem);
  std::vector<TokenId> t{1, 2, 3};
  Matrix x(3, 6);
  for (Index i = 0; i < 3; ++i) x.row(i) = m.params().value(m.encoder.words).row(t[static_cast<std::size_t>(i)]);
  const Matrix states = gru_forward(m.params(), m.encoder.cell, x, nullptr);
  PaperEncoder last = m.encoder;
  last.pooling = Pooling::Last;
  EXPECT_EQ(encode_paper(m.params(), last, t, nullptr), Vector(states.row(2).transpose()));
  EXPECT_TRUE(encode_paper(m.params(), m.encoder, t, nullptr)
                  .isApprox(Vector(states.colwise().mean().transpose()), 1e-15));
}

TEST(Comb, Layout) {
  EXPECT_EQ(comb(vec({1, 2}), vec({3, 4})), vec({1, 2, 3, 4, 3, 8, -2, -2}));
  EXPECT_TRUE(comb(vec({5, 6}), vec({5, 6})).tail(2).isZero(0.0));
  EXPECT_EQ(comb(vec({5, 6}), vec({0, 0})), vec({5, 6, 0, 0, 0, 0, 5, 6}));
  EXPECT_THROW(comb(vec({1}), vec({1, 2})), ShapeError);
}

TEST(PairEmbedder, ZeroWeightsGiveZero) {
  Model m = make(ModelKind::Tapem);
  for (std::size_t l = 0; l < m.pair.w.size(); ++l) {
    m.params().value(m.pair.w[l]).setZero();
    m.params().value(m.pair.b[l]).setZero();
  }
  const Vector g = embed_pair(m.params(), m.pair, Vector::Ones(6), Vector::Ones(6), false, nullptr, nullptr);
  EXPECT_EQ(g.size(), 5);
  EXPECT_TRUE(g.isZero(0.0));
}

TEST(PairEmbedder, InferenceDeterministicAndAsymmetric) {
  Model m = make(ModelKind::Tapem);
  const Vector p = random_rows(6, 1, 1).col(0), q = random_rows(6, 1, 2).col(0);
  const Vector g1 = embed_pair(m.params(), m.pair, p, q, false, nullptr, nullptr);
  EXPECT_EQ(g1, embed_pair(m.params(), m.pair, p, q, false, nullptr, nullptr));
  EXPECT_GT((g1 - embed_pair(m.params(), m.pair, q, p, false, nullptr, nullptr)).norm(), 1e-9);
}

TEST(PairEmbedder, FinalLayerIsLinear) {
  Model m = make(ModelKind::Tapem);
  bool negative = false;
  for (std::uint64_t s = 0; s < 20 && !negative; ++s) {
    const Vector g = embed_pair(m.params(), m.pair, random_rows(6, 1, s).col(0),
                                random_rows(6, 1, s + 100).col(0), false, nullptr, nullptr);
    negative = g.minCoeff() < 0;
  }
  EXPECT_TRUE(negative);
}

TEST(PairEmbedder, DropoutOnlyInTraining) {
  Model m = make(ModelKind::Tapem);
  m.pair.dropout = 0.5;
  const Vector p = random_rows(6, 1, 1).col(0), q = random_rows(6, 1, 2).col(0);
  Rng rng = make_rng(0, "dropout");
  const Vector a = embed_pair(m.params(), m.pair, p, q, false, &rng, nullptr);
  const Vector b = embed_pair(m.params(), m.pair, p, q, true, &rng, nullptr);
  EXPECT_GT((a - b).norm(), 1e-9);
  EXPECT_EQ(a, embed_pair(m.params(), m.pair, p, q, false, &rng, nullptr));
}

TEST(ContextPath, RejectsSingleNode) {
  Model m = make(ModelKind::Tapem);
  EXPECT_THROW(embed_context_path(m.params(), m.path, random_rows(1, 6, 0), nullptr), InputError);
}

TEST(ContextPath, AttentionWeightsAreADistribution) {
  Model m = make(ModelKind::Tapem);
  for (std::uint64_t s = 0; s < 50; ++s) {
    PathTrace tr;
    const Index n = 2 + static_cast<Index>(s % 6);
    embed_context_path(m.params(), m.path, 3.0 * random_rows(n, 6, s), &tr);
    EXPECT_NEAR(tr.weights.sum(), 1.0, 1e-12);
    EXPECT_GE(tr.weights.minCoeff(), 0.0);
  }
}

TEST(ContextPath, EqualStatesGiveUniformWeights) {
  Model m = make(ModelKind::TapemNoBiGru);
  const Vector node = random_rows(6, 1, 3).col(0);
  Matrix x(4, 6);
  x.rowwise() = node.transpose();
  PathTrace tr;
  const Vector f = embed_context_path(m.params(), m.path, x, &tr);
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(tr.weights[i], 0.25, 1e-15);
  const Vector h1 = m.params().value(m.path.lin_w) * node + m.params().value(m.path.lin_b).col(0);
  EXPECT_TRUE(f.isApprox(m.params().value(m.path.attn_w) * h1, 1e-12));
}

TEST(ContextPath, ReversalChangesOutput) {
  Model m = make(ModelKind::Tapem);
  const Matrix x = random_rows(4, 6, 9);
  const Vector a = embed_context_path(m.params(), m.path, x, nullptr);
  const Vector b = embed_context_path(m.params(), m.path, x.colwise().reverse(), nullptr);
  EXPECT_GT((a - b).norm(), 1e-9);
}

TEST(ContextPath, BiGruSymmetry) {
  Model a = make(ModelKind::Tapem);
  Model b = make(ModelKind::Tapem);
  auto swap = [&](ParamId f, ParamId r) {
    b.params().value(f) = a.params().value(r);
    b.params().value(r) = a.params().value(f);
  };
  swap(b.path.fwd.w, b.path.bwd.w);
  swap(b.path.fwd.u_zr, b.path.bwd.u_zr);
  swap(b.path.fwd.u_h, b.path.bwd.u_h);
  swap(b.path.fwd.b, b.path.bwd.b);
  const Matrix x = random_rows(5, 6, 4);
  PathTrace ta, tb;
  embed_context_path(a.params(), a.path, x, &ta);
  embed_context_path(b.params(), b.path, x.colwise().reverse(), &tb);
  EXPECT_TRUE(tb.fwd_states.isApprox(Matrix(ta.bwd_states.colwise().reverse()), 1e-14));
  EXPECT_TRUE(tb.bwd_states.isApprox(Matrix(ta.fwd_states.colwise().reverse()), 1e-14));
}

TEST(ContextPath, MeanPoolingAblation) {
  Model m = make(ModelKind::TapemNoAttn);
  PathTrace tr;
  embed_context_path(m.params(), m.path, random_rows(3, 6, 5), &tr);
  for (Index i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(tr.weights[i], 1.0 / 3.0);
}

TEST(Classifier, ZeroParametersAndBiasShift) {
  Model m = make(ModelKind::Tapem);
  const Vector g = random_rows(5, 1, 6).col(0);
  const double before = validity_logit(m.params(), m.classifier, g, nullptr);
  m.params().value(m.classifier.b2)(0, 0) += 0.75;
  EXPECT_NEAR(validity_logit(m.params(), m.classifier, g, nullptr), before + 0.75, 1e-15);
  for (auto id : {m.classifier.w1, m.classifier.b1, m.classifier.w2, m.classifier.b2})
    m.params().value(id).setZero();
  EXPECT_EQ(validity_logit(m.params(), m.classifier, g, nullptr), 0.0);
  EXPECT_THROW(validity_logit(m.params(), m.classifier, Vector::Ones(3), nullptr), ShapeError);
}

TEST(SkipGram, KnownValues) {
  const Vector z = Vector::Zero(4);
  std::vector<Vector> one{z}, three{z, z, z};
  EXPECT_NEAR(baseline_skipgram_loss(z, z, one).value, 2 * std::log(2.0), 1e-15);
  EXPECT_NEAR(baseline_skipgram_loss(z, z, three).value, 4 * std::log(2.0), 1e-15);
  EXPECT_NEAR(baseline_skipgram_loss(z, z, one).value, 1.3863, 1e-4);
  double prev = 1e300;
  for (double s = -3; s <= 3; s += 0.5) {
    const double l = baseline_skipgram_loss(Vector::Constant(4, 0.5), Vector::Constant(4, s), {}).value;
    EXPECT_LT(l, prev);
    prev = l;
  }
}

TEST(SkipGram, GradientsMatchFiniteDifferences) {
  const Vector c = random_rows(4, 1, 1).col(0), x = random_rows(4, 1, 2).col(0);
  std::vector<Vector> negs{random_rows(4, 1, 3).col(0), random_rows(4, 1, 4).col(0)};
  auto r = baseline_skipgram_loss(c, x, negs);
  const double eps = 1e-6;
  for (Index i = 0; i < 4; ++i) {
    Vector cp = c, cm = c;
    cp[i] += eps;
    cm[i] -= eps;
    EXPECT_NEAR(r.d_center[i],
                (baseline_skipgram_loss(cp, x, negs).value - baseline_skipgram_loss(cm, x, negs).value) / (2 * eps),
                1e-8);
    std::vector<Vector> np = negs, nm = negs;
    np[1][i] += eps;
    nm[1][i] -= eps;
    EXPECT_NEAR(r.d_negatives[1][i],
                (baseline_skipgram_loss(c, x, np).value - baseline_skipgram_loss(c, x, nm).value) / (2 * eps),
                1e-8);
  }
}

// Finite-difference check of one component at a time: pair embedder,
// context path and classifier chained into a scalar.
TEST(Gradients, PairPathClassifierChain) {
  for (auto kind : {ModelKind::Tapem, ModelKind::TapemNoAttn, ModelKind::TapemNoBiGru}) {
    Model m = make(kind, 3);
    auto& s = m.params();
    const Vector p = random_rows(6, 1, 10).col(0), q = random_rows(6, 1, 11).col(0);
    const Matrix nodes = random_rows(4, 6, 12);
    num::LossFunction f = [&](GradBuffer* gb) {
      PairTrace pt;
      PathTrace ct;
      ClassifierTrace vt;
      const Vector g = embed_pair(s, m.pair, p, q, false, nullptr, &pt);
      const Vector fc = embed_context_path(s, m.path, nodes, &ct);
      const double logit = validity_logit(s, m.classifier, g, &vt);
      const double value = g.dot(fc) + 0.5 * logit * logit;
      if (gb) {
        Vector dg_cls, dp, dq;
        Matrix dn;
        validity_logit_backward(s, m.classifier, vt, logit, *gb, dg_cls);
        embed_pair_backward(s, m.pair, pt, fc + dg_cls, *gb, dp, dq);
        embed_context_path_backward(s, m.path, ct, g, *gb, dn);
      }
      return num::LossEval{value, pt.pattern ^ (vt.pattern * 31)};
    };
    std::vector<ParamId> ids;
    for (const auto& [name, group] : m.parameter_groups())
      if (name != "paper encoder" && name != "embeddings") ids.insert(ids.end(), group.begin(), group.end());
    Rng rng = make_rng(0, "probe");
    auto r = num::grad_check(f, s, ids, 200, 1e-5, rng);
    EXPECT_LT(r.max_relative_error, 1e-4) << to_string(kind) << " " << r.worst;
    EXPECT_GT(r.probes, 100u);
  }
}

TEST(ModelBundle, KindsAndGroups) {
  EXPECT_TRUE(make(ModelKind::Tapem).has_classifier());
  EXPECT_FALSE(make(ModelKind::TapemNpv).has_classifier());
  EXPECT_TRUE(make(ModelKind::Baseline).is_baseline());
  EXPECT_EQ(parse_model_kind("tapem-no-attn"), ModelKind::TapemNoAttn);
  EXPECT_THROW(parse_model_kind("tapem2"), ConfigError);
  auto groups = make(ModelKind::Tapem).parameter_groups();
  std::vector<std::string> names;
  for (const auto& [n, ids] : groups) names.push_back(n);
  for (const char* want : {"paper encoder", "pair MLP", "attention", "BiGRU", "classifier", "embeddings"})
    EXPECT_NE(std::find(names.begin(), names.end(), want), names.end()) << want;
}

TEST(ModelBundle, SameSeedSameParameters) {
  EXPECT_TRUE(make(ModelKind::Tapem, 5).params().same_values(make(ModelKind::Tapem, 5).params()));
  EXPECT_FALSE(make(ModelKind::Tapem, 5).params().same_values(make(ModelKind::Tapem, 6).params()));
}

TEST(ModelBundle, RestoreAndAttach) {
  const auto graph = cli::toy_graph();
  Model m = Model::create(ModelKind::Tapem, small_dims(), graph, 2);
  Model r = Model::restore(m.meta(), m.params());
  r.attach(graph);
  for (auto a : graph.nodes_of_type(graph::NodeType::Author))
    EXPECT_EQ(r.node_vector(a), m.node_vector(a));
  EXPECT_THROW(Model::restore(nlohmann::json::object(), m.params()), IntegrityError);

  graph::GraphBuilder b;
  b.add_node("stranger", graph::NodeType::Author);
  b.set_abstract(b.add_node("p", graph::NodeType::Paper), 2010, {"x"});
  auto other = std::move(b).build(1);
  EXPECT_THROW(r.attach(other), IntegrityError);
}

}  // namespace
}  // namespace tapem::model
