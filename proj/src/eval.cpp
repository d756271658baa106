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

#include "tapem/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "tapem/errors.hpp"
#include "tapem/parallel.hpp"

namespace tapem::eval {

using graph::NodeType;
using num::Index;
using num::Vector;

std::size_t CandidateSet::true_count() const {
  return static_cast<std::size_t>(std::count(truth.begin(), truth.end(), 1));
}

namespace {

CandidateSet finish_candidates(const HeteroGraph& graph, NodeId paper, std::vector<NodeId> authors) {
  std::sort(authors.begin(), authors.end());
  CandidateSet c;
  c.paper = paper;
  c.truth.reserve(authors.size());
  for (NodeId a : authors) c.truth.push_back(graph.has_authorship(paper, a) ? 1 : 0);
  c.authors = std::move(authors);
  return c;
}

}  // namespace

CandidateSet sample_candidates(const HeteroGraph& graph, NodeId paper, std::size_t pool_size,
                               std::uint64_t seed) {
  const auto truth = graph.typed_neighbors(paper, NodeType::Author);
  if (truth.empty())
    throw ContractViolation("paper " + graph.external_id(paper) + " has no true author");
  if (pool_size < truth.size())
    throw ConfigError("candidate pool of " + std::to_string(pool_size) + " cannot hold the " +
                      std::to_string(truth.size()) + " true authors of " +
                      graph.external_id(paper));
  std::vector<NodeId> others;
  for (NodeId a : graph.nodes_of_type(NodeType::Author))
    if (!std::binary_search(truth.begin(), truth.end(), a)) others.push_back(a);
  const std::size_t want = std::min(pool_size - truth.size(), others.size());
  Rng rng = make_rng(seed, "candidates", paper);
  for (std::size_t i = 0; i < want; ++i)
    std::swap(others[i], others[i + uniform_index(rng, others.size() - i)]);
  std::vector<NodeId> authors(truth.begin(), truth.end());
  authors.insert(authors.end(), others.begin(), others.begin() + static_cast<std::ptrdiff_t>(want));
  return finish_candidates(graph, paper, std::move(authors));
}

CandidateSet whole_candidates(const HeteroGraph& graph, NodeId paper) {
  const auto all = graph.nodes_of_type(NodeType::Author);
  return finish_candidates(graph, paper, {all.begin(), all.end()});
}

ScoreRule default_rule(const Model& model) {
  return model.has_classifier() ? ScoreRule::Classifier : ScoreRule::Dot;
}

std::vector<double> score_rows(const Model& model, const Vector& paper_vector,
                               std::span<const Index> rows, ScoreRule rule) {
  if (rule == ScoreRule::Classifier && !model.has_classifier())
    throw ContractViolation("model '" + std::string(model::to_string(model.kind())) +
                            "' has no validity classifier");
  const auto& store = model.params();
  const auto& table = store.value(model.author_table);
  std::vector<double> keys;
  keys.reserve(rows.size());
  for (Index r : rows) {
    const Vector q = table.row(r).transpose();
    if (rule == ScoreRule::Dot) {
      keys.push_back(paper_vector.dot(q));
    } else {
      const Vector g = model::embed_pair(store, model.pair, paper_vector, q, false, nullptr, nullptr);
      keys.push_back(model::validity_logit(store, model.classifier, g, nullptr));
    }
  }
  return keys;
}

double key_to_score(double key, ScoreRule rule) {
  return rule == ScoreRule::Classifier ? num::sigmoid(key) : key;
}

RankedList make_ranked_list(NodeId paper, std::span<const NodeId> authors,
                            std::span<const char> truth, std::span<const double> keys,
                            ScoreRule rule) {
  if (authors.size() != truth.size() || authors.size() != keys.size())
    throw ShapeError("ranked list inputs have different lengths");
  std::vector<std::size_t> order(authors.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a] != keys[b]) return keys[a] > keys[b];
    return authors[a] < authors[b];
  });
  RankedList out;
  out.paper = paper;
  for (std::size_t i : order) {
    out.authors.push_back(authors[i]);
    out.keys.push_back(keys[i]);
    out.scores.push_back(key_to_score(keys[i], rule));
    out.truth.push_back(truth[i]);
  }
  return out;
}

RankedList rank_authors(const Model& model, std::span<const graph::TokenId> tokens,
                        const CandidateSet& candidates, ScoreRule rule) {
  const Vector p = model::encode_paper(model.params(), model.encoder, tokens, nullptr);
  std::vector<Index> rows;
  rows.reserve(candidates.authors.size());
  for (NodeId a : candidates.authors) rows.push_back(model.row(a));
  const auto keys = score_rows(model, p, rows, rule);
  return make_ranked_list(candidates.paper, candidates.authors, candidates.truth, keys, rule);
}

std::vector<RankedList> rank_papers(const Model& model, const HeteroGraph& graph,
                                    std::span<const NodeId> papers, const EvalOptions& options) {
  std::vector<NodeId> sorted(papers.begin(), papers.end());
  std::sort(sorted.begin(), sorted.end());
  const ScoreRule rule = options.rule.value_or(default_rule(model));
  std::vector<RankedList> out(sorted.size());
  parallel_for(sorted.size(), options.parallel, [&](std::size_t i) {
    const NodeId v = sorted[i];
    const CandidateSet c = options.mode == CandidateMode::Whole
                               ? whole_candidates(graph, v)
                               : sample_candidates(graph, v, options.candidates, options.seed);
    out[i] = rank_authors(model, graph.abstract(v), c, rule);
  });
  return out;
}

std::vector<std::size_t> default_n_values(CandidateMode mode) {
  if (mode == CandidateMode::Whole) return {10, 30, 50, 100, 200};
  return {1, 2, 5, 10};
}

std::optional<double> list_auc(const RankedList& list) {
  // Walk groups of equal keys from the bottom up, counting negatives below.
  double concordant = 0.0;
  std::size_t pos = 0, neg = 0;
  const std::size_t n = list.keys.size();
  std::size_t end = n;
  while (end > 0) {
    std::size_t begin = end - 1;
    while (begin > 0 && list.keys[begin - 1] == list.keys[end - 1]) --begin;
    std::size_t gp = 0, gn = 0;
    for (std::size_t i = begin; i < end; ++i) (list.truth[i] ? gp : gn)++;
    concordant += static_cast<double>(gp) * (static_cast<double>(neg) + 0.5 * static_cast<double>(gn));
    pos += gp;
    neg += gn;
    end = begin;
  }
  if (pos == 0 || neg == 0) return std::nullopt;
  return concordant / (static_cast<double>(pos) * static_cast<double>(neg));
}

MetricsReport metrics(std::span<const RankedList> lists, std::span<const std::size_t> n_values) {
  MetricsReport r;
  r.n_values.assign(n_values.begin(), n_values.end());
  for (std::size_t n : n_values) {
    if (n == 0) throw ConfigError("metric cutoff N must be positive");
    r.recall[n] = r.precision[n] = 0.0;
  }
  double auc_sum = 0.0;
  std::size_t auc_count = 0;
  for (const auto& list : lists) {
    const auto total_true =
        static_cast<std::size_t>(std::count(list.truth.begin(), list.truth.end(), 1));
    if (total_true == 0) {
      ++r.excluded;
      continue;
    }
    ++r.papers;
    for (std::size_t n : n_values) {
      const std::size_t top = std::min(n, list.truth.size());
      const auto hits = static_cast<std::size_t>(
          std::count(list.truth.begin(), list.truth.begin() + static_cast<std::ptrdiff_t>(top), 1));
      r.recall[n] += static_cast<double>(hits) / static_cast<double>(total_true);
      r.precision[n] += static_cast<double>(hits) / static_cast<double>(n);
    }
    if (auto a = list_auc(list)) {
      auc_sum += *a;
      ++auc_count;
    }
  }
  for (std::size_t n : n_values) {
    if (r.papers > 0) {
      r.recall[n] /= static_cast<double>(r.papers);
      r.precision[n] /= static_cast<double>(r.papers);
    }
    const double p = r.precision[n], rc = r.recall[n];
    r.f1[n] = p + rc > 0.0 ? 2.0 * p * rc / (p + rc) : 0.0;
  }
  r.auc = auc_count > 0 ? auc_sum / static_cast<double>(auc_count) : 0.0;
  return r;
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json j;
  j["slice"] = slice;
  j["candidates"] = candidates;
  j["papers"] = papers;
  j["excluded_papers"] = excluded;
  j["n_values"] = n_values;
  for (std::size_t n : n_values) {
    const std::string key = std::to_string(n);
    j["recall"][key] = recall.at(n);
    j["precision"][key] = precision.at(n);
    j["f1"][key] = f1.at(n);
  }
  j["auc"] = auc;
  if (rank_violations) {
    j["rank_violations"] = *rank_violations;
    j["rank_violation_papers"] = violation_papers;
  }
  return j;
}

std::vector<char> inactive_authors(const HeteroGraph& graph, const graph::CorpusSplit& split,
                                   std::size_t threshold) {
  if (threshold < 1) throw ConfigError("inactive-author threshold must be at least 1");
  const auto counts = graph::publication_counts(graph, split.train);
  std::vector<char> keep(graph.num_nodes(), 0);
  for (NodeId a : graph.nodes_of_type(NodeType::Author)) keep[a] = counts[a] <= threshold ? 1 : 0;
  return keep;
}

std::vector<RankedList> slice_lists(std::span<const RankedList> lists,
                                    const std::vector<char>& keep_author) {
  std::vector<RankedList> out;
  for (const auto& list : lists) {
    RankedList s;
    s.paper = list.paper;
    bool any_true = false;
    for (std::size_t i = 0; i < list.authors.size(); ++i) {
      if (list.truth[i] && !keep_author.at(list.authors[i])) continue;
      s.authors.push_back(list.authors[i]);
      s.keys.push_back(list.keys[i]);
      s.scores.push_back(list.scores[i]);
      s.truth.push_back(list.truth[i]);
      any_true = any_true || list.truth[i];
    }
    if (any_true) out.push_back(std::move(s));
  }
  return out;
}

std::vector<NodeId> frequent_false_authors(const HeteroGraph& graph,
                                           const walk::CooccurrenceCounts& counts, NodeId paper,
                                           std::size_t n) {
  const auto it = counts.find(paper);
  if (it == counts.end())
    throw ContractViolation("no co-occurrence counts for paper " + graph.external_id(paper));
  std::vector<std::pair<std::size_t, NodeId>> ranked;
  for (const auto& [author, count] : it->second)
    if (!graph.has_authorship(paper, author)) ranked.emplace_back(count, author);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < std::min(n, ranked.size()); ++i) out.push_back(ranked[i].second);
  return out;
}

ViolationSummary rank_violations(const HeteroGraph& graph, std::span<const RankedList> lists,
                                 const walk::CooccurrenceCounts& counts) {
  ViolationSummary s;
  double total = 0.0;
  for (const auto& list : lists) {
    const auto n_true =
        static_cast<std::size_t>(std::count(list.truth.begin(), list.truth.end(), 1));
    if (n_true == 0) continue;
    const auto frequent = frequent_false_authors(graph, counts, list.paper, n_true);
    std::vector<std::size_t> true_pos, false_pos;
    for (std::size_t i = 0; i < list.authors.size(); ++i) {
      if (list.truth[i]) {
        true_pos.push_back(i);
      } else if (std::find(frequent.begin(), frequent.end(), list.authors[i]) != frequent.end()) {
        false_pos.push_back(i);
      }
    }
    if (false_pos.empty()) continue;
    std::size_t violations = 0;
    for (std::size_t f : false_pos)
      for (std::size_t t : true_pos)
        if (f < t) ++violations;
    total += static_cast<double>(violations);
    ++s.papers;
  }
  s.average = s.papers > 0 ? total / static_cast<double>(s.papers) : 0.0;
  return s;
}

void write_rankings(const std::filesystem::path& path, std::span<const RankedList> lists,
                    const HeteroGraph& graph) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write rankings to " + path.string());
  out << "paper\trank\tauthor\tscore\tis_true\n";
  out << std::setprecision(17);
  for (const auto& list : lists)
    for (std::size_t i = 0; i < list.authors.size(); ++i)
      out << graph.external_id(list.paper) << '\t' << i + 1 << '\t'
          << graph.external_id(list.authors[i]) << '\t' << list.scores[i] << '\t'
          << static_cast<int>(list.truth[i]) << '\n';
  if (!out) throw IoError("failed writing rankings to " + path.string());
}

}  // namespace tapem::eval
