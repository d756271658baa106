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

// Author-identification evaluation: candidate sampling, ranking, ranking
// metrics, the inactive-author slice and rank-violation counts.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tapem/hetgraph.hpp"
#include "tapem/model.hpp"
#include "tapem/walker.hpp"

namespace tapem::eval {

using graph::HeteroGraph;
using graph::NodeId;
using model::Model;

inline constexpr std::size_t kDefaultCandidates = 100;
inline constexpr std::size_t kDefaultInactiveThreshold = 5;

struct CandidateSet {
  NodeId paper = 0;
  // Ascending author ids.
  std::vector<NodeId> authors;
  std::vector<char> truth;
  std::size_t true_count() const;
};

// True authors plus a uniform sample of non-authors without replacement,
// `pool_size` in total. Depends only on (seed, paper). A pool larger than
// the author set yields every author.
CandidateSet sample_candidates(const HeteroGraph& graph, NodeId paper, std::size_t pool_size,
                               std::uint64_t seed);
CandidateSet whole_candidates(const HeteroGraph& graph, NodeId paper);

// Classifier: sigma(pi(g(p, q))). Dot: p . q, used by the baseline and the
// dot-product variants.
enum class ScoreRule { Classifier, Dot };
ScoreRule default_rule(const Model& model);

// Ranking keys for authors given by embedding-table row. For the classifier
// rule the key is the logit; sigma is monotone, so ordering by it equals
// ordering by probability without saturation ties.
std::vector<double> score_rows(const Model& model, const num::Vector& paper_vector,
                               std::span<const num::Index> rows, ScoreRule rule);
double key_to_score(double key, ScoreRule rule);

struct RankedList {
  NodeId paper = 0;
  // Best first. Ties go to the lower author id.
  std::vector<NodeId> authors;
  std::vector<double> keys;
  std::vector<double> scores;
  std::vector<char> truth;
};

// Orders candidates by descending key, ties by ascending id.
RankedList make_ranked_list(NodeId paper, std::span<const NodeId> authors,
                            std::span<const char> truth, std::span<const double> keys,
                            ScoreRule rule);

// Encodes the abstract (dropout off) and ranks the candidates.
RankedList rank_authors(const Model& model, std::span<const graph::TokenId> tokens,
                        const CandidateSet& candidates, ScoreRule rule);

enum class CandidateMode { Sampled, Whole };

struct EvalOptions {
  CandidateMode mode = CandidateMode::Sampled;
  std::size_t candidates = kDefaultCandidates;
  std::uint64_t seed = 0;
  std::optional<ScoreRule> rule;
  bool parallel = true;
};

// One ranked list per paper, in ascending paper id order, independent of
// the thread count.
std::vector<RankedList> rank_papers(const Model& model, const HeteroGraph& graph,
                                    std::span<const NodeId> papers, const EvalOptions& options);

std::vector<std::size_t> default_n_values(CandidateMode mode);

struct MetricsReport {
  std::vector<std::size_t> n_values;
  std::map<std::size_t, double> recall, precision, f1;
  double auc = 0.0;
  std::size_t papers = 0;
  std::size_t excluded = 0;
  std::string slice = "all";
  std::string candidates = "sampled";
  std::optional<double> rank_violations;
  std::size_t violation_papers = 0;
  nlohmann::json to_json() const;
};

// Macro-averaged Recall@N and Precision@N, F1@N from the averaged P and R,
// and macro AUC with ties counted 0.5. Lists without a true author are
// excluded and counted in `excluded`.
MetricsReport metrics(std::span<const RankedList> lists, std::span<const std::size_t> n_values);

// AUC of one list from its keys: (#concordant + 0.5 #tied) / (#pos #neg).
// Returns nullopt when the list lacks positives or negatives.
std::optional<double> list_auc(const RankedList& list);

// Authors with at most `threshold` training papers.
std::vector<char> inactive_authors(const HeteroGraph& graph, const graph::CorpusSplit& split,
                                   std::size_t threshold);
// Removes true authors outside the slice from each list and drops lists
// left without true authors.
std::vector<RankedList> slice_lists(std::span<const RankedList> lists,
                                    const std::vector<char>& keep_author);

// For each paper, the `n` most frequent non-authors in `counts`, ties by
// ascending id. Papers missing from `counts` raise ContractViolation.
std::vector<NodeId> frequent_false_authors(const HeteroGraph& graph,
                                           const walk::CooccurrenceCounts& counts, NodeId paper,
                                           std::size_t n);

struct ViolationSummary {
  double average = 0.0;
  std::size_t papers = 0;
};

// Per paper, counts (frequent false, true) pairs where the false author is
// ranked above the true one, with N = #true frequent false authors taken
// from `counts`; averages over papers that have any frequent false author.
ViolationSummary rank_violations(const HeteroGraph& graph, std::span<const RankedList> lists,
                                 const walk::CooccurrenceCounts& counts);

// TSV: paper, rank, author, score, is_true.
void write_rankings(const std::filesystem::path& path, std::span<const RankedList> lists,
                    const HeteroGraph& graph);

}  // namespace tapem::eval
