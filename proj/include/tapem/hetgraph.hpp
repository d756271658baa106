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

// Typed heterogeneous academic network: authors, papers and venues joined
// by writes / cites / publishes-in edges, plus paper abstracts and years.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tapem::graph {

using NodeId = std::uint32_t;
using TokenId = std::uint32_t;

enum class NodeType : std::uint8_t { Author = 0, Paper = 1, Venue = 2 };
inline constexpr std::size_t kNodeTypeCount = 3;

enum class EdgeType : std::uint8_t { Writes = 0, Cites = 1, PublishesIn = 2 };

std::string_view to_string(NodeType t);
std::string_view to_string(EdgeType t);
char type_letter(NodeType t);
std::optional<NodeType> parse_node_type(std::string_view s);
std::optional<NodeType> node_type_from_letter(char c);
std::optional<EdgeType> parse_edge_type(std::string_view s);

struct Edge {
  NodeId src;
  NodeId dst;
  EdgeType type;
  bool operator==(const Edge&) const = default;
};

// Token vocabulary. Id 0 is reserved for the unknown token; tokens seen
// fewer than `min_count` times across the corpus collapse onto it.
class Vocabulary {
 public:
  static constexpr TokenId kUnknown = 0;
  static constexpr std::string_view kUnknownToken = "<unk>";

  Vocabulary();
  static Vocabulary build(const std::vector<std::vector<std::string>>& documents,
                          std::size_t min_count);
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  TokenId lookup(std::string_view token) const;
  std::size_t size() const { return tokens_.size(); }
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

// Compressed adjacency for one target node type.
struct Adjacency {
  std::vector<std::size_t> offsets;
  std::vector<NodeId> targets;
  std::span<const NodeId> row(NodeId v) const {
    return {targets.data() + offsets[v], offsets[v + 1] - offsets[v]};
  }
};

class GraphBuilder;

class HeteroGraph {
 public:
  std::size_t num_nodes() const { return types_.size(); }
  std::size_t count(NodeType t) const { return by_type_[static_cast<std::size_t>(t)].size(); }

  NodeType type(NodeId v) const;
  const std::string& external_id(NodeId v) const;
  std::optional<NodeId> find(std::string_view external) const;
  NodeId node(std::string_view external) const;

  // Sorted neighbors of v whose type is t. Citations are reported in their
  // stored direction (papers cited by v).
  std::span<const NodeId> typed_neighbors(NodeId v, NodeType t) const;
  // Papers citing v.
  std::span<const NodeId> cited_by(NodeId paper) const;
  // All nodes of type t in id order.
  std::span<const NodeId> nodes_of_type(NodeType t) const {
    return by_type_[static_cast<std::size_t>(t)];
  }

  bool has_authorship(NodeId paper, NodeId author) const;

  int year(NodeId paper) const;
  std::span<const TokenId> abstract(NodeId paper) const;
  const std::vector<std::string>& abstract_text(NodeId paper) const;
  const Vocabulary& vocab() const { return vocab_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // Same node set and vocabulary; keeps only edges whose paper endpoints are
  // all in `papers`. Node ids stay valid across the two graphs.
  HeteroGraph restrict_to_papers(std::span<const NodeId> papers) const;

  bool operator==(const HeteroGraph& other) const;

 private:
  friend class GraphBuilder;
  void check_node(NodeId v) const;
  void check_paper(NodeId v) const;
  void build_adjacency();

  std::vector<NodeType> types_;
  std::vector<std::string> external_;
  std::unordered_map<std::string, NodeId> index_;
  std::array<std::vector<NodeId>, kNodeTypeCount> by_type_;
  std::vector<Edge> edges_;
  std::array<Adjacency, kNodeTypeCount> adjacency_;
  Adjacency cited_by_;
  std::vector<int> years_;
  std::vector<std::vector<std::string>> text_;
  std::vector<std::vector<TokenId>> tokens_;
  Vocabulary vocab_;
};

class GraphBuilder {
 public:
  NodeId add_node(std::string external, NodeType type);
  // Writes edges may be given in either orientation; they are stored
  // author -> paper. Cites edges keep their direction.
  void add_edge(NodeId src, NodeId dst, EdgeType type);
  void set_abstract(NodeId paper, int year, std::vector<std::string> tokens);

  HeteroGraph build(std::size_t vocab_min_count = 3) &&;
  HeteroGraph build(Vocabulary vocab) &&;

  std::size_t num_nodes() const { return graph_.types_.size(); }
  std::optional<NodeId> find(std::string_view external) const { return graph_.find(external); }

 private:
  HeteroGraph finish();
  HeteroGraph graph_;
  std::vector<bool> has_abstract_;
};

struct LoadOptions {
  std::size_t vocab_min_count = 3;
  // Papers in venues with fewer papers than this are dropped; 0 disables.
  std::size_t min_venue_papers = 0;
};

struct DatasetPaths {
  std::filesystem::path nodes;
  std::filesystem::path edges;
  std::filesystem::path abstracts;
  static DatasetPaths in(const std::filesystem::path& dir);
};

HeteroGraph load_graph(const std::filesystem::path& nodes, const std::filesystem::path& edges,
                       const std::filesystem::path& abstracts, const LoadOptions& options = {});
HeteroGraph load_dataset(const std::filesystem::path& dir, const LoadOptions& options = {});
void save_graph(const HeteroGraph& graph, const std::filesystem::path& nodes,
                const std::filesystem::path& edges, const std::filesystem::path& abstracts);

struct CorpusSplit {
  int split_year = 0;
  std::vector<NodeId> train;
  std::vector<NodeId> validation;
  std::vector<NodeId> test;
};

// Papers before `split_year` train; later papers are shuffled with `seed`
// and halved into validation and test (validation gets the extra one).
CorpusSplit temporal_split(const HeteroGraph& graph, int split_year, std::uint64_t seed);

// Number of training-set papers written by each author (indexed by node id).
std::vector<std::size_t> publication_counts(const HeteroGraph& graph,
                                            std::span<const NodeId> papers);

}  // namespace tapem::graph
