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

// Meta-path guided random walks and paper-author pair extraction.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tapem/hetgraph.hpp"
#include "tapem/rng.hpp"

namespace tapem::walk {

using graph::HeteroGraph;
using graph::NodeId;
using graph::NodeType;

// Node-type pattern A_1 ... A_l with A_1 == A_l. Walks repeat the pattern
// cyclically, so position i has type types()[i % (l - 1)].
class MetaPath {
 public:
  explicit MetaPath(std::vector<NodeType> types);
  // "APA", "APPA", "APVPA", ...
  static MetaPath parse(std::string_view pattern);

  const std::vector<NodeType>& types() const { return types_; }
  NodeType type_at(std::size_t position) const { return types_[position % period()]; }
  NodeType first() const { return types_.front(); }
  std::size_t period() const { return types_.size() - 1; }
  std::string name() const;
  bool operator==(const MetaPath&) const = default;

 private:
  std::vector<NodeType> types_;
};

struct Walk {
  std::vector<NodeId> nodes;
  std::string metapath;
  NodeId start() const { return nodes.front(); }
};

struct PairPathInstance {
  NodeId paper = 0;
  NodeId author = 0;
  // Walk subsequence oriented paper -> author, endpoints inclusive.
  std::vector<NodeId> path;
  bool label = false;
  // Position of the paper in its walk.
  std::uint32_t paper_offset = 0;
  bool operator==(const PairPathInstance&) const = default;
};

// Candidates for the step out of `current` towards type `next`. Paper ->
// Paper steps follow citations in both directions.
std::vector<NodeId> step_candidates(const HeteroGraph& g, NodeId current, NodeType next);

// One transition of a meta-path guided walk: a uniform draw over the
// neighbors of the type required at step_index + 1, or nullopt when there
// are none.
std::optional<NodeId> next_node(const HeteroGraph& g, NodeId current, const MetaPath& metapath,
                                std::size_t step_index, Rng& rng);

struct WalkOptions {
  std::size_t walks_per_node = 5;
  std::size_t walk_length = 20;
  std::uint64_t seed = 0;
};

// Walks from every node of the meta-path's first type, ordered by start
// node then walk index. Each (start, index) pair owns its RNG stream, so the
// result does not depend on the thread count. Walks that die before two
// nodes are dropped.
std::vector<Walk> generate_walks(const HeteroGraph& g, const MetaPath& metapath,
                                 const WalkOptions& options);
// Single-threaded reference with identical output.
std::vector<Walk> generate_walks_serial(const HeteroGraph& g, const MetaPath& metapath,
                                        const WalkOptions& options);

// Every (paper position, author position) pair at distance <= tau, ordered
// by paper position then author position.
std::vector<PairPathInstance> extract_pairs(const Walk& walk, std::size_t tau,
                                            const HeteroGraph& g);
std::vector<PairPathInstance> extract_all_pairs(const std::vector<Walk>& walks, std::size_t tau,
                                                const HeteroGraph& g);

// For each paper, how often each author appears within tau positions of it.
using CooccurrenceCounts = std::map<NodeId, std::map<NodeId, std::size_t>>;
CooccurrenceCounts cooccurrence_counts(const std::vector<Walk>& walks, std::size_t tau,
                                       const HeteroGraph& g);

// Walk TSV: a '#' header line, then one walk per line as space separated
// external node ids.
void write_walks(const std::filesystem::path& path, const std::vector<Walk>& walks,
                 const HeteroGraph& g, const MetaPath& metapath, const WalkOptions& options);
std::vector<Walk> read_walks(const std::filesystem::path& path, const HeteroGraph& g);

// JSON Lines {"v":..., "u":..., "path":[...], "y":0|1} with external ids.
void write_pairs(const std::filesystem::path& path, const std::vector<PairPathInstance>& pairs,
                 const HeteroGraph& g);
std::vector<PairPathInstance> read_pairs(const std::filesystem::path& path, const HeteroGraph& g);

}  // namespace tapem::walk
