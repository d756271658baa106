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

#include "tapem/walker.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tapem/errors.hpp"

namespace tapem::walk {

using graph::type_letter;

namespace {

bool schema_allows(NodeType a, NodeType b) {
  using T = NodeType;
  if ((a == T::Author && b == T::Paper) || (a == T::Paper && b == T::Author)) return true;
  if ((a == T::Paper && b == T::Venue) || (a == T::Venue && b == T::Paper)) return true;
  return a == T::Paper && b == T::Paper;
}

}  // namespace

MetaPath::MetaPath(std::vector<NodeType> types) : types_(std::move(types)) {
  if (types_.size() < 2) throw ConfigError("meta-path needs at least two node types");
  if (types_.front() != types_.back())
    throw ConfigError("meta-path " + name() + " must start and end with the same type");
  for (std::size_t i = 0; i + 1 < types_.size(); ++i)
    if (!schema_allows(types_[i], types_[i + 1]))
      throw ConfigError("meta-path " + name() + " steps " + type_letter(types_[i]) + "->" +
                        type_letter(types_[i + 1]) + " which no edge type supports");
}

MetaPath MetaPath::parse(std::string_view pattern) {
  std::vector<NodeType> types;
  for (char c : pattern) {
    auto t = graph::node_type_from_letter(c);
    if (!t) throw ConfigError("meta-path '" + std::string(pattern) + "' has unknown type '" + c + "'");
    types.push_back(*t);
  }
  return MetaPath(std::move(types));
}

std::string MetaPath::name() const {
  std::string s;
  for (NodeType t : types_) s += type_letter(t);
  return s;
}

std::vector<NodeId> step_candidates(const HeteroGraph& g, NodeId current, NodeType next) {
  auto out = g.typed_neighbors(current, next);
  if (g.type(current) != NodeType::Paper || next != NodeType::Paper)
    return {out.begin(), out.end()};
  auto in = g.cited_by(current);
  std::vector<NodeId> both;
  both.reserve(out.size() + in.size());
  std::set_union(out.begin(), out.end(), in.begin(), in.end(), std::back_inserter(both));
  return both;
}

std::optional<NodeId> next_node(const HeteroGraph& g, NodeId current, const MetaPath& metapath,
                                std::size_t step_index, Rng& rng) {
  if (g.type(current) != metapath.type_at(step_index))
    throw ContractViolation("node " + g.external_id(current) + " is a " +
                            std::string(graph::to_string(g.type(current))) + " but meta-path " +
                            metapath.name() + " expects " +
                            std::string(graph::to_string(metapath.type_at(step_index))) +
                            " at step " + std::to_string(step_index));
  const NodeType next = metapath.type_at(step_index + 1);
  if (g.type(current) == NodeType::Paper && next == NodeType::Paper) {
    auto candidates = step_candidates(g, current, next);
    if (candidates.empty()) return std::nullopt;
    return candidates[uniform_index(rng, candidates.size())];
  }
  auto row = g.typed_neighbors(current, next);
  if (row.empty()) return std::nullopt;
  return row[uniform_index(rng, row.size())];
}

namespace {

void check_options(const WalkOptions& o) {
  if (o.walks_per_node < 1) throw ConfigError("walks_per_node must be at least 1");
  if (o.walk_length < 2) throw ConfigError("walk_length must be at least 2");
}

Walk walk_from(const HeteroGraph& g, const MetaPath& mp, NodeId start, std::size_t index,
               const WalkOptions& o, const std::string& name) {
  Rng rng = make_rng(o.seed, "walk:" + name, start, index);
  Walk w;
  w.metapath = name;
  w.nodes.reserve(o.walk_length);
  w.nodes.push_back(start);
  while (w.nodes.size() < o.walk_length) {
    auto next = next_node(g, w.nodes.back(), mp, w.nodes.size() - 1, rng);
    if (!next) break;
    w.nodes.push_back(*next);
  }
  return w;
}

std::vector<Walk> collect(std::vector<Walk>&& all) {
  std::vector<Walk> kept;
  kept.reserve(all.size());
  for (auto& w : all)
    if (w.nodes.size() >= 2) kept.push_back(std::move(w));
  return kept;
}

}  // namespace

std::vector<Walk> generate_walks(const HeteroGraph& g, const MetaPath& mp,
                                 const WalkOptions& o) {
  check_options(o);
  const auto starts = g.nodes_of_type(mp.first());
  const std::string name = mp.name();
  const auto n = static_cast<std::int64_t>(starts.size() * o.walks_per_node);
  std::vector<Walk> all(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto s = static_cast<std::size_t>(i) / o.walks_per_node;
    const auto k = static_cast<std::size_t>(i) % o.walks_per_node;
    all[static_cast<std::size_t>(i)] = walk_from(g, mp, starts[s], k, o, name);
  }
  return collect(std::move(all));
}

std::vector<Walk> generate_walks_serial(const HeteroGraph& g, const MetaPath& mp,
                                        const WalkOptions& o) {
  check_options(o);
  const std::string name = mp.name();
  std::vector<Walk> all;
  for (NodeId s : g.nodes_of_type(mp.first()))
    for (std::size_t k = 0; k < o.walks_per_node; ++k) all.push_back(walk_from(g, mp, s, k, o, name));
  return collect(std::move(all));
}

std::vector<PairPathInstance> extract_pairs(const Walk& walk, std::size_t tau,
                                            const HeteroGraph& g) {
  if (tau < 1) throw ConfigError("window tau must be at least 1");
  std::vector<PairPathInstance> out;
  const auto& w = walk.nodes;
  const std::size_t n = w.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (g.type(w[i]) != NodeType::Paper) continue;
    const std::size_t lo = i >= tau ? i - tau : 0;
    const std::size_t hi = std::min(n - 1, i + tau);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j == i || g.type(w[j]) != NodeType::Author) continue;
      PairPathInstance inst;
      inst.paper = w[i];
      inst.author = w[j];
      inst.paper_offset = static_cast<std::uint32_t>(i);
      if (j > i) {
        inst.path.assign(w.begin() + static_cast<std::ptrdiff_t>(i),
                         w.begin() + static_cast<std::ptrdiff_t>(j) + 1);
      } else {
        inst.path.assign(w.rbegin() + static_cast<std::ptrdiff_t>(n - 1 - i),
                         w.rbegin() + static_cast<std::ptrdiff_t>(n - j));
      }
      inst.label = g.has_authorship(inst.paper, inst.author);
      out.push_back(std::move(inst));
    }
  }
  return out;
}

std::vector<PairPathInstance> extract_all_pairs(const std::vector<Walk>& walks, std::size_t tau,
                                                const HeteroGraph& g) {
  std::vector<PairPathInstance> out;
  for (const auto& w : walks) {
    auto p = extract_pairs(w, tau, g);
    out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
  }
  return out;
}

CooccurrenceCounts cooccurrence_counts(const std::vector<Walk>& walks, std::size_t tau,
                                       const HeteroGraph& g) {
  CooccurrenceCounts counts;
  for (const auto& walk : walks) {
    const auto& w = walk.nodes;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (g.type(w[i]) != NodeType::Paper) continue;
      const std::size_t lo = i >= tau ? i - tau : 0;
      const std::size_t hi = std::min(w.size() - 1, i + tau);
      for (std::size_t j = lo; j <= hi; ++j)
        if (j != i && g.type(w[j]) == NodeType::Author) ++counts[w[i]][w[j]];
    }
  }
  return counts;
}

void write_walks(const std::filesystem::path& path, const std::vector<Walk>& walks,
                 const HeteroGraph& g, const MetaPath& mp, const WalkOptions& o) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# metapath=" << mp.name() << " seed=" << o.seed << " walks_per_node=" << o.walks_per_node
      << " walk_length=" << o.walk_length << '\n';
  for (const auto& w : walks) {
    for (std::size_t i = 0; i < w.nodes.size(); ++i)
      out << (i ? " " : "") << g.external_id(w.nodes[i]);
    out << '\n';
  }
}

std::vector<Walk> read_walks(const std::filesystem::path& path, const HeteroGraph& g) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<Walk> walks;
  std::string line, metapath;
  for (std::size_t ln = 1; std::getline(in, line); ++ln) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto pos = line.find("metapath=");
      if (pos != std::string::npos) {
        std::istringstream ss(line.substr(pos + 9));
        ss >> metapath;
      }
      continue;
    }
    std::istringstream ss(line);
    Walk w;
    w.metapath = metapath;
    std::string id;
    while (ss >> id) {
      auto v = g.find(id);
      if (!v) throw IntegrityError(path.string() + ":" + std::to_string(ln) + ": unknown node '" + id + "'");
      w.nodes.push_back(*v);
    }
    walks.push_back(std::move(w));
  }
  return walks;
}

void write_pairs(const std::filesystem::path& path, const std::vector<PairPathInstance>& pairs,
                 const HeteroGraph& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& p : pairs) {
    nlohmann::json j;
    j["v"] = g.external_id(p.paper);
    j["u"] = g.external_id(p.author);
    std::vector<std::string> nodes;
    for (NodeId v : p.path) nodes.push_back(g.external_id(v));
    j["path"] = nodes;
    j["y"] = p.label ? 1 : 0;
    out << j.dump() << '\n';
  }
}

std::vector<PairPathInstance> read_pairs(const std::filesystem::path& path, const HeteroGraph& g) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<PairPathInstance> out;
  std::string line;
  for (std::size_t ln = 1; std::getline(in, line); ++ln) {
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      PairPathInstance p;
      p.paper = g.node(j.at("v").get<std::string>());
      p.author = g.node(j.at("u").get<std::string>());
      for (const auto& id : j.at("path")) p.path.push_back(g.node(id.get<std::string>()));
      p.label = j.at("y").get<int>() == 1;
      out.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string(), ln, e.what());
    }
  }
  return out;
}

}  // namespace tapem::walk
