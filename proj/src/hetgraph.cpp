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

#include "tapem/hetgraph.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "tapem/errors.hpp"
#include "tapem/rng.hpp"

namespace tapem::graph {

using json = nlohmann::json;

std::string_view to_string(NodeType t) {
  switch (t) {
    case NodeType::Author: return "author";
    case NodeType::Paper: return "paper";
    case NodeType::Venue: return "venue";
  }
  return "?";
}

std::string_view to_string(EdgeType t) {
  switch (t) {
    case EdgeType::Writes: return "writes";
    case EdgeType::Cites: return "cites";
    case EdgeType::PublishesIn: return "venue";
  }
  return "?";
}

char type_letter(NodeType t) {
  switch (t) {
    case NodeType::Author: return 'A';
    case NodeType::Paper: return 'P';
    case NodeType::Venue: return 'V';
  }
  return '?';
}

std::optional<NodeType> parse_node_type(std::string_view s) {
  if (s == "author") return NodeType::Author;
  if (s == "paper") return NodeType::Paper;
  if (s == "venue") return NodeType::Venue;
  return std::nullopt;
}

std::optional<NodeType> node_type_from_letter(char c) {
  switch (c) {
    case 'A': return NodeType::Author;
    case 'P': return NodeType::Paper;
    case 'V': return NodeType::Venue;
    default: return std::nullopt;
  }
}

std::optional<EdgeType> parse_edge_type(std::string_view s) {
  if (s == "writes") return EdgeType::Writes;
  if (s == "cites") return EdgeType::Cites;
  if (s == "venue") return EdgeType::PublishesIn;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary() : tokens_{std::string(kUnknownToken)} {
  index_.emplace(tokens_[0], kUnknown);
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& documents,
                             std::size_t min_count) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& doc : documents)
    for (const auto& tok : doc) ++counts[tok];

  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [tok, n] : counts)
    if (n >= min_count && tok != kUnknownToken) kept.emplace_back(tok, n);
  // Frequency descending, then lexicographic, for a stable id assignment.
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  std::vector<std::string> tokens{std::string(kUnknownToken)};
  tokens.reserve(kept.size() + 1);
  for (auto& [tok, n] : kept) tokens.push_back(tok);
  return from_tokens(std::move(tokens));
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  if (tokens.empty() || tokens[0] != kUnknownToken)
    throw IntegrityError("vocabulary must start with the unknown token");
  Vocabulary v;
  v.tokens_ = std::move(tokens);
  v.index_.clear();
  for (TokenId i = 0; i < v.tokens_.size(); ++i) {
    if (!v.index_.emplace(v.tokens_[i], i).second)
      throw IntegrityError("duplicate vocabulary token '" + v.tokens_[i] + "'");
  }
  return v;
}

TokenId Vocabulary::lookup(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnknown : it->second;
}

// ---------------------------------------------------------------------------
// HeteroGraph

void HeteroGraph::check_node(NodeId v) const {
  if (v >= types_.size()) throw LookupError("unknown node id " + std::to_string(v));
}

void HeteroGraph::check_paper(NodeId v) const {
  check_node(v);
  if (types_[v] != NodeType::Paper)
    throw TypeError("node " + external_[v] + " is a " + std::string(to_string(types_[v])) +
                    ", expected paper");
}

NodeType HeteroGraph::type(NodeId v) const {
  check_node(v);
  return types_[v];
}

const std::string& HeteroGraph::external_id(NodeId v) const {
  check_node(v);
  return external_[v];
}

std::optional<NodeId> HeteroGraph::find(std::string_view external) const {
  auto it = index_.find(std::string(external));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeId HeteroGraph::node(std::string_view external) const {
  auto v = find(external);
  if (!v) throw LookupError("unknown node '" + std::string(external) + "'");
  return *v;
}

std::span<const NodeId> HeteroGraph::typed_neighbors(NodeId v, NodeType t) const {
  check_node(v);
  return adjacency_[static_cast<std::size_t>(t)].row(v);
}

std::span<const NodeId> HeteroGraph::cited_by(NodeId paper) const {
  check_paper(paper);
  return cited_by_.row(paper);
}

bool HeteroGraph::has_authorship(NodeId paper, NodeId author) const {
  check_paper(paper);
  check_node(author);
  if (types_[author] != NodeType::Author)
    throw TypeError("node " + external_[author] + " is a " +
                    std::string(to_string(types_[author])) + ", expected author");
  auto row = adjacency_[static_cast<std::size_t>(NodeType::Author)].row(paper);
  return std::binary_search(row.begin(), row.end(), author);
}

int HeteroGraph::year(NodeId paper) const {
  check_paper(paper);
  return years_[paper];
}

std::span<const TokenId> HeteroGraph::abstract(NodeId paper) const {
  check_paper(paper);
  return tokens_[paper];
}

const std::vector<std::string>& HeteroGraph::abstract_text(NodeId paper) const {
  check_paper(paper);
  return text_[paper];
}

void HeteroGraph::build_adjacency() {
  const std::size_t n = types_.size();
  std::array<std::vector<std::vector<NodeId>>, kNodeTypeCount> lists;
  for (auto& l : lists) l.assign(n, {});
  std::vector<std::vector<NodeId>> citing(n);

  for (const Edge& e : edges_) {
    const NodeType ts = types_[e.src], td = types_[e.dst];
    if (e.type == EdgeType::Cites) {
      lists[static_cast<std::size_t>(td)][e.src].push_back(e.dst);
      citing[e.dst].push_back(e.src);
    } else {
      lists[static_cast<std::size_t>(td)][e.src].push_back(e.dst);
      lists[static_cast<std::size_t>(ts)][e.dst].push_back(e.src);
    }
  }

  auto compress = [n](std::vector<std::vector<NodeId>>& rows) {
    Adjacency adj;
    adj.offsets.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) {
      auto& r = rows[v];
      std::sort(r.begin(), r.end());
      r.erase(std::unique(r.begin(), r.end()), r.end());
      adj.offsets[v + 1] = adj.offsets[v] + r.size();
    }
    adj.targets.reserve(adj.offsets[n]);
    for (auto& r : rows) adj.targets.insert(adj.targets.end(), r.begin(), r.end());
    return adj;
  };
  for (std::size_t t = 0; t < kNodeTypeCount; ++t) adjacency_[t] = compress(lists[t]);
  cited_by_ = compress(citing);
}

HeteroGraph HeteroGraph::restrict_to_papers(std::span<const NodeId> papers) const {
  std::vector<bool> keep(num_nodes(), true);
  for (NodeId p : nodes_of_type(NodeType::Paper)) keep[p] = false;
  for (NodeId p : papers) {
    check_paper(p);
    keep[p] = true;
  }
  HeteroGraph g = *this;
  g.edges_.clear();
  for (const Edge& e : edges_)
    if (keep[e.src] && keep[e.dst]) g.edges_.push_back(e);
  g.build_adjacency();
  return g;
}

bool HeteroGraph::operator==(const HeteroGraph& o) const {
  return types_ == o.types_ && external_ == o.external_ && edges_ == o.edges_ &&
         years_ == o.years_ && text_ == o.text_ && tokens_ == o.tokens_ && vocab_ == o.vocab_;
}

// ---------------------------------------------------------------------------
// GraphBuilder

NodeId GraphBuilder::add_node(std::string external, NodeType type) {
  auto& g = graph_;
  const auto id = static_cast<NodeId>(g.types_.size());
  if (!g.index_.emplace(external, id).second)
    throw IntegrityError("duplicate node id '" + external + "'");
  g.types_.push_back(type);
  g.external_.push_back(std::move(external));
  g.years_.push_back(0);
  g.text_.emplace_back();
  has_abstract_.push_back(false);
  return id;
}

void GraphBuilder::add_edge(NodeId src, NodeId dst, EdgeType type) {
  auto& g = graph_;
  const std::size_t n = g.types_.size();
  if (src >= n) throw IntegrityError("edge endpoint " + std::to_string(src) + " does not exist");
  if (dst >= n) throw IntegrityError("edge endpoint " + std::to_string(dst) + " does not exist");
  NodeType ts = g.types_[src], td = g.types_[dst];
  auto bad = [&] {
    return IntegrityError("edge " + g.external_[src] + " -> " + g.external_[dst] + " of type " +
                          std::string(to_string(type)) + " joins a " +
                          std::string(to_string(ts)) + " and a " + std::string(to_string(td)));
  };
  switch (type) {
    case EdgeType::Writes:
      if (ts == NodeType::Paper && td == NodeType::Author) std::swap(src, dst), std::swap(ts, td);
      if (ts != NodeType::Author || td != NodeType::Paper) throw bad();
      break;
    case EdgeType::Cites:
      if (ts != NodeType::Paper || td != NodeType::Paper || src == dst) throw bad();
      break;
    case EdgeType::PublishesIn:
      if (ts == NodeType::Venue && td == NodeType::Paper) std::swap(src, dst), std::swap(ts, td);
      if (ts != NodeType::Paper || td != NodeType::Venue) throw bad();
      break;
  }
  g.edges_.push_back({src, dst, type});
}

void GraphBuilder::set_abstract(NodeId paper, int year, std::vector<std::string> tokens) {
  auto& g = graph_;
  if (paper >= g.types_.size())
    throw IntegrityError("abstract for unknown node " + std::to_string(paper));
  if (g.types_[paper] != NodeType::Paper)
    throw IntegrityError("abstract attached to non-paper node '" + g.external_[paper] + "'");
  if (tokens.empty())
    throw IntegrityError("paper '" + g.external_[paper] + "' has an empty abstract");
  g.years_[paper] = year;
  g.text_[paper] = std::move(tokens);
  has_abstract_[paper] = true;
}

HeteroGraph GraphBuilder::build(std::size_t vocab_min_count) && {
  graph_.vocab_ = Vocabulary::build(graph_.text_, vocab_min_count);
  return finish();
}

HeteroGraph GraphBuilder::build(Vocabulary vocab) && {
  graph_.vocab_ = std::move(vocab);
  return finish();
}

HeteroGraph GraphBuilder::finish() {
  auto& g = graph_;
  const std::size_t n = g.types_.size();
  for (NodeId v = 0; v < n; ++v) {
    if (g.types_[v] == NodeType::Paper && !has_abstract_[v])
      throw IntegrityError("paper '" + g.external_[v] + "' has no abstract");
    g.by_type_[static_cast<std::size_t>(g.types_[v])].push_back(v);
  }
  g.tokens_.assign(n, {});
  for (NodeId v = 0; v < n; ++v) {
    g.tokens_[v].reserve(g.text_[v].size());
    for (const auto& tok : g.text_[v]) g.tokens_[v].push_back(g.vocab_.lookup(tok));
  }
  g.build_adjacency();
  HeteroGraph out = std::move(g);
  g = HeteroGraph{};
  has_abstract_.clear();
  return out;
}

// ---------------------------------------------------------------------------
// File formats

DatasetPaths DatasetPaths::in(const std::filesystem::path& dir) {
  return {dir / "nodes.tsv", dir / "edges.tsv", dir / "abstracts.jsonl"};
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::ifstream open_input(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError("cannot open " + p.string());
  return in;
}

bool skip_line(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line.empty() || line[0] == '#';
}

struct RawEdge {
  std::string src, dst;
  EdgeType type;
  std::size_t line;
};

struct RawAbstract {
  std::string paper;
  int year;
  std::vector<std::string> tokens;
  std::size_t line;
};

std::string json_id(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw std::invalid_argument("id must be a string or integer");
}

}  // namespace

HeteroGraph load_graph(const std::filesystem::path& nodes_path,
                       const std::filesystem::path& edges_path,
                       const std::filesystem::path& abstracts_path, const LoadOptions& options) {
  std::vector<std::pair<std::string, NodeType>> nodes;
  {
    auto in = open_input(nodes_path);
    std::string line;
    for (std::size_t ln = 1; std::getline(in, line); ++ln) {
      if (skip_line(line)) continue;
      auto cols = split_tabs(line);
      if (cols.size() != 2 || cols[0].empty())
        throw ParseError(nodes_path.string(), ln, "expected 'id<TAB>type'");
      auto t = parse_node_type(cols[1]);
      if (!t) throw ParseError(nodes_path.string(), ln, "unknown node type '" + cols[1] + "'");
      nodes.emplace_back(std::move(cols[0]), *t);
    }
  }

  std::vector<RawEdge> edges;
  {
    auto in = open_input(edges_path);
    std::string line;
    for (std::size_t ln = 1; std::getline(in, line); ++ln) {
      if (skip_line(line)) continue;
      auto cols = split_tabs(line);
      if (cols.size() != 3 || cols[0].empty() || cols[1].empty())
        throw ParseError(edges_path.string(), ln, "expected 'src<TAB>dst<TAB>etype'");
      auto t = parse_edge_type(cols[2]);
      if (!t) throw ParseError(edges_path.string(), ln, "unknown edge type '" + cols[2] + "'");
      edges.push_back({std::move(cols[0]), std::move(cols[1]), *t, ln});
    }
  }

  std::vector<RawAbstract> abstracts;
  {
    auto in = open_input(abstracts_path);
    std::string line;
    for (std::size_t ln = 1; std::getline(in, line); ++ln) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      try {
        auto j = json::parse(line);
        RawAbstract a{json_id(j.at("paper")), j.at("year").get<int>(),
                      j.at("tokens").get<std::vector<std::string>>(), ln};
        abstracts.push_back(std::move(a));
      } catch (const json::exception& e) {
        throw ParseError(abstracts_path.string(), ln, e.what());
      } catch (const std::invalid_argument& e) {
        throw ParseError(abstracts_path.string(), ln, e.what());
      }
    }
  }

  std::unordered_set<std::string> dropped;
  if (options.min_venue_papers > 0) {
    std::unordered_map<std::string, NodeType> types(nodes.begin(), nodes.end());
    std::map<std::string, std::size_t> venue_size;
    std::unordered_map<std::string, std::string> paper_venue;
    for (const auto& e : edges) {
      if (e.type != EdgeType::PublishesIn) continue;
      auto ts = types.find(e.src);
      bool src_is_paper = ts != types.end() && ts->second == NodeType::Paper;
      const std::string& paper = src_is_paper ? e.src : e.dst;
      const std::string& venue = src_is_paper ? e.dst : e.src;
      ++venue_size[venue];
      paper_venue[paper] = venue;
    }
    for (const auto& [paper, venue] : paper_venue)
      if (venue_size[venue] < options.min_venue_papers) dropped.insert(paper);
  }

  GraphBuilder builder;
  for (auto& [id, t] : nodes)
    if (!dropped.count(id)) builder.add_node(id, t);
  for (const auto& e : edges) {
    if (dropped.count(e.src) || dropped.count(e.dst)) continue;
    auto s = builder.find(e.src), d = builder.find(e.dst);
    if (!s) throw IntegrityError("edge at line " + std::to_string(e.line) +
                                 " references unknown node '" + e.src + "'");
    if (!d) throw IntegrityError("edge at line " + std::to_string(e.line) +
                                 " references unknown node '" + e.dst + "'");
    builder.add_edge(*s, *d, e.type);
  }
  for (auto& a : abstracts) {
    if (dropped.count(a.paper)) continue;
    auto p = builder.find(a.paper);
    if (!p) throw IntegrityError("abstract at line " + std::to_string(a.line) +
                                 " references unknown paper '" + a.paper + "'");
    builder.set_abstract(*p, a.year, std::move(a.tokens));
  }
  return std::move(builder).build(options.vocab_min_count);
}

HeteroGraph load_dataset(const std::filesystem::path& dir, const LoadOptions& options) {
  auto p = DatasetPaths::in(dir);
  return load_graph(p.nodes, p.edges, p.abstracts, options);
}

void save_graph(const HeteroGraph& graph, const std::filesystem::path& nodes_path,
                const std::filesystem::path& edges_path,
                const std::filesystem::path& abstracts_path) {
  auto open_output = [](const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    return out;
  };
  {
    auto out = open_output(nodes_path);
    for (NodeId v = 0; v < graph.num_nodes(); ++v)
      out << graph.external_id(v) << '\t' << to_string(graph.type(v)) << '\n';
  }
  {
    auto out = open_output(edges_path);
    for (const Edge& e : graph.edges())
      out << graph.external_id(e.src) << '\t' << graph.external_id(e.dst) << '\t'
          << to_string(e.type) << '\n';
  }
  {
    auto out = open_output(abstracts_path);
    for (NodeId p : graph.nodes_of_type(NodeType::Paper)) {
      json j;
      const auto& ext = graph.external_id(p);
      const bool numeric = !ext.empty() && ext.size() < 18 &&
                           std::all_of(ext.begin(), ext.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
                           (ext == "0" || ext[0] != '0');
      if (numeric)
        j["paper"] = std::stoll(ext);
      else
        j["paper"] = ext;
      j["year"] = graph.year(p);
      j["tokens"] = graph.abstract_text(p);
      out << j.dump() << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Splits

CorpusSplit temporal_split(const HeteroGraph& graph, int split_year, std::uint64_t seed) {
  CorpusSplit split;
  split.split_year = split_year;
  std::vector<NodeId> later;
  for (NodeId p : graph.nodes_of_type(NodeType::Paper)) {
    if (graph.year(p) < split_year)
      split.train.push_back(p);
    else
      later.push_back(p);
  }
  if (split.train.empty())
    throw ConfigError("split year " + std::to_string(split_year) + " leaves no training papers");
  if (later.size() < 2)
    throw ConfigError("split year " + std::to_string(split_year) +
                      " leaves fewer than two papers for validation and test");

  Rng rng = make_rng(seed, "temporal_split");
  for (std::size_t i = later.size(); i > 1; --i)
    std::swap(later[i - 1], later[uniform_index(rng, i)]);
  const std::size_t n_val = (later.size() + 1) / 2;
  split.validation.assign(later.begin(), later.begin() + static_cast<std::ptrdiff_t>(n_val));
  split.test.assign(later.begin() + static_cast<std::ptrdiff_t>(n_val), later.end());
  std::sort(split.validation.begin(), split.validation.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<std::size_t> publication_counts(const HeteroGraph& graph,
                                            std::span<const NodeId> papers) {
  std::vector<std::size_t> counts(graph.num_nodes(), 0);
  for (NodeId p : papers)
    for (NodeId a : graph.typed_neighbors(p, NodeType::Author)) ++counts[a];
  return counts;
}

}  // namespace tapem::graph
