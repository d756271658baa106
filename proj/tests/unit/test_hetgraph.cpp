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

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "tapem/errors.hpp"
#include "tapem/hetgraph.hpp"
#include "tapem/io.hpp"
#include "tapem/synthetic.hpp"
#include "test_util.hpp"

namespace tapem::graph {
namespace {

using testing::TempDir;
using testing::write_text;

// Authors a1..a3, papers p1..p7 (p1, p3, p7 written by a1), venue v1.
HeteroGraph small_graph() {
  GraphBuilder b;
  for (const char* a : {"a1", "a2", "a3"}) b.add_node(a, NodeType::Author);
  for (int i = 1; i <= 7; ++i) b.add_node("p" + std::to_string(i), NodeType::Paper);
  b.add_node("v1", NodeType::Venue);
  auto id = [&](const char* s) { return *b.find(s); };
  for (const char* p : {"p7", "p1", "p3"}) b.add_edge(id("a1"), id(p), EdgeType::Writes);
  b.add_edge(id("p1"), id("a2"), EdgeType::Writes);
  b.add_edge(id("p2"), id("p1"), EdgeType::Cites);
  b.add_edge(id("p1"), id("v1"), EdgeType::PublishesIn);
  for (int i = 1; i <= 7; ++i)
    b.set_abstract(*b.find("p" + std::to_string(i)), 2000 + i, {"graph", "walk", "p" + std::to_string(i)});
  return std::move(b).build(1);
}

std::vector<std::string> externals(const HeteroGraph& g, std::span<const NodeId> ids) {
  std::vector<std::string> out;
  for (auto v : ids) out.push_back(g.external_id(v));
  return out;
}

TEST(HeteroGraph, TypedNeighborsAreSorted) {
  auto g = small_graph();
  EXPECT_EQ(externals(g, g.typed_neighbors(g.node("a1"), NodeType::Paper)),
            (std::vector<std::string>{"p1", "p3", "p7"}));
}

TEST(HeteroGraph, EmptyNeighborhoods) {
  auto g = small_graph();
  EXPECT_TRUE(g.typed_neighbors(g.node("p3"), NodeType::Venue).empty());
  EXPECT_TRUE(g.typed_neighbors(g.node("v1"), NodeType::Author).empty());
}

TEST(HeteroGraph, UnknownNodeIsLookupError) {
  auto g = small_graph();
  EXPECT_THROW(g.typed_neighbors(static_cast<NodeId>(g.num_nodes()), NodeType::Paper), LookupError);
  EXPECT_THROW(g.node("nobody"), LookupError);
}

TEST(HeteroGraph, Authorship) {
  auto g = small_graph();
  EXPECT_TRUE(g.has_authorship(g.node("p1"), g.node("a2")));
  EXPECT_FALSE(g.has_authorship(g.node("p3"), g.node("a2")));
  EXPECT_THROW(g.has_authorship(g.node("p1"), g.node("p1")), TypeError);
}

TEST(HeteroGraph, CitationsAreDirected) {
  auto g = small_graph();
  EXPECT_EQ(externals(g, g.typed_neighbors(g.node("p2"), NodeType::Paper)),
            std::vector<std::string>{"p1"});
  EXPECT_TRUE(g.typed_neighbors(g.node("p1"), NodeType::Paper).empty());
  EXPECT_EQ(externals(g, g.cited_by(g.node("p1"))), std::vector<std::string>{"p2"});
}

TEST(HeteroGraph, AdjacencySymmetryAndTypeConsistency) {
  auto g = generate_synthetic(SynthConfig{}, 3).first;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    for (auto t : {NodeType::Author, NodeType::Paper, NodeType::Venue}) {
      auto nb = g.typed_neighbors(v, t);
      EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
      for (auto u : nb) {
        EXPECT_EQ(g.type(u), t);
        if (!(g.type(v) == NodeType::Paper && t == NodeType::Paper)) {
          auto back = g.typed_neighbors(u, g.type(v));
          EXPECT_TRUE(std::binary_search(back.begin(), back.end(), v));
        }
      }
    }
  }
  for (auto a : g.nodes_of_type(NodeType::Author))
    for (auto p : g.typed_neighbors(a, NodeType::Paper)) EXPECT_TRUE(g.has_authorship(p, a));
}

TEST(Vocabulary, RareTokensMapToUnknown) {
  auto v = Vocabulary::build({{"a", "a", "b"}, {"a", "b", "c"}, {"b"}}, 3);
  EXPECT_EQ(v.token(Vocabulary::kUnknown), "<unk>");
  EXPECT_NE(v.lookup("a"), Vocabulary::kUnknown);
  EXPECT_NE(v.lookup("b"), Vocabulary::kUnknown);
  EXPECT_EQ(v.lookup("c"), Vocabulary::kUnknown);
  EXPECT_EQ(v.lookup("never"), Vocabulary::kUnknown);
  EXPECT_EQ(v.size(), 3u);
}

class LoadGraph : public ::testing::Test {
 protected:
  void write(std::string_view nodes, std::string_view edges, std::string_view abstracts) {
    write_text(dir / "nodes.tsv", nodes);
    write_text(dir / "edges.tsv", edges);
    write_text(dir / "abstracts.jsonl", abstracts);
  }
  HeteroGraph load() { return load_dataset(dir.path(), {.vocab_min_count = 1}); }
  TempDir dir;
};

TEST_F(LoadGraph, TwoAuthorsOnePaper) {
  write("a1\tauthor\na2\tauthor\np1\tpaper\n", "a1\tp1\twrites\na2\tp1\twrites\n",
        R"({"paper": "p1", "year": 2010, "tokens": ["x", "y"]})" "\n");
  auto g = load();
  EXPECT_EQ(g.typed_neighbors(g.node("p1"), NodeType::Author).size(), 2u);
  EXPECT_EQ(g.year(g.node("p1")), 2010);
  EXPECT_EQ(g.abstract(g.node("p1")).size(), 2u);
}

TEST_F(LoadGraph, DanglingEdgeNamesTheId) {
  write("a1\tauthor\np1\tpaper\n", "a1\tp1\twrites\nghost\tp1\twrites\n",
        R"({"paper": "p1", "year": 2010, "tokens": ["x"]})" "\n");
  try {
    load();
    FAIL() << "expected IntegrityError";
  } catch (const IntegrityError& e) {
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
  }
}

TEST_F(LoadGraph, EmptyEdgeFile) {
  write("a1\tauthor\np1\tpaper\n", "", R"({"paper": "p1", "year": 2010, "tokens": ["x"]})" "\n");
  EXPECT_TRUE(load().edges().empty());
}

TEST_F(LoadGraph, MalformedLineReportsLineNumber) {
  write("a1\tauthor\np1\tpaper\n", "a1\tp1\twrites\na1 p1\n",
        R"({"paper": "p1", "year": 2010, "tokens": ["x"]})" "\n");
  try {
    load();
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 2u);
  }
}

TEST_F(LoadGraph, PaperWithoutAbstract) {
  write("a1\tauthor\np1\tpaper\np2\tpaper\n", "a1\tp1\twrites\n",
        R"({"paper": "p1", "year": 2010, "tokens": ["x"]})" "\n");
  EXPECT_THROW(load(), IntegrityError);
}

TEST_F(LoadGraph, SaveLoadRoundTrip) {
  auto g = generate_synthetic(SynthConfig{}, 5).first;
  save_graph(g, dir / "nodes.tsv", dir / "edges.tsv", dir / "abstracts.jsonl");
  auto back = load_dataset(dir.path());
  EXPECT_TRUE(back == g);
}

TEST(TemporalSplit, HalvesPostSplitPapers) {
  GraphBuilder b;
  for (int i = 0; i < 10; ++i) {
    auto p = b.add_node("p" + std::to_string(i), NodeType::Paper);
    b.set_abstract(p, i < 6 ? 2010 : 2014, {"t"});
  }
  auto g = std::move(b).build(1);
  auto s = temporal_split(g, 2013, 7);
  EXPECT_EQ(s.train.size(), 6u);
  EXPECT_EQ(s.validation.size(), 2u);
  EXPECT_EQ(s.test.size(), 2u);
  std::set<NodeId> all(s.train.begin(), s.train.end());
  all.insert(s.validation.begin(), s.validation.end());
  all.insert(s.test.begin(), s.test.end());
  EXPECT_EQ(all.size(), 10u);
}

TEST(TemporalSplit, OddRemainderIsDeterministic) {
  GraphBuilder b;
  for (int i = 0; i < 8; ++i) {
    auto p = b.add_node("p" + std::to_string(i), NodeType::Paper);
    b.set_abstract(p, i < 3 ? 2010 : 2015, {"t"});
  }
  auto g = std::move(b).build(1);
  auto s1 = temporal_split(g, 2013, 11);
  auto s2 = temporal_split(g, 2013, 11);
  EXPECT_EQ(s1.validation.size() + s1.test.size(), 5u);
  EXPECT_LE(std::max(s1.validation.size(), s1.test.size()) -
                std::min(s1.validation.size(), s1.test.size()),
            1u);
  EXPECT_EQ(s1.validation, s2.validation);
  EXPECT_EQ(s1.test, s2.test);
}

TEST(TemporalSplit, AllPapersBeforeSplitIsConfigError) {
  GraphBuilder b;
  for (int i = 0; i < 4; ++i) b.set_abstract(b.add_node("p" + std::to_string(i), NodeType::Paper), 2001, {"t"});
  auto g = std::move(b).build(1);
  EXPECT_THROW(temporal_split(g, 2013, 0), ConfigError);
}

TEST(Synthetic, NodeCountsMatchConfig) {
  SynthConfig c;
  auto [g, split] = generate_synthetic(c, 1);
  EXPECT_EQ(g.count(NodeType::Author), 200u);
  EXPECT_EQ(g.count(NodeType::Paper), 500u);
  EXPECT_EQ(g.count(NodeType::Venue), 18u);
  EXPECT_FALSE(split.train.empty());
  EXPECT_FALSE(split.test.empty());
}

TEST(Synthetic, SameSeedSameFiles) {
  TempDir a, b;
  SynthConfig c;
  auto g1 = generate_synthetic(c, 9).first;
  auto g2 = generate_synthetic(c, 9).first;
  write_dataset(a.path(), g1, c, 9);
  write_dataset(b.path(), g2, c, 9);
  for (const char* f : {"nodes.tsv", "edges.tsv", "abstracts.jsonl", "meta.json"})
    EXPECT_EQ(io::sha256_file(a / f), io::sha256_file(b / f)) << f;
}

TEST(Synthetic, InfeasibleConfigRejected) {
  SynthConfig c;
  c.authors = 2;
  c.max_authors_per_paper = 3;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(SynthConfig::from_json({{"authros", 10}}), ConfigError);
}

// The generated activity distribution must leave most authors with few
// papers; measured directly on the generated edges for several seeds.
TEST(Synthetic, MostAuthorsAreInactive) {
  for (std::uint64_t seed : {0, 1, 2, 3, 4}) {
    auto g = generate_synthetic(SynthConfig{}, seed).first;
    std::size_t few = 0, none = 0;
    for (auto a : g.nodes_of_type(NodeType::Author)) {
      const auto n = g.typed_neighbors(a, NodeType::Paper).size();
      few += n <= 5;
      none += n == 0;
    }
    const double share = static_cast<double>(few) / static_cast<double>(g.count(NodeType::Author));
    EXPECT_GE(share, 0.85) << "seed " << seed;
    EXPECT_EQ(none, 0u) << "seed " << seed;
  }
}

TEST(PublicationCounts, CountsOnlyGivenPapers) {
  auto g = small_graph();
  std::vector<NodeId> papers{g.node("p1"), g.node("p3")};
  auto counts = publication_counts(g, papers);
  EXPECT_EQ(counts[g.node("a1")], 2u);
  EXPECT_EQ(counts[g.node("a2")], 1u);
  EXPECT_EQ(counts[g.node("a3")], 0u);
}

}  // namespace
}  // namespace tapem::graph
