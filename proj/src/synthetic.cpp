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

#include "tapem/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>

#include "tapem/errors.hpp"
#include "tapem/rng.hpp"

namespace tapem::graph {

using json = nlohmann::json;

#define TAPEM_SYNTH_FIELDS(X)                                                             \
  X(authors) X(papers) X(venues) X(topics) X(vocab_size) X(tokens_per_abstract)          \
  X(min_authors_per_paper) X(max_authors_per_paper) X(activity_skew)                      \
  X(cross_topic_noise) X(citations_per_paper) X(signature_words) X(signature_rate)        \
  X(background_rate) X(topic_word_skew) X(year_start) X(year_end) X(split_year)

json SynthConfig::to_json() const {
  json j;
#define X(f) j[#f] = f;
  TAPEM_SYNTH_FIELDS(X)
#undef X
  return j;
}

SynthConfig SynthConfig::from_json(const json& j) {
  SynthConfig c;
  if (!j.is_object()) throw ConfigError("synthetic config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    try {
#define X(f)                                  \
  if (key == #f) {                            \
    c.f = it.value().get<decltype(c.f)>();    \
    continue;                                 \
  }
      TAPEM_SYNTH_FIELDS(X)
#undef X
    } catch (const json::exception& e) {
      throw ConfigError("synthetic config field '" + key + "': " + e.what());
    }
    throw ConfigError("synthetic config field '" + key + "' is not recognised");
  }
  c.validate();
  return c;
}

void SynthConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("synthetic config field '" + field + "': " + why);
  };
  if (authors == 0) fail("authors", "must be positive");
  if (papers < 4) fail("papers", "need at least 4 papers");
  if (venues == 0) fail("venues", "must be positive");
  if (topics == 0) fail("topics", "must be positive");
  if (topics > authors) fail("topics", "more topics than authors");
  if (topics > venues) fail("topics", "more topics than venues");
  if (min_authors_per_paper == 0) fail("min_authors_per_paper", "must be positive");
  if (max_authors_per_paper < min_authors_per_paper)
    fail("max_authors_per_paper", "smaller than min_authors_per_paper");
  if (max_authors_per_paper > authors) fail("max_authors_per_paper", "exceeds number of authors");
  if (tokens_per_abstract == 0) fail("tokens_per_abstract", "must be positive");
  const std::size_t background = vocab_size / 10;
  if (vocab_size < 10 || (vocab_size - background) / topics < 1)
    fail("vocab_size", "too small for the number of topics");
  if (signature_words > (vocab_size - background) / topics)
    fail("signature_words", "exceeds the per-topic vocabulary");
  if (activity_skew < 0) fail("activity_skew", "must be non-negative");
  if (topic_word_skew < 0) fail("topic_word_skew", "must be non-negative");
  for (auto [name, p] : {std::pair{"cross_topic_noise", cross_topic_noise},
                         std::pair{"signature_rate", signature_rate},
                         std::pair{"background_rate", background_rate}})
    if (p < 0 || p > 1) fail(name, "must lie in [0, 1]");
  if (signature_rate + background_rate > 1) fail("background_rate", "rates sum above 1");
  if (year_end < year_start) fail("year_end", "before year_start");
  if (split_year <= year_start || split_year > year_end)
    fail("split_year", "must lie in (year_start, year_end]");
}

namespace {

// Inverse-CDF sampler over fixed weights.
class Categorical {
 public:
  Categorical() = default;
  explicit Categorical(const std::vector<double>& weights) : cdf_(weights.size()) {
    std::partial_sum(weights.begin(), weights.end(), cdf_.begin());
  }
  std::size_t sample(Rng& rng) const {
    const double u = uniform_unit(rng) * cdf_.back();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }
  bool empty() const { return cdf_.empty(); }

 private:
  std::vector<double> cdf_;
};

std::vector<double> zipf_weights(std::size_t n, double s) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / std::pow(static_cast<double>(i + 1), s);
  return w;
}

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

std::string word(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "w%04zu", i);
  return buf;
}

}  // namespace

std::pair<HeteroGraph, CorpusSplit> generate_synthetic(const SynthConfig& c, std::uint64_t seed) {
  c.validate();
  Rng rng = make_rng(seed, "synthetic");

  // Topics and activity.
  std::vector<std::size_t> author_topic(c.authors), venue_topic(c.venues);
  {
    std::vector<std::size_t> order(c.authors);
    std::iota(order.begin(), order.end(), 0);
    shuffle(order, rng);
    for (std::size_t i = 0; i < c.authors; ++i) author_topic[order[i]] = i % c.topics;
  }
  for (std::size_t v = 0; v < c.venues; ++v) venue_topic[v] = v % c.topics;

  std::vector<double> activity(c.authors);
  {
    auto w = zipf_weights(c.authors, c.activity_skew);
    shuffle(w, rng);
    activity = w;
  }
  std::vector<std::vector<std::size_t>> topic_authors(c.topics), topic_venues(c.topics);
  for (std::size_t a = 0; a < c.authors; ++a) topic_authors[author_topic[a]].push_back(a);
  for (std::size_t v = 0; v < c.venues; ++v) topic_venues[venue_topic[v]].push_back(v);
  std::vector<Categorical> topic_author_dist(c.topics);
  for (std::size_t t = 0; t < c.topics; ++t) {
    std::vector<double> w;
    for (auto a : topic_authors[t]) w.push_back(activity[a]);
    topic_author_dist[t] = Categorical(w);
  }
  const Categorical any_author_dist(activity);

  // Vocabulary layout: a background slice, then one slice per topic.
  const std::size_t background = c.vocab_size / 10;
  const std::size_t per_topic = (c.vocab_size - background) / c.topics;
  auto topic_word = [&](std::size_t t, std::size_t i) { return background + t * per_topic + i; };
  const Categorical topic_word_dist(zipf_weights(per_topic, c.topic_word_skew));

  std::vector<std::vector<std::size_t>> signature(c.authors);
  for (std::size_t a = 0; a < c.authors; ++a) {
    std::vector<std::size_t> slice(per_topic);
    std::iota(slice.begin(), slice.end(), 0);
    for (std::size_t k = 0; k < c.signature_words; ++k) {
      std::size_t j = k + uniform_index(rng, per_topic - k);
      std::swap(slice[k], slice[j]);
      signature[a].push_back(topic_word(author_topic[a], slice[k]));
    }
  }

  // Papers, ordered by year so citations point backwards in time.
  std::vector<int> years(c.papers);
  for (auto& y : years)
    y = c.year_start + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(c.year_end - c.year_start + 1)));
  std::sort(years.begin(), years.end());

  struct Paper {
    std::size_t topic, venue;
    std::vector<std::size_t> authors;
    std::vector<std::size_t> cites;
    std::vector<std::string> tokens;
  };
  std::vector<Paper> papers(c.papers);
  // Every author leads at least one paper before activity sampling takes over.
  std::vector<std::vector<std::size_t>> unseen = topic_authors;
  for (auto& u : unseen) shuffle(u, rng);
  std::vector<std::vector<std::size_t>> topic_papers(c.topics);

  for (std::size_t i = 0; i < c.papers; ++i) {
    Paper& p = papers[i];
    p.topic = uniform_index(rng, c.topics);
    const auto& venues = topic_venues[p.topic];
    p.venue = uniform_unit(rng) < c.cross_topic_noise ? uniform_index(rng, c.venues)
                                                       : venues[uniform_index(rng, venues.size())];

    const std::size_t team = c.min_authors_per_paper +
                             uniform_index(rng, c.max_authors_per_paper - c.min_authors_per_paper + 1);
    auto& fresh = unseen[p.topic];
    if (!fresh.empty()) {
      p.authors.push_back(fresh.back());
      fresh.pop_back();
    }
    std::size_t attempts = 0;
    while (p.authors.size() < team) {
      std::size_t a;
      if (uniform_unit(rng) < c.cross_topic_noise || ++attempts > 50 * team)
        a = any_author_dist.sample(rng);
      else
        a = topic_authors[p.topic][topic_author_dist[p.topic].sample(rng)];
      if (std::find(p.authors.begin(), p.authors.end(), a) == p.authors.end()) p.authors.push_back(a);
    }

    // Citations to earlier papers, mostly from the same topic.
    for (std::size_t k = 0; k < c.citations_per_paper && i > 0; ++k) {
      const auto& same = topic_papers[p.topic];
      std::size_t target;
      if (!same.empty() && uniform_unit(rng) >= c.cross_topic_noise)
        target = same[uniform_index(rng, same.size())];
      else
        target = uniform_index(rng, i);
      if (std::find(p.cites.begin(), p.cites.end(), target) == p.cites.end())
        p.cites.push_back(target);
    }

    for (std::size_t k = 0; k < c.tokens_per_abstract; ++k) {
      const double r = uniform_unit(rng);
      std::size_t w;
      if (r < c.signature_rate && c.signature_words > 0) {
        const auto& sig = signature[p.authors[uniform_index(rng, p.authors.size())]];
        w = sig[uniform_index(rng, sig.size())];
      } else if (r < c.signature_rate + c.background_rate && background > 0) {
        w = uniform_index(rng, background);
      } else {
        w = topic_word(p.topic, topic_word_dist.sample(rng));
      }
      p.tokens.push_back(word(w));
    }
    topic_papers[p.topic].push_back(i);
  }

  GraphBuilder b;
  std::vector<NodeId> author_id(c.authors), paper_id(c.papers), venue_id(c.venues);
  for (std::size_t a = 0; a < c.authors; ++a)
    author_id[a] = b.add_node("a" + std::to_string(a), NodeType::Author);
  for (std::size_t i = 0; i < c.papers; ++i)
    paper_id[i] = b.add_node("p" + std::to_string(i), NodeType::Paper);
  for (std::size_t v = 0; v < c.venues; ++v)
    venue_id[v] = b.add_node("v" + std::to_string(v), NodeType::Venue);
  for (std::size_t i = 0; i < c.papers; ++i) {
    Paper& p = papers[i];
    for (auto a : p.authors) b.add_edge(author_id[a], paper_id[i], EdgeType::Writes);
    b.add_edge(paper_id[i], venue_id[p.venue], EdgeType::PublishesIn);
    for (auto t : p.cites) b.add_edge(paper_id[i], paper_id[t], EdgeType::Cites);
    b.set_abstract(paper_id[i], years[i], std::move(p.tokens));
  }
  HeteroGraph g = std::move(b).build();
  CorpusSplit split = temporal_split(g, c.split_year, seed);
  return {std::move(g), std::move(split)};
}

void write_dataset(const std::filesystem::path& dir, const HeteroGraph& graph,
                   const SynthConfig& config, std::uint64_t seed) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  auto paths = DatasetPaths::in(dir);
  save_graph(graph, paths.nodes, paths.edges, paths.abstracts);
  json meta;
  meta["generator"] = "planted-topic";
  meta["format_version"] = 1;
  meta["seed"] = seed;
  meta["split_year"] = config.split_year;
  meta["config"] = config.to_json();
  std::ofstream out(dir / "meta.json", std::ios::binary);
  if (!out) throw IoError("cannot write " + (dir / "meta.json").string());
  out << meta.dump(2) << '\n';
}

}  // namespace tapem::graph
