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

// Planted-topic academic network generator used as a desk-scale corpus.
//
// Every author and venue belongs to one topic. A paper picks a topic, a
// venue and a team of authors mostly from that topic (a fixed fraction of
// choices ignores the topic), and draws abstract tokens from a mixture of
// a topic unigram distribution, a shared background vocabulary and the
// signature words of its own authors. Every author appears at least once;
// further team slots follow a Zipf activity law.

#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>

#include <json.hpp>

#include "tapem/hetgraph.hpp"

namespace tapem::graph {

struct SynthConfig {
  std::size_t authors = 200;
  std::size_t papers = 500;
  std::size_t venues = 18;
  std::size_t topics = 4;
  std::size_t vocab_size = 1000;
  std::size_t tokens_per_abstract = 20;
  std::size_t min_authors_per_paper = 1;
  std::size_t max_authors_per_paper = 3;
  double activity_skew = 1.7;
  double cross_topic_noise = 0.1;
  std::size_t citations_per_paper = 2;
  std::size_t signature_words = 4;
  double signature_rate = 0.35;
  double background_rate = 0.15;
  double topic_word_skew = 1.0;
  int year_start = 2006;
  int year_end = 2015;
  int split_year = 2013;

  void validate() const;
  nlohmann::json to_json() const;
  // Unknown keys are rejected; missing keys keep their defaults.
  static SynthConfig from_json(const nlohmann::json& j);
};

std::pair<HeteroGraph, CorpusSplit> generate_synthetic(const SynthConfig& config,
                                                       std::uint64_t seed);

// Writes nodes.tsv, edges.tsv, abstracts.jsonl and meta.json into `dir`.
void write_dataset(const std::filesystem::path& dir, const HeteroGraph& graph,
                   const SynthConfig& config, std::uint64_t seed);

}  // namespace tapem::graph
