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

// Serial reference vs OpenMP kernels: walk generation, batch gradients and
// evaluation scoring on a default-size synthetic graph.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include <CLI11.hpp>

#include "tapem/eval.hpp"
#include "tapem/objective.hpp"
#include "tapem/synthetic.hpp"
#include "tapem/walker.hpp"

namespace {

using namespace tapem;
using graph::NodeId;
using graph::NodeType;

double median_ms(int reps, const std::function<void()>& f) {
  std::vector<double> t;
  for (int i = 0; i < reps; ++i) {
    const auto start = std::chrono::steady_clock::now();
    f();
    t.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

void row(const char* name, double serial, double parallel) {
  std::printf("%-22s %12.2f %12.2f %9.2fx\n", name, serial, parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs parallel kernel timings"};
  int reps = 5;
  std::uint64_t seed = 1;
  app.add_option("--reps", reps, "Repetitions per kernel")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Synthetic graph seed");
  CLI11_PARSE(app, argc, argv);

  const auto [g, split] = graph::generate_synthetic(graph::SynthConfig{}, seed);
  const auto train_graph = g.restrict_to_papers(split.train);
  std::printf("threads %d\n%-22s %12s %12s %10s\n", omp_get_max_threads(), "kernel", "serial ms",
              "parallel ms", "speedup");

  const auto mp = walk::MetaPath::parse("APA");
  const walk::WalkOptions wo{5, 20, seed};
  row("walks", median_ms(reps, [&] { walk::generate_walks_serial(g, mp, wo); }),
      median_ms(reps, [&] { walk::generate_walks(g, mp, wo); }));

  train::TrainingConfig c;
  c.embedding_dim = 64;
  c.pair_dim = 64;
  c.pair_hidden = 64;
  c.classifier_hidden = 64;
  c.batch_size = 256;
  auto m = model::Model::create(model::ModelKind::Tapem, c.dims(), train_graph, seed);
  train::Trainer trainer(m, train_graph, split.train, c);
  train::ContextPathPool pool(trainer.instances());
  Rng rng = make_rng(seed, "bench");
  std::vector<train::BatchItem> items;
  for (std::size_t i = 0; i < c.batch_size; ++i) {
    const auto& inst = trainer.instances()[uniform_index(rng, trainer.instances().size())];
    train::BatchItem item;
    item.paper = inst.paper;
    item.author = inst.author;
    item.label = inst.label;
    item.path = &inst.path;
    for (auto k : train::sample_negative_paths(pool, 1, inst.paper, inst.author, rng))
      item.negatives.push_back(&trainer.instances()[k].path);
    item.dropout_seed = rng();
    items.push_back(std::move(item));
  }
  train::BatchWorkspace ws(m.params());
  auto batch = [&](train::Execution e) {
    return median_ms(reps, [&] { train::compute_batch(m, train_graph, items, c, true, e, ws); });
  };
  row("batch gradient (256)", batch(train::Execution::Serial), batch(train::Execution::Parallel));

  m.attach(g);
  std::vector<NodeId> papers(split.test.begin(), split.test.end());
  auto score = [&](bool parallel) {
    eval::EvalOptions o;
    o.parallel = parallel;
    return median_ms(reps, [&] { eval::rank_papers(m, g, papers, o); });
  };
  row("eval scoring", score(false), score(true));
  return 0;
}
