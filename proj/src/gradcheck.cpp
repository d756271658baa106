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

#include "tapem/gradcheck.hpp"

#include <cmath>

#include "tapem/errors.hpp"

namespace tapem::num {

GradCheckResult grad_check(const LossFunction& loss, ParamStore& store,
                           std::span<const ParamId> params, std::size_t probe_count,
                           double epsilon, Rng& rng) {
  GradCheckResult result;
  if (params.empty() || probe_count == 0) return result;

  GradBuffer analytic = store.make_buffer();
  const LossEval base = loss(&analytic);
  const LossEval again = loss(nullptr);
  if (again.value != base.value || again.pattern != base.pattern)
    throw ContractViolation("loss is not deterministic: " + std::to_string(base.value) + " vs " +
                            std::to_string(again.value));

  for (std::size_t probe = 0; probe < probe_count; ++probe) {
    const ParamId id = params[probe % params.size()];
    Matrix& value = store.value(id);
    Index row, col;
    if (store.row_sparse(id)) {
      auto rows = analytic.touched_rows(id);
      if (rows.empty()) continue;
      row = rows[uniform_index(rng, rows.size())];
    } else {
      row = static_cast<Index>(uniform_index(rng, static_cast<std::uint64_t>(value.rows())));
    }
    col = static_cast<Index>(uniform_index(rng, static_cast<std::uint64_t>(value.cols())));

    const double saved = value(row, col);
    value(row, col) = saved + epsilon;
    const LossEval plus = loss(nullptr);
    value(row, col) = saved - epsilon;
    const LossEval minus = loss(nullptr);
    value(row, col) = saved;

    if (plus.pattern != base.pattern || minus.pattern != base.pattern) {
      ++result.skipped_kinks;
      continue;
    }
    const double numeric = (plus.value - minus.value) / (2.0 * epsilon);
    const double a = analytic[id](row, col);
    const double denom = std::max({std::abs(a), std::abs(numeric), kGradCheckFloor});
    const double rel = std::abs(a - numeric) / denom;
    ++result.probes;
    if (rel > result.max_relative_error || result.worst.empty()) {
      if (rel >= result.max_relative_error) {
        result.max_relative_error = rel;
        result.worst = store.name(id) + "(" + std::to_string(row) + "," + std::to_string(col) +
                       ") analytic=" + std::to_string(a) + " numeric=" + std::to_string(numeric);
      }
    }
  }
  return result;
}

}  // namespace tapem::num
