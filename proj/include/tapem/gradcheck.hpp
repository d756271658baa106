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

// Central finite-difference verification of analytic gradients.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "tapem/params.hpp"

namespace tapem::num {

struct LossEval {
  double value = 0.0;
  // Hash of every piecewise-linear branch taken (ReLU masks, active
  // hinges). Probes whose perturbation changes it straddle a kink.
  std::uint64_t pattern = 0;
};

// Evaluates the loss at the store's current values; when `grads` is non-null
// the analytic gradient is accumulated into it.
using LossFunction = std::function<LossEval(GradBuffer* grads)>;

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t probes = 0;
  std::size_t skipped_kinks = 0;
  std::string worst;
};

// Relative error |a - n| / max(|a|, |n|, floor); the floor keeps
// near-zero gradients on an absolute scale.
inline constexpr double kGradCheckFloor = 1e-5;

// Probes `probe_count` random coordinates spread over `params`; row-sparse
// parameters are probed only on rows the analytic pass touched.
GradCheckResult grad_check(const LossFunction& loss, ParamStore& store,
                           std::span<const ParamId> params, std::size_t probe_count,
                           double epsilon, Rng& rng);

}  // namespace tapem::num
