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

// Named parameter tensors with gradient buffers, Adam state and a
// versioned binary checkpoint format.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "tapem/numerics.hpp"

namespace tapem::num {

class ParamStore;
void adam_step(ParamStore& store, double learning_rate, double beta1, double beta2,
               double epsilon);

struct ParamId {
  std::uint32_t index = 0;
  bool operator==(const ParamId&) const = default;
};

// Gradient storage shaped like a ParamStore. Row-sparse parameters
// (embedding tables) keep dense storage but track which rows carry
// gradient, so zeroing, reduction and the optimizer touch only those rows.
class GradBuffer {
 public:
  Matrix& operator[](ParamId id) { return grads_[id.index]; }
  const Matrix& operator[](ParamId id) const { return grads_[id.index]; }

  void touch_row(ParamId id, Index row) {
    auto& flag = row_flag_[id.index];
    if (!flag[static_cast<std::size_t>(row)]) {
      flag[static_cast<std::size_t>(row)] = 1;
      rows_[id.index].push_back(row);
    }
  }
  bool row_sparse(ParamId id) const { return sparse_[id.index]; }
  std::span<const Index> touched_rows(ParamId id) const { return rows_[id.index]; }

  void zero();
  // this += other, in parameter order.
  void accumulate(const GradBuffer& other);
  std::size_t size() const { return grads_.size(); }

 private:
  friend class ParamStore;
  friend void adam_step(ParamStore&, double, double, double, double);
  std::vector<Matrix> grads_;
  std::vector<bool> sparse_;
  std::vector<std::vector<char>> row_flag_;
  std::vector<std::vector<Index>> rows_;
};

class ParamStore {
 public:
  ParamId add(std::string name, Matrix init, bool row_sparse = false);

  std::size_t size() const { return values_.size(); }
  std::size_t parameter_count() const;
  ParamId id(std::string_view name) const;
  std::optional<ParamId> find(std::string_view name) const;
  const std::string& name(ParamId id) const { return names_[id.index]; }
  bool row_sparse(ParamId id) const { return grads_.sparse_[id.index]; }

  Matrix& value(ParamId id) { return values_[id.index]; }
  const Matrix& value(ParamId id) const { return values_[id.index]; }

  GradBuffer& grads() { return grads_; }
  const GradBuffer& grads() const { return grads_; }
  void zero_grads() { grads_.zero(); }
  // Fresh zeroed buffer with this store's shapes.
  GradBuffer make_buffer() const;

  const Matrix& first_moment(ParamId id) const { return m_[id.index]; }
  const Matrix& second_moment(ParamId id) const { return v_[id.index]; }
  std::int64_t step() const { return step_; }

  bool same_values(const ParamStore& other) const;

 private:
  friend void adam_step(ParamStore&, double, double, double, double);
  friend void save_checkpoint(const std::filesystem::path&, const ParamStore&,
                              const nlohmann::json&);
  friend struct CheckpointReader;

  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<Matrix> values_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  GradBuffer grads_;
  std::int64_t step_ = 0;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam over the store's gradients. Row-sparse parameters
// update only touched rows. Gradients are left in place.
void adam_step(ParamStore& store, double learning_rate, double beta1, double beta2,
               double epsilon);
inline void adam_step(ParamStore& store, const AdamConfig& c) {
  adam_step(store, c.learning_rate, c.beta1, c.beta2, c.epsilon);
}

Matrix uniform_init(Index rows, Index cols, double bound, Rng& rng);
// U[-1/sqrt(fan_in), 1/sqrt(fan_in)] with fan_in = cols.
Matrix fan_in_init(Index rows, Index cols, Rng& rng);

struct Checkpoint {
  nlohmann::json meta;
  ParamStore params;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout: "TAPEMCKP", u32 version, u64 header length, JSON header (meta,
// parameter names and shapes, optimizer step), then per parameter the
// row-major values, first moment and second moment as little-endian f64.
void save_checkpoint(const std::filesystem::path& path, const ParamStore& store,
                     const nlohmann::json& meta);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace tapem::num
