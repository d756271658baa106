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

#include "tapem/params.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "tapem/errors.hpp"

namespace tapem::num {

void GradBuffer::zero() {
  for (std::size_t i = 0; i < grads_.size(); ++i) {
    if (!sparse_[i]) {
      grads_[i].setZero();
      continue;
    }
    for (Index r : rows_[i]) {
      grads_[i].row(r).setZero();
      row_flag_[i][static_cast<std::size_t>(r)] = 0;
    }
    rows_[i].clear();
  }
}

void GradBuffer::accumulate(const GradBuffer& other) {
  for (std::size_t i = 0; i < grads_.size(); ++i) {
    if (!sparse_[i]) {
      grads_[i] += other.grads_[i];
      continue;
    }
    const ParamId id{static_cast<std::uint32_t>(i)};
    for (Index r : other.rows_[i]) {
      touch_row(id, r);
      grads_[i].row(r) += other.grads_[i].row(r);
    }
  }
}

ParamId ParamStore::add(std::string name, Matrix init, bool row_sparse) {
  const auto idx = static_cast<std::uint32_t>(values_.size());
  if (!index_.emplace(name, idx).second)
    throw ConfigError("duplicate parameter name '" + name + "'");
  names_.push_back(std::move(name));
  m_.push_back(Matrix::Zero(init.rows(), init.cols()));
  v_.push_back(Matrix::Zero(init.rows(), init.cols()));
  grads_.grads_.push_back(Matrix::Zero(init.rows(), init.cols()));
  grads_.sparse_.push_back(row_sparse);
  grads_.row_flag_.emplace_back(row_sparse ? static_cast<std::size_t>(init.rows()) : 0, 0);
  grads_.rows_.emplace_back();
  values_.push_back(std::move(init));
  return {idx};
}

std::size_t ParamStore::parameter_count() const {
  std::size_t n = 0;
  for (const auto& v : values_) n += static_cast<std::size_t>(v.size());
  return n;
}

std::optional<ParamId> ParamStore::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return ParamId{it->second};
}

ParamId ParamStore::id(std::string_view name) const {
  auto p = find(name);
  if (!p) throw LookupError("unknown parameter '" + std::string(name) + "'");
  return *p;
}

GradBuffer ParamStore::make_buffer() const {
  GradBuffer b;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    b.grads_.push_back(Matrix::Zero(values_[i].rows(), values_[i].cols()));
    b.sparse_.push_back(grads_.sparse_[i]);
    b.row_flag_.emplace_back(grads_.sparse_[i] ? static_cast<std::size_t>(values_[i].rows()) : 0, 0);
    b.rows_.emplace_back();
  }
  return b;
}

bool ParamStore::same_values(const ParamStore& other) const {
  if (names_ != other.names_) return false;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (values_[i] != other.values_[i]) return false;
  return true;
}

void adam_step(ParamStore& store, double lr, double beta1, double beta2, double eps) {
  auto& g = store.grads_;
  for (std::size_t i = 0; i < store.values_.size(); ++i) {
    if (g.sparse_[i]) {
      for (Index r : g.rows_[i])
        if (!g.grads_[i].row(r).allFinite())
          throw NumericError("non-finite gradient in parameter '" + store.names_[i] + "' row " +
                             std::to_string(r));
    } else if (!g.grads_[i].allFinite()) {
      throw NumericError("non-finite gradient in parameter '" + store.names_[i] + "'");
    }
  }

  ++store.step_;
  const double t = static_cast<double>(store.step_);
  const double c1 = 1.0 - std::pow(beta1, t);
  const double c2 = 1.0 - std::pow(beta2, t);

  auto update = [&](auto&& theta, auto&& m, auto&& v, const auto& grad) {
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    theta.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };

  for (std::size_t i = 0; i < store.values_.size(); ++i) {
    if (g.sparse_[i]) {
      for (Index r : g.rows_[i])
        update(store.values_[i].row(r), store.m_[i].row(r), store.v_[i].row(r), g.grads_[i].row(r));
    } else {
      update(store.values_[i], store.m_[i], store.v_[i], g.grads_[i]);
    }
  }
}

Matrix uniform_init(Index rows, Index cols, double bound, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = (2.0 * uniform_unit(rng) - 1.0) * bound;
  return m;
}

Matrix fan_in_init(Index rows, Index cols, Rng& rng) {
  return uniform_init(rows, cols, 1.0 / std::sqrt(static_cast<double>(cols)), rng);
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr char kMagic[8] = {'T', 'A', 'P', 'E', 'M', 'C', 'K', 'P'};

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in, const std::string& what) {
  T v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
    throw IntegrityError("truncated checkpoint while reading " + what);
  return v;
}

void put_matrix(std::ostream& out, const Matrix& m) {
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
}

void get_matrix(std::istream& in, Matrix& m, const std::string& what) {
  if (!in.read(reinterpret_cast<char*>(m.data()),
               static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size()))))
    throw IntegrityError("truncated checkpoint while reading " + what);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ParamStore& store,
                     const nlohmann::json& meta) {
  nlohmann::json header;
  header["meta"] = meta;
  header["adam_step"] = store.step_;
  auto& params = header["params"] = nlohmann::json::array();
  for (std::size_t i = 0; i < store.values_.size(); ++i)
    params.push_back({{"name", store.names_[i]},
                      {"rows", store.values_[i].rows()},
                      {"cols", store.values_[i].cols()},
                      {"row_sparse", store.row_sparse(ParamId{static_cast<std::uint32_t>(i)})}});
  const std::string text = header.dump();

  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(kMagic, sizeof kMagic);
    put(out, kCheckpointVersion);
    put(out, static_cast<std::uint64_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (std::size_t i = 0; i < store.values_.size(); ++i) {
      put_matrix(out, store.values_[i]);
      put_matrix(out, store.m_[i]);
      put_matrix(out, store.v_[i]);
    }
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place: " + ec.message());
}

struct CheckpointReader {
  static Checkpoint read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path.string());
    char magic[8];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
      throw IntegrityError(path.string() + " is not a checkpoint");
    const auto version = get<std::uint32_t>(in, "version");
    if (version != kCheckpointVersion)
      throw IntegrityError("unsupported checkpoint version " + std::to_string(version));
    const auto len = get<std::uint64_t>(in, "header length");
    std::string text(len, '\0');
    if (!in.read(text.data(), static_cast<std::streamsize>(len)))
      throw IntegrityError("truncated checkpoint header");
    nlohmann::json header;
    try {
      header = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw IntegrityError(std::string("corrupt checkpoint header: ") + e.what());
    }
    Checkpoint ck;
    ck.meta = header.at("meta");
    ParamStore& s = ck.params;
    for (const auto& p : header.at("params")) {
      const auto name = p.at("name").get<std::string>();
      Matrix m(p.at("rows").get<Index>(), p.at("cols").get<Index>());
      auto id = s.add(name, m, p.at("row_sparse").get<bool>());
      get_matrix(in, s.values_[id.index], name);
      get_matrix(in, s.m_[id.index], name);
      get_matrix(in, s.v_[id.index], name);
    }
    s.step_ = header.at("adam_step").get<std::int64_t>();
    return ck;
  }
};

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return CheckpointReader::read(path);
}

}  // namespace tapem::num
