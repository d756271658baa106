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

#include "tapem/numerics.hpp"

#include "tapem/errors.hpp"

namespace tapem::num {

std::string shape_of(const Matrix& m) {
  return "[" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + "]";
}

std::string shape_of(const Vector& v) { return "[" + std::to_string(v.size()) + "]"; }

namespace {

void same_size(const Vector& a, const Vector& b, const char* op) {
  if (a.size() != b.size())
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_of(a) + " vs " + shape_of(b));
}

}  // namespace

Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size())
    throw ShapeError("matvec: shape mismatch " + shape_of(a) + " vs " + shape_of(x));
  return a * x;
}

Matrix outer(const Vector& a, const Vector& b) { return a * b.transpose(); }

Vector hadamard(const Vector& a, const Vector& b) {
  same_size(a, b, "hadamard");
  return a.cwiseProduct(b);
}

Vector add(const Vector& a, const Vector& b) {
  same_size(a, b, "add");
  return a + b;
}

Vector sub(const Vector& a, const Vector& b) {
  same_size(a, b, "sub");
  return a - b;
}

double dot(const Vector& a, const Vector& b) {
  same_size(a, b, "dot");
  return a.dot(b);
}

Vector concat(std::initializer_list<const Vector*> parts) {
  Index n = 0;
  for (const Vector* p : parts) n += p->size();
  Vector out(n);
  Index at = 0;
  for (const Vector* p : parts) {
    out.segment(at, p->size()) = *p;
    at += p->size();
  }
  return out;
}

Vector affine(const Matrix& w, const Vector& x, const Vector& b) {
  if (w.cols() != x.size() || w.rows() != b.size())
    throw ShapeError("affine: shape mismatch " + shape_of(w) + " with x" + shape_of(x) +
                     " and b" + shape_of(b));
  return w * x + b;
}

Vector sigmoid(const Vector& x) { return x.unaryExpr([](double v) { return sigmoid(v); }); }

Vector tanh(const Vector& x) { return x.array().tanh().matrix(); }

Vector relu(const Vector& x) { return x.cwiseMax(0.0); }

Vector softmax(const Vector& x) {
  if (x.size() == 0) return x;
  const double m = x.maxCoeff();
  Vector e = (x.array() - m).exp().matrix();
  return e / e.sum();
}

DropoutResult dropout(const Vector& x, double rate, bool training, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw ConfigError("dropout rate " + std::to_string(rate) + " outside [0, 1)");
  DropoutResult r;
  if (!training || rate == 0.0) {
    r.output = x;
    r.mask = Vector::Ones(x.size());
    return r;
  }
  const double keep_scale = 1.0 / (1.0 - rate);
  r.mask.resize(x.size());
  for (Index i = 0; i < x.size(); ++i) r.mask[i] = uniform_unit(rng) < rate ? 0.0 : keep_scale;
  r.output = x.cwiseProduct(r.mask);
  return r;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }
bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace tapem::num
