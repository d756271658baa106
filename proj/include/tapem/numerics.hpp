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

// Dense double-precision arithmetic used by every model component.
//
// Vectors and row-major matrices are Eigen types; the free functions below
// add shape checking for the few places where operands come from outside
// a component. Inner loops use Eigen expressions directly.

#pragma once

#include <cmath>
#include <initializer_list>
#include <string>

#include <Eigen/Dense>

#include "tapem/rng.hpp"

namespace tapem::num {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

std::string shape_of(const Matrix& m);
std::string shape_of(const Vector& v);

Vector matvec(const Matrix& a, const Vector& x);
Matrix outer(const Vector& a, const Vector& b);
Vector hadamard(const Vector& a, const Vector& b);
Vector add(const Vector& a, const Vector& b);
Vector sub(const Vector& a, const Vector& b);
double dot(const Vector& a, const Vector& b);
Vector concat(std::initializer_list<const Vector*> parts);
Vector affine(const Matrix& w, const Vector& x, const Vector& b);

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + e^x) without overflow.
inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

// log sigmoid(x) = -softplus(-x).
inline double log_sigmoid(double x) { return -softplus(-x); }

Vector sigmoid(const Vector& x);
Vector tanh(const Vector& x);
Vector relu(const Vector& x);
Vector softmax(const Vector& x);

struct DropoutResult {
  Vector output;
  // 0 for dropped units, 1 / (1 - rate) for survivors; all ones in inference.
  Vector mask;
};

// Inverted dropout.
DropoutResult dropout(const Vector& x, double rate, bool training, Rng& rng);

bool all_finite(const Matrix& m);
bool all_finite(const Vector& v);

}  // namespace tapem::num
