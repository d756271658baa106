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

#include <string>

#include "tapem/errors.hpp"
#include "tapem/model.hpp"

namespace tapem::model {

GruCell GruCell::create(ParamStore& store, const std::string& prefix, Index input, Index hidden,
                        Rng& rng) {
  GruCell cell;
  cell.input = input;
  cell.hidden = hidden;
  cell.w = store.add(prefix + ".W", num::fan_in_init(3 * hidden, input, rng));
  cell.u_zr = store.add(prefix + ".U_zr", num::fan_in_init(2 * hidden, hidden, rng));
  cell.u_h = store.add(prefix + ".U_h", num::fan_in_init(hidden, hidden, rng));
  cell.b = store.add(prefix + ".b", Matrix::Zero(3 * hidden, 1));
  return cell;
}

GruCell GruCell::bind(const ParamStore& store, const std::string& prefix) {
  GruCell cell;
  cell.w = store.id(prefix + ".W");
  cell.u_zr = store.id(prefix + ".U_zr");
  cell.u_h = store.id(prefix + ".U_h");
  cell.b = store.id(prefix + ".b");
  cell.input = store.value(cell.w).cols();
  cell.hidden = store.value(cell.u_h).rows();
  return cell;
}

Matrix gru_forward(const ParamStore& store, const GruCell& cell, const Matrix& x, GruTrace* trace) {
  if (x.cols() != cell.input)
    throw ShapeError("GRU input has shape " + num::shape_of(x) + ", expected " +
                     std::to_string(cell.input) + " columns");
  const Matrix& w = store.value(cell.w);
  const Matrix& u_zr = store.value(cell.u_zr);
  const Matrix& u_h = store.value(cell.u_h);
  const Matrix& b = store.value(cell.b);
  const Index steps = x.rows();
  const Index hd = cell.hidden;

  Matrix xw = x * w.transpose();
  xw.rowwise() += b.col(0).transpose();

  Matrix h(steps + 1, hd);
  h.row(0).setZero();
  Matrix z(steps, hd), r(steps, hd), c(steps, hd);
  Vector hp(hd), zr(2 * hd), rh(hd), cpre(hd);
  for (Index t = 0; t < steps; ++t) {
    hp = h.row(t).transpose();
    zr.noalias() = u_zr * hp;
    zr += xw.row(t).head(2 * hd).transpose();
    for (Index i = 0; i < hd; ++i) {
      z(t, i) = num::sigmoid(zr[i]);
      r(t, i) = num::sigmoid(zr[hd + i]);
      rh[i] = r(t, i) * hp[i];
    }
    cpre.noalias() = u_h * rh;
    cpre += xw.row(t).tail(hd).transpose();
    for (Index i = 0; i < hd; ++i) {
      c(t, i) = std::tanh(cpre[i]);
      h(t + 1, i) = z(t, i) * hp[i] + (1.0 - z(t, i)) * c(t, i);
    }
  }
  Matrix states = h.bottomRows(steps);
  if (trace) {
    trace->x = x;
    trace->h = std::move(h);
    trace->z = std::move(z);
    trace->r = std::move(r);
    trace->c = std::move(c);
  }
  return states;
}

void gru_backward(const ParamStore& store, const GruCell& cell, const GruTrace& trace,
                  const Matrix& d_states, GradBuffer& grads, Matrix* d_x) {
  const Index steps = trace.x.rows();
  const Index hd = cell.hidden;
  if (d_states.rows() != steps || d_states.cols() != hd)
    throw ShapeError("GRU state gradient has shape " + num::shape_of(d_states));
  const Matrix& w = store.value(cell.w);
  const Matrix& u_zr = store.value(cell.u_zr);
  const Matrix& u_h = store.value(cell.u_h);

  Matrix da(steps, 3 * hd);
  Vector dh_next = Vector::Zero(hd);
  Vector dh(hd), hp(hd), dac(hd), drh(hd), dhp(hd), dgate(2 * hd);
  for (Index t = steps - 1; t >= 0; --t) {
    dh = d_states.row(t).transpose() + dh_next;
    hp = trace.h.row(t).transpose();
    for (Index i = 0; i < hd; ++i) {
      const double z = trace.z(t, i), c = trace.c(t, i);
      dgate[i] = dh[i] * (hp[i] - c) * z * (1.0 - z);
      dac[i] = dh[i] * (1.0 - z) * (1.0 - c * c);
      dhp[i] = dh[i] * z;
    }
    drh.noalias() = u_h.transpose() * dac;
    for (Index i = 0; i < hd; ++i) {
      const double r = trace.r(t, i);
      dgate[hd + i] = drh[i] * hp[i] * r * (1.0 - r);
      dhp[i] += drh[i] * r;
    }
    dhp.noalias() += u_zr.transpose() * dgate;
    da.row(t).head(2 * hd) = dgate.transpose();
    da.row(t).tail(hd) = dac.transpose();
    dh_next = dhp;
  }

  const auto hprev = trace.h.topRows(steps);
  grads[cell.w].noalias() += da.transpose() * trace.x;
  grads[cell.u_zr].noalias() += da.leftCols(2 * hd).transpose() * hprev;
  grads[cell.u_h].noalias() += da.rightCols(hd).transpose() * trace.r.cwiseProduct(hprev);
  grads[cell.b] += da.colwise().sum().transpose();
  if (d_x) *d_x = da * w;
}

}  // namespace tapem::model
