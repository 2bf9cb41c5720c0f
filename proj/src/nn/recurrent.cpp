// Copyright 2026 The gridmarl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include "gridmarl/nn.hpp"

namespace gridmarl::nn {

namespace {

Matrix sigmoid_of(const Matrix& z) {
  return z.unaryExpr([](double v) { return sigmoid(v); });
}

Matrix affine(const Matrix& x, const Matrix& w, const RowVector& b) {
  Matrix z = x * w;
  z.rowwise() += b;
  return z;
}

void check_step_shapes(std::string_view cell, const Matrix& x, const Matrix& h, std::size_t in,
                       std::size_t hidden) {
  if (x.cols() != static_cast<Eigen::Index>(in) || h.cols() != static_cast<Eigen::Index>(hidden) ||
      x.rows() != h.rows()) {
    throw DimensionError(std::string(cell) + ": input " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()) + " / state " + std::to_string(h.rows()) + "x" +
                         std::to_string(h.cols()) + " inconsistent with cell " +
                         std::to_string(in) + "->" + std::to_string(hidden));
  }
}

}  // namespace

// --- LSTM -------------------------------------------------------------------

LstmCellParams LstmCellParams::zeros(std::size_t input_size, std::size_t hidden_size) {
  const auto rows = static_cast<Eigen::Index>(input_size + hidden_size);
  const auto h = static_cast<Eigen::Index>(hidden_size);
  LstmCellParams p;
  p.W_f = p.W_i = p.W_o = p.W_c = Matrix::Zero(rows, h);
  p.b_f = p.b_i = p.b_o = p.b_c = RowVector::Zero(h);
  p.hidden_size = hidden_size;
  p.input_size = input_size;
  return p;
}

void LstmCellParams::validate() const {
  const auto rows = static_cast<Eigen::Index>(input_size + hidden_size);
  const auto h = static_cast<Eigen::Index>(hidden_size);
  for (const Matrix* w : {&W_f, &W_i, &W_o, &W_c}) {
    if (w->rows() != rows || w->cols() != h) throw DimensionError("lstm: gate weight shape mismatch");
  }
  for (const RowVector* b : {&b_f, &b_i, &b_o, &b_c}) {
    if (b->size() != h) throw DimensionError("lstm: gate bias shape mismatch");
  }
}

LstmStepResult lstm_cell_step(const LstmCellParams& p, const Matrix& x_t, const Matrix& h_prev,
                              const Matrix& c_prev) {
  p.validate();
  check_step_shapes("lstm", x_t, h_prev, p.input_size, p.hidden_size);
  if (c_prev.rows() != h_prev.rows() || c_prev.cols() != h_prev.cols()) {
    throw DimensionError("lstm: cell state shape mismatch");
  }
  LstmStepResult r;
  auto& k = r.cache;
  k.concat.resize(x_t.rows(), h_prev.cols() + x_t.cols());
  k.concat << h_prev, x_t;
  k.f = sigmoid_of(affine(k.concat, p.W_f, p.b_f));
  k.i = sigmoid_of(affine(k.concat, p.W_i, p.b_i));
  k.o = sigmoid_of(affine(k.concat, p.W_o, p.b_o));
  k.c_tilde = affine(k.concat, p.W_c, p.b_c).array().tanh().matrix();
  k.c_prev = c_prev;
  k.c = k.i.cwiseProduct(k.c_tilde) + k.f.cwiseProduct(c_prev);
  k.tanh_c = k.c.array().tanh().matrix();
  r.c = k.c;
  r.h = k.o.cwiseProduct(k.tanh_c);
  return r;
}

CellInputGrads lstm_cell_backward(const LstmCellParams& p, const LstmGateCache& k, const Matrix& dh,
                                  const Matrix& dc, LstmCellParams& g) {
  const Eigen::Index hsz = static_cast<Eigen::Index>(p.hidden_size);
  Matrix d_o = dh.cwiseProduct(k.tanh_c);
  Matrix dc_total = dc + dh.cwiseProduct(k.o).cwiseProduct((1.0 - k.tanh_c.array().square()).matrix());
  Matrix dz_f = dc_total.cwiseProduct(k.c_prev).array() * k.f.array() * (1.0 - k.f.array());
  Matrix dz_i = dc_total.cwiseProduct(k.c_tilde).array() * k.i.array() * (1.0 - k.i.array());
  Matrix dz_o = d_o.array() * k.o.array() * (1.0 - k.o.array());
  Matrix dz_c = dc_total.cwiseProduct(k.i).array() * (1.0 - k.c_tilde.array().square());

  g.W_f.noalias() += k.concat.transpose() * dz_f;
  g.W_i.noalias() += k.concat.transpose() * dz_i;
  g.W_o.noalias() += k.concat.transpose() * dz_o;
  g.W_c.noalias() += k.concat.transpose() * dz_c;
  g.b_f += dz_f.colwise().sum();
  g.b_i += dz_i.colwise().sum();
  g.b_o += dz_o.colwise().sum();
  g.b_c += dz_c.colwise().sum();

  Matrix dconcat = dz_f * p.W_f.transpose();
  dconcat.noalias() += dz_i * p.W_i.transpose();
  dconcat.noalias() += dz_o * p.W_o.transpose();
  dconcat.noalias() += dz_c * p.W_c.transpose();

  CellInputGrads out;
  out.dh_prev = dconcat.leftCols(hsz);
  out.dx = dconcat.rightCols(dconcat.cols() - hsz);
  out.dc_prev = dc_total.cwiseProduct(k.f);
  return out;
}

// --- GRU --------------------------------------------------------------------

GruCellParams GruCellParams::zeros(std::size_t input_size, std::size_t hidden_size) {
  const auto in = static_cast<Eigen::Index>(input_size);
  const auto h = static_cast<Eigen::Index>(hidden_size);
  GruCellParams p;
  p.W_z = p.W_r = p.W_h = Matrix::Zero(in, h);
  p.U_z = p.U_r = p.U_h = Matrix::Zero(h, h);
  p.b_z = p.b_r = p.b_h = RowVector::Zero(h);
  p.hidden_size = hidden_size;
  p.input_size = input_size;
  return p;
}

void GruCellParams::validate() const {
  const auto in = static_cast<Eigen::Index>(input_size);
  const auto h = static_cast<Eigen::Index>(hidden_size);
  for (const Matrix* w : {&W_z, &W_r, &W_h}) {
    if (w->rows() != in || w->cols() != h) throw DimensionError("gru: input weight shape mismatch");
  }
  for (const Matrix* u : {&U_z, &U_r, &U_h}) {
    if (u->rows() != h || u->cols() != h) throw DimensionError("gru: recurrent weight shape mismatch");
  }
  for (const RowVector* b : {&b_z, &b_r, &b_h}) {
    if (b->size() != h) throw DimensionError("gru: bias shape mismatch");
  }
}

Matrix gru_cell_step(const GruCellParams& p, const Matrix& x, const Matrix& h, GruCache* cache) {
  p.validate();
  check_step_shapes("gru", x, h, p.input_size, p.hidden_size);
  Matrix az = affine(x, p.W_z, p.b_z);
  az.noalias() += h * p.U_z;
  Matrix ar = affine(x, p.W_r, p.b_r);
  ar.noalias() += h * p.U_r;
  Matrix z = sigmoid_of(az);
  Matrix r = sigmoid_of(ar);
  Matrix uh = h * p.U_h;
  Matrix ah = affine(x, p.W_h, p.b_h) + r.cwiseProduct(uh);
  Matrix h_tilde = ah.array().tanh().matrix();
  Matrix h_new = z.cwiseProduct(h) + (1.0 - z.array()).matrix().cwiseProduct(h_tilde);
  if (cache) {
    cache->x = x;
    cache->h_prev = h;
    cache->z = std::move(z);
    cache->r = std::move(r);
    cache->uh = std::move(uh);
    cache->h_tilde = std::move(h_tilde);
  }
  return h_new;
}

CellInputGrads gru_cell_backward(const GruCellParams& p, const GruCache& k, const Matrix& dh,
                                 GruCellParams& g) {
  Matrix d_z = dh.cwiseProduct(k.h_prev - k.h_tilde);
  Matrix d_htilde = dh.cwiseProduct((1.0 - k.z.array()).matrix());
  Matrix da_h = d_htilde.array() * (1.0 - k.h_tilde.array().square());
  Matrix d_r = da_h.cwiseProduct(k.uh);
  Matrix d_uh = da_h.cwiseProduct(k.r);
  Matrix da_z = d_z.array() * k.z.array() * (1.0 - k.z.array());
  Matrix da_r = d_r.array() * k.r.array() * (1.0 - k.r.array());

  g.W_h.noalias() += k.x.transpose() * da_h;
  g.b_h += da_h.colwise().sum();
  g.U_h.noalias() += k.h_prev.transpose() * d_uh;
  g.W_z.noalias() += k.x.transpose() * da_z;
  g.U_z.noalias() += k.h_prev.transpose() * da_z;
  g.b_z += da_z.colwise().sum();
  g.W_r.noalias() += k.x.transpose() * da_r;
  g.U_r.noalias() += k.h_prev.transpose() * da_r;
  g.b_r += da_r.colwise().sum();

  CellInputGrads out;
  out.dh_prev = dh.cwiseProduct(k.z);
  out.dh_prev.noalias() += d_uh * p.U_h.transpose();
  out.dh_prev.noalias() += da_z * p.U_z.transpose();
  out.dh_prev.noalias() += da_r * p.U_r.transpose();
  out.dx = da_h * p.W_h.transpose();
  out.dx.noalias() += da_z * p.W_z.transpose();
  out.dx.noalias() += da_r * p.W_r.transpose();
  return out;
}

// --- plain RNN --------------------------------------------------------------

RnnCellParams RnnCellParams::zeros(std::size_t input_size, std::size_t hidden_size) {
  RnnCellParams p;
  p.W = Matrix::Zero(static_cast<Eigen::Index>(input_size), static_cast<Eigen::Index>(hidden_size));
  p.U = Matrix::Zero(static_cast<Eigen::Index>(hidden_size), static_cast<Eigen::Index>(hidden_size));
  p.b = RowVector::Zero(static_cast<Eigen::Index>(hidden_size));
  p.hidden_size = hidden_size;
  p.input_size = input_size;
  return p;
}

Matrix rnn_cell_step(const RnnCellParams& p, const Matrix& x, const Matrix& h, RnnCache* cache) {
  check_step_shapes("rnn", x, h, p.input_size, p.hidden_size);
  Matrix a = affine(x, p.W, p.b);
  a.noalias() += h * p.U;
  Matrix h_new = a.array().tanh().matrix();
  if (cache) {
    cache->x = x;
    cache->h_prev = h;
    cache->h = h_new;
  }
  return h_new;
}

CellInputGrads rnn_cell_backward(const RnnCellParams& p, const RnnCache& k, const Matrix& dh,
                                 RnnCellParams& g) {
  Matrix da = dh.array() * (1.0 - k.h.array().square());
  g.W.noalias() += k.x.transpose() * da;
  g.U.noalias() += k.h_prev.transpose() * da;
  g.b += da.colwise().sum();
  CellInputGrads out;
  out.dx = da * p.W.transpose();
  out.dh_prev = da * p.U.transpose();
  return out;
}

}  // namespace gridmarl::nn
