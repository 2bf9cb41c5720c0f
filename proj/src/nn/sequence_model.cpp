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
#include <random>

#include "gridmarl/nn.hpp"

namespace gridmarl::nn {

namespace {

std::string layer_prefix(std::size_t l) { return "rec" + std::to_string(l) + "."; }

void fill_uniform(Matrix& m, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = dist(rng);
}

Matrix as_matrix(const RowVector& v) { return Matrix(v); }

}  // namespace

CellKind parse_cell_kind(std::string_view tag) {
  if (tag == "lstm") return CellKind::lstm;
  if (tag == "gru") return CellKind::gru;
  if (tag == "rnn") return CellKind::rnn;
  throw ConfigError("unknown recurrent cell '" + std::string(tag) + "'");
}

std::string_view cell_kind_name(CellKind kind) {
  switch (kind) {
    case CellKind::lstm: return "lstm";
    case CellKind::gru: return "gru";
    case CellKind::rnn: return "rnn";
  }
  return "lstm";
}

void SequenceModelSpec::validate() const {
  if (input_size == 0 || output_size == 0) throw ConfigError("sequence model: sizes must be positive");
  if (hidden_sizes.empty()) throw ConfigError("sequence model: at least one recurrent layer");
  for (auto h : hidden_sizes) {
    if (h == 0) throw ConfigError("sequence model: hidden sizes must be positive");
  }
}

nlohmann::json to_json(const SequenceModelSpec& s) {
  return {{"kind", std::string(cell_kind_name(s.kind))},
          {"input_size", s.input_size},
          {"hidden_sizes", s.hidden_sizes},
          {"output_size", s.output_size}};
}

SequenceModelSpec sequence_spec_from_json(const nlohmann::json& j) {
  SequenceModelSpec s;
  s.kind = parse_cell_kind(j.at("kind").get<std::string>());
  s.input_size = j.at("input_size").get<std::size_t>();
  s.hidden_sizes = j.at("hidden_sizes").get<std::vector<std::size_t>>();
  s.output_size = j.at("output_size").get<std::size_t>();
  s.validate();
  return s;
}

LstmCellParams lstm_params_from(const ParamStore& s, const std::string& pre) {
  LstmCellParams p;
  p.W_f = s.at(pre + "W_f");
  p.W_i = s.at(pre + "W_i");
  p.W_o = s.at(pre + "W_o");
  p.W_c = s.at(pre + "W_c");
  p.b_f = s.at(pre + "b_f").row(0);
  p.b_i = s.at(pre + "b_i").row(0);
  p.b_o = s.at(pre + "b_o").row(0);
  p.b_c = s.at(pre + "b_c").row(0);
  p.hidden_size = static_cast<std::size_t>(p.W_f.cols());
  p.input_size = static_cast<std::size_t>(p.W_f.rows()) - p.hidden_size;
  return p;
}

void lstm_params_into(const LstmCellParams& p, ParamStore& s, const std::string& pre) {
  s.at(pre + "W_f") = p.W_f;
  s.at(pre + "W_i") = p.W_i;
  s.at(pre + "W_o") = p.W_o;
  s.at(pre + "W_c") = p.W_c;
  s.at(pre + "b_f") = as_matrix(p.b_f);
  s.at(pre + "b_i") = as_matrix(p.b_i);
  s.at(pre + "b_o") = as_matrix(p.b_o);
  s.at(pre + "b_c") = as_matrix(p.b_c);
}

GruCellParams gru_params_from(const ParamStore& s, const std::string& pre) {
  GruCellParams p;
  p.W_z = s.at(pre + "W_z");
  p.U_z = s.at(pre + "U_z");
  p.W_r = s.at(pre + "W_r");
  p.U_r = s.at(pre + "U_r");
  p.W_h = s.at(pre + "W_h");
  p.U_h = s.at(pre + "U_h");
  p.b_z = s.at(pre + "b_z").row(0);
  p.b_r = s.at(pre + "b_r").row(0);
  p.b_h = s.at(pre + "b_h").row(0);
  p.hidden_size = static_cast<std::size_t>(p.U_z.cols());
  p.input_size = static_cast<std::size_t>(p.W_z.rows());
  return p;
}

void gru_params_into(const GruCellParams& p, ParamStore& s, const std::string& pre) {
  s.at(pre + "W_z") = p.W_z;
  s.at(pre + "U_z") = p.U_z;
  s.at(pre + "W_r") = p.W_r;
  s.at(pre + "U_r") = p.U_r;
  s.at(pre + "W_h") = p.W_h;
  s.at(pre + "U_h") = p.U_h;
  s.at(pre + "b_z") = as_matrix(p.b_z);
  s.at(pre + "b_r") = as_matrix(p.b_r);
  s.at(pre + "b_h") = as_matrix(p.b_h);
}

RnnCellParams rnn_params_from(const ParamStore& s, const std::string& pre) {
  RnnCellParams p;
  p.W = s.at(pre + "W");
  p.U = s.at(pre + "U");
  p.b = s.at(pre + "b").row(0);
  p.hidden_size = static_cast<std::size_t>(p.U.cols());
  p.input_size = static_cast<std::size_t>(p.W.rows());
  return p;
}

void rnn_params_into(const RnnCellParams& p, ParamStore& s, const std::string& pre) {
  s.at(pre + "W") = p.W;
  s.at(pre + "U") = p.U;
  s.at(pre + "b") = as_matrix(p.b);
}

ParamStore init_sequence_params(const SequenceModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  ParamStore store;
  std::size_t in = spec.input_size;
  for (std::size_t l = 0; l < spec.hidden_sizes.size(); ++l) {
    const std::size_t h = spec.hidden_sizes[l];
    const double bound = 1.0 / std::sqrt(static_cast<double>(h));
    const std::string pre = layer_prefix(l);
    auto add = [&](const std::string& name, Eigen::Index rows, Eigen::Index cols) {
      Matrix m(rows, cols);
      fill_uniform(m, bound, rng);
      store.add(pre + name, std::move(m));
    };
    const auto H = static_cast<Eigen::Index>(h);
    const auto I = static_cast<Eigen::Index>(in);
    switch (spec.kind) {
      case CellKind::lstm:
        for (const char* g : {"f", "i", "o", "c"}) {
          add(std::string("W_") + g, H + I, H);
          add(std::string("b_") + g, 1, H);
        }
        break;
      case CellKind::gru:
        for (const char* g : {"z", "r", "h"}) {
          add(std::string("W_") + g, I, H);
          add(std::string("U_") + g, H, H);
          add(std::string("b_") + g, 1, H);
        }
        break;
      case CellKind::rnn:
        add("W", I, H);
        add("U", H, H);
        add("b", 1, H);
        break;
    }
    in = h;
  }
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  Matrix w(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(spec.output_size));
  fill_uniform(w, bound, rng);
  Matrix b(1, static_cast<Eigen::Index>(spec.output_size));
  fill_uniform(b, bound, rng);
  store.add("head.weight", std::move(w));
  store.add("head.bias", std::move(b));
  return store;
}

SequenceModel::SequenceModel(SequenceModelSpec spec, std::uint64_t seed)
    : SequenceModel(spec, init_sequence_params(spec, seed)) {}

SequenceModel::SequenceModel(SequenceModelSpec spec, ParamStore params)
    : spec_(std::move(spec)), params_(std::move(params)) {
  spec_.validate();
  params_.require_same_layout(init_sequence_params(spec_, 0), "sequence model");
}

Matrix SequenceModel::run(const SequenceBatch& inputs, Cache* cache) const {
  if (inputs.empty()) throw InvalidArgument("sequence model: empty input sequence");
  const Eigen::Index batch = inputs.front().rows();
  for (const auto& x : inputs) {
    if (x.rows() != batch || x.cols() != static_cast<Eigen::Index>(spec_.input_size)) {
      throw DimensionError("sequence model: inconsistent input step shape");
    }
  }
  if (cache) {
    cache->batch = static_cast<std::size_t>(batch);
    cache->layers.assign(spec_.hidden_sizes.size(), {});
  }
  const std::size_t T = inputs.size();
  std::vector<Matrix> layer_in = inputs;
  std::vector<Matrix> layer_out(T);
  for (std::size_t l = 0; l < spec_.hidden_sizes.size(); ++l) {
    const auto H = static_cast<Eigen::Index>(spec_.hidden_sizes[l]);
    const std::string pre = layer_prefix(l);
    Matrix h = Matrix::Zero(batch, H);
    Matrix c = Matrix::Zero(batch, H);
    std::vector<StepCache>* steps = cache ? &cache->layers[l] : nullptr;
    if (steps) steps->resize(T);
    switch (spec_.kind) {
      case CellKind::lstm: {
        const auto p = lstm_params_from(params_, pre);
        for (std::size_t t = 0; t < T; ++t) {
          auto r = lstm_cell_step(p, layer_in[t], h, c);
          h = std::move(r.h);
          c = std::move(r.c);
          if (steps) (*steps)[t].lstm = std::move(r.cache);
          layer_out[t] = h;
        }
        break;
      }
      case CellKind::gru: {
        const auto p = gru_params_from(params_, pre);
        for (std::size_t t = 0; t < T; ++t) {
          h = gru_cell_step(p, layer_in[t], h, steps ? &(*steps)[t].gru : nullptr);
          layer_out[t] = h;
        }
        break;
      }
      case CellKind::rnn: {
        const auto p = rnn_params_from(params_, pre);
        for (std::size_t t = 0; t < T; ++t) {
          h = rnn_cell_step(p, layer_in[t], h, steps ? &(*steps)[t].rnn : nullptr);
          layer_out[t] = h;
        }
        break;
      }
    }
    std::swap(layer_in, layer_out);
  }
  const Matrix& last = layer_in.back();
  if (cache) cache->last_hidden = last;
  Matrix out = last * params_.at("head.weight");
  out.rowwise() += params_.at("head.bias").row(0);
  return out;
}

Matrix SequenceModel::forward(const SequenceBatch& inputs) {
  Cache cache;
  Matrix out = run(inputs, &cache);
  cache_ = std::move(cache);
  return out;
}

Matrix SequenceModel::predict(const SequenceBatch& inputs) const { return run(inputs, nullptr); }

GradStore SequenceModel::backward(const Matrix& loss_grad) const {
  if (!cache_) throw StateError("sequence model: backward() called without a cached forward pass");
  const Cache& k = *cache_;
  if (loss_grad.rows() != static_cast<Eigen::Index>(k.batch) ||
      loss_grad.cols() != static_cast<Eigen::Index>(spec_.output_size)) {
    throw DimensionError("sequence model: loss gradient shape mismatch");
  }
  GradStore grads = params_.zeros_like();
  grads.at("head.weight").noalias() = k.last_hidden.transpose() * loss_grad;
  grads.at("head.bias").row(0) = loss_grad.colwise().sum();

  const std::size_t L = spec_.hidden_sizes.size();
  const std::size_t T = k.layers.front().size();
  // Gradient w.r.t. each output h_t of the current layer, coming from above.
  std::vector<Matrix> d_out(T);
  for (std::size_t t = 0; t < T; ++t) {
    d_out[t] = Matrix::Zero(static_cast<Eigen::Index>(k.batch),
                            static_cast<Eigen::Index>(spec_.hidden_sizes[L - 1]));
  }
  d_out[T - 1] = loss_grad * params_.at("head.weight").transpose();

  for (std::size_t l = L; l-- > 0;) {
    const std::string pre = layer_prefix(l);
    const auto H = static_cast<Eigen::Index>(spec_.hidden_sizes[l]);
    Matrix dh_next = Matrix::Zero(static_cast<Eigen::Index>(k.batch), H);
    Matrix dc_next = Matrix::Zero(static_cast<Eigen::Index>(k.batch), H);
    std::vector<Matrix> d_in(T);
    switch (spec_.kind) {
      case CellKind::lstm: {
        const auto p = lstm_params_from(params_, pre);
        auto g = LstmCellParams::zeros(p.input_size, p.hidden_size);
        for (std::size_t t = T; t-- > 0;) {
          auto r = lstm_cell_backward(p, k.layers[l][t].lstm, d_out[t] + dh_next, dc_next, g);
          d_in[t] = std::move(r.dx);
          dh_next = std::move(r.dh_prev);
          dc_next = std::move(r.dc_prev);
        }
        lstm_params_into(g, grads, pre);
        break;
      }
      case CellKind::gru: {
        const auto p = gru_params_from(params_, pre);
        auto g = GruCellParams::zeros(p.input_size, p.hidden_size);
        for (std::size_t t = T; t-- > 0;) {
          auto r = gru_cell_backward(p, k.layers[l][t].gru, d_out[t] + dh_next, g);
          d_in[t] = std::move(r.dx);
          dh_next = std::move(r.dh_prev);
        }
        gru_params_into(g, grads, pre);
        break;
      }
      case CellKind::rnn: {
        const auto p = rnn_params_from(params_, pre);
        auto g = RnnCellParams::zeros(p.input_size, p.hidden_size);
        for (std::size_t t = T; t-- > 0;) {
          auto r = rnn_cell_backward(p, k.layers[l][t].rnn, d_out[t] + dh_next, g);
          d_in[t] = std::move(r.dx);
          dh_next = std::move(r.dh_prev);
        }
        rnn_params_into(g, grads, pre);
        break;
      }
    }
    d_out = std::move(d_in);
  }
  return grads;
}

}  // namespace gridmarl::nn
