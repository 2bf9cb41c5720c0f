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

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "gridmarl/errors.hpp"

namespace gridmarl::nn {

// Row-major so that a batch is one sample per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

enum class Mode { train, eval };

// ---------------------------------------------------------------------------
// Parameter storage
// ---------------------------------------------------------------------------

// Named, shape-stable collection of real arrays. Iteration order is the
// lexicographic order of names, which keeps serialization deterministic.
class ParamStore {
 public:
  using Map = std::map<std::string, Matrix>;

  void add(const std::string& name, Matrix value);
  bool contains(const std::string& name) const { return entries_.count(name) > 0; }
  Matrix& at(const std::string& name);
  const Matrix& at(const std::string& name) const;

  std::size_t size() const { return entries_.size(); }
  std::size_t scalar_count() const;
  std::vector<std::string> names() const;

  Map::iterator begin() { return entries_.begin(); }
  Map::iterator end() { return entries_.end(); }
  Map::const_iterator begin() const { return entries_.begin(); }
  Map::const_iterator end() const { return entries_.end(); }

  ParamStore zeros_like() const;
  void set_zero();
  bool all_finite() const;
  // Name of the first entry holding a NaN or infinity, if any.
  std::optional<std::string> first_non_finite() const;
  double squared_norm() const;
  void scale(double factor);
  // this += alpha * other; shapes must match entry-for-entry.
  void add_scaled(const ParamStore& other, double alpha);
  void require_same_layout(const ParamStore& other, std::string_view context) const;

  // Flat views used by finite-difference checks.
  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& values);

 private:
  Map entries_;
};

using GradStore = ParamStore;

// ---------------------------------------------------------------------------
// Activations
// ---------------------------------------------------------------------------

enum class Activation { relu, leaky_relu, rrelu, tanh, sigmoid, linear };

inline constexpr double kLeakyReluSlope = 0.01;
// RReLU is evaluated with a fixed negative slope.
inline constexpr double kRreluSlope = 1.0 / 8.0;

Activation parse_activation(std::string_view tag);
std::string_view activation_name(Activation a);
Matrix activate(Activation a, const Matrix& z);
// Derivative expressed through the pre-activation z and output y.
Matrix activation_grad(Activation a, const Matrix& z, const Matrix& y);

double sigmoid(double x);

// ---------------------------------------------------------------------------
// Batch normalization
// ---------------------------------------------------------------------------

struct BatchNormState {
  RowVector gamma;
  RowVector beta;
  RowVector running_mean;
  RowVector running_var;
  double momentum = 0.1;
  double epsilon = 1e-5;
  Mode mode = Mode::train;

  static BatchNormState identity(std::size_t features);
};

struct BatchNormCache {
  Mode mode = Mode::train;
  Matrix x_hat;
  RowVector inv_std;
};

// Normalizes each column. Train mode uses the batch mean and population
// variance and folds them into the running statistics; eval mode uses the
// running statistics only.
Matrix batchnorm_forward(const Matrix& x, const RowVector& gamma, const RowVector& beta,
                         RowVector& running_mean, RowVector& running_var, double momentum,
                         double epsilon, Mode mode, BatchNormCache* cache);
// Returns dL/dx and accumulates into dgamma/dbeta.
Matrix batchnorm_backward(const Matrix& dy, const RowVector& gamma, const BatchNormCache& cache,
                          RowVector& dgamma, RowVector& dbeta);
Matrix batchnorm_apply(BatchNormState& state, const Matrix& input);

// ---------------------------------------------------------------------------
// Multi-layer perceptron
// ---------------------------------------------------------------------------

struct MlpSpec {
  std::size_t input_size = 0;
  std::vector<std::size_t> layer_sizes;
  std::vector<Activation> activations;
  // Layers whose pre-activation passes through batch normalization.
  std::set<std::size_t> batch_norm_layers;

  void validate() const;
  std::size_t output_size() const { return layer_sizes.empty() ? 0 : layer_sizes.back(); }
};

nlohmann::json to_json(const MlpSpec& spec);
MlpSpec mlp_spec_from_json(const nlohmann::json& j);

class Mlp {
 public:
  Mlp() = default;
  Mlp(MlpSpec spec, std::uint64_t seed);
  Mlp(MlpSpec spec, ParamStore params);

  const MlpSpec& spec() const { return spec_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  // Running statistics of the batch-norm layers, keyed by layer index.
  std::map<std::size_t, std::pair<RowVector, RowVector>>& bn_stats() { return bn_stats_; }
  const std::map<std::size_t, std::pair<RowVector, RowVector>>& bn_stats() const {
    return bn_stats_;
  }
  double bn_momentum = 0.1;
  double bn_epsilon = 1e-5;

  // Forward pass; the activations are cached for a subsequent backward().
  Matrix forward(const Matrix& input, Mode mode);
  // Stateless evaluation: eval mode, no cache, no statistic update.
  Matrix predict(const Matrix& input) const;
  // Gradients of sum(output .* output_grad) w.r.t. every parameter.
  GradStore backward(const Matrix& output_grad, Matrix* input_grad = nullptr) const;
  bool has_cache() const { return cache_.has_value(); }
  void clear_cache() { cache_.reset(); }

 private:
  struct LayerCache {
    Matrix input;
    Matrix pre_activation;
    Matrix output;
    std::optional<BatchNormCache> bn;
  };
  struct Cache {
    std::vector<LayerCache> layers;
  };

  void check_input(const Matrix& input) const;

  MlpSpec spec_;
  ParamStore params_;
  std::map<std::size_t, std::pair<RowVector, RowVector>> bn_stats_;
  std::optional<Cache> cache_;
};

// Spec, parameters and batch-norm running statistics in one document.
nlohmann::json mlp_to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& j);

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases; BN gamma=1, beta=0.
ParamStore init_mlp_params(const MlpSpec& spec, std::uint64_t seed);
std::string mlp_weight_name(std::size_t layer);
std::string mlp_bias_name(std::size_t layer);

// ---------------------------------------------------------------------------
// Recurrent cells
// ---------------------------------------------------------------------------

// Each gate matrix acts on the concatenation [h_prev, x] laid out as a row,
// so W_* has shape (hidden + input) x hidden.
struct LstmCellParams {
  Matrix W_f, W_i, W_o, W_c;
  RowVector b_f, b_i, b_o, b_c;
  std::size_t hidden_size = 0;
  std::size_t input_size = 0;

  static LstmCellParams zeros(std::size_t input_size, std::size_t hidden_size);
  void validate() const;
};

struct LstmGateCache {
  Matrix concat;
  Matrix f, i, o, c_tilde;
  Matrix c_prev, c, tanh_c;
};

struct LstmStepResult {
  Matrix h;
  Matrix c;
  LstmGateCache cache;
};

LstmStepResult lstm_cell_step(const LstmCellParams& params, const Matrix& x_t,
                              const Matrix& h_prev, const Matrix& c_prev);

struct CellInputGrads {
  Matrix dx;
  Matrix dh_prev;
  Matrix dc_prev;  // LSTM only
};

// Accumulates parameter gradients into `grads` (same layout as params).
CellInputGrads lstm_cell_backward(const LstmCellParams& params, const LstmGateCache& cache,
                                  const Matrix& dh, const Matrix& dc, LstmCellParams& grads);

struct GruCellParams {
  Matrix W_z, U_z, W_r, U_r, W_h, U_h;  // W: input x hidden, U: hidden x hidden
  RowVector b_z, b_r, b_h;
  std::size_t hidden_size = 0;
  std::size_t input_size = 0;

  static GruCellParams zeros(std::size_t input_size, std::size_t hidden_size);
  void validate() const;
};

struct GruCache {
  Matrix x, h_prev;
  Matrix z, r, uh, h_tilde;
};

Matrix gru_cell_step(const GruCellParams& params, const Matrix& x_t, const Matrix& h_prev,
                     GruCache* cache = nullptr);
CellInputGrads gru_cell_backward(const GruCellParams& params, const GruCache& cache,
                                 const Matrix& dh, GruCellParams& grads);

struct RnnCellParams {
  Matrix W, U;
  RowVector b;
  std::size_t hidden_size = 0;
  std::size_t input_size = 0;

  static RnnCellParams zeros(std::size_t input_size, std::size_t hidden_size);
};

struct RnnCache {
  Matrix x, h_prev, h;
};

Matrix rnn_cell_step(const RnnCellParams& params, const Matrix& x_t, const Matrix& h_prev,
                     RnnCache* cache = nullptr);
CellInputGrads rnn_cell_backward(const RnnCellParams& params, const RnnCache& cache,
                                 const Matrix& dh, RnnCellParams& grads);

// ---------------------------------------------------------------------------
// Stacked recurrent network with a dense read-out on the last hidden state
// ---------------------------------------------------------------------------

enum class CellKind { rnn, gru, lstm };

CellKind parse_cell_kind(std::string_view tag);
std::string_view cell_kind_name(CellKind kind);

struct SequenceModelSpec {
  CellKind kind = CellKind::lstm;
  std::size_t input_size = 0;
  std::vector<std::size_t> hidden_sizes;
  std::size_t output_size = 0;

  void validate() const;
};

nlohmann::json to_json(const SequenceModelSpec& spec);
SequenceModelSpec sequence_spec_from_json(const nlohmann::json& j);

// A batch of sequences: one matrix per time step, rows are samples.
using SequenceBatch = std::vector<Matrix>;

class SequenceModel {
 public:
  SequenceModel() = default;
  SequenceModel(SequenceModelSpec spec, std::uint64_t seed);
  SequenceModel(SequenceModelSpec spec, ParamStore params);

  const SequenceModelSpec& spec() const { return spec_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  Matrix forward(const SequenceBatch& inputs);
  Matrix predict(const SequenceBatch& inputs) const;
  // Backpropagation through time for d(sum(output .* loss_grad)).
  GradStore backward(const Matrix& loss_grad) const;
  bool has_cache() const { return cache_.has_value(); }

 private:
  struct StepCache {
    LstmGateCache lstm;
    GruCache gru;
    RnnCache rnn;
  };
  struct Cache {
    std::size_t batch = 0;
    std::vector<std::vector<StepCache>> layers;  // [layer][t]
    Matrix last_hidden;
  };

  Matrix run(const SequenceBatch& inputs, Cache* cache) const;

  SequenceModelSpec spec_;
  ParamStore params_;
  std::optional<Cache> cache_;
};

ParamStore init_sequence_params(const SequenceModelSpec& spec, std::uint64_t seed);

LstmCellParams lstm_params_from(const ParamStore& store, const std::string& prefix);
void lstm_params_into(const LstmCellParams& p, ParamStore& store, const std::string& prefix);
GruCellParams gru_params_from(const ParamStore& store, const std::string& prefix);
void gru_params_into(const GruCellParams& p, ParamStore& store, const std::string& prefix);
RnnCellParams rnn_params_from(const ParamStore& store, const std::string& prefix);
void rnn_params_into(const RnnCellParams& p, ParamStore& store, const std::string& prefix);

// ---------------------------------------------------------------------------
// Optimizers
// ---------------------------------------------------------------------------

enum class OptimizerKind { sgd_momentum, adam, adamw };
enum class Direction { descent, ascent };

OptimizerKind parse_optimizer_kind(std::string_view tag);
std::string_view optimizer_kind_name(OptimizerKind kind);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 1e-3;
  double momentum = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
};

nlohmann::json to_json(const OptimizerConfig& c);
OptimizerConfig optimizer_config_from_json(const nlohmann::json& j);

class Optimizer {
 public:
  Optimizer() = default;
  explicit Optimizer(OptimizerConfig config) : config_(config) {}

  const OptimizerConfig& config() const { return config_; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }
  std::uint64_t step_count() const { return step_count_; }
  const ParamStore& first_moment() const { return first_; }
  const ParamStore& second_moment() const { return second_; }

  // Applies one update in place. Slots are created lazily on the first call.
  void step(ParamStore& params, const GradStore& grads, Direction direction);

  nlohmann::json to_json() const;
  static Optimizer from_json(const nlohmann::json& j);

 private:
  OptimizerConfig config_;
  ParamStore first_;   // velocity for SGD, first moment for Adam
  ParamStore second_;  // second moment for Adam
  std::uint64_t step_count_ = 0;
};

// Rescales grads in place so their global L2 norm is at most max_norm.
// Returns the norm before clipping.
double clip_global_norm(GradStore& grads, double max_norm);

// ---------------------------------------------------------------------------
// Checkpoint documents
// ---------------------------------------------------------------------------

nlohmann::json to_json(const ParamStore& store);
ParamStore param_store_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

// A checkpoint is one JSON document; dump() of a reloaded document is
// byte-identical to the original.
void write_json_file(const std::string& path, const nlohmann::json& doc);
nlohmann::json read_json_file(const std::string& path);

nlohmann::json make_checkpoint(const ParamStore& params, const Optimizer* optimizer);

}  // namespace gridmarl::nn
