// ectc/model.hpp

// Copyright 2026  ECTC Toolkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ectc/lattice.hpp"
#include "ectc/random.hpp"
#include "ectc/similarity.hpp"
#include "ectc/types.hpp"

namespace ectc::model {

enum class SupervisionMode { kWeak, kSemi, kUniform, kFull };

inline SupervisionMode mode_from_string(const std::string& name) {
  if (name == "weak") return SupervisionMode::kWeak;
  if (name == "semi") return SupervisionMode::kSemi;
  if (name == "uniform") return SupervisionMode::kUniform;
  if (name == "full") return SupervisionMode::kFull;
  throw InvalidInputError("unknown supervision mode: '" + name + "'");
}

inline std::string to_string(SupervisionMode mode) {
  switch (mode) {
    case SupervisionMode::kWeak: return "weak";
    case SupervisionMode::kSemi: return "semi";
    case SupervisionMode::kUniform: return "uniform";
    case SupervisionMode::kFull: return "full";
  }
  throw InvalidInputError("invalid supervision mode value");
}

struct TrainConfig {
  int hidden = 64;
  double learning_rate = 1e-2;
  double weight_decay = 1e-5;
  double clip = 5.0;
  double rms_decay = 0.9;
  double rms_epsilon = 1e-8;
  int epochs = 10;
  std::uint64_t seed = 0;
  SupervisionMode mode = SupervisionMode::kWeak;
  double theta = 0.5;
  similarity::Mode similarity = similarity::Mode::kNone;
  int cluster_len = 20;
  int cluster_iters = 10;

  void validate() const {
    if (hidden < 1) throw InvalidInputError("hidden size must be positive");
    if (!(learning_rate > 0.0)) throw InvalidInputError("learning rate must be positive");
    if (!(clip > 0.0)) throw InvalidInputError("gradient clip must be positive");
    if (weight_decay < 0.0) throw InvalidInputError("weight decay must be non-negative");
    if (!(rms_decay > 0.0) || rms_decay >= 1.0) {
      throw InvalidInputError("rmsprop decay must lie in (0, 1)");
    }
    if (!(rms_epsilon > 0.0)) throw InvalidInputError("rmsprop epsilon must be positive");
    if (epochs < 0) throw InvalidInputError("epoch count must be non-negative");
    if (!(theta > 0.0) || theta > 1.0) throw InvalidInputError("theta must lie in (0, 1]");
  }
};

// One direction of the recurrent layer. Gate order along the 4H axis is
// input, forget, cell candidate, output.
struct LstmDirection {
  MatrixXd w_input;  // 4H x d
  MatrixXd w_recur;  // 4H x H
  VectorXd bias;     // 4H
};

struct ModelParams {
  int input_dim = 0;
  int hidden_dim = 0;
  int num_actions = 0;
  LstmDirection fwd, bwd;
  MatrixXd w_out;  // A x 2H
  VectorXd b_out;  // A
};

template <typename F>
void visit_tensors(ModelParams& p, F&& f) {
  f(p.fwd.w_input);
  f(p.fwd.w_recur);
  f(p.fwd.bias);
  f(p.bwd.w_input);
  f(p.bwd.w_recur);
  f(p.bwd.bias);
  f(p.w_out);
  f(p.b_out);
}

template <typename F>
void visit_tensors(const ModelParams& p, F&& f) {
  f(p.fwd.w_input);
  f(p.fwd.w_recur);
  f(p.fwd.bias);
  f(p.bwd.w_input);
  f(p.bwd.w_recur);
  f(p.bwd.bias);
  f(p.w_out);
  f(p.b_out);
}

inline ModelParams zeros_like(const ModelParams& p) {
  ModelParams z = p;
  visit_tensors(z, [](auto& tensor) { tensor.setZero(); });
  return z;
}

// Small uniform weights; the forget-gate bias starts at 1 so cells carry
// state from the first updates on.
inline ModelParams init_model(int input_dim, int hidden_dim, int num_actions,
                              std::uint64_t seed) {
  if (input_dim < 1 || hidden_dim < 1 || num_actions < 1) {
    throw InvalidInputError("model dimensions must be positive");
  }
  ModelParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.num_actions = num_actions;
  const int gates = 4 * hidden_dim;
  p.fwd = {MatrixXd(gates, input_dim), MatrixXd(gates, hidden_dim), VectorXd(gates)};
  p.bwd = {MatrixXd(gates, input_dim), MatrixXd(gates, hidden_dim), VectorXd(gates)};
  p.w_out = MatrixXd(num_actions, 2 * hidden_dim);
  p.b_out = VectorXd(num_actions);

  Rng rng(seed);
  visit_tensors(p, [&rng](auto& tensor) {
    for (int i = 0; i < tensor.size(); ++i) {
      tensor.data()[i] = rng.uniform(-0.08, 0.08);
    }
  });
  p.fwd.bias.segment(hidden_dim, hidden_dim).setOnes();
  p.bwd.bias.segment(hidden_dim, hidden_dim).setOnes();
  return p;
}

inline MatrixXd row_softmax(const MatrixXd& y) {
  MatrixXd z(y.rows(), y.cols());
  for (int t = 0; t < y.rows(); ++t) {
    const double m = y.row(t).maxCoeff();
    z.row(t) = (y.row(t).array() - m).exp();
    z.row(t) /= z.row(t).sum();
  }
  return z;
}

struct DirectionCache {
  MatrixXd gates;      // 4H x T, post-activation, indexed by real time
  MatrixXd cells;      // H x T
  MatrixXd cell_tanh;  // H x T
  MatrixXd hidden;     // H x T
};

struct ForwardCache {
  MatrixXd inputs;  // d x T
  DirectionCache fwd, bwd;
  MatrixXd y;  // T x A
  PosteriorGrid z;
};

namespace detail {

inline void run_direction(const LstmDirection& dir, const MatrixXd& inputs, bool reverse,
                          int hidden_dim, DirectionCache& cache) {
  const int T = static_cast<int>(inputs.cols());
  const int H = hidden_dim;
  cache.gates.resize(4 * H, T);
  cache.cells.resize(H, T);
  cache.cell_tanh.resize(H, T);
  cache.hidden.resize(H, T);

  VectorXd h_prev = VectorXd::Zero(H);
  VectorXd c_prev = VectorXd::Zero(H);
  VectorXd pre(4 * H);
  for (int step = 0; step < T; ++step) {
    const int t = reverse ? T - 1 - step : step;
    pre.noalias() = dir.w_input * inputs.col(t);
    pre.noalias() += dir.w_recur * h_prev;
    pre += dir.bias;

    auto gate = cache.gates.col(t);
    gate.head(H) = pre.head(H).unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
    gate.segment(H, H) =
        pre.segment(H, H).unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
    gate.segment(2 * H, H) = pre.segment(2 * H, H).array().tanh();
    gate.segment(3 * H, H) =
        pre.segment(3 * H, H).unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });

    cache.cells.col(t) = gate.segment(H, H).cwiseProduct(c_prev) +
                         gate.head(H).cwiseProduct(gate.segment(2 * H, H));
    cache.cell_tanh.col(t) = cache.cells.col(t).array().tanh();
    cache.hidden.col(t) = gate.segment(3 * H, H).cwiseProduct(cache.cell_tanh.col(t));

    h_prev = cache.hidden.col(t);
    c_prev = cache.cells.col(t);
  }
}

inline void backprop_direction(const LstmDirection& dir, const DirectionCache& cache,
                               const MatrixXd& inputs, const MatrixXd& dh_ext, bool reverse,
                               int hidden_dim, LstmDirection& grad) {
  const int T = static_cast<int>(inputs.cols());
  const int H = hidden_dim;
  VectorXd dh_carry = VectorXd::Zero(H);
  VectorXd dc_carry = VectorXd::Zero(H);
  VectorXd dh(H), dc(H), da(4 * H);
  for (int step = T - 1; step >= 0; --step) {
    const int t = reverse ? T - 1 - step : step;
    const bool has_prev = reverse ? t + 1 < T : t > 0;
    const int t_prev = reverse ? t + 1 : t - 1;

    const auto gate = cache.gates.col(t);
    const auto i = gate.head(H);
    const auto f = gate.segment(H, H);
    const auto g = gate.segment(2 * H, H);
    const auto o = gate.segment(3 * H, H);
    const auto tc = cache.cell_tanh.col(t);

    dh = dh_ext.col(t) + dh_carry;
    dc = dc_carry;
    dc.array() += dh.array() * o.array() * (1.0 - tc.array().square());

    da.segment(3 * H, H).array() = dh.array() * tc.array() * o.array() * (1.0 - o.array());
    if (has_prev) {
      da.segment(H, H).array() =
          dc.array() * cache.cells.col(t_prev).array() * f.array() * (1.0 - f.array());
    } else {
      da.segment(H, H).setZero();
    }
    da.head(H).array() = dc.array() * g.array() * i.array() * (1.0 - i.array());
    da.segment(2 * H, H).array() = dc.array() * i.array() * (1.0 - g.array().square());

    grad.w_input.noalias() += da * inputs.col(t).transpose();
    if (has_prev) {
      grad.w_recur.noalias() += da * cache.hidden.col(t_prev).transpose();
    }
    grad.bias += da;

    dh_carry.noalias() = dir.w_recur.transpose() * da;
    dc_carry = dc.cwiseProduct(f);
  }
}

}  // namespace detail

// Runs both directions over the frame sequence and projects the concatenated
// hidden states to per-frame scores; z is the row softmax of y.
inline ForwardCache net_forward(const ModelParams& p, const MatrixXd& features) {
  if (static_cast<int>(features.cols()) != p.input_dim || features.rows() < 1) {
    throw InvalidInputError("feature matrix must be T x " + std::to_string(p.input_dim));
  }
  const int T = static_cast<int>(features.rows());
  const int H = p.hidden_dim;
  ForwardCache cache;
  cache.inputs = features.transpose();
  detail::run_direction(p.fwd, cache.inputs, false, H, cache.fwd);
  detail::run_direction(p.bwd, cache.inputs, true, H, cache.bwd);

  cache.y.resize(T, p.num_actions);
  for (int t = 0; t < T; ++t) {
    cache.y.row(t) = (p.w_out.leftCols(H) * cache.fwd.hidden.col(t) +
                      p.w_out.rightCols(H) * cache.bwd.hidden.col(t) + p.b_out)
                         .transpose();
    if (!cache.y.row(t).allFinite()) {
      throw NumericError("non-finite network activation at frame " + std::to_string(t));
    }
  }
  cache.z = row_softmax(cache.y);
  return cache;
}

// Full backpropagation through time given d(loss)/dy.
inline ModelParams net_backward(const ModelParams& p, const ForwardCache& cache,
                                const GradientGrid& d_y) {
  const int T = static_cast<int>(cache.inputs.cols());
  const int H = p.hidden_dim;
  if (d_y.rows() != T || d_y.cols() != p.num_actions) {
    throw InvalidInputError("upstream gradient must be T x A");
  }
  ModelParams grad = zeros_like(p);

  MatrixXd dh_fwd = MatrixXd::Zero(H, T);
  MatrixXd dh_bwd = MatrixXd::Zero(H, T);
  for (int t = 0; t < T; ++t) {
    const VectorXd dy = d_y.row(t).transpose();
    grad.w_out.leftCols(H).noalias() += dy * cache.fwd.hidden.col(t).transpose();
    grad.w_out.rightCols(H).noalias() += dy * cache.bwd.hidden.col(t).transpose();
    grad.b_out += dy;
    dh_fwd.col(t).noalias() = p.w_out.leftCols(H).transpose() * dy;
    dh_bwd.col(t).noalias() = p.w_out.rightCols(H).transpose() * dy;
  }
  detail::backprop_direction(p.fwd, cache.fwd, cache.inputs, dh_fwd, false, H, grad.fwd);
  detail::backprop_direction(p.bwd, cache.bwd, cache.inputs, dh_bwd, true, H, grad.bwd);
  return grad;
}

// Even split of the ordering over the frames: frame f (0-based) takes the
// label at position ceil((f+1)*S/T) - 1.
inline Path uniform_target(const Ordering& ell, int num_frames) {
  const int S = static_cast<int>(ell.size());
  if (S < 1) throw InvalidInputError("ordering must be non-empty");
  if (S > num_frames) {
    throw InfeasibleError("ordering longer than the frame count");
  }
  Path path(static_cast<std::size_t>(num_frames));
  for (int f = 0; f < num_frames; ++f) {
    const int s = static_cast<int>((static_cast<long long>(f + 1) * S + num_frames - 1) /
                                   num_frames) -
                  1;
    path[static_cast<std::size_t>(f)] = ell[static_cast<std::size_t>(s)];
  }
  return path;
}

namespace detail {

// Assigns each anchor an ordering position: non-decreasing, label-matching,
// and such that no span between anchors (or before the first / after the
// last) must place more labels than it has frames. Exhaustive with
// memoization, so a feasible assignment is found whenever one exists.
inline std::vector<int> embed_anchors(const Ordering& ell, int num_frames,
                                      const SparseAnnotations& ann) {
  const int S = static_cast<int>(ell.size());
  const int M = static_cast<int>(ann.anchors.size());
  std::vector<std::vector<char>> dead(static_cast<std::size_t>(M),
                                      std::vector<char>(static_cast<std::size_t>(S), 0));
  std::vector<int> pos(static_cast<std::size_t>(M), -1);

  const std::function<bool(int, int, int)> place = [&](int m, int prev_pos,
                                                       int prev_frame) -> bool {
    if (m == M) return true;
    const auto& [frame, action] = ann.anchors[static_cast<std::size_t>(m)];
    const int max_pos = std::min(S - 1, prev_pos + (frame - prev_frame));
    for (int s = prev_pos; s <= max_pos; ++s) {
      if (ell[static_cast<std::size_t>(s)] != action) continue;
      if (dead[static_cast<std::size_t>(m)][static_cast<std::size_t>(s)]) continue;
      if (m == M - 1 && S - 1 - s > num_frames - 1 - frame) continue;
      pos[static_cast<std::size_t>(m)] = s;
      if (place(m + 1, s, frame)) return true;
      dead[static_cast<std::size_t>(m)][static_cast<std::size_t>(s)] = 1;
    }
    return false;
  };
  if (!place(0, 0, 0)) {
    throw InfeasibleSupervisionError("anchors cannot be embedded into the ordering in order");
  }
  return pos;
}

}  // namespace detail

// Anchored variant: anchors are mapped onto ordering positions, pinned in
// the output, and the labels between consecutive anchors are distributed
// evenly over the frames between them.
inline Path uniform_target(const Ordering& ell, int num_frames, const SparseAnnotations& ann) {
  if (ann.empty()) return uniform_target(ell, num_frames);
  validate_annotations(ann, ell, num_frames);
  const int S = static_cast<int>(ell.size());
  const std::vector<int> anchor_pos = detail::embed_anchors(ell, num_frames, ann);

  Path path(static_cast<std::size_t>(num_frames), -1);
  auto fill_span = [&](int frame_lo, int frame_hi, int pos_lo, int pos_hi) {
    const int n = frame_hi - frame_lo + 1;
    const int k = pos_hi - pos_lo + 1;
    if (k > n) {
      throw InfeasibleSupervisionError("not enough frames between anchors for the ordering");
    }
    for (int j = 0; j < n; ++j) {
      const int local =
          static_cast<int>((static_cast<long long>(j + 1) * k + n - 1) / n) - 1;
      path[static_cast<std::size_t>(frame_lo + j)] =
          ell[static_cast<std::size_t>(pos_lo + local)];
    }
  };

  const int M = static_cast<int>(ann.anchors.size());
  fill_span(0, ann.anchors[0].first, 0, anchor_pos[0]);
  for (int m = 0; m + 1 < M; ++m) {
    fill_span(ann.anchors[static_cast<std::size_t>(m)].first,
              ann.anchors[static_cast<std::size_t>(m + 1)].first,
              anchor_pos[static_cast<std::size_t>(m)],
              anchor_pos[static_cast<std::size_t>(m + 1)]);
  }
  fill_span(ann.anchors[static_cast<std::size_t>(M - 1)].first, num_frames - 1,
            anchor_pos[static_cast<std::size_t>(M - 1)], S - 1);
  return path;
}

// Per-frame argmax decode; ties go to the lowest action index.
inline Path predict_frames(const ModelParams& p, const MatrixXd& features) {
  const ForwardCache cache = net_forward(p, features);
  const int T = static_cast<int>(cache.z.rows());
  Path path(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    int best = 0;
    for (int k = 1; k < p.num_actions; ++k) {
      if (cache.z(t, k) > cache.z(t, best)) best = k;
    }
    path[static_cast<std::size_t>(t)] = best;
  }
  return path;
}

struct RmsPropState {
  ModelParams mean_square;
};

inline RmsPropState make_optimizer_state(const ModelParams& p) {
  return RmsPropState{zeros_like(p)};
}

namespace detail {

template <typename Tensor>
void update_tensor(Tensor& param, Tensor& mean_square, const Tensor& grad,
                   const TrainConfig& cfg) {
  const auto clipped = grad.array().min(cfg.clip).max(-cfg.clip);
  const auto step = clipped + cfg.weight_decay * param.array();
  mean_square.array() =
      cfg.rms_decay * mean_square.array() + (1.0 - cfg.rms_decay) * step.square();
  param.array() -= cfg.learning_rate * step / (mean_square.array().sqrt() + cfg.rms_epsilon);
}

}  // namespace detail

// Elementwise clip of the loss gradient, then an RMSProp step with L2 decay.
inline void apply_update(ModelParams& params, RmsPropState& state, const ModelParams& grads,
                         const TrainConfig& cfg) {
  detail::update_tensor(params.fwd.w_input, state.mean_square.fwd.w_input, grads.fwd.w_input,
                        cfg);
  detail::update_tensor(params.fwd.w_recur, state.mean_square.fwd.w_recur, grads.fwd.w_recur,
                        cfg);
  detail::update_tensor(params.fwd.bias, state.mean_square.fwd.bias, grads.fwd.bias, cfg);
  detail::update_tensor(params.bwd.w_input, state.mean_square.bwd.w_input, grads.bwd.w_input,
                        cfg);
  detail::update_tensor(params.bwd.w_recur, state.mean_square.bwd.w_recur, grads.bwd.w_recur,
                        cfg);
  detail::update_tensor(params.bwd.bias, state.mean_square.bwd.bias, grads.bwd.bias, cfg);
  detail::update_tensor(params.w_out, state.mean_square.w_out, grads.w_out, cfg);
  detail::update_tensor(params.b_out, state.mean_square.b_out, grads.b_out, cfg);
}

// One training record, index-encoded and with its similarity track attached.
struct TrainingExample {
  std::string id;
  MatrixXd features;  // T x d
  Ordering ordering;
  Path frame_labels;          // empty when ground truth is unavailable
  SparseAnnotations anchors;  // empty outside the semi-supervised modes
  SimilarityTrack sim;        // attached by train(); empty until then
};

struct StepResult {
  double loss = 0.0;
  double frame_acc = -1.0;  // -1 when frame labels are unavailable
};

namespace detail {

inline lattice::LossGrad cross_entropy(const PosteriorGrid& z, const Path& target) {
  const int T = static_cast<int>(z.rows());
  if (static_cast<int>(target.size()) != T) {
    throw InvalidInputError("target path length does not match the frame count");
  }
  lattice::LossGrad out;
  out.loss = 0.0;
  out.grad = z;
  for (int t = 0; t < T; ++t) {
    const int k = target[static_cast<std::size_t>(t)];
    out.loss -= std::log(z(t, k));
    out.grad(t, k) -= 1.0;
  }
  return out;
}

}  // namespace detail

// Single stochastic step on one example: loss gradient by supervision mode,
// elementwise clip, RMSProp update.
inline StepResult train_step(ModelParams& params, RmsPropState& state,
                             const TrainingExample& ex, const TrainConfig& cfg) {
  const ForwardCache cache = net_forward(params, ex.features);
  const int T = static_cast<int>(ex.features.rows());

  lattice::LossGrad lg;
  switch (cfg.mode) {
    case SupervisionMode::kWeak:
      lg = lattice::ectc_loss_grad(cache.z, ex.ordering, ex.sim, nullptr);
      break;
    case SupervisionMode::kSemi:
      lg = lattice::ectc_loss_grad(cache.z, ex.ordering, ex.sim,
                                   ex.anchors.empty() ? nullptr : &ex.anchors);
      break;
    case SupervisionMode::kUniform:
      lg = detail::cross_entropy(cache.z, uniform_target(ex.ordering, T, ex.anchors));
      break;
    case SupervisionMode::kFull:
      if (static_cast<int>(ex.frame_labels.size()) != T) {
        throw InvalidInputError("full supervision needs per-frame labels");
      }
      lg = detail::cross_entropy(cache.z, ex.frame_labels);
      break;
  }

  const ModelParams grads = net_backward(params, cache, lg.grad);
  apply_update(params, state, grads, cfg);

  StepResult result;
  result.loss = lg.loss;
  if (static_cast<int>(ex.frame_labels.size()) == T) {
    int matches = 0;
    for (int t = 0; t < T; ++t) {
      int best = 0;
      for (int k = 1; k < params.num_actions; ++k) {
        if (cache.z(t, k) > cache.z(t, best)) best = k;
      }
      if (best == ex.frame_labels[static_cast<std::size_t>(t)]) ++matches;
    }
    result.frame_acc = static_cast<double>(matches) / T;
  }
  return result;
}

struct EpochLog {
  int epoch = 0;
  double mean_loss = 0.0;
  double frame_acc = -1.0;  // -1 when no record carried labels
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochLog> log;
};

// Attaches the configured similarity track to every example.
inline void attach_similarity(std::vector<TrainingExample>& examples, const TrainConfig& cfg) {
  for (TrainingExample& ex : examples) {
    ex.sim = similarity::build_track(ex.features, cfg.similarity, cfg.theta, cfg.cluster_len,
                                     cfg.cluster_iters);
  }
}

// Sequential single-example training over shuffled epochs, deterministic for
// a fixed seed. Any per-record failure aborts with the record id attached.
inline TrainResult train(std::vector<TrainingExample> examples, const TrainConfig& cfg,
                         int num_actions,
                         const std::function<void(const EpochLog&)>& on_epoch = nullptr) {
  cfg.validate();
  if (examples.empty()) throw InvalidInputError("training corpus is empty");
  const int input_dim = static_cast<int>(examples[0].features.cols());
  attach_similarity(examples, cfg);

  TrainResult result;
  result.params = init_model(input_dim, cfg.hidden, num_actions, cfg.seed);
  RmsPropState state = make_optimizer_state(result.params);

  Rng shuffle_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    double acc_sum = 0.0;
    int acc_count = 0;
    for (std::size_t idx : order) {
      const TrainingExample& ex = examples[idx];
      StepResult step;
      try {
        step = train_step(result.params, state, ex, cfg);
      } catch (const InfeasibleSupervisionError& e) {
        throw InfeasibleSupervisionError("record '" + ex.id + "': " + e.what());
      } catch (const InfeasibleError& e) {
        throw InfeasibleError("record '" + ex.id + "': " + e.what());
      } catch (const NumericError& e) {
        throw NumericError("record '" + ex.id + "': " + e.what());
      } catch (const Error& e) {
        throw InvalidInputError("record '" + ex.id + "': " + e.what());
      }
      loss_sum += step.loss;
      if (step.frame_acc >= 0.0) {
        acc_sum += step.frame_acc;
        ++acc_count;
      }
    }
    EpochLog log;
    log.epoch = epoch + 1;
    log.mean_loss = loss_sum / static_cast<double>(examples.size());
    if (acc_count > 0) log.frame_acc = acc_sum / acc_count;
    if (on_epoch) on_epoch(log);
    result.log.push_back(log);
  }
  return result;
}

}  // namespace ectc::model
