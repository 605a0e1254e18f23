/*
 * Copyright 2026 The alab Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ALAB_TRAIN_HPP_
#define ALAB_TRAIN_HPP_

#include <Eigen/Core>

#include <cmath>
#include <span>
#include <sstream>
#include <vector>

#include "alab/errors.hpp"
#include "alab/network.hpp"
#include "alab/rng.hpp"

namespace alab {

inline constexpr double kProbFloor = 1e-12;

inline double clamp_prob(double p) { return std::clamp(p, kProbFloor, 1.0 - kProbFloor); }

struct TrainBatch {
  MatrixXd features;        // B x m, one instance per row
  std::vector<int> labels;  // B class indices

  Index size() const { return features.rows(); }

  void validate(const NetworkShape& shape) const {
    if (features.rows() < 1) throw InvalidBatchError("empty training batch");
    if (static_cast<std::size_t>(features.rows()) != labels.size())
      throw InvalidBatchError("feature rows and labels differ in count");
    if (features.cols() != shape.inputs)
      throw InputShapeError("batch has " + std::to_string(features.cols()) + " features, network expects " +
                            std::to_string(shape.inputs));
    for (int y : labels)
      if (y < 0 || y >= shape.classes) throw InvalidBatchError("label out of range: " + std::to_string(y));
  }
};

// Class-imbalance weight for the selection loss: count(e=0) / max(1, count(e=1)).
inline double beta_coefficient(std::span<const int> errors) {
  if (errors.empty()) throw InvalidBatchError("beta_coefficient needs a non-empty error list");
  std::size_t zeros = 0;
  for (int e : errors) zeros += (e == 0);
  const std::size_t ones = errors.size() - zeros;
  return static_cast<double>(zeros) / static_cast<double>(std::max<std::size_t>(1, ones));
}

struct LossParts {
  double class_loss = 0.0;
  double selection_loss = 0.0;
  double beta = 0.0;

  double total() const { return class_loss + selection_loss; }
};

// Zero-one errors of the dropout-off prediction for every batch row.
inline std::vector<int> zero_one_errors(const Network& net, const TrainBatch& batch) {
  std::vector<int> e(batch.labels.size());
  for (Index i = 0; i < batch.size(); ++i) {
    const VectorXd p = predict(net, batch.features.row(i).transpose());
    e[i] = argmax(p) != batch.labels[i] ? 1 : 0;
  }
  return e;
}

namespace detail {

// Accumulates gradients of a scalar loss through one traced forward pass,
// given dL/d(logits) at the head and dL/d(selector logit).
inline void backprop(const Network& net, const ForwardTrace& tr, const DropoutMask& mask,
                     const VectorXd* d_logits, double d_selector, Parameters& grad) {
  const VectorXd& rep = tr.representation();
  VectorXd d_rep = VectorXd::Zero(rep.size());
  if (d_logits) {
    grad.head.weight.noalias() += *d_logits * rep.transpose();
    grad.head.bias += *d_logits;
    d_rep.noalias() += net.params.head.weight.transpose() * *d_logits;
  }
  if (d_selector != 0.0) {
    grad.selector.weight += d_selector * rep.transpose();
    grad.selector.bias(0) += d_selector;
    d_rep += d_selector * net.params.selector.weight.row(0).transpose();
  }
  VectorXd d_post = std::move(d_rep);
  for (std::size_t l = net.params.hidden.size(); l-- > 0;) {
    VectorXd d_pre = d_post.array() * mask.scale[l].array();
    for (Index k = 0; k < d_pre.size(); ++k)
      d_pre[k] *= activate_derivative(net.shape.activation, tr.pre[l][k]);
    const VectorXd& in = l == 0 ? tr.input : tr.post[l - 1];
    grad.hidden[l].weight.noalias() += d_pre * in.transpose();
    grad.hidden[l].bias += d_pre;
    if (l > 0) d_post = net.params.hidden[l].weight.transpose() * d_pre;
  }
}

}  // namespace detail

// Joint objective summed over the batch:
//   sum_i  -log p(y_i | x_i)  -  beta e_i log t_i  -  (1 - e_i) log(1 - t_i)
// The class term uses the supplied dropout mask per row; the selector term
// and the zero-one errors e_i use dropout-off passes. beta is recomputed
// from this batch. If `grad` is non-null it receives the gradient (it is
// overwritten, not accumulated into).
inline LossParts joint_loss(const Network& net, const TrainBatch& batch, std::span<const DropoutMask> masks,
                            Parameters* grad) {
  batch.validate(net.shape);
  if (masks.size() != static_cast<std::size_t>(batch.size()))
    throw InvalidBatchError("one dropout mask per batch row is required");
  const std::vector<int> errors = zero_one_errors(net, batch);
  LossParts out;
  out.beta = beta_coefficient(errors);
  if (grad) {
    *grad = net.zeros_like();
  }
  const DropoutMask off = identity_mask(net.shape);
  for (Index i = 0; i < batch.size(); ++i) {
    const VectorXd x = batch.features.row(i).transpose();
    const int y = batch.labels[i];

    const ForwardTrace tr = trace_forward(net, x, masks[i]);
    const double py = tr.probs[y];
    out.class_loss -= std::log(clamp_prob(py));

    const ForwardTrace tr_off = trace_forward(net, x, off);
    const double t = selector_from_representation(net, tr_off.representation());
    const int e = errors[i];
    const double w1 = out.beta * e;
    const double w0 = 1.0 - e;
    out.selection_loss -= w1 * std::log(clamp_prob(t)) + w0 * std::log(clamp_prob(1.0 - t));

    if (grad) {
      VectorXd d_logits = tr.probs;
      d_logits[y] -= 1.0;
      if (py < kProbFloor) d_logits.setZero();
      // d/dz of -w1 log(sigmoid z) - w0 log(1 - sigmoid z); zero where the clamp is active.
      double d_sel = 0.0;
      if (t > kProbFloor) d_sel += w1 * (t - 1.0);
      if (t < 1.0 - kProbFloor) d_sel += w0 * t;
      detail::backprop(net, tr, masks[i], &d_logits, 0.0, *grad);
      detail::backprop(net, tr_off, off, nullptr, d_sel, *grad);
    }
  }
  if (!std::isfinite(out.class_loss) || !std::isfinite(out.selection_loss)) {
    std::ostringstream msg;
    msg << "non-finite loss: class=" << out.class_loss << " selection=" << out.selection_loss
        << " beta=" << out.beta << " batch=" << batch.size();
    throw NumericFailure(msg.str());
  }
  return out;
}

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam(const Network& net, AdamConfig cfg) : cfg_(cfg), m_(net.zeros_like()), v_(net.zeros_like()) {}

  void step(Network& net, const Parameters& grad) {
    ++steps_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(steps_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(steps_));
    auto p = net.params.tensors();
    auto g = grad.tensors();
    auto m = m_.tensors();
    auto v = v_.tensors();
    for (std::size_t k = 0; k < p.size(); ++k) {
      for (std::size_t i = 0; i < p[k].size(); ++i) {
        m[k][i] = cfg_.beta1 * m[k][i] + (1.0 - cfg_.beta1) * g[k][i];
        v[k][i] = cfg_.beta2 * v[k][i] + (1.0 - cfg_.beta2) * g[k][i] * g[k][i];
        p[k][i] -= cfg_.learning_rate * (m[k][i] / c1) / (std::sqrt(v[k][i] / c2) + cfg_.epsilon);
      }
    }
  }

  long steps() const { return steps_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  Parameters m_;
  Parameters v_;
  long steps_ = 0;
};

// One gradient update of the joint objective. Returns the loss components
// evaluated before the update.
inline LossParts train_step(Network& net, const TrainBatch& batch, Adam& opt, Rng& rng) {
  batch.validate(net.shape);
  std::vector<DropoutMask> masks;
  masks.reserve(static_cast<std::size_t>(batch.size()));
  for (Index i = 0; i < batch.size(); ++i) masks.push_back(sample_mask(net.shape, rng));
  Parameters grad;
  const LossParts loss = joint_loss(net, batch, masks, &grad);
  opt.step(net, grad);
  return loss;
}

}  // namespace alab

#endif  // ALAB_TRAIN_HPP_
