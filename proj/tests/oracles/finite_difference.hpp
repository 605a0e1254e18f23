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

// Central finite-difference gradient of the joint training loss, used as the
// reference for analytic backpropagation.

#ifndef ALAB_TESTS_ORACLES_FINITE_DIFFERENCE_HPP_
#define ALAB_TESTS_ORACLES_FINITE_DIFFERENCE_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "alab/network.hpp"
#include "alab/rng.hpp"
#include "alab/train.hpp"

namespace alab::oracle {

struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t parameters = 0;
  double beta = 0.0;
};

// Relative error |a - n| / max(|a|, |n|, floor) between the analytic gradient
// and a central difference with step h, over every parameter.
inline GradientCheck check_gradient(const Network& net, const TrainBatch& batch, std::span<const DropoutMask> masks,
                                    double h = 1e-5, double floor = 1e-6) {
  Parameters analytic;
  GradientCheck out;
  out.beta = joint_loss(net, batch, masks, &analytic).beta;
  Network probe = net;
  auto p = probe.params.tensors();
  auto g = analytic.tensors();
  for (std::size_t k = 0; k < p.size(); ++k) {
    for (std::size_t i = 0; i < p[k].size(); ++i) {
      const double saved = p[k][i];
      p[k][i] = saved + h;
      const double up = joint_loss(probe, batch, masks, nullptr).total();
      p[k][i] = saved - h;
      const double down = joint_loss(probe, batch, masks, nullptr).total();
      p[k][i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double denom = std::max({std::abs(numeric), std::abs(g[k][i]), floor});
      out.max_relative_error = std::max(out.max_relative_error, std::abs(numeric - g[k][i]) / denom);
      ++out.parameters;
    }
  }
  return out;
}

// Freshly initialised biases are exactly zero, which parks ReLU units on
// their kink for inputs that zero out a layer. Random biases move them off
// so a central difference is meaningful.
inline void randomize_biases(Network& net, Rng& rng, double scale = 0.1) {
  std::normal_distribution<double> n01(0.0, scale);
  for (auto& d : net.params.hidden)
    for (Index i = 0; i < d.bias.size(); ++i) d.bias[i] = n01(rng);
  for (Index i = 0; i < net.params.head.bias.size(); ++i) net.params.head.bias[i] = n01(rng);
  net.params.selector.bias[0] = n01(rng);
}

// A batch on which roughly half the rows are misclassified by the dropout-off
// network, so beta differs from both 0 and 1.
inline TrainBatch mixed_error_batch(const Network& net, int rows, Rng& rng) {
  TrainBatch b;
  b.features.resize(rows, net.shape.inputs);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (Index i = 0; i < b.features.size(); ++i) b.features.data()[i] = n01(rng);
  for (int i = 0; i < rows; ++i) {
    const int pred = static_cast<int>(argmax(predict(net, b.features.row(i).transpose())));
    const bool correct = i % 5 < 3;
    b.labels.push_back(correct ? pred : (pred + 1) % static_cast<int>(net.shape.classes));
  }
  return b;
}

}  // namespace alab::oracle

#endif  // ALAB_TESTS_ORACLES_FINITE_DIFFERENCE_HPP_
