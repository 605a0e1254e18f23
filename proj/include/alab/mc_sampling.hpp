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

#ifndef ALAB_MC_SAMPLING_HPP_
#define ALAB_MC_SAMPLING_HPP_

#include <Eigen/Core>

#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "alab/errors.hpp"
#include "alab/network.hpp"
#include "alab/rng.hpp"

namespace alab {

// How the T stochastic outputs for one instance are produced.
//   kMcd  : dropout-on passes over the clean input
//   kMcp  : dropout-off passes over T perturbed inputs
//   kBalc : paired passes over (x, z_t) sharing one dropout mask per sample
enum class McMode { kMcd, kMcp, kBalc };

inline std::string_view to_string(McMode m) {
  switch (m) {
    case McMode::kMcd: return "mcd";
    case McMode::kMcp: return "mcp";
    case McMode::kBalc: return "balc";
  }
  return "?";
}

inline McMode parse_mc_mode(std::string_view s) {
  if (s == "mcd") return McMode::kMcd;
  if (s == "mcp") return McMode::kMcp;
  if (s == "balc") return McMode::kBalc;
  throw Error("unknown MC mode '" + std::string(s) + "' (expected mcd, mcp or balc)");
}

// T x C matrix, one class-probability row per stochastic sample.
struct OutputMatrix {
  MatrixXd rows;
  McMode mode = McMode::kMcd;

  Index samples() const { return rows.rows(); }
  Index classes() const { return rows.cols(); }
  VectorXd mean() const { return rows.colwise().mean().transpose(); }
};

struct PerturbationSpec {
  double sigma = 0.0;  // standard deviation of additive Gaussian input noise
};

inline VectorXd perturb_input(const VectorXd& x, const PerturbationSpec& spec, Rng& rng) {
  if (spec.sigma == 0.0) return x;
  std::normal_distribution<double> noise(0.0, spec.sigma);
  VectorXd z(x.size());
  for (Index i = 0; i < x.size(); ++i) z[i] = x[i] + noise(rng);
  return z;
}

struct McOutputs {
  OutputMatrix g;
  std::optional<OutputMatrix> g_prime;  // present in kBalc mode only
};

inline McOutputs mc_outputs(const Network& net, const VectorXd& x, McMode mode, int samples,
                            const PerturbationSpec& spec, Rng& rng) {
  if (samples < 1) throw Error("MC sample count must be at least 1");
  if (spec.sigma < 0.0) throw Error("perturbation sigma must be non-negative");
  check_input(net, x);
  const Index c = net.shape.classes;
  McOutputs out;
  out.g.mode = mode;
  out.g.rows.resize(samples, c);
  switch (mode) {
    case McMode::kMcd:
      for (int t = 0; t < samples; ++t) out.g.rows.row(t) = forward(net, x, sample_mask(net.shape, rng)).transpose();
      break;
    case McMode::kMcp:
      for (int t = 0; t < samples; ++t) out.g.rows.row(t) = predict(net, perturb_input(x, spec, rng)).transpose();
      break;
    case McMode::kBalc: {
      OutputMatrix gp{MatrixXd(samples, c), mode};
      for (int t = 0; t < samples; ++t) {
        const DropoutMask mask = sample_mask(net.shape, rng);
        const VectorXd z = perturb_input(x, spec, rng);
        out.g.rows.row(t) = forward(net, x, mask).transpose();
        gp.rows.row(t) = forward(net, z, mask).transpose();
      }
      out.g_prime = std::move(gp);
      break;
    }
    default:
      throw Error("unknown MC mode");
  }
  return out;
}

}  // namespace alab

#endif  // ALAB_MC_SAMPLING_HPP_
