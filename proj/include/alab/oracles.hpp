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

#ifndef ALAB_ORACLES_HPP_
#define ALAB_ORACLES_HPP_

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <string_view>

#include "alab/acquisition.hpp"
#include "alab/errors.hpp"
#include "alab/mc_sampling.hpp"
#include "alab/rng.hpp"
#include "alab/soqal.hpp"

namespace alab {

// Who decides between asking the oracle and pseudo-labelling.
enum class Strategy { kNoOracle, kEpsilonGreedy, kEntropyResponse, kSoqal, kFullOracle };

enum class NoiseMode { kNone, kRandom, kNearestNeighbour };

// Space in which nearest-neighbour label noise measures distance.
enum class NoiseSpace { kPenultimate, kRawFeatures };

inline std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kNoOracle: return "no_oracle";
    case Strategy::kEpsilonGreedy: return "epsilon_greedy";
    case Strategy::kEntropyResponse: return "entropy_response";
    case Strategy::kSoqal: return "soqal";
    case Strategy::kFullOracle: return "full_oracle";
  }
  return "?";
}

inline Strategy parse_strategy(std::string_view s) {
  if (s == "no_oracle") return Strategy::kNoOracle;
  if (s == "epsilon_greedy") return Strategy::kEpsilonGreedy;
  if (s == "entropy_response") return Strategy::kEntropyResponse;
  if (s == "soqal") return Strategy::kSoqal;
  if (s == "full_oracle") return Strategy::kFullOracle;
  throw Error("unknown strategy '" + std::string(s) + "'");
}

inline std::string_view to_string(NoiseMode m) {
  switch (m) {
    case NoiseMode::kNone: return "none";
    case NoiseMode::kRandom: return "random";
    case NoiseMode::kNearestNeighbour: return "nearest_neighbour";
  }
  return "?";
}

inline NoiseMode parse_noise_mode(std::string_view s) {
  if (s == "none") return NoiseMode::kNone;
  if (s == "random") return NoiseMode::kRandom;
  if (s == "nearest_neighbour") return NoiseMode::kNearestNeighbour;
  throw Error("unknown noise mode '" + std::string(s) + "'");
}

inline std::string_view to_string(NoiseSpace s) {
  return s == NoiseSpace::kPenultimate ? "penultimate" : "raw";
}

inline NoiseSpace parse_noise_space(std::string_view s) {
  if (s == "penultimate") return NoiseSpace::kPenultimate;
  if (s == "raw") return NoiseSpace::kRawFeatures;
  throw Error("unknown noise space '" + std::string(s) + "'");
}

struct OracleConfig {
  Strategy strategy = Strategy::kSoqal;
  NoiseMode noise = NoiseMode::kNone;
  double gamma = 0.0;      // flip probability
  double epsilon_k = 5.0;  // epsilon-greedy decay constant
  double entropy_w = 0.9;  // entropy-response fraction of log C
  NoiseSpace space = NoiseSpace::kPenultimate;

  void validate() const {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error("oracle gamma must lie in [0, 1]");
    if (!(entropy_w > 0.0 && entropy_w <= 1.0)) throw Error("entropy_response w must lie in (0, 1]");
    if (!(epsilon_k > 0.0)) throw Error("epsilon_greedy k must be positive");
  }
};

// Uniform over the C - 1 labels other than `label`.
inline int flip_random(int label, int classes, Rng& rng) {
  if (classes < 2) throw NoValidFlipError("cannot flip a label with fewer than two classes");
  const int pick = std::uniform_int_distribution<int>(0, classes - 2)(rng);
  return pick >= label ? pick + 1 : pick;
}

// A labelled instance as seen by the nearest-neighbour noise model.
struct ReferenceInstance {
  InstanceId id = 0;
  VectorXd embedding;
  int label = 0;
};

// Label of the closest reference instance (Euclidean, in embedding space)
// whose label differs from `label`. Equal distances go to the lowest id.
inline int flip_nearest_neighbour(const VectorXd& embedding, int label, std::span<const ReferenceInstance> reference) {
  const ReferenceInstance* best = nullptr;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (const auto& r : reference) {
    if (r.label == label) continue;
    if (r.embedding.size() != embedding.size()) throw InputShapeError("reference embedding dimension mismatch");
    const double d2 = (r.embedding - embedding).squaredNorm();
    if (d2 < best_d2 || (d2 == best_d2 && best && r.id < best->id)) {
      best = &r;
      best_d2 = d2;
    }
  }
  if (!best) throw NoValidFlipError("no reference instance with a different label");
  return best->label;
}

// What a noisy oracle needs besides the true label.
struct NoiseContext {
  const VectorXd* embedding = nullptr;
  std::span<const ReferenceInstance> reference;
};

// Returns the true label with probability 1 - gamma, otherwise a flipped one.
// Exactly one uniform draw decides whether to flip, so replays under the same
// stream are identical.
inline int oracle_label(int true_label, int classes, const OracleConfig& cfg, const NoiseContext& ctx, Rng& rng) {
  const double u = uniform01(rng);
  if (cfg.noise == NoiseMode::kNone || !(u < cfg.gamma)) return true_label;
  if (cfg.noise == NoiseMode::kRandom) return flip_random(true_label, classes, rng);
  if (!ctx.embedding) throw Error("nearest-neighbour noise needs an instance embedding");
  return flip_nearest_neighbour(*ctx.embedding, true_label, ctx.reference);
}

// Probability of asking the oracle at `epoch`: exp(-epoch / (k * tau)).
inline double epsilon_schedule(int epoch, double k, double tau) {
  if (!(k > 0.0) || !(tau > 0.0)) throw Error("epsilon schedule needs k > 0 and tau > 0");
  return std::exp(-static_cast<double>(epoch) / (k * tau));
}

inline double entropy_threshold(int classes, double w) { return w * std::log(static_cast<double>(classes)); }

// Ask when the entropy of the mean output exceeds w * log C.
inline AskDecision entropy_response_decide(const OutputMatrix& g, int classes, double w) {
  if (!(w > 0.0 && w <= 1.0)) throw Error("entropy_response w must lie in (0, 1]");
  if (pred_entropy(g) > entropy_threshold(classes, w)) return {Verdict::kAskOracle, DecisionReason::kHighEntropy};
  return {Verdict::kPseudoLabel, DecisionReason::kLowEntropy};
}

inline AskDecision epsilon_greedy_decide(int epoch, double k, double tau, Rng& rng) {
  if (uniform01(rng) < epsilon_schedule(epoch, k, tau)) return {Verdict::kAskOracle, DecisionReason::kEpsilonExplore};
  return {Verdict::kPseudoLabel, DecisionReason::kEpsilonExploit};
}

}  // namespace alab

#endif  // ALAB_ORACLES_HPP_
