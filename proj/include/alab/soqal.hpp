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

#ifndef ALAB_SOQAL_HPP_
#define ALAB_SOQAL_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include "alab/errors.hpp"
#include "alab/mc_sampling.hpp"
#include "alab/network.hpp"

namespace alab {

inline constexpr double kVarianceFloor = 1e-6;
inline constexpr double kDefaultHellingerThreshold = 0.15;

struct Gaussian1D {
  double mean = 0.0;
  double variance = 1.0;
};

inline double log_normal_pdf(double x, const Gaussian1D& g) {
  const double d = x - g.mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * g.variance) - d * d / (2.0 * g.variance);
}

// One labelled instance: selector output t and zero-one error e of the
// prediction head.
struct SelectorSample {
  double t = 0.0;
  int error = 0;
};

// Per-epoch fit of the selector outputs, split by prediction error.
struct SelectorState {
  int epoch = 0;
  std::vector<SelectorSample> samples;
  Gaussian1D fit0;  // e = 0, correctly classified
  Gaussian1D fit1;  // e = 1, misclassified
  std::size_t count0 = 0;
  std::size_t count1 = 0;
  double hellinger = 0.0;
  bool usable = false;

  double prior0() const {
    const auto n = count0 + count1;
    return n ? static_cast<double>(count0) / static_cast<double>(n) : 0.5;
  }
  double prior1() const { return 1.0 - prior0(); }
};

// Hellinger distance between two 1-D Gaussians, in [0, 1].
inline double hellinger(const Gaussian1D& a, const Gaussian1D& b) {
  const double s = a.variance + b.variance;
  const double d = a.mean - b.mean;
  const double bc = std::sqrt(2.0 * std::sqrt(a.variance * b.variance) / s) * std::exp(-d * d / (4.0 * s));
  return std::sqrt(std::clamp(1.0 - bc, 0.0, 1.0));
}

// Population mean and variance per error group. A group with fewer than two
// samples makes the state unusable, which forces every decision to ask.
inline SelectorState fit_error_gaussians(std::span<const SelectorSample> samples, int epoch = 0) {
  SelectorState st;
  st.epoch = epoch;
  st.samples.assign(samples.begin(), samples.end());
  double sum[2] = {0.0, 0.0};
  std::size_t n[2] = {0, 0};
  for (const auto& s : samples) {
    const int g = s.error ? 1 : 0;
    sum[g] += s.t;
    ++n[g];
  }
  st.count0 = n[0];
  st.count1 = n[1];
  Gaussian1D fits[2];
  for (int g = 0; g < 2; ++g) {
    if (n[g] == 0) continue;
    const double mean = sum[g] / static_cast<double>(n[g]);
    double ss = 0.0;
    for (const auto& s : samples)
      if ((s.error ? 1 : 0) == g) ss += (s.t - mean) * (s.t - mean);
    fits[g] = {mean, std::max(kVarianceFloor, ss / static_cast<double>(n[g]))};
  }
  st.fit0 = fits[0];
  st.fit1 = fits[1];
  st.usable = n[0] >= 2 && n[1] >= 2;
  st.hellinger = st.usable ? hellinger(st.fit0, st.fit1) : 0.0;
  return st;
}

enum class Verdict { kAskOracle, kPseudoLabel };

enum class DecisionReason {
  kGateClosed,             // D_H < S or fits unusable
  kErrorDensityDominates,  // N1(t) > N0(t)
  kCorrectDensityDominates,
  kHighEntropy,
  kLowEntropy,
  kEpsilonExplore,
  kEpsilonExploit,
  kAlwaysAsk,
  kNeverAsk,
};

inline std::string_view to_string(Verdict v) { return v == Verdict::kAskOracle ? "ask" : "pseudo"; }

inline std::string_view to_string(DecisionReason r) {
  switch (r) {
    case DecisionReason::kGateClosed: return "gate-closed";
    case DecisionReason::kErrorDensityDominates: return "density-e1-dominates";
    case DecisionReason::kCorrectDensityDominates: return "density-e0-dominates";
    case DecisionReason::kHighEntropy: return "high-entropy";
    case DecisionReason::kLowEntropy: return "low-entropy";
    case DecisionReason::kEpsilonExplore: return "epsilon-explore";
    case DecisionReason::kEpsilonExploit: return "epsilon-exploit";
    case DecisionReason::kAlwaysAsk: return "always-ask";
    case DecisionReason::kNeverAsk: return "never-ask";
  }
  return "?";
}

struct AskDecision {
  Verdict verdict = Verdict::kAskOracle;
  DecisionReason reason = DecisionReason::kGateClosed;

  bool ask() const { return verdict == Verdict::kAskOracle; }
};

// Ask when the gate is closed (D_H < S, or the fits are unusable); otherwise
// ask iff the error-group density at t strictly exceeds the correct-group
// density. Deterministic.
inline AskDecision decide(double t, const SelectorState& state, double threshold) {
  if (!state.usable || state.hellinger < threshold) return {Verdict::kAskOracle, DecisionReason::kGateClosed};
  if (log_normal_pdf(t, state.fit1) > log_normal_pdf(t, state.fit0))
    return {Verdict::kAskOracle, DecisionReason::kErrorDensityDominates};
  return {Verdict::kPseudoLabel, DecisionReason::kCorrectDensityDominates};
}

// ---------------------------------------------------------------------------
// Chernoff bound on the error of separating the two selector groups
// ---------------------------------------------------------------------------

struct ChernoffBound {
  double beta_star = 0.0;
  double bound = 0.0;
  bool degenerate = false;
};

// -log of  integral N(x; fit0)^beta N(x; fit1)^(1-beta) dx.
inline double chernoff_exponent(const Gaussian1D& fit0, const Gaussian1D& fit1, double beta) {
  const double mixed = beta * fit1.variance + (1.0 - beta) * fit0.variance;
  const double d = fit0.mean - fit1.mean;
  return beta * (1.0 - beta) * d * d / (2.0 * mixed) +
         0.5 * (std::log(mixed) - (1.0 - beta) * std::log(fit0.variance) - beta * std::log(fit1.variance));
}

// log of P0^beta P1^(1-beta) exp(-exponent(beta)).
inline double chernoff_log_bound(const Gaussian1D& fit0, const Gaussian1D& fit1, double p0, double p1,
                                 double beta) {
  return beta * std::log(p0) + (1.0 - beta) * std::log(p1) - chernoff_exponent(fit0, fit1, beta);
}

// Minimises the bound over beta in [0, 1] by golden-section search
// (the log bound is convex in beta), to |d beta| <= 1e-6.
inline ChernoffBound chernoff_bound(const Gaussian1D& fit0, const Gaussian1D& fit1, double p0, double p1) {
  if (p0 < 0.0 || p1 < 0.0 || std::abs(p0 + p1 - 1.0) > 1e-9) throw Error("chernoff priors must be >= 0 and sum to 1");
  if (!(fit0.variance > 0.0) || !(fit1.variance > 0.0)) throw Error("chernoff variances must be positive");
  if (p0 == 0.0) return {1.0, 0.0, true};
  if (p1 == 0.0) return {0.0, 0.0, true};

  auto f = [&](double b) { return chernoff_log_bound(fit0, fit1, p0, p1, b); };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-7) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  double best = 0.5 * (lo + hi);
  double best_val = f(best);
  for (double edge : {0.0, 1.0}) {
    const double v = f(edge);
    if (v < best_val) {
      best = edge;
      best_val = v;
    }
  }
  return {best, std::exp(best_val), false};
}

inline ChernoffBound chernoff_bound(const SelectorState& st) {
  return chernoff_bound(st.fit0, st.fit1, st.prior0(), st.prior1());
}

// Argmax of the mean row; ties go to the lowest class index.
inline int pseudo_label(const OutputMatrix& g) { return static_cast<int>(argmax(g.mean())); }

}  // namespace alab

#endif  // ALAB_SOQAL_HPP_
