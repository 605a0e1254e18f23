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

#ifndef ALAB_ACQUISITION_HPP_
#define ALAB_ACQUISITION_HPP_

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "alab/errors.hpp"
#include "alab/mc_sampling.hpp"
#include "alab/network.hpp"

namespace alab {

using InstanceId = std::int64_t;

inline constexpr double kLogFloor = 1e-12;
inline constexpr double kDefaultRidge = 1e-6;

// Shannon entropy in nats, 0 log 0 := 0.
inline double entropy(const VectorXd& p) {
  double h = 0.0;
  for (Index i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
  return h;
}

// Categorical KL(p || q) with both sides floored at kLogFloor inside the log.
inline double categorical_kl(const VectorXd& p, const VectorXd& q) {
  double kl = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    kl += p[i] * (std::log(std::max(p[i], kLogFloor)) - std::log(std::max(q[i], kLogFloor)));
  }
  return kl;
}

// ---------------------------------------------------------------------------
// Uncertainty scores over a single output matrix
// ---------------------------------------------------------------------------

// 1 - (votes for the modal argmax class) / T.
inline double var_ratio(const OutputMatrix& g) {
  std::vector<int> votes(static_cast<std::size_t>(g.classes()), 0);
  for (Index t = 0; t < g.samples(); ++t) ++votes[argmax(g.rows.row(t).transpose())];
  const int modal = *std::max_element(votes.begin(), votes.end());
  return 1.0 - static_cast<double>(modal) / static_cast<double>(g.samples());
}

// Entropy of the mean predictive distribution.
inline double pred_entropy(const OutputMatrix& g) { return entropy(g.mean()); }

// Mutual information between prediction and sample: H(mean) - mean H.
inline double bald(const OutputMatrix& g) {
  double mean_h = 0.0;
  for (Index t = 0; t < g.samples(); ++t) mean_h += entropy(g.rows.row(t).transpose());
  mean_h /= static_cast<double>(g.samples());
  return std::max(0.0, pred_entropy(g) - mean_h);
}

// ---------------------------------------------------------------------------
// Consistency scores over paired matrices (G for x, G' for z)
// ---------------------------------------------------------------------------

struct GaussianFit {
  VectorXd mean;
  MatrixXd cov;  // includes the ridge
  double ridge = kDefaultRidge;
};

// Mean of the rows and unnormalised scatter (G - mu)^T (G - mu), plus ridge*I.
inline GaussianFit gaussian_fit(const OutputMatrix& g, double ridge = kDefaultRidge) {
  if (!(ridge > 0.0)) throw Error("gaussian_fit ridge must be positive");
  GaussianFit f;
  f.ridge = ridge;
  f.mean = g.mean();
  const MatrixXd centered = g.rows.rowwise() - f.mean.transpose();
  f.cov = centered.transpose() * centered;
  f.cov.diagonal().array() += ridge;
  return f;
}

// KL(N(a.mean, a.cov) || N(b.mean, b.cov)).
inline double kl_mvn(const GaussianFit& a, const GaussianFit& b) {
  const Index k = a.mean.size();
  if (b.mean.size() != k || a.cov.rows() != k || b.cov.rows() != k)
    throw InputShapeError("kl_mvn: dimension mismatch");
  const Eigen::LLT<MatrixXd> la(a.cov);
  const Eigen::LLT<MatrixXd> lb(b.cov);
  if (la.info() != Eigen::Success || lb.info() != Eigen::Success)
    throw NumericFailure("kl_mvn: covariance is not positive definite");
  const MatrixXd chol_a = la.matrixL();
  const MatrixXd chol_b = lb.matrixL();
  const double logdet_a = 2.0 * chol_a.diagonal().array().log().sum();
  const double logdet_b = 2.0 * chol_b.diagonal().array().log().sum();
  const double trace = lb.solve(a.cov).trace();
  const VectorXd diff = b.mean - a.mean;
  const double maha = diff.dot(lb.solve(diff));
  return 0.5 * (trace + maha - static_cast<double>(k) + logdet_b - logdet_a);
}

inline void check_paired(const OutputMatrix& g, const OutputMatrix& gp) {
  if (g.samples() != gp.samples() || g.classes() != gp.classes())
    throw InputShapeError("paired output matrices differ in shape");
}

inline double balc_kld(const OutputMatrix& g, const OutputMatrix& gp, double ridge = kDefaultRidge) {
  check_paired(g, gp);
  return kl_mvn(gaussian_fit(g, ridge), gaussian_fit(gp, ridge));
}

// Mean per-sample KL minus KL of the means. Rows are paired by sample index.
inline double balc_jsd(const OutputMatrix& g, const OutputMatrix& gp) {
  check_paired(g, gp);
  double per_sample = 0.0;
  for (Index t = 0; t < g.samples(); ++t)
    per_sample += categorical_kl(g.rows.row(t).transpose(), gp.rows.row(t).transpose());
  per_sample /= static_cast<double>(g.samples());
  return per_sample - categorical_kl(g.mean(), gp.mean());
}

// ---------------------------------------------------------------------------
// Score selection
// ---------------------------------------------------------------------------

enum class AcquisitionFunction { kVarRatio, kEntropy, kBald, kBalcKld, kBalcJsd };

inline std::string_view to_string(AcquisitionFunction f) {
  switch (f) {
    case AcquisitionFunction::kVarRatio: return "var_ratio";
    case AcquisitionFunction::kEntropy: return "entropy";
    case AcquisitionFunction::kBald: return "bald";
    case AcquisitionFunction::kBalcKld: return "balc_kld";
    case AcquisitionFunction::kBalcJsd: return "balc_jsd";
  }
  return "?";
}

inline AcquisitionFunction parse_acquisition(std::string_view s) {
  if (s == "var_ratio") return AcquisitionFunction::kVarRatio;
  if (s == "entropy") return AcquisitionFunction::kEntropy;
  if (s == "bald") return AcquisitionFunction::kBald;
  if (s == "balc_kld") return AcquisitionFunction::kBalcKld;
  if (s == "balc_jsd") return AcquisitionFunction::kBalcJsd;
  throw Error("unknown acquisition function '" + std::string(s) + "'");
}

inline bool needs_paired_outputs(AcquisitionFunction f) {
  return f == AcquisitionFunction::kBalcKld || f == AcquisitionFunction::kBalcJsd;
}

inline double score(AcquisitionFunction f, const McOutputs& out, double ridge = kDefaultRidge) {
  switch (f) {
    case AcquisitionFunction::kVarRatio: return var_ratio(out.g);
    case AcquisitionFunction::kEntropy: return pred_entropy(out.g);
    case AcquisitionFunction::kBald: return bald(out.g);
    case AcquisitionFunction::kBalcKld:
    case AcquisitionFunction::kBalcJsd:
      if (!out.g_prime) throw Error(std::string(to_string(f)) + " requires balc mode outputs");
      return f == AcquisitionFunction::kBalcKld ? balc_kld(out.g, *out.g_prime, ridge)
                                                : balc_jsd(out.g, *out.g_prime);
  }
  throw Error("unknown acquisition function");
}

// ---------------------------------------------------------------------------
// Tracked scores
// ---------------------------------------------------------------------------

// Acquisition scores of one instance at epochs spaced dt apart.
class ScoreHistory {
 public:
  ScoreHistory() = default;
  ScoreHistory(InstanceId id, int dt) : id_(id), dt_(dt) {
    if (dt < 1) throw HistoryOrderError("history spacing must be at least one epoch");
  }

  void append(int epoch, double value) {
    if (!points_.empty() && epoch != points_.back().first + dt_)
      throw HistoryOrderError("history epoch " + std::to_string(epoch) + " does not follow " +
                              std::to_string(points_.back().first) + " at spacing " + std::to_string(dt_));
    points_.emplace_back(epoch, value);
  }

  void clear() { points_.clear(); }

  InstanceId id() const { return id_; }
  int dt() const { return dt_; }
  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }
  const std::vector<std::pair<int, double>>& points() const { return points_; }

 private:
  InstanceId id_ = 0;
  int dt_ = 1;
  std::vector<std::pair<int, double>> points_;
};

// Trapezoidal area under the score history, which must end at epoch tau.
// One point spans no interval and integrates to zero.
inline double autaf(const ScoreHistory& h, int tau) {
  const auto& pts = h.points();
  if (pts.empty()) throw HistoryOrderError("empty score history");
  if (pts.back().first != tau)
    throw HistoryOrderError("history ends at epoch " + std::to_string(pts.back().first) + ", expected " +
                            std::to_string(tau));
  double area = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const int step = pts[i].first - pts[i - 1].first;
    if (step != h.dt()) throw HistoryOrderError("unordered score history");
    area += 0.5 * (pts[i].second + pts[i - 1].second) * step;
  }
  return area;
}

// The ceil(fraction * |pool|) highest-scoring ids, best first. Equal scores
// are ordered by ascending id.
inline std::vector<InstanceId> rank_and_select(const std::map<InstanceId, double>& scores, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error("acquisition fraction must lie in (0, 1]");
  std::vector<std::pair<InstanceId, double>> ranked;
  ranked.reserve(scores.size());
  for (const auto& [id, s] : scores)
    ranked.emplace_back(id, std::isnan(s) ? -std::numeric_limits<double>::infinity() : s);
  if (ranked.empty()) return {};
  const double exact = fraction * static_cast<double>(ranked.size());
  const auto wanted = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(exact - 1e-9)), 1, ranked.size());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<InstanceId> out;
  out.reserve(wanted);
  for (std::size_t i = 0; i < wanted; ++i) out.push_back(ranked[i].first);
  return out;
}

}  // namespace alab

#endif  // ALAB_ACQUISITION_HPP_
