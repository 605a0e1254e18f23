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

#ifndef ALAB_METRICS_HPP_
#define ALAB_METRICS_HPP_

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <span>
#include <vector>

#include "alab/errors.hpp"
#include "alab/network.hpp"

namespace alab {

// Binary AUROC by the rank-sum (Mann-Whitney) statistic; tied scores count 0.5.
inline double binary_auc(std::span<const double> scores, std::span<const std::uint8_t> positive) {
  if (scores.size() != positive.size()) throw InputShapeError("binary_auc: size mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1 .. j
    for (std::size_t k = i; k < j; ++k)
      if (positive[order[k]]) {
        pos_rank_sum += avg_rank;
        ++n_pos;
      }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw UndefinedMetricError("AUC needs both positives and negatives");
  const double np = static_cast<double>(n_pos);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

// One-vs-rest AUROC averaged over the classes present in `labels`.
// `scores` is n x C.
inline double macro_auc(const MatrixXd& scores, std::span<const int> labels) {
  if (static_cast<std::size_t>(scores.rows()) != labels.size()) throw InputShapeError("macro_auc: row count mismatch");
  const std::set<int> present(labels.begin(), labels.end());
  if (present.size() < 2) throw UndefinedMetricError("macro AUC needs at least two classes present");
  std::vector<double> col(labels.size());
  std::vector<std::uint8_t> positive(labels.size());
  double total = 0.0;
  for (int c : present) {
    if (c < 0 || c >= scores.cols()) throw InputShapeError("label outside score columns");
    for (std::size_t i = 0; i < labels.size(); ++i) {
      col[i] = scores(static_cast<Index>(i), c);
      positive[i] = labels[i] == c;
    }
    total += binary_auc(col, positive);
  }
  return total / static_cast<double>(present.size());
}

inline double accuracy(const MatrixXd& scores, std::span<const int> labels) {
  if (labels.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    hit += argmax(scores.row(static_cast<Index>(i)).transpose()) == labels[i];
  return static_cast<double>(hit) / static_cast<double>(labels.size());
}

}  // namespace alab

#endif  // ALAB_METRICS_HPP_
