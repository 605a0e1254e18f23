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

// Random simplex-row generators shared by property tests.

#ifndef ALAB_TESTS_ORACLES_GENERATORS_HPP_
#define ALAB_TESTS_ORACLES_GENERATORS_HPP_

#include <Eigen/Core>

#include <random>

#include "alab/mc_sampling.hpp"
#include "alab/rng.hpp"

namespace alab::oracle {

// Rows drawn from a symmetric Dirichlet(concentration) via normalised gammas.
inline OutputMatrix random_outputs(int samples, int classes, Rng& rng, double concentration = 1.0) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  OutputMatrix g;
  g.rows.resize(samples, classes);
  for (int t = 0; t < samples; ++t) {
    double sum = 0.0;
    for (int c = 0; c < classes; ++c) {
      g.rows(t, c) = gamma(rng) + 1e-300;
      sum += g.rows(t, c);
    }
    g.rows.row(t) /= sum;
  }
  return g;
}

}  // namespace alab::oracle

#endif  // ALAB_TESTS_ORACLES_GENERATORS_HPP_
