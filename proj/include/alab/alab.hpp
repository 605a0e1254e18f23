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

#ifndef ALAB_ALAB_HPP_
#define ALAB_ALAB_HPP_

#include "alab/acquisition.hpp"
#include "alab/config.hpp"
#include "alab/dataset.hpp"
#include "alab/errors.hpp"
#include "alab/experiment.hpp"
#include "alab/mc_sampling.hpp"
#include "alab/metrics.hpp"
#include "alab/network.hpp"
#include "alab/oracles.hpp"
#include "alab/pool.hpp"
#include "alab/report.hpp"
#include "alab/rng.hpp"
#include "alab/soqal.hpp"
#include "alab/train.hpp"

#endif  // ALAB_ALAB_HPP_
