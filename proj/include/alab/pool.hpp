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

#ifndef ALAB_POOL_HPP_
#define ALAB_POOL_HPP_

#include <Eigen/Core>

#include <map>
#include <set>
#include <span>
#include <string>

#include "alab/acquisition.hpp"
#include "alab/dataset.hpp"
#include "alab/errors.hpp"
#include "alab/oracles.hpp"
#include "alab/rng.hpp"

namespace alab {

struct Instance {
  InstanceId id = 0;
  int group = 0;
  VectorXd features;
};

// Labelled set L and unlabelled set U over one training partition. The pool
// never holds ground-truth labels for U; those live in SimulatedOracle.
class Pool {
 public:
  Pool(std::span<const Sample> labelled, std::span<const Sample> unlabelled) {
    for (const auto& s : labelled) {
      add_instance(s);
      labels_.emplace(s.id, s.label);
    }
    for (const auto& s : unlabelled) {
      add_instance(s);
      unlabelled_.insert(s.id);
    }
  }

  const std::map<InstanceId, int>& labels() const { return labels_; }
  const std::set<InstanceId>& unlabelled() const { return unlabelled_; }
  const Instance& instance(InstanceId id) const { return instances_.at(id); }
  std::size_t total() const { return instances_.size(); }

  // Moves every id in `acquired` from U to L with the given label. All ids
  // are checked before anything moves.
  void acquire(const std::map<InstanceId, int>& acquired) {
    for (const auto& [id, label] : acquired) {
      if (!unlabelled_.contains(id)) throw Error("instance " + std::to_string(id) + " is not in the unlabelled pool");
      (void)label;
    }
    for (const auto& [id, label] : acquired) {
      unlabelled_.erase(id);
      labels_.emplace(id, label);
    }
    if (labels_.size() + unlabelled_.size() != instances_.size()) throw Error("pool conservation violated");
  }

 private:
  void add_instance(const Sample& s) {
    if (!instances_.emplace(s.id, Instance{s.id, s.group, s.features}).second)
      throw Error("duplicate instance id " + std::to_string(s.id));
  }

  std::map<InstanceId, Instance> instances_;
  std::map<InstanceId, int> labels_;
  std::set<InstanceId> unlabelled_;
};

// Holds the hidden labels of the unlabelled pool and answers queries,
// possibly noisily.
class SimulatedOracle {
 public:
  SimulatedOracle(std::span<const Sample> hidden, int classes, OracleConfig cfg) : classes_(classes), cfg_(cfg) {
    cfg_.validate();
    for (const auto& s : hidden) truth_.emplace(s.id, s.label);
  }

  const OracleConfig& config() const { return cfg_; }
  int classes() const { return classes_; }

  int query(InstanceId id, const NoiseContext& ctx, Rng& rng) const {
    const auto it = truth_.find(id);
    if (it == truth_.end()) throw Error("oracle has no label for instance " + std::to_string(id));
    ++queries_;
    return oracle_label(it->second, classes_, cfg_, ctx, rng);
  }

  std::size_t queries() const { return queries_; }

  // Share of `labels` that match the hidden truth. For reporting only.
  double agreement(const std::map<InstanceId, int>& labels) const {
    if (labels.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::size_t hit = 0;
    for (const auto& [id, y] : labels) hit += truth_.at(id) == y;
    return static_cast<double>(hit) / static_cast<double>(labels.size());
  }

 private:
  std::map<InstanceId, int> truth_;
  int classes_;
  OracleConfig cfg_;
  mutable std::size_t queries_ = 0;
};

}  // namespace alab

#endif  // ALAB_POOL_HPP_
