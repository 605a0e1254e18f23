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

#ifndef ALAB_EXPERIMENT_HPP_
#define ALAB_EXPERIMENT_HPP_

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "alab/acquisition.hpp"
#include "alab/config.hpp"
#include "alab/dataset.hpp"
#include "alab/mc_sampling.hpp"
#include "alab/metrics.hpp"
#include "alab/network.hpp"
#include "alab/oracles.hpp"
#include "alab/pool.hpp"
#include "alab/rng.hpp"
#include "alab/soqal.hpp"
#include "alab/train.hpp"

namespace alab {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs fn(i) for i in [0, n) over `workers` threads. Each index is handled by
// exactly one thread; callers write results into pre-sized slots.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  std::vector<std::jthread> threads;
  for (std::size_t k = 0; k < w; ++k)
    threads.emplace_back([&, k] {
      for (std::size_t i = k; i < n; i += w) fn(i);
    });
}

struct EpochRecord {
  int epoch = 0;
  std::uint64_t seed = 0;
  double val_auc = kNaN;
  double test_auc = kNaN;
  double class_loss = 0.0;      // mean per labelled instance
  double selection_loss = 0.0;  // mean per labelled instance
  std::size_t labelled = 0;
  std::size_t unlabelled = 0;
  std::size_t acquired = 0;
  std::size_t asks = 0;
  double ask_rate = kNaN;  // NaN when nothing was acquired this epoch
  double acquired_label_accuracy = kNaN;
  SelectorState selector;
  ChernoffBound chernoff{kNaN, kNaN, false};
};

struct RunReport {
  std::uint64_t seed = 0;
  std::string provenance;
  std::vector<EpochRecord> epochs;
};

// ---------------------------------------------------------------------------
// Pieces of one epoch
// ---------------------------------------------------------------------------

inline Dataset load_dataset(const DataConfig& cfg, const SeedTree& seeds) {
  if (cfg.source == "csv") return load_csv(cfg.path);
  Rng rng = seeds.stream("data");
  return generate_blobs(cfg.blobs, rng);
}

// Mean per-feature standard deviation over the pool, used to scale sigma.
inline double mean_feature_std(const Pool& pool) {
  const std::size_t n = pool.total();
  if (n < 2) return 1.0;
  const Index m = pool.instance(pool.labels().begin()->first).features.size();
  VectorXd sum = VectorXd::Zero(m), sq = VectorXd::Zero(m);
  auto visit = [&](InstanceId id) {
    const VectorXd& x = pool.instance(id).features;
    sum += x;
    sq += x.cwiseProduct(x);
  };
  for (const auto& [id, _] : pool.labels()) visit(id);
  for (InstanceId id : pool.unlabelled()) visit(id);
  const double dn = static_cast<double>(n);
  const VectorXd var = (sq / dn - (sum / dn).cwiseProduct(sum / dn)).cwiseMax(0.0);
  return var.cwiseSqrt().mean();
}

// One pass over L in shuffled mini-batches. Returns per-instance mean losses.
inline LossParts train_epoch(Network& net, Adam& opt, const Pool& pool, int batch_size, const SeedTree& seeds,
                             int epoch) {
  std::vector<InstanceId> ids;
  for (const auto& [id, _] : pool.labels()) ids.push_back(id);
  Rng shuffle = seeds.stream("shuffle", {static_cast<std::uint64_t>(epoch)});
  std::shuffle(ids.begin(), ids.end(), shuffle);
  LossParts total;
  const Index m = net.shape.inputs;
  for (std::size_t start = 0, b = 0; start < ids.size(); start += static_cast<std::size_t>(batch_size), ++b) {
    const std::size_t end = std::min(ids.size(), start + static_cast<std::size_t>(batch_size));
    TrainBatch batch;
    batch.features.resize(static_cast<Index>(end - start), m);
    for (std::size_t i = start; i < end; ++i) {
      batch.features.row(static_cast<Index>(i - start)) = pool.instance(ids[i]).features.transpose();
      batch.labels.push_back(pool.labels().at(ids[i]));
    }
    Rng dropout = seeds.stream("dropout", {static_cast<std::uint64_t>(epoch), b});
    const LossParts l = train_step(net, batch, opt, dropout);
    total.class_loss += l.class_loss;
    total.selection_loss += l.selection_loss;
  }
  if (!ids.empty()) {
    total.class_loss /= static_cast<double>(ids.size());
    total.selection_loss /= static_cast<double>(ids.size());
  }
  return total;
}

// Selector outputs and zero-one errors over the whole labelled set, dropout off.
inline SelectorState selector_state(const Network& net, const Pool& pool, int epoch) {
  std::vector<SelectorSample> samples;
  samples.reserve(pool.labels().size());
  for (const auto& [id, y] : pool.labels()) {
    const VectorXd& x = pool.instance(id).features;
    const VectorXd v = representation(net, x);
    const VectorXd p = softmax(net.params.head.weight * v + net.params.head.bias);
    samples.push_back({selector_from_representation(net, v), argmax(p) != y ? 1 : 0});
  }
  return fit_error_gaussians(samples, epoch);
}

inline double split_auc(const Network& net, std::span<const Sample> rows) {
  if (rows.empty()) return kNaN;
  MatrixXd scores(static_cast<Index>(rows.size()), net.shape.classes);
  std::vector<int> labels;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    scores.row(static_cast<Index>(i)) = predict(net, rows[i].features).transpose();
    labels.push_back(rows[i].label);
  }
  try {
    return macro_auc(scores, labels);
  } catch (const UndefinedMetricError&) {
    return kNaN;
  }
}

// Settings shared by scoring and labelling within one run.
struct ScoringContext {
  const Network& net;
  const AcquisitionConfig& acq;
  PerturbationSpec perturbation;
  const SeedTree& seeds;
  int workers = 1;
};

inline McOutputs instance_outputs(const ScoringContext& ctx, const VectorXd& x, std::string_view stream, int epoch,
                                  InstanceId id) {
  Rng rng = ctx.seeds.stream(stream, {static_cast<std::uint64_t>(epoch), static_cast<std::uint64_t>(id)});
  return mc_outputs(ctx.net, x, ctx.acq.mode, ctx.acq.samples, ctx.perturbation, rng);
}

// Acquisition score for every unlabelled instance. Each instance draws from
// its own (epoch, id) stream, so the result does not depend on `workers`.
inline std::map<InstanceId, double> score_pool(const ScoringContext& ctx, const Pool& pool, int epoch) {
  const std::vector<InstanceId> ids(pool.unlabelled().begin(), pool.unlabelled().end());
  std::vector<double> values(ids.size());
  parallel_for(ids.size(), ctx.workers, [&](std::size_t i) {
    const McOutputs out = instance_outputs(ctx, pool.instance(ids[i]).features, "scoring", epoch, ids[i]);
    values[i] = score(ctx.acq.function, out, ctx.acq.ridge);
  });
  std::map<InstanceId, double> scores;
  for (std::size_t i = 0; i < ids.size(); ++i) scores.emplace(ids[i], values[i]);
  return scores;
}

struct LabelAudit {
  InstanceId id = 0;
  AskDecision decision;
  double t = 0.0;
  double hellinger = 0.0;
  int label = 0;
};

struct LabelingResult {
  std::map<InstanceId, int> labels;
  std::vector<LabelAudit> audit;
  std::size_t asks = 0;
};

inline VectorXd noise_embedding(const Network& net, const VectorXd& x, NoiseSpace space) {
  return space == NoiseSpace::kPenultimate ? representation(net, x) : x;
}

// Labels for the acquired ids: each one is either sent to the oracle or
// pseudo-labelled from the mean MC output, as the strategy decides.
inline LabelingResult label_acquired(std::span<const InstanceId> ids, Strategy strategy, const ScoringContext& ctx,
                                     const SelectorState& state, double threshold, const Pool& pool,
                                     const SimulatedOracle& oracle, int epoch) {
  const OracleConfig& ocfg = oracle.config();
  std::vector<ReferenceInstance> reference;
  if (ocfg.noise == NoiseMode::kNearestNeighbour && ocfg.gamma > 0.0) {
    for (const auto& [id, y] : pool.labels())
      reference.push_back({id, noise_embedding(ctx.net, pool.instance(id).features, ocfg.space), y});
  }
  LabelingResult out;
  const auto e = static_cast<std::uint64_t>(epoch);
  for (InstanceId id : ids) {
    const VectorXd& x = pool.instance(id).features;
    const McOutputs mc = instance_outputs(ctx, x, "labelling", epoch, id);
    LabelAudit a;
    a.id = id;
    a.t = selector_forward(ctx.net, x);
    a.hellinger = state.hellinger;
    switch (strategy) {
      case Strategy::kSoqal: a.decision = decide(a.t, state, threshold); break;
      case Strategy::kFullOracle: a.decision = {Verdict::kAskOracle, DecisionReason::kAlwaysAsk}; break;
      case Strategy::kNoOracle: a.decision = {Verdict::kPseudoLabel, DecisionReason::kNeverAsk}; break;
      case Strategy::kEntropyResponse:
        a.decision = entropy_response_decide(mc.g, static_cast<int>(ctx.net.shape.classes), ocfg.entropy_w);
        break;
      case Strategy::kEpsilonGreedy: {
        Rng draw = ctx.seeds.stream("epsilon", {e, static_cast<std::uint64_t>(id)});
        a.decision = epsilon_greedy_decide(epoch, ocfg.epsilon_k, ctx.acq.stride, draw);
        break;
      }
    }
    if (a.decision.ask()) {
      Rng noise = ctx.seeds.stream("noise", {e, static_cast<std::uint64_t>(id)});
      VectorXd emb;
      NoiseContext nctx;
      if (!reference.empty()) {
        emb = noise_embedding(ctx.net, x, ocfg.space);
        nctx.embedding = &emb;
        nctx.reference = reference;
      }
      a.label = oracle.query(id, nctx, noise);
      ++out.asks;
    } else {
      a.label = pseudo_label(mc.g);
    }
    out.labels.emplace(id, a.label);
    out.audit.push_back(a);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Full procedure
// ---------------------------------------------------------------------------

// Train on L, track or compute acquisition scores on U, and every `stride`
// epochs move the top fraction of U into L with strategy-chosen labels.
// Training continues warm across acquisitions.
inline RunReport run_experiment(const ExperimentConfig& cfg, std::uint64_t seed, const Dataset* preloaded = nullptr,
                                std::ostream* log = nullptr) {
  cfg.validate();
  const SeedTree seeds(seed);
  const Dataset ds = preloaded ? *preloaded : load_dataset(cfg.data, seeds);
  Rng split_rng = seeds.stream("split");
  const DataSplit parts = split(ds, cfg.labelled_fraction, split_rng);

  Pool pool(parts.labelled, parts.unlabelled);
  const SimulatedOracle oracle(parts.unlabelled, ds.classes, cfg.oracle);

  NetworkShape shape = cfg.network;
  shape.inputs = ds.dims;
  shape.classes = ds.classes;
  Rng init = seeds.stream("net-init");
  Network net = make_network(shape, init);
  Adam opt(net, AdamConfig{cfg.training.learning_rate});

  const auto& acq = cfg.acquisition;
  PerturbationSpec perturbation{acq.sigma_relative ? acq.sigma * mean_feature_std(pool) : acq.sigma};

  RunReport report;
  report.seed = seed;
  report.provenance = ds.provenance;
  std::map<InstanceId, ScoreHistory> histories;

  for (int epoch = 1; epoch <= cfg.training.epochs; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.seed = seed;
    const LossParts loss = train_epoch(net, opt, pool, cfg.training.batch_size, seeds, epoch);
    rec.class_loss = loss.class_loss;
    rec.selection_loss = loss.selection_loss;
    rec.selector = selector_state(net, pool, epoch);
    if (rec.selector.usable) rec.chernoff = chernoff_bound(rec.selector);
    rec.val_auc = split_auc(net, parts.validation);
    rec.test_auc = split_auc(net, parts.test);

    const ScoringContext ctx{net, acq, perturbation, seeds, cfg.workers};
    const bool scoring_epoch = acq.tracked && epoch % acq.delta_t == 0;
    const bool acquisition_epoch = epoch % acq.stride == 0;

    std::map<InstanceId, double> current;
    if (scoring_epoch && !pool.unlabelled().empty()) {
      current = score_pool(ctx, pool, epoch);
      for (const auto& [id, s] : current) {
        auto it = histories.try_emplace(id, id, acq.delta_t).first;
        it->second.append(epoch, s);
      }
    }

    if (acquisition_epoch) {
      if (pool.unlabelled().empty()) {
        if (log) *log << "epoch " << epoch << ": unlabelled pool is empty, acquisition skipped\n";
      } else {
        std::map<InstanceId, double> final_scores;
        if (acq.tracked) {
          for (const auto& [id, h] : histories) final_scores.emplace(id, autaf(h, epoch));
        } else {
          final_scores = score_pool(ctx, pool, epoch);
        }
        const std::vector<InstanceId> chosen = rank_and_select(final_scores, acq.fraction);
        const LabelingResult labels = label_acquired(chosen, cfg.oracle.strategy, ctx, rec.selector,
                                                     cfg.hellinger_threshold, pool, oracle, epoch);
        const std::size_t before = pool.total();
        pool.acquire(labels.labels);
        if (pool.total() != before) throw Error("pool size changed during acquisition");
        rec.acquired = chosen.size();
        rec.asks = labels.asks;
        rec.ask_rate = static_cast<double>(labels.asks) / static_cast<double>(chosen.size());
        rec.acquired_label_accuracy = oracle.agreement(labels.labels);

        for (InstanceId id : chosen) histories.erase(id);
        if (!acq.full_history) {
          // Restart each remaining history at this acquisition epoch.
          for (auto& [id, h] : histories) {
            const auto last = h.points().back();
            h.clear();
            h.append(last.first, last.second);
          }
        }
      }
    }
    rec.labelled = pool.labels().size();
    rec.unlabelled = pool.unlabelled().size();
    report.epochs.push_back(std::move(rec));
  }
  return report;
}

// ---------------------------------------------------------------------------
// JSON lines
// ---------------------------------------------------------------------------

inline Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json to_json(const EpochRecord& r, const ExperimentConfig& cfg) {
  return Json{
      {"epoch", r.epoch},
      {"seed", r.seed},
      {"acquisition_function", to_string(cfg.acquisition.function)},
      {"mode", to_string(cfg.acquisition.mode)},
      {"tracked", cfg.acquisition.tracked},
      {"strategy", to_string(cfg.oracle.strategy)},
      {"noise", to_string(cfg.oracle.noise)},
      {"gamma", cfg.oracle.gamma},
      {"labelled_fraction", cfg.labelled_fraction},
      {"val_auc", finite_or_null(r.val_auc)},
      {"test_auc", finite_or_null(r.test_auc)},
      {"class_loss", finite_or_null(r.class_loss)},
      {"selection_loss", finite_or_null(r.selection_loss)},
      {"labelled", r.labelled},
      {"unlabelled", r.unlabelled},
      {"acquired", r.acquired},
      {"asks", r.asks},
      {"ask_rate", finite_or_null(r.ask_rate)},
      {"acquired_label_accuracy", finite_or_null(r.acquired_label_accuracy)},
      {"d_h", r.selector.hellinger},
      {"selector_usable", r.selector.usable},
      {"mu0", r.selector.fit0.mean},
      {"mu1", r.selector.fit1.mean},
      {"var0", r.selector.fit0.variance},
      {"var1", r.selector.fit1.variance},
      {"n0", r.selector.count0},
      {"n1", r.selector.count1},
      {"chernoff_beta", finite_or_null(r.chernoff.beta_star)},
      {"chernoff_bound", finite_or_null(r.chernoff.bound)},
  };
}

inline void write_jsonl(const RunReport& report, const ExperimentConfig& cfg, std::ostream& os) {
  for (const auto& r : report.epochs) os << to_json(r, cfg).dump() << '\n';
}

}  // namespace alab

#endif  // ALAB_EXPERIMENT_HPP_
