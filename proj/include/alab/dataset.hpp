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

#ifndef ALAB_DATASET_HPP_
#define ALAB_DATASET_HPP_

#include <Eigen/Core>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "alab/acquisition.hpp"
#include "alab/errors.hpp"
#include "alab/rng.hpp"

namespace alab {

struct Sample {
  InstanceId id = 0;
  int group = 0;
  int label = 0;
  VectorXd features;
};

struct Dataset {
  std::vector<Sample> rows;
  int classes = 0;
  Index dims = 0;
  std::string provenance;

  void validate() const {
    std::set<InstanceId> ids;
    for (const auto& r : rows) {
      if (!ids.insert(r.id).second) throw Error("duplicate instance id " + std::to_string(r.id));
      if (r.label < 0 || r.label >= classes) throw Error("label out of range for instance " + std::to_string(r.id));
      if (r.features.size() != dims) throw InputShapeError("instance " + std::to_string(r.id) + " has wrong dimension");
    }
  }
};

struct BlobSpec {
  int classes = 3;
  int per_class = 200;
  double separation = 3.0;  // distance between adjacent class centres
  Index dims = 2;
  double cluster_std = 1.0;
  int group_size = 10;  // instances per group id
};

// Isotropic Gaussian clusters. Class centres sit on a circle in the first two
// feature dimensions with adjacent centres `separation` apart; remaining
// dimensions carry noise only. Instances are shuffled before group ids are
// handed out in contiguous blocks.
inline Dataset generate_blobs(const BlobSpec& spec, Rng& rng) {
  if (spec.classes < 2) throw Error("blobs need at least two classes");
  if (spec.dims < 2) throw Error("blobs need at least two dimensions");
  if (spec.per_class < 1 || spec.group_size < 1) throw Error("blob counts must be positive");
  const double radius = spec.separation / (2.0 * std::sin(std::numbers::pi / spec.classes));
  std::normal_distribution<double> noise(0.0, spec.cluster_std);
  std::vector<Sample> rows;
  rows.reserve(static_cast<std::size_t>(spec.classes * spec.per_class));
  for (int c = 0; c < spec.classes; ++c) {
    const double angle = 2.0 * std::numbers::pi * c / spec.classes;
    for (int i = 0; i < spec.per_class; ++i) {
      Sample s;
      s.label = c;
      s.features.resize(spec.dims);
      for (Index d = 0; d < spec.dims; ++d) s.features[d] = noise(rng);
      s.features[0] += radius * std::cos(angle);
      s.features[1] += radius * std::sin(angle);
      rows.push_back(std::move(s));
    }
  }
  std::shuffle(rows.begin(), rows.end(), rng);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].id = static_cast<InstanceId>(i);
    rows[i].group = static_cast<int>(i / static_cast<std::size_t>(spec.group_size));
  }
  Dataset ds;
  ds.rows = std::move(rows);
  ds.classes = spec.classes;
  ds.dims = spec.dims;
  std::ostringstream prov;
  prov << "blobs(classes=" << spec.classes << ",per_class=" << spec.per_class << ",separation=" << spec.separation
       << ",dims=" << spec.dims << ",std=" << spec.cluster_std << ",group_size=" << spec.group_size << ")";
  ds.provenance = prov.str();
  return ds;
}

// ---------------------------------------------------------------------------
// CSV: header `id,group,label,f0,...,f{m-1}`, floats at 17 significant digits.
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline void write_csv(const Dataset& ds, std::ostream& os) {
  os << "id,group,label";
  for (Index d = 0; d < ds.dims; ++d) os << ",f" << d;
  os << '\n';
  for (const auto& r : ds.rows) {
    os << r.id << ',' << r.group << ',' << r.label;
    for (Index d = 0; d < ds.dims; ++d) os << ',' << format_double(r.features[d]);
    os << '\n';
  }
}

namespace detail {

template <typename T>
T parse_field(std::string_view field, int line, std::string_view what) {
  T v{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
    throw ConfigError("bad " + std::string(what) + " value '" + std::string(field) + "'", line);
  return v;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

// Class count is max(label) + 1 unless `classes` is given.
inline Dataset read_csv(std::istream& is, std::string provenance = "csv", int classes = 0) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty dataset file", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_commas(line);
  if (header.size() < 4 || header[0] != "id" || header[1] != "group" || header[2] != "label")
    throw ConfigError("dataset header must be id,group,label,f0,...", 1);
  Dataset ds;
  ds.dims = static_cast<Index>(header.size() - 3);
  for (Index d = 0; d < ds.dims; ++d)
    if (header[static_cast<std::size_t>(d) + 3] != "f" + std::to_string(d))
      throw ConfigError("expected column f" + std::to_string(d), 1);
  int lineno = 1;
  int max_label = -1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = detail::split_commas(line);
    if (f.size() != header.size())
      throw ConfigError("expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()), lineno);
    Sample s;
    s.id = detail::parse_field<InstanceId>(f[0], lineno, "id");
    s.group = detail::parse_field<int>(f[1], lineno, "group");
    s.label = detail::parse_field<int>(f[2], lineno, "label");
    if (s.label < 0) throw ConfigError("negative label", lineno);
    s.features.resize(ds.dims);
    for (Index d = 0; d < ds.dims; ++d)
      s.features[d] = detail::parse_field<double>(f[static_cast<std::size_t>(d) + 3], lineno, "feature");
    max_label = std::max(max_label, s.label);
    ds.rows.push_back(std::move(s));
  }
  ds.classes = classes > 0 ? classes : max_label + 1;
  ds.provenance = std::move(provenance);
  ds.validate();
  return ds;
}

inline Dataset load_csv(const std::string& path, int classes = 0) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset '" + path + "'");
  return read_csv(in, path, classes);
}

// ---------------------------------------------------------------------------
// Group-disjoint split
// ---------------------------------------------------------------------------

struct DataSplit {
  std::vector<Sample> labelled;
  std::vector<Sample> unlabelled;
  std::vector<Sample> validation;
  std::vector<Sample> test;
};

namespace detail {

// Number of leading groups whose midpoint falls below `target` instances,
// clamped to [lo, hi].
inline std::size_t midpoint_cut(const std::vector<std::size_t>& sizes, std::size_t begin, std::size_t end,
                                double target, std::size_t lo, std::size_t hi) {
  double cum = 0.0;
  std::size_t cut = begin;
  for (std::size_t i = begin; i < end; ++i) {
    if (cum + 0.5 * static_cast<double>(sizes[i]) < target) cut = i + 1;
    cum += static_cast<double>(sizes[i]);
  }
  return std::clamp(cut, lo, hi);
}

}  // namespace detail

// 60/20/20 train/validation/test by group, then train into labelled (fraction
// `labelled_fraction` of train instances) and unlabelled, again by group.
inline DataSplit split(const Dataset& ds, double labelled_fraction, Rng& rng) {
  if (!(labelled_fraction > 0.0 && labelled_fraction < 1.0)) throw SplitError("labelled fraction must lie in (0, 1)");
  std::map<int, std::vector<const Sample*>> by_group;
  for (const auto& r : ds.rows) by_group[r.group].push_back(&r);
  if (by_group.size() < 4) throw SplitError("need at least 4 groups to split, have " + std::to_string(by_group.size()));
  std::vector<int> groups;
  for (const auto& [g, _] : by_group) groups.push_back(g);
  std::shuffle(groups.begin(), groups.end(), rng);
  std::vector<std::size_t> sizes;
  for (int g : groups) sizes.push_back(by_group[g].size());
  const double n = static_cast<double>(ds.rows.size());
  const std::size_t ng = groups.size();
  const std::size_t train_end = detail::midpoint_cut(sizes, 0, ng, 0.6 * n, 2, ng - 2);
  const std::size_t val_end = detail::midpoint_cut(sizes, 0, ng, 0.8 * n, train_end + 1, ng - 1);
  double train_n = 0.0;
  for (std::size_t i = 0; i < train_end; ++i) train_n += static_cast<double>(sizes[i]);
  const std::size_t lab_end = detail::midpoint_cut(sizes, 0, train_end, labelled_fraction * train_n, 1, train_end - 1);

  DataSplit out;
  for (std::size_t i = 0; i < ng; ++i) {
    auto& part = i < lab_end ? out.labelled : i < train_end ? out.unlabelled : i < val_end ? out.validation : out.test;
    for (const Sample* s : by_group[groups[i]]) part.push_back(*s);
  }
  auto by_id = [](const Sample& a, const Sample& b) { return a.id < b.id; };
  for (auto* part : {&out.labelled, &out.unlabelled, &out.validation, &out.test}) std::sort(part->begin(), part->end(), by_id);
  return out;
}

}  // namespace alab

#endif  // ALAB_DATASET_HPP_
