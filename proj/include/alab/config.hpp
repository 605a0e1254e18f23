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

#ifndef ALAB_CONFIG_HPP_
#define ALAB_CONFIG_HPP_

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "alab/acquisition.hpp"
#include "alab/dataset.hpp"
#include "alab/errors.hpp"
#include "alab/mc_sampling.hpp"
#include "alab/network.hpp"
#include "alab/oracles.hpp"
#include "alab/soqal.hpp"

namespace alab {

using Json = nlohmann::ordered_json;

struct DataConfig {
  std::string source = "blobs";  // "blobs" or "csv"
  std::string path;              // csv only
  BlobSpec blobs;
};

struct TrainingConfig {
  int epochs = 50;
  int batch_size = 32;
  double learning_rate = 1e-4;
};

struct AcquisitionConfig {
  AcquisitionFunction function = AcquisitionFunction::kBald;
  McMode mode = McMode::kMcd;
  int samples = 20;        // T
  bool tracked = false;    // integrate scores over epochs before acquiring
  bool full_history = false;
  int delta_t = 1;         // scoring interval, epochs
  int stride = 5;          // acquisition every `stride` epochs
  double fraction = 0.02;  // b, share of the unlabelled pool acquired
  double ridge = kDefaultRidge;
  double sigma = 0.25;          // input perturbation std
  bool sigma_relative = true;   // sigma is a multiple of the mean feature std
};

struct ExperimentConfig {
  std::string name = "experiment";
  DataConfig data;
  double labelled_fraction = 0.1;
  NetworkShape network;  // inputs/classes are taken from the dataset
  TrainingConfig training;
  AcquisitionConfig acquisition;
  double hellinger_threshold = kDefaultHellingerThreshold;  // S
  OracleConfig oracle;
  std::vector<std::uint64_t> seeds{0};
  int workers = 1;  // scoring fan-out

  void validate() const {
    auto fail = [](const std::string& key, const std::string& why) { throw ConfigError(key + ": " + why); };
    if (data.source != "blobs" && data.source != "csv") fail("data.source", "must be 'blobs' or 'csv'");
    if (data.source == "csv" && data.path.empty()) fail("data.path", "required when data.source is 'csv'");
    if (data.blobs.classes < 2) fail("data.blobs.classes", "must be >= 2");
    if (data.blobs.dims < 2) fail("data.blobs.dims", "must be >= 2");
    if (data.blobs.per_class < 1) fail("data.blobs.per_class", "must be >= 1");
    if (data.blobs.group_size < 1) fail("data.blobs.group_size", "must be >= 1");
    if (!(data.blobs.cluster_std > 0.0)) fail("data.blobs.cluster_std", "must be > 0");
    if (!(labelled_fraction > 0.0 && labelled_fraction < 1.0)) fail("labelled_fraction", "must lie in (0, 1)");
    for (Index h : network.hidden)
      if (h < 1) fail("network.hidden", "widths must be >= 1");
    if (!(network.dropout >= 0.0 && network.dropout < 1.0)) fail("network.dropout", "must lie in [0, 1)");
    if (training.epochs < 1) fail("training.epochs", "must be >= 1");
    if (training.batch_size < 1) fail("training.batch_size", "must be >= 1");
    if (!(training.learning_rate > 0.0)) fail("training.learning_rate", "must be > 0");
    const auto& a = acquisition;
    if (a.samples < 1) fail("acquisition.samples", "must be >= 1");
    if (a.delta_t < 1) fail("acquisition.delta_t", "must be >= 1");
    if (a.stride < a.delta_t) fail("acquisition.stride", "must be >= delta_t");
    if (a.tracked && a.stride % a.delta_t != 0) fail("acquisition.stride", "must be a multiple of delta_t when tracked");
    if (!(a.fraction > 0.0 && a.fraction <= 1.0)) fail("acquisition.fraction", "must lie in (0, 1]");
    if (!(a.ridge > 0.0)) fail("acquisition.ridge", "must be > 0");
    if (!(a.sigma >= 0.0)) fail("acquisition.sigma", "must be >= 0");
    if (needs_paired_outputs(a.function) && a.mode != McMode::kBalc)
      fail("acquisition.function", std::string(to_string(a.function)) + " requires acquisition.mode = balc");
    if (!(hellinger_threshold >= 0.0 && hellinger_threshold <= 1.0)) fail("hellinger_threshold", "must lie in [0, 1]");
    if (!(oracle.gamma >= 0.0 && oracle.gamma <= 1.0)) fail("oracle.gamma", "must lie in [0, 1]");
    if (!(oracle.entropy_w > 0.0 && oracle.entropy_w <= 1.0)) fail("oracle.entropy_w", "must lie in (0, 1]");
    if (!(oracle.epsilon_k > 0.0)) fail("oracle.epsilon_k", "must be > 0");
    if (seeds.empty()) fail("seeds", "must not be empty");
    if (workers < 1) fail("workers", "must be >= 1");
  }
};

// ---------------------------------------------------------------------------
// JSON mapping
// ---------------------------------------------------------------------------

inline Json to_json(const ExperimentConfig& c) {
  Json hidden = Json::array();
  for (Index h : c.network.hidden) hidden.push_back(h);
  const auto& a = c.acquisition;
  return Json{
      {"name", c.name},
      {"data",
       {{"source", c.data.source},
        {"path", c.data.path},
        {"blobs",
         {{"classes", c.data.blobs.classes},
          {"per_class", c.data.blobs.per_class},
          {"separation", c.data.blobs.separation},
          {"dims", c.data.blobs.dims},
          {"cluster_std", c.data.blobs.cluster_std},
          {"group_size", c.data.blobs.group_size}}}}},
      {"labelled_fraction", c.labelled_fraction},
      {"network",
       {{"hidden", hidden},
        {"dropout", c.network.dropout},
        {"activation", c.network.activation == Activation::kRelu ? "relu" : "tanh"}}},
      {"training",
       {{"epochs", c.training.epochs},
        {"batch_size", c.training.batch_size},
        {"learning_rate", c.training.learning_rate}}},
      {"acquisition",
       {{"function", to_string(a.function)},
        {"mode", to_string(a.mode)},
        {"samples", a.samples},
        {"tracked", a.tracked},
        {"full_history", a.full_history},
        {"delta_t", a.delta_t},
        {"stride", a.stride},
        {"fraction", a.fraction},
        {"ridge", a.ridge},
        {"sigma", a.sigma},
        {"sigma_relative", a.sigma_relative}}},
      {"hellinger_threshold", c.hellinger_threshold},
      {"oracle",
       {{"strategy", to_string(c.oracle.strategy)},
        {"noise", to_string(c.oracle.noise)},
        {"gamma", c.oracle.gamma},
        {"epsilon_k", c.oracle.epsilon_k},
        {"entropy_w", c.oracle.entropy_w},
        {"space", to_string(c.oracle.space)}}},
      {"seeds", c.seeds},
      {"workers", c.workers},
  };
}

namespace detail {

// First 1-based line of `text` that mentions the quoted key, 0 if none.
inline int find_key_line(std::string_view text, std::string_view key) {
  if (text.empty()) return 0;
  const std::string quoted = "\"" + std::string(key) + "\"";
  const auto pos = text.find(quoted);
  if (pos == std::string_view::npos) return 0;
  int line = 1;
  for (std::size_t i = 0; i < pos; ++i) line += text[i] == '\n';
  return line;
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  [[noreturn]] void fail(const std::string& path, const std::string& why) const {
    const auto dot = path.rfind('.');
    const std::string leaf = dot == std::string::npos ? path : path.substr(dot + 1);
    throw ConfigError(path + ": " + why, find_key_line(text_, leaf));
  }

  void check_keys(const Json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) const {
    if (!obj.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
    for (const auto& [k, _] : obj.items()) {
      bool ok = false;
      for (auto a : allowed) ok = ok || a == k;
      if (!ok) fail(path.empty() ? k : path + "." + k, "unknown key");
    }
  }

  template <typename T>
  void read(const Json& obj, const std::string& path, std::string_view key, T& out) const {
    if (!obj.contains(key)) return;
    const Json& v = obj.at(std::string(key));
    const std::string full = path.empty() ? std::string(key) : path + "." + std::string(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) fail(full, "expected true or false");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) fail(full, "expected an integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) fail(full, "expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) fail(full, "expected a string");
      }
      out = v.get<T>();
    } catch (const nlohmann::json::exception& e) {
      fail(full, e.what());
    }
  }

  template <typename Enum, typename Parse>
  void read_enum(const Json& obj, const std::string& path, std::string_view key, Enum& out, Parse parse) const {
    std::string s;
    if (!obj.contains(key)) return;
    read(obj, path, key, s);
    try {
      out = parse(s);
    } catch (const Error& e) {
      fail(path + "." + std::string(key), e.what());
    }
  }

 private:
  std::string_view text_;
};

}  // namespace detail

// Builds a config from JSON, starting from defaults. Unknown keys and
// ill-typed values raise ConfigError carrying the line of the offending key
// when `source_text` is supplied.
inline ExperimentConfig config_from_json(const Json& j, std::string_view source_text = {}) {
  const detail::Reader r(source_text);
  ExperimentConfig c;
  r.check_keys(j, "",
               {"name", "data", "labelled_fraction", "network", "training", "acquisition", "hellinger_threshold",
                "oracle", "seeds", "workers", "sweep"});
  r.read(j, "", "name", c.name);
  r.read(j, "", "labelled_fraction", c.labelled_fraction);
  r.read(j, "", "hellinger_threshold", c.hellinger_threshold);
  r.read(j, "", "workers", c.workers);
  if (j.contains("seeds")) {
    const Json& s = j.at("seeds");
    if (!s.is_array()) r.fail("seeds", "expected an array of non-negative integers");
    c.seeds.clear();
    for (const auto& v : s) {
      if (!v.is_number_unsigned()) r.fail("seeds", "expected an array of non-negative integers");
      c.seeds.push_back(v.get<std::uint64_t>());
    }
  }
  if (j.contains("data")) {
    const Json& d = j.at("data");
    r.check_keys(d, "data", {"source", "path", "blobs"});
    r.read(d, "data", "source", c.data.source);
    r.read(d, "data", "path", c.data.path);
    if (d.contains("blobs")) {
      const Json& b = d.at("blobs");
      r.check_keys(b, "data.blobs", {"classes", "per_class", "separation", "dims", "cluster_std", "group_size"});
      r.read(b, "data.blobs", "classes", c.data.blobs.classes);
      r.read(b, "data.blobs", "per_class", c.data.blobs.per_class);
      r.read(b, "data.blobs", "separation", c.data.blobs.separation);
      r.read(b, "data.blobs", "dims", c.data.blobs.dims);
      r.read(b, "data.blobs", "cluster_std", c.data.blobs.cluster_std);
      r.read(b, "data.blobs", "group_size", c.data.blobs.group_size);
    }
  }
  if (j.contains("network")) {
    const Json& n = j.at("network");
    r.check_keys(n, "network", {"hidden", "dropout", "activation"});
    if (n.contains("hidden")) {
      const Json& h = n.at("hidden");
      if (!h.is_array()) r.fail("network.hidden", "expected an array of layer widths");
      c.network.hidden.clear();
      for (const auto& w : h) {
        if (!w.is_number_integer()) r.fail("network.hidden", "expected an array of layer widths");
        c.network.hidden.push_back(w.get<Index>());
      }
    }
    r.read(n, "network", "dropout", c.network.dropout);
    r.read_enum(n, "network", "activation", c.network.activation, [](const std::string& s) {
      if (s == "relu") return Activation::kRelu;
      if (s == "tanh") return Activation::kTanh;
      throw Error("unknown activation '" + s + "'");
    });
  }
  if (j.contains("training")) {
    const Json& t = j.at("training");
    r.check_keys(t, "training", {"epochs", "batch_size", "learning_rate"});
    r.read(t, "training", "epochs", c.training.epochs);
    r.read(t, "training", "batch_size", c.training.batch_size);
    r.read(t, "training", "learning_rate", c.training.learning_rate);
  }
  if (j.contains("acquisition")) {
    const Json& a = j.at("acquisition");
    auto& o = c.acquisition;
    r.check_keys(a, "acquisition",
                 {"function", "mode", "samples", "tracked", "full_history", "delta_t", "stride", "fraction", "ridge",
                  "sigma", "sigma_relative"});
    r.read_enum(a, "acquisition", "function", o.function, [](const std::string& s) { return parse_acquisition(s); });
    r.read_enum(a, "acquisition", "mode", o.mode, [](const std::string& s) { return parse_mc_mode(s); });
    r.read(a, "acquisition", "samples", o.samples);
    r.read(a, "acquisition", "tracked", o.tracked);
    r.read(a, "acquisition", "full_history", o.full_history);
    r.read(a, "acquisition", "delta_t", o.delta_t);
    r.read(a, "acquisition", "stride", o.stride);
    r.read(a, "acquisition", "fraction", o.fraction);
    r.read(a, "acquisition", "ridge", o.ridge);
    r.read(a, "acquisition", "sigma", o.sigma);
    r.read(a, "acquisition", "sigma_relative", o.sigma_relative);
  }
  if (j.contains("oracle")) {
    const Json& o = j.at("oracle");
    r.check_keys(o, "oracle", {"strategy", "noise", "gamma", "epsilon_k", "entropy_w", "space"});
    r.read_enum(o, "oracle", "strategy", c.oracle.strategy, [](const std::string& s) { return parse_strategy(s); });
    r.read_enum(o, "oracle", "noise", c.oracle.noise, [](const std::string& s) { return parse_noise_mode(s); });
    r.read(o, "oracle", "gamma", c.oracle.gamma);
    r.read(o, "oracle", "epsilon_k", c.oracle.epsilon_k);
    r.read(o, "oracle", "entropy_w", c.oracle.entropy_w);
    r.read_enum(o, "oracle", "space", c.oracle.space, [](const std::string& s) { return parse_noise_space(s); });
  }
  try {
    c.validate();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    const auto colon = msg.find(':');
    const std::string path = msg.substr(0, colon);
    const auto dot = path.rfind('.');
    throw ConfigError(msg, detail::find_key_line(source_text, dot == std::string::npos ? path : path.substr(dot + 1)));
  }
  return c;
}

inline Json parse_config_text(const std::string& text) {
  try {
    return Json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    // nlohmann reports "... at line L, column C: ..."; recover L for the caller.
    const std::string what = e.what();
    int line = 0;
    const auto at = what.find("line ");
    if (at != std::string::npos) line = std::atoi(what.c_str() + at + 5);
    throw ConfigError(std::string("malformed config: ") + e.what(), line);
  }
}

// Sets a dotted key (e.g. "oracle.gamma") to `value`. The value is parsed as
// JSON when possible and taken as a plain string otherwise.
inline void apply_override(Json& j, std::string_view dotted, std::string_view value) {
  Json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    const std::string key(dotted.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
    if (key.empty()) throw ConfigError("bad override key '" + std::string(dotted) + "'");
    if (dot == std::string_view::npos) {
      Json parsed = Json::parse(value, nullptr, /*allow_exceptions=*/false);
      (*node)[key] = parsed.is_discarded() ? Json(std::string(value)) : parsed;
      return;
    }
    if (!node->contains(key)) (*node)[key] = Json::object();
    node = &(*node)[key];
    if (!node->is_object()) throw ConfigError("override key '" + std::string(dotted) + "' crosses a non-object");
    start = dot + 1;
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace alab

#endif  // ALAB_CONFIG_HPP_
