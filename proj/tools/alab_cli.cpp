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

// Command-line front end: run, sweep, report, selftest.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "acceptance/criteria.hpp"
#include "alab/alab.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumeric = 2;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out;
};

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

// Config text -> JSON with CLI overrides applied. The raw text is kept so
// errors can point at a line.
struct LoadedConfig {
  alab::Json json;
  std::string text;
};

LoadedConfig load_json(const CommonOptions& o) {
  LoadedConfig lc;
  if (!o.config_path.empty()) {
    lc.text = alab::read_text_file(o.config_path);
    lc.json = alab::parse_config_text(lc.text);
  } else {
    lc.json = alab::Json::object();
  }
  if (const char* w = std::getenv("ALAB_WORKERS"); w && *w) alab::apply_override(lc.json, "workers", w);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw alab::ConfigError("--set expects key=value, got '" + kv + "'");
    alab::apply_override(lc.json, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) lc.json["seeds"] = alab::Json::array({*o.seed});
  if (o.workers) lc.json["workers"] = *o.workers;
  return lc;
}

alab::ExperimentConfig to_config(const LoadedConfig& lc) {
  // Line numbers only make sense while the JSON still mirrors the file.
  return alab::config_from_json(lc.json, lc.text);
}

std::string describe(const alab::ConfigError& e, const std::string& path) {
  std::string where = path.empty() ? std::string("config") : path;
  std::string msg = e.what();
  if (e.line() > 0) {
    const std::string prefix = "line " + std::to_string(e.line()) + ": ";
    if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
    where += ":" + std::to_string(e.line());
  }
  return where + ": " + msg;
}

// Runs every seed of `cfg` and writes config.json + report.jsonl into `dir`.
void run_cell(const alab::ExperimentConfig& cfg, const fs::path& dir, std::ostream* log) {
  fs::create_directories(dir);
  std::optional<alab::Dataset> shared;
  const alab::Dataset* preloaded = nullptr;
  if (cfg.data.source == "csv") {
    shared = alab::load_csv(cfg.data.path);
    preloaded = &*shared;
  }
  {
    std::ofstream c(dir / "config.json");
    c << alab::to_json(cfg).dump(2) << '\n';
  }
  std::ofstream out(dir / "report.jsonl", std::ios::binary);
  for (std::uint64_t seed : cfg.seeds) {
    const auto report = alab::run_experiment(cfg, seed, preloaded, log);
    alab::write_jsonl(report, cfg, out);
    if (log && !report.epochs.empty()) {
      const auto& last = report.epochs.back();
      *log << dir.filename().string() << " seed " << seed << ": test_auc " << last.test_auc << ", labelled "
           << last.labelled << '\n';
    }
  }
  if (!out) throw alab::Error("failed writing " + (dir / "report.jsonl").string());
}

int cmd_run(const CommonOptions& o) {
  const auto lc = load_json(o);
  const auto cfg = to_config(lc);
  const fs::path dir = o.out.empty() ? fs::path(env_or("ALAB_OUTPUT_DIR", "runs")) / cfg.name : fs::path(o.out);
  run_cell(cfg, dir, &std::cerr);
  std::cout << (dir / "report.jsonl").string() << '\n';
  return 0;
}

struct GridAxis {
  std::string key;
  std::vector<alab::Json> values;
};

std::string cell_value(const alab::Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

int cmd_sweep(const CommonOptions& o, const std::vector<std::string>& grid_flags) {
  auto lc = load_json(o);
  std::vector<GridAxis> axes;
  if (lc.json.contains("sweep")) {
    const auto& s = lc.json.at("sweep");
    if (!s.is_object()) throw alab::ConfigError("sweep: expected an object of key -> value list");
    for (const auto& [k, v] : s.items()) {
      if (!v.is_array() || v.empty()) throw alab::ConfigError("sweep." + k + ": expected a non-empty list");
      axes.push_back({k, std::vector<alab::Json>(v.begin(), v.end())});
    }
  }
  for (const auto& g : grid_flags) {
    const auto eq = g.find('=');
    if (eq == std::string::npos) throw alab::ConfigError("--grid expects key=v1,v2,..., got '" + g + "'");
    GridAxis axis{g.substr(0, eq), {}};
    std::stringstream ss(g.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      alab::Json parsed = alab::Json::parse(item, nullptr, false);
      axis.values.push_back(parsed.is_discarded() ? alab::Json(item) : parsed);
    }
    if (axis.values.empty()) throw alab::ConfigError("--grid " + axis.key + ": no values");
    axes.push_back(std::move(axis));
  }
  if (axes.empty()) throw alab::ConfigError("sweep needs a 'sweep' table in the config or at least one --grid");

  // Cartesian product, first axis slowest.
  std::vector<std::pair<std::string, alab::ExperimentConfig>> cells;
  std::vector<std::size_t> idx(axes.size(), 0);
  for (bool done = false; !done;) {
    alab::Json j = lc.json;
    std::string name;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const auto& v = axes[a].values[idx[a]];
      alab::apply_override(j, axes[a].key, v.dump());
      name += (a ? "," : "") + axes[a].key + "=" + cell_value(v);
    }
    try {
      cells.emplace_back(name, alab::config_from_json(j));
    } catch (const alab::ConfigError& e) {
      throw alab::ConfigError("cell " + name + ": " + e.what());
    }
    std::size_t a = axes.size();
    while (true) {
      if (a == 0) {
        done = true;
        break;
      }
      --a;
      if (++idx[a] < axes[a].values.size()) break;
      idx[a] = 0;
    }
  }

  const auto base = to_config(lc);
  const fs::path root = o.out.empty() ? fs::path(env_or("ALAB_OUTPUT_DIR", "runs")) / base.name : fs::path(o.out);
  std::mutex log_mu;
  std::vector<std::string> errors(cells.size());
  std::vector<int> codes(cells.size(), 0);
  // Cells run in parallel; scoring inside each cell stays single-threaded.
  alab::parallel_for(cells.size(), base.workers, [&](std::size_t i) {
    auto cfg = cells[i].second;
    if (cells.size() > 1) cfg.workers = 1;
    std::ostringstream log;
    try {
      run_cell(cfg, root / cells[i].first, &log);
    } catch (const alab::NumericFailure& e) {
      errors[i] = e.what();
      codes[i] = kExitNumeric;
    } catch (const std::exception& e) {
      errors[i] = e.what();
      codes[i] = kExitConfig;
    }
    std::lock_guard lock(log_mu);
    std::cerr << log.str();
  });
  int code = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (codes[i]) {
      std::cerr << "cell " << cells[i].first << " failed: " << errors[i] << '\n';
      code = std::max(code, codes[i]);
    } else {
      std::cout << (root / cells[i].first).string() << '\n';
    }
  }
  return code;
}

int cmd_report(const std::string& input, std::string out) {
  const auto cells = alab::collect_reports(input);
  if (cells.empty()) throw alab::ConfigError("no report.jsonl found under '" + input + "'");
  if (out.empty()) out = fs::is_directory(input) ? input : fs::path(input).parent_path().string();
  fs::create_directories(out);
  std::vector<alab::CellSummary> summaries;
  for (const auto& [name, by_seed] : cells) summaries.push_back(alab::summarize_cell(name, by_seed));
  {
    std::ofstream s(fs::path(out) / "summary.csv");
    alab::write_summary_csv(summaries, s);
  }
  {
    std::ofstream c(fs::path(out) / "curves.csv");
    alab::write_curves_csv(cells, c);
  }
  for (const auto& s : summaries)
    std::cout << s.cell << ": test AUC " << s.final_test_auc.mean << " +- " << s.final_test_auc.std << " over "
              << s.seeds << " seeds, ask rate " << s.ask_rate.mean << '\n';
  return 0;
}

int cmd_selftest(const std::string& self, const std::vector<int>& only) {
  const auto results = alab::acceptance::run_all(self, only, std::cout);
  for (const auto& r : results)
    if (!r.passed) return alab::acceptance::kExitAcceptance;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active learning with selective oracle questioning"};
  app.require_subcommand(1);

  CommonOptions opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", opts.config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--set", opts.overrides, "Override a config key, e.g. --set oracle.gamma=0.4");
    sub->add_option("--seed", opts.seed, "Master seed (replaces the config's seed list)");
    sub->add_option("--workers", opts.workers, "Worker threads");
    sub->add_option("-o,--out", opts.out, "Output directory");
  };

  auto* run = app.add_subcommand("run", "Run one configuration for each seed");
  add_common(run);

  std::vector<std::string> grid;
  auto* sweep = app.add_subcommand("sweep", "Run a grid of configurations, one directory per cell");
  add_common(sweep);
  sweep->add_option("--grid", grid, "Grid axis key=v1,v2,... (repeatable)");

  std::string report_in, report_out;
  auto* report = app.add_subcommand("report", "Aggregate report.jsonl files into summary.csv and curves.csv");
  report->add_option("input", report_in, "Run or sweep directory")->required();
  report->add_option("-o,--out", report_out, "Where to write the CSV files (default: input)");

  std::vector<int> only;
  auto* selftest = app.add_subcommand("selftest", "Run the acceptance checks");
  selftest->add_option("--only", only, "Run just these criteria (comma separated)")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(opts);
    if (*sweep) return cmd_sweep(opts, grid);
    if (*report) return cmd_report(report_in, report_out);
    if (*selftest) {
      std::error_code ec;
      auto self = fs::read_symlink("/proc/self/exe", ec);
      return cmd_selftest(ec ? std::string(argv[0]) : self.string(), only);
    }
  } catch (const alab::ConfigError& e) {
    std::cerr << "error: " << describe(e, opts.config_path) << '\n';
    return kExitConfig;
  } catch (const alab::NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const alab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
