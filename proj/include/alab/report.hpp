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

#ifndef ALAB_REPORT_HPP_
#define ALAB_REPORT_HPP_

#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "alab/config.hpp"
#include "alab/dataset.hpp"
#include "alab/errors.hpp"

namespace alab {

struct MeanStd {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double std = std::numeric_limits<double>::quiet_NaN();
  std::size_t n = 0;
};

// Sample mean and (n - 1) standard deviation of the finite values; std is 0
// for a single value.
inline MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  double sum = 0.0;
  for (double x : xs)
    if (std::isfinite(x)) {
      sum += x;
      ++out.n;
    }
  if (out.n == 0) return out;
  out.mean = sum / static_cast<double>(out.n);
  double ss = 0.0;
  for (double x : xs)
    if (std::isfinite(x)) ss += (x - out.mean) * (x - out.mean);
  out.std = out.n > 1 ? std::sqrt(ss / static_cast<double>(out.n - 1)) : 0.0;
  return out;
}

inline std::vector<Json> read_jsonl(std::istream& is) {
  std::vector<Json> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("bad report record: ") + e.what(), lineno);
    }
  }
  return out;
}

inline double number_or_nan(const Json& rec, const char* key) {
  if (!rec.contains(key) || !rec.at(key).is_number()) return std::numeric_limits<double>::quiet_NaN();
  return rec.at(key).get<double>();
}

// Records of one cell (a run directory), grouped by seed in epoch order.
using CellRecords = std::map<std::uint64_t, std::vector<Json>>;

inline CellRecords group_by_seed(const std::vector<Json>& records) {
  CellRecords out;
  for (const auto& r : records) out[r.value("seed", std::uint64_t{0})].push_back(r);
  for (auto& [_, v] : out)
    std::stable_sort(v.begin(), v.end(), [](const Json& a, const Json& b) { return a.at("epoch") < b.at("epoch"); });
  return out;
}

struct CellSummary {
  std::string cell;
  std::size_t seeds = 0;
  MeanStd final_test_auc;
  MeanStd final_val_auc;
  MeanStd ask_rate;  // per-seed overall asks / acquired
  MeanStd final_d_h;
};

inline CellSummary summarize_cell(const std::string& cell, const CellRecords& by_seed) {
  CellSummary s;
  s.cell = cell;
  s.seeds = by_seed.size();
  std::vector<double> test, val, ask, dh;
  for (const auto& [_, recs] : by_seed) {
    if (recs.empty()) continue;
    test.push_back(number_or_nan(recs.back(), "test_auc"));
    val.push_back(number_or_nan(recs.back(), "val_auc"));
    dh.push_back(number_or_nan(recs.back(), "d_h"));
    double asks = 0.0, acquired = 0.0;
    for (const auto& r : recs) {
      asks += number_or_nan(r, "asks");
      acquired += number_or_nan(r, "acquired");
    }
    ask.push_back(acquired > 0.0 ? asks / acquired : std::numeric_limits<double>::quiet_NaN());
  }
  s.final_test_auc = mean_std(test);
  s.final_val_auc = mean_std(val);
  s.ask_rate = mean_std(ask);
  s.final_d_h = mean_std(dh);
  return s;
}

inline std::string csv_number(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }

inline void write_summary_csv(const std::vector<CellSummary>& cells, std::ostream& os) {
  os << "cell,seeds,test_auc_mean,test_auc_std,val_auc_mean,val_auc_std,ask_rate_mean,ask_rate_std,d_h_mean,d_h_std\n";
  for (const auto& c : cells) {
    os << c.cell << ',' << c.seeds << ',' << csv_number(c.final_test_auc.mean) << ','
       << csv_number(c.final_test_auc.std) << ',' << csv_number(c.final_val_auc.mean) << ','
       << csv_number(c.final_val_auc.std) << ',' << csv_number(c.ask_rate.mean) << ',' << csv_number(c.ask_rate.std)
       << ',' << csv_number(c.final_d_h.mean) << ',' << csv_number(c.final_d_h.std) << '\n';
  }
}

// Per-epoch mean and std across seeds, one row per (cell, epoch).
inline void write_curves_csv(const std::map<std::string, CellRecords>& cells, std::ostream& os) {
  os << "cell,epoch,seeds,test_auc_mean,test_auc_std,val_auc_mean,val_auc_std,ask_rate_mean,d_h_mean,labelled_mean\n";
  for (const auto& [cell, by_seed] : cells) {
    std::map<int, std::vector<const Json*>> by_epoch;
    for (const auto& [_, recs] : by_seed)
      for (const auto& r : recs) by_epoch[r.at("epoch").get<int>()].push_back(&r);
    for (const auto& [epoch, recs] : by_epoch) {
      std::vector<double> test, val, ask, dh, lab;
      for (const Json* r : recs) {
        test.push_back(number_or_nan(*r, "test_auc"));
        val.push_back(number_or_nan(*r, "val_auc"));
        ask.push_back(number_or_nan(*r, "ask_rate"));
        dh.push_back(number_or_nan(*r, "d_h"));
        lab.push_back(number_or_nan(*r, "labelled"));
      }
      const auto t = mean_std(test), v = mean_std(val);
      os << cell << ',' << epoch << ',' << recs.size() << ',' << csv_number(t.mean) << ',' << csv_number(t.std) << ','
         << csv_number(v.mean) << ',' << csv_number(v.std) << ',' << csv_number(mean_std(ask).mean) << ','
         << csv_number(mean_std(dh).mean) << ',' << csv_number(mean_std(lab).mean) << '\n';
    }
  }
}

// Every `report.jsonl` under `root`, keyed by its directory relative to root
// ("." for root itself).
inline std::map<std::string, CellRecords> collect_reports(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::exists(root)) throw ConfigError("report input '" + root.string() + "' does not exist");
  std::vector<fs::path> files;
  if (fs::is_regular_file(root)) {
    files.push_back(root);
  } else {
    for (const auto& e : fs::recursive_directory_iterator(root))
      if (e.is_regular_file() && e.path().filename() == "report.jsonl") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::map<std::string, CellRecords> cells;
  for (const auto& f : files) {
    std::ifstream in(f);
    const auto recs = read_jsonl(in);
    std::string cell = fs::is_regular_file(root) ? f.stem().string() : fs::relative(f.parent_path(), root).string();
    cells[cell] = group_by_seed(recs);
  }
  return cells;
}

}  // namespace alab

#endif  // ALAB_REPORT_HPP_
