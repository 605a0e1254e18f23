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

#include "alab/dataset.hpp"

#include <Eigen/QR>

#include <set>
#include <sstream>

#include "alab/metrics.hpp"
#include "gtest/gtest.h"

namespace alab {
namespace {

std::string csv_of(const Dataset& ds) {
  std::ostringstream os;
  write_csv(ds, os);
  return os.str();
}

// One-vs-rest least squares on [x, 1], fitted on the first half and scored
// on the second half.
double linear_holdout_auc(const Dataset& ds) {
  const Index n = static_cast<Index>(ds.rows.size());
  const Index half = n / 2;
  MatrixXd x(half, ds.dims + 1);
  MatrixXd y = MatrixXd::Zero(half, ds.classes);
  for (Index i = 0; i < half; ++i) {
    const auto& r = ds.rows[static_cast<std::size_t>(i)];
    x.row(i).head(ds.dims) = r.features.transpose();
    x(i, ds.dims) = 1.0;
    y(i, r.label) = 1.0;
  }
  const MatrixXd w = x.colPivHouseholderQr().solve(y);
  MatrixXd scores(n - half, ds.classes);
  std::vector<int> labels;
  for (Index i = half; i < n; ++i) {
    const auto& r = ds.rows[static_cast<std::size_t>(i)];
    VectorXd xi(ds.dims + 1);
    xi.head(ds.dims) = r.features;
    xi[ds.dims] = 1.0;
    scores.row(i - half) = (w.transpose() * xi).transpose();
    labels.push_back(r.label);
  }
  return macro_auc(scores, labels);
}

TEST(Blobs, SameSeedSameBytes) {
  BlobSpec spec;
  Rng a(3), b(3), c(4);
  EXPECT_EQ(csv_of(generate_blobs(spec, a)), csv_of(generate_blobs(spec, b)));
  EXPECT_NE(csv_of(generate_blobs(spec, a)), csv_of(generate_blobs(spec, c)));
}

TEST(Blobs, ShapeAndGroups) {
  BlobSpec spec;
  spec.classes = 4;
  spec.per_class = 25;
  spec.dims = 5;
  spec.group_size = 7;
  Rng rng(1);
  const auto ds = generate_blobs(spec, rng);
  ds.validate();
  EXPECT_EQ(ds.rows.size(), 100u);
  EXPECT_EQ(ds.dims, 5);
  std::vector<int> per_class(4, 0);
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    EXPECT_EQ(ds.rows[i].id, static_cast<InstanceId>(i));
    EXPECT_EQ(ds.rows[i].group, static_cast<int>(i / 7));
    ++per_class[static_cast<std::size_t>(ds.rows[i].label)];
  }
  for (int c : per_class) EXPECT_EQ(c, 25);
}

TEST(Blobs, ZeroSeparationCarriesNoSignal) {
  BlobSpec spec;
  spec.separation = 0.0;
  spec.per_class = 1000;
  Rng rng(5);
  EXPECT_NEAR(linear_holdout_auc(generate_blobs(spec, rng)), 0.5, 0.05);
}

TEST(Blobs, WideSeparationIsLinearlySeparable) {
  BlobSpec spec;
  spec.separation = 10.0;
  spec.per_class = 300;
  Rng rng(6);
  EXPECT_GT(linear_holdout_auc(generate_blobs(spec, rng)), 0.99);
}

TEST(Blobs, RejectsBadSpecs) {
  Rng rng(0);
  BlobSpec spec;
  spec.classes = 1;
  EXPECT_THROW(generate_blobs(spec, rng), Error);
  spec.classes = 3;
  spec.dims = 1;
  EXPECT_THROW(generate_blobs(spec, rng), Error);
}

TEST(Csv, RoundTripIsByteEqual) {
  BlobSpec spec;
  spec.dims = 4;
  Rng rng(7);
  const auto ds = generate_blobs(spec, rng);
  const std::string first = csv_of(ds);
  std::istringstream in(first);
  const auto back = read_csv(in);
  EXPECT_EQ(back.classes, 3);
  EXPECT_EQ(back.dims, 4);
  EXPECT_EQ(csv_of(back), first);
  for (std::size_t i = 0; i < ds.rows.size(); ++i) EXPECT_EQ(back.rows[i].features, ds.rows[i].features);
}

TEST(Csv, ErrorsCarryLineNumbers) {
  std::istringstream bad_field("id,group,label,f0\n0,0,0,1.5\n1,0,1,abc\n");
  try {
    read_csv(bad_field);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  std::istringstream short_row("id,group,label,f0,f1\n0,0,0,1.5\n");
  try {
    read_csv(short_row);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  std::istringstream bad_header("x,y\n");
  EXPECT_THROW(read_csv(bad_header), ConfigError);
  std::istringstream empty("");
  EXPECT_THROW(read_csv(empty), ConfigError);
}

TEST(Csv, DuplicateIdsRejected) {
  std::istringstream in("id,group,label,f0\n0,0,0,1\n0,1,1,2\n");
  EXPECT_THROW(read_csv(in), Error);
}

std::set<int> group_set(const std::vector<Sample>& part) {
  std::set<int> g;
  for (const auto& s : part) g.insert(s.group);
  return g;
}

TEST(Split, PartsAreGroupDisjointAndComplete) {
  BlobSpec spec;
  spec.group_size = 9;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto ds = generate_blobs(spec, rng);
    for (double beta : {0.1, 0.5, 0.9}) {
      const auto sp = split(ds, beta, rng);
      const std::vector<const std::vector<Sample>*> parts{&sp.labelled, &sp.unlabelled, &sp.validation, &sp.test};
      std::size_t total = 0;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        EXPECT_FALSE(parts[i]->empty());
        total += parts[i]->size();
        for (std::size_t j = i + 1; j < parts.size(); ++j) {
          const auto a = group_set(*parts[i]), b = group_set(*parts[j]);
          for (int g : a) EXPECT_EQ(b.count(g), 0u);
        }
      }
      EXPECT_EQ(total, ds.rows.size());
      const double n = static_cast<double>(ds.rows.size());
      EXPECT_NEAR(static_cast<double>(sp.labelled.size() + sp.unlabelled.size()), 0.6 * n, spec.group_size);
      EXPECT_NEAR(static_cast<double>(sp.validation.size()), 0.2 * n, 2 * spec.group_size);
    }
  }
}

TEST(Split, LabelledFractionWithinOneGroup) {
  BlobSpec spec;
  spec.per_class = 500;
  spec.group_size = 10;
  Rng rng(21);
  const auto ds = generate_blobs(spec, rng);
  for (double beta : {0.1, 0.3, 0.9}) {
    const auto sp = split(ds, beta, rng);
    const double train = static_cast<double>(sp.labelled.size() + sp.unlabelled.size());
    EXPECT_NEAR(static_cast<double>(sp.labelled.size()), beta * train, spec.group_size) << beta;
  }
}

TEST(Split, SameSeedSameSplit) {
  BlobSpec spec;
  Rng g(2);
  const auto ds = generate_blobs(spec, g);
  Rng a(9), b(9);
  const auto x = split(ds, 0.2, a), y = split(ds, 0.2, b);
  ASSERT_EQ(x.labelled.size(), y.labelled.size());
  for (std::size_t i = 0; i < x.labelled.size(); ++i) EXPECT_EQ(x.labelled[i].id, y.labelled[i].id);
  ASSERT_EQ(x.test.size(), y.test.size());
  for (std::size_t i = 0; i < x.test.size(); ++i) EXPECT_EQ(x.test[i].id, y.test[i].id);
}

TEST(Split, TooFewGroups) {
  BlobSpec spec;
  spec.per_class = 5;
  spec.group_size = 5;
  Rng rng(1);
  const auto ds = generate_blobs(spec, rng);  // 3 groups
  EXPECT_THROW(split(ds, 0.5, rng), SplitError);
  spec.group_size = 1;
  const auto fine = generate_blobs(spec, rng);
  EXPECT_THROW(split(fine, 0.0, rng), SplitError);
  EXPECT_NO_THROW(split(fine, 0.5, rng));
}

}  // namespace
}  // namespace alab
