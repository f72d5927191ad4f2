// Copyright 2026 The PWCF Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "pwcf/binary_io.h"
#include "pwcf/common.h"
#include "pwcf/config.h"
#include "pwcf/data.h"
#include "pwcf/io.h"
#include "pwcf/synthetic.h"
#include "test_util.h"

namespace pwcf {
namespace {

using testing::random_matrix;

TEST(FeatureMatrix, RejectsNonFiniteWithLocation) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 4);
  m(2, 1) = std::numeric_limits<double>::quiet_NaN();
  try {
    FeatureMatrix f(m);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("column 1"), std::string::npos) << e.what();
  }
}

TEST(FeatureMatrix, RejectsEmpty) {
  EXPECT_THROW(FeatureMatrix(Eigen::MatrixXd(4, 0)), Error);
}

TEST(Csv, RowsAreSamples) {
  std::istringstream in("1.0,2.0\n3.0,4.0\n");
  const FeatureMatrix m = read_feature_matrix_csv(in);
  ASSERT_EQ(m.dim(), 2);
  ASSERT_EQ(m.count(), 2);
  EXPECT_EQ(m.values()(0, 0), 1.0);
  EXPECT_EQ(m.values()(1, 0), 2.0);
  EXPECT_EQ(m.values()(0, 1), 3.0);
  EXPECT_EQ(m.values()(1, 1), 4.0);
}

TEST(Csv, RaggedRowIsRejected) {
  std::istringstream in("1,2\n3\n");
  EXPECT_THROW(read_feature_matrix_csv(in), Error);
}

TEST(Csv, BadCellNamesLocation) {
  std::istringstream in("1,2\n3,abc\n");
  try {
    read_feature_matrix_csv(in);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column"), std::string::npos) << msg;
  }
}

TEST(Csv, RoundTripIsExact) {
  std::mt19937_64 rng(4);
  const FeatureMatrix m(random_matrix(5, 7, rng));
  std::stringstream buf;
  write_feature_matrix_csv(m, buf);
  const FeatureMatrix back = read_feature_matrix_csv(buf);
  EXPECT_EQ(back.values(), m.values());
}

TEST(BinaryMatrix, EmptyHeaderIsRejected) {
  std::stringstream buf;
  binary::write_magic(buf, "PWF1");
  binary::write_u32(buf, 1);
  binary::write_u64(buf, 4);
  binary::write_u64(buf, 0);
  try {
    read_feature_matrix_binary(buf);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("empty"), std::string::npos) << e.what();
  }
}

TEST(BinaryMatrix, RoundTripIsBitExact) {
  std::mt19937_64 rng(11);
  const FeatureMatrix m(random_matrix(8, 16, rng));
  const auto dir = testing::scratch_dir("pwf_roundtrip");
  save_feature_matrix(m, dir / "m.pwf", MatrixFormat::kBinary);
  const FeatureMatrix back = load_feature_matrix(dir / "m.pwf", MatrixFormat::kBinary);
  ASSERT_EQ(back.dim(), 8);
  ASSERT_EQ(back.count(), 16);
  EXPECT_EQ(std::memcmp(back.values().data(), m.values().data(), 128 * sizeof(double)), 0);
}

TEST(BinaryMatrix, LayoutIsLittleEndianColumnMajor) {
  Eigen::MatrixXd v(2, 2);
  v << 1.0, 2.0, 3.0, 4.0;  // rows (1,2) and (3,4)
  std::stringstream buf;
  write_feature_matrix_binary(FeatureMatrix(v), buf);
  const std::string bytes = buf.str();
  ASSERT_EQ(bytes.size(), 4u + 4u + 8u + 8u + 4u * 8u);
  EXPECT_EQ(bytes.substr(0, 4), "PWF1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 2);   // d
  EXPECT_EQ(static_cast<unsigned char>(bytes[16]), 2);  // n
  double second = 0.0;
  std::memcpy(&second, bytes.data() + 24 + 8, 8);
  EXPECT_EQ(second, 3.0);  // column-major: (0,0), (1,0), ...
}

TEST(BinaryMatrix, TruncatedFileIsRejected) {
  std::mt19937_64 rng(2);
  std::stringstream buf;
  write_feature_matrix_binary(FeatureMatrix(random_matrix(3, 3, rng)), buf);
  std::string bytes = buf.str();
  bytes.resize(bytes.size() - 5);
  std::istringstream in(bytes);
  EXPECT_THROW(read_feature_matrix_binary(in), Error);
}

TEST(BinaryMatrix, BadMagicIsRejected) {
  std::istringstream in(std::string("XXXX") + std::string(20, '\0'));
  EXPECT_THROW(read_feature_matrix_binary(in), Error);
}

TEST(Labels, RoundTripAndRangeCheck) {
  const auto dir = testing::scratch_dir("labels");
  const LabelVector labels({0, 2, 1, 2}, 3);
  save_labels(labels, dir / "l.txt");
  const LabelVector back = load_labels(dir / "l.txt", 3);
  EXPECT_EQ(back.labels(), labels.labels());
  EXPECT_EQ(back.num_classes(), 3);
  EXPECT_THROW(load_labels(dir / "l.txt", 2), Error);
  EXPECT_THROW(LabelVector({0, 0}, 1), Error);
}

TEST(Labels, OneHotAndCounts) {
  const LabelVector labels({1, 0, 1}, 2);
  const Eigen::MatrixXd y = labels.one_hot();
  EXPECT_EQ(y(1, 0), 1.0);
  EXPECT_EQ(y(0, 0), 0.0);
  EXPECT_EQ(y.sum(), 3.0);
  EXPECT_EQ(labels.class_counts(), (std::vector<int>{1, 2}));
}

TEST(Standardization, PooledZeroMeanUnitVariance) {
  std::mt19937_64 rng(8);
  Eigen::MatrixXd x = random_matrix(4, 50, rng) * 3.0;
  x.row(3).setConstant(7.0);
  const Standardization s = Standardization::fit(x);
  const Eigen::MatrixXd z = s.apply(x);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(z.row(i).mean(), 0.0, 1e-12);
    EXPECT_NEAR((z.row(i).array() - z.row(i).mean()).square().mean(), 1.0, 1e-12);
  }
  EXPECT_EQ(s.scale(3), 1.0);
  EXPECT_NEAR(z.row(3).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(Config, EmptyGivesDefaults) {
  const RunConfig c = parse_config_text("");
  EXPECT_EQ(c.theta, 100.0);
  EXPECT_EQ(c.lambda1, 1.0);
  EXPECT_EQ(c.lambda2, 1000.0);
  EXPECT_EQ(c.lambda3, 10000.0);
  EXPECT_EQ(c.tau, 0.1);
  EXPECT_EQ(c.gamma, 1.0);
  EXPECT_EQ(c.m, 1.0);
  EXPECT_EQ(c.k, 10);
  EXPECT_EQ(c.max_iters, 50);
  EXPECT_EQ(c.inner_w_iters, 5);
}

TEST(Config, NegativeCodeLengthRejected) {
  EXPECT_THROW(parse_config_text("r = -1\n"), Error);
  EXPECT_THROW(parse_config_text("r = 0\n"), Error);
}

TEST(Config, NegativeWeightRejectedNamingKey) {
  try {
    parse_config_text("lambda2 = -3\n");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("lambda2"), std::string::npos) << e.what();
  }
}

TEST(Config, UnknownKeyRejectedNamingKey) {
  try {
    parse_config_text("# comment\nlamda1 = 2\n");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("lamda1"), std::string::npos) << e.what();
  }
}

TEST(Config, GammaZeroAccepted) {
  const RunConfig c = parse_config_text("gamma = 0\n");
  EXPECT_EQ(c.gamma, 0.0);
}

TEST(Config, AblationFlagsAndRoundTrip) {
  const RunConfig c = parse_config_text(
      "r = 16  # bits\nseed = 9\ndisable_manifold = true\nstandard_triplet = true\n");
  EXPECT_EQ(c.r, 16);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_TRUE(c.ablation.disable_manifold);
  EXPECT_TRUE(c.ablation.standard_triplet);
  EXPECT_FALSE(c.ablation.disable_hfon);
  EXPECT_EQ(parse_config_text(c.to_text()), c);
}

TEST(Config, DuplicateKeyRejected) {
  EXPECT_THROW(parse_config_text("r = 8\nr = 16\n"), Error);
}

TEST(Synthetic, SameSeedIsBitIdentical) {
  SyntheticSpec spec = benchmark_spec(5);
  spec.source_count = 60;
  spec.target_count = 40;
  const DatasetPair a = generate_synthetic_pair(spec);
  const DatasetPair b = generate_synthetic_pair(spec);
  EXPECT_EQ(a.source.values(), b.source.values());
  EXPECT_EQ(a.target.values(), b.target.values());
  EXPECT_EQ(a.source_labels.labels(), b.source_labels.labels());
  EXPECT_EQ(a.target_truth->labels(), b.target_truth->labels());
  spec.seed = 6;
  EXPECT_NE(generate_synthetic_pair(spec).source.values(), a.source.values());
}

TEST(Synthetic, IdentityShiftNoNoiseMatchesClass) {
  SyntheticSpec spec;
  spec.classes = 4;
  spec.dim = 6;
  spec.source_count = 20;
  spec.target_count = 20;
  spec.noise = 0.0;
  spec.seed = 3;
  const DatasetPair pair = generate_synthetic_pair(spec);
  for (int t = 0; t < pair.target.count(); ++t) {
    int best = 0;
    double best_d = 1e300;
    for (int s = 0; s < pair.source.count(); ++s) {
      const double d = (pair.target.col(t) - pair.source.col(s)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = s;
      }
    }
    EXPECT_EQ(pair.source_labels[best], (*pair.target_truth)[t]);
  }
}

double mean_within_class_cross_distance(const DatasetPair& pair) {
  double sum = 0.0;
  int count = 0;
  for (int t = 0; t < pair.target.count(); ++t) {
    for (int s = 0; s < pair.source.count(); ++s) {
      if (pair.source_labels[s] != (*pair.target_truth)[t]) continue;
      sum += (pair.target.col(t) - pair.source.col(s)).norm();
      ++count;
    }
  }
  return sum / count;
}

TEST(Synthetic, RotationIncreasesCrossDomainDistance) {
  SyntheticSpec spec;
  spec.classes = 3;
  spec.dim = 4;
  spec.source_count = 90;
  spec.target_count = 90;
  spec.class_spread = 5.0;
  spec.noise = 0.3;
  spec.seed = 12;
  const double identity = mean_within_class_cross_distance(generate_synthetic_pair(spec));
  spec.shift.rotation_deg = 30.0;
  const double rotated = mean_within_class_cross_distance(generate_synthetic_pair(spec));
  EXPECT_GT(rotated, identity);
}

TEST(Synthetic, InvalidSpecsRejected) {
  SyntheticSpec spec;
  spec.classes = 1;
  EXPECT_THROW(generate_synthetic_pair(spec), Error);
  spec = SyntheticSpec{};
  spec.dim = 5;
  EXPECT_THROW(generate_synthetic_pair(spec), Error);
  spec = SyntheticSpec{};
  spec.target_count = 9;
  EXPECT_THROW(generate_synthetic_pair(spec), Error);
}

TEST(DatasetPair, TrainingViewDropsTruth) {
  SyntheticSpec spec;
  spec.source_count = 20;
  spec.target_count = 20;
  const DatasetPair pair = generate_synthetic_pair(spec);
  const TrainingData view = pair.training_view();
  EXPECT_EQ(view.target.values(), pair.target.values());
  EXPECT_EQ(view.source_labels.labels(), pair.source_labels.labels());
}

}  // namespace
}  // namespace pwcf
