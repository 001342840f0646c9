// Copyright 2026 The qmemlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "qmem/data.hpp"

namespace qmem {
namespace {

constexpr double kPi = std::numbers::pi;

SimulationConfig fast() {
  SimulationConfig cfg;
  cfg.integrator.periods = 2;
  cfg.integrator.steps_per_period = 200;
  return cfg;
}

std::string csv_of(const Dataset& ds) {
  std::ostringstream os;
  write_csv(os, ds);
  return os.str();
}

TEST(Sample, DeterministicUnderSeed) {
  EXPECT_EQ(sample(single_space(5), 50), sample(single_space(5), 50));
  EXPECT_NE(sample(single_space(5), 50), sample(single_space(6), 50));
}

TEST(Sample, RowsDoNotDependOnCount) {
  const auto a = sample(coupled_space(2), 30);
  const auto b = sample(coupled_space(2), 300);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(Sample, SingleRangesRespected) {
  for (const auto& r : sample(single_space(1), 2000)) {
    EXPECT_GE(r[0], 0.0);
    EXPECT_LT(r[0], 2.0 * kPi);
    EXPECT_GT(r[1], 0.0);
    EXPECT_LE(r[1], 100.0);
  }
}

TEST(Sample, FullGridIsCartesianProduct) {
  ParamSpace s = coupled_space(0);
  for (auto& f : s.features) {
    f.mode = SampleMode::grid;
    f.levels = 10;
  }
  const auto rows = sample(s, 1);
  ASSERT_EQ(rows.size(), 10000u);
  EXPECT_EQ(rows.front(), (std::vector<double>{0.0, 0.0, 0.0, 0.0}));
  EXPECT_EQ(rows.back(), (std::vector<double>{2e-12, 2e-8, 2.0 * kPi, 100.0}));
  std::set<std::vector<double>> distinct(rows.begin(), rows.end());
  EXPECT_EQ(distinct.size(), rows.size());
}

TEST(Sample, MixedSpaceCyclesThroughGridCombos) {
  const ParamSpace s = coupled_space(3);
  const auto rows = sample(s, 200);
  std::set<std::pair<double, double>> combos;
  for (std::size_t i = 0; i < 100; ++i) combos.insert({rows[i][0], rows[i][1]});
  EXPECT_EQ(combos.size(), 100u);
  EXPECT_TRUE(combos.count({0.0, 0.0}));
  for (std::size_t i = 0; i < 100; ++i) {
    EXPECT_EQ(rows[i][0], rows[i + 100][0]);
    EXPECT_EQ(rows[i][1], rows[i + 100][1]);
  }
}

TEST(Sample, InvalidSpaceThrows) {
  ParamSpace s = single_space(0);
  s.features[0].min = 3.0;
  s.features[0].max = 1.0;
  EXPECT_THROW(sample(s, 3), ConfigError);
  EXPECT_THROW(sample(single_space(0), 0), ConfigError);
  ParamSpace g = single_space(0);
  g.features[0].mode = SampleMode::grid;
  g.features[0].levels = 1;
  EXPECT_THROW(sample(g, 3), ConfigError);
}

TEST(Generate, ZeroLambdaGivesZeroFormFactor) {
  ParamSpace s = single_space(0);
  s.features[1] = {"lambda", 0.0, 0.0, SampleMode::uniform, 0, false};
  const GenerateResult r = generate(s, 1, fast());
  ASSERT_EQ(r.data.size(), 1u);
  EXPECT_EQ(r.data.rows[0][2], 0.0);
  EXPECT_TRUE(r.failures.empty());
}

TEST(Generate, SingleRowsInOrderAndBounded) {
  const GenerateResult r = generate(single_space(4), 12, fast());
  ASSERT_EQ(r.data.size(), 12u);
  EXPECT_EQ(r.data.columns, (std::vector<std::string>{"phi", "lambda", "form_factor"}));
  const auto inputs = sample(single_space(4), 12);
  for (std::size_t i = 0; i < 12; ++i) {
    EXPECT_EQ(r.data.rows[i][0], inputs[i][0]);
    EXPECT_EQ(r.data.rows[i][1], inputs[i][1]);
    EXPECT_GE(r.data.rows[i][2], 0.0);
    EXPECT_LE(r.data.rows[i][2], 1.0);
  }
}

TEST(Generate, CoupledTargetsAreIdentical) {
  const GenerateResult r = generate(coupled_space(1), 8, fast());
  ASSERT_EQ(r.data.size(), 8u);
  EXPECT_EQ(r.data.columns, dataset_columns(2));
  for (const auto& row : r.data.rows) EXPECT_EQ(row[4], row[5]);
}

TEST(Generate, WorkerCountDoesNotChangeOutput) {
  GenerateOptions one, four;
  one.workers = 1;
  four.workers = 4;
  EXPECT_EQ(csv_of(generate(coupled_space(9), 10, fast(), one).data),
            csv_of(generate(coupled_space(9), 10, fast(), four).data));
}

TEST(Csv, RoundTripIsExact) {
  Dataset ds;
  ds.columns = dataset_columns(1);
  ds.rows = {{0.1, 1.0 / 3.0, 0.30000000000000004}, {6.2831853071795862, 1e-300, 0.0}};
  std::istringstream in(csv_of(ds));
  EXPECT_EQ(read_csv(in), ds);
  EXPECT_EQ(csv_of(ds).substr(0, csv_of(ds).find('\n')), "phi,lambda,form_factor");
}

TEST(Csv, EmptyDatasetIsHeaderOnly) {
  Dataset ds;
  ds.columns = dataset_columns(2);
  EXPECT_EQ(csv_of(ds), "c12,l12,phi,lambda,form_factor,form_factor_2\n");
  std::istringstream in(csv_of(ds));
  EXPECT_EQ(read_csv(in), ds);
}

TEST(Csv, WrongColumnCountReportsLine) {
  std::istringstream in("phi,lambda,form_factor\n1,2,3\n4,5\n");
  try {
    read_csv(in);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Csv, NonNumberReportsLine) {
  std::istringstream in("a,b\n1,2\n3,x\n");
  try {
    read_csv(in);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Stats, HandExample) {
  const ColumnSummary s = summarize("x", {4, 1, 3, 2});
  EXPECT_EQ(s.count, 4u);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.q50, 2.5);
  EXPECT_DOUBLE_EQ(s.q25, 1.75);
  EXPECT_DOUBLE_EQ(s.q75, 3.25);
  EXPECT_DOUBLE_EQ(s.std, std::sqrt(5.0 / 3.0));
  EXPECT_EQ(s.min, 1.0);
  EXPECT_EQ(s.max, 4.0);
}

TEST(Stats, ConstantColumn) {
  const ColumnSummary s = summarize("c", std::vector<double>(7, 0.42));
  EXPECT_EQ(s.std, 0.0);
  for (double q : {s.min, s.q25, s.q50, s.q75, s.max}) EXPECT_EQ(q, 0.42);
}

TEST(Stats, QuantilesOrdered) {
  const GenerateResult r = generate(single_space(2), 10, fast());
  for (const auto& s : stats(r.data)) {
    EXPECT_LE(s.min, s.q25);
    EXPECT_LE(s.q25, s.q50);
    EXPECT_LE(s.q50, s.q75);
    EXPECT_LE(s.q75, s.max);
  }
}

TEST(Stats, EmptyThrows) {
  Dataset ds;
  ds.columns = dataset_columns(1);
  EXPECT_THROW(stats(ds), ConfigError);
}

TEST(Config, ParsesKeyValuesAndComments) {
  std::istringstream in("# circuit\nc_sigma = 2e-12\n\nl_self=5e-9  # inline\ntrunc = 3\nperiods = 4\n");
  const SimulationConfig cfg = parse_config(in);
  EXPECT_EQ(cfg.c_sigma, 2e-12);
  EXPECT_EQ(cfg.l_self, 5e-9);
  EXPECT_EQ(cfg.trunc, 3u);
  EXPECT_EQ(cfg.integrator.periods, 4u);
}

TEST(Config, ErrorsCarryLineNumbers) {
  for (const auto& [text, line] : std::vector<std::pair<std::string, std::size_t>>{
           {"c_sigma = 1e-12\nbogus = 1\n", 2}, {"trunc = x\n", 1}, {"\n\nno equals sign\n", 3}}) {
    std::istringstream in(text);
    try {
      parse_config(in);
      FAIL() << text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), line) << text;
    }
  }
}

TEST(Config, SettingsRoundTrip) {
  SimulationConfig cfg;
  cfg.drive.amp = 0.123456789012345678;
  cfg.trunc = 4;
  std::ostringstream os;
  for (const auto& [k, v] : to_settings(cfg)) os << k << " = " << v << '\n';
  std::istringstream in(os.str());
  const SimulationConfig back = parse_config(in);
  EXPECT_EQ(back.drive.amp, cfg.drive.amp);
  EXPECT_EQ(back.trunc, 4u);
  EXPECT_EQ(to_settings(back), to_settings(cfg));
}

TEST(Config, ValidationRejectsBadTruncation) {
  std::istringstream in("trunc = 5\n");
  EXPECT_THROW(parse_config(in), ConfigError);
}

}  // namespace
}  // namespace qmem
