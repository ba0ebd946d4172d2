#include <gtest/gtest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "helt/core/error.hpp"
#include "helt/matchup/regret_matching.hpp"

using namespace helt;
using namespace helt::matchup;

TEST(Matchup, EmaArithmetic) {
  MatchupState s = MatchupState::create(3, 0.9);
  record_result(s, 1, 2, true);
  EXPECT_NEAR(s.wr(1, 2), 0.55, 1e-12);
  record_result(s, 2, 1, false);
  EXPECT_NEAR(s.wr(2, 1), 0.45, 1e-12);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if ((i == 1 && j == 2) || (i == 2 && j == 1)) continue;
      EXPECT_EQ(s.wr(i, j), 0.5);
    }
  }
}

TEST(Matchup, RepeatedWinsApproachOneMonotonically) {
  MatchupState s = MatchupState::create(2, 0.9);
  double prev = s.wr(0, 1);
  for (int k = 0; k < 500; ++k) {
    record_result(s, 0, 1, true);
    EXPECT_GE(s.wr(0, 1), prev);
    EXPECT_LE(s.wr(0, 1), 1.0);
    prev = s.wr(0, 1);
  }
  EXPECT_NEAR(prev, 1.0, 1e-9);
}

TEST(Matchup, OutOfRangeIndexIsContractViolation) {
  MatchupState s = MatchupState::create(2);
  EXPECT_THROW(record_result(s, 2, 0, true), ContractViolation);
  EXPECT_THROW(record_result(s, 0, -1, true), ContractViolation);
}

TEST(Matchup, ExpectedUtilityExamples) {
  MatchupState s = MatchupState::create(3);
  std::fill(s.weights.begin(), s.weights.end(), 0.0);
  s.weights[s.at(2, 0)] = 1.0;
  EXPECT_EQ(expected_utility(s), 0.5);
  s.wr_ema[s.at(2, 0)] = 0.8;
  EXPECT_EQ(expected_utility(s), 0.8);

  Rng rng(1);
  MatchupState t = MatchupState::create(2);
  double wsum = 0.0;
  for (int k = 0; k < 4; ++k) {
    t.wr_ema[k] = uniform01(rng);
    t.weights[k] = uniform01(rng);
    wsum += t.weights[k];
  }
  for (double& w : t.weights) w /= wsum;
  const double hand = t.wr(0, 0) * t.w(0, 0) + t.wr(0, 1) * t.w(0, 1) + t.wr(1, 0) * t.w(1, 0) + t.wr(1, 1) * t.w(1, 1);
  EXPECT_NEAR(expected_utility(t), hand, 1e-12);
}

TEST(Matchup, ZeroRegretFallsBackToExactUniform) {
  MatchupState s = MatchupState::create(3);
  update_regret_and_weights(s);
  for (double w : s.weights) EXPECT_EQ(w, 1.0 / 9.0);
  for (double r : s.regret) EXPECT_EQ(r, 0.0);
}

TEST(Matchup, EtaOneIsUniform) {
  MatchupState s = MatchupState::create(2, 0.5, 1.0);
  record_result(s, 0, 1, true);
  update_regret_and_weights(s);
  EXPECT_GT(s.r(0, 1), 0.0);
  for (double w : s.weights) EXPECT_DOUBLE_EQ(w, 0.25);
}

TEST(Matchup, HandTraceFirstTwoSteps) {
  MatchupState s = MatchupState::create(2, 0.5, 0.1);
  record_result(s, 0, 1, true);
  EXPECT_NEAR(expected_utility(s), 0.5625, 1e-12);
  update_regret_and_weights(s);
  EXPECT_NEAR(s.r(0, 1), 0.1875, 1e-12);
  EXPECT_NEAR(s.w(0, 1), 0.925, 1e-12);
  EXPECT_NEAR(s.w(0, 0), 0.025, 1e-12);

  record_result(s, 1, 0, false);
  EXPECT_NEAR(s.wr(1, 0), 0.25, 1e-12);
  EXPECT_NEAR(expected_utility(s), 0.725, 1e-12);
  update_regret_and_weights(s);
  EXPECT_NEAR(s.r(0, 1), 0.2125, 1e-12);
  EXPECT_EQ(s.r(0, 0), 0.0);
  EXPECT_EQ(s.r(1, 0), 0.0);
  EXPECT_NEAR(s.w(0, 1), 0.925, 1e-12);
}

TEST(Matchup, SixStepTraceMatchesFormulaOracle) {
  constexpr double gamma = 0.5, eta = 0.1;
  const std::array<std::tuple<int, int, bool>, 6> seq{
      {{0, 1, true}, {1, 0, false}, {0, 0, true}, {1, 1, true}, {0, 1, false}, {1, 0, true}}};
  MatchupState s = MatchupState::create(2, gamma, eta);
  oracle::RmTrace t{s.wr_ema, s.regret, s.weights, 0.0};
  for (const auto& [i, j, win] : seq) {
    t = oracle::rm_step(t, 2, i, j, win, gamma, eta);
    record_result(s, i, j, win);
    EXPECT_NEAR(expected_utility(s), t.E, 1e-12);
    update_regret_and_weights(s);
    for (int k = 0; k < 4; ++k) {
      EXPECT_NEAR(s.wr_ema[k], t.r[k], 1e-12);
      EXPECT_NEAR(s.regret[k], t.R[k], 1e-12);
      EXPECT_NEAR(s.weights[k], t.w[k], 1e-12);
    }
  }
}

TEST(Matchup, InvariantsUnderRandomUpdates) {
  Rng rng(2);
  MatchupState s = MatchupState::create(4, 0.9, 0.1);
  for (int k = 0; k < 100000; ++k) {
    const int i = std::uniform_int_distribution<int>(0, 3)(rng);
    const int j = std::uniform_int_distribution<int>(0, 3)(rng);
    record_result(s, i, j, uniform01(rng) < 0.3 + 0.1 * j);
    update_regret_and_weights(s);
    double total = 0.0;
    for (std::size_t c = 0; c < s.weights.size(); ++c) {
      ASSERT_GE(s.weights[c], 0.0);
      ASSERT_GE(s.regret[c], 0.0);
      ASSERT_GE(s.wr_ema[c], 0.0);
      ASSERT_LE(s.wr_ema[c], 1.0);
      total += s.weights[c];
    }
    ASSERT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Matchup, WeightMonotoneInRegret) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    MatchupState s = MatchupState::create(3, 0.9, 0.2);
    for (int k = 0; k < 20; ++k) {
      record_result(s, std::uniform_int_distribution<int>(0, 2)(rng), std::uniform_int_distribution<int>(0, 2)(rng),
                    uniform01(rng) < 0.5);
      update_regret_and_weights(s);
    }
    for (int a = 0; a < 9; ++a) {
      for (int b = 0; b < 9; ++b) {
        if (s.regret[a] > s.regret[b]) EXPECT_GE(s.weights[a], s.weights[b]);
      }
    }
  }
}

TEST(Matchup, ConcentratedWeightAlwaysSampled) {
  MatchupState s = MatchupState::create(4);
  std::fill(s.weights.begin(), s.weights.end(), 0.0);
  s.weights[s.at(2, 3)] = 1.0;
  Rng rng(4);
  for (int k = 0; k < 1000; ++k) EXPECT_EQ(sample_pair(s, rng), std::make_pair(2, 3));
}

TEST(Matchup, FreshStateSamplesUniformly) {
  const MatchupState s = MatchupState::create(3);
  Rng rng(5);
  constexpr int draws = 90000;
  std::array<int, 9> counts{};
  for (int k = 0; k < draws; ++k) {
    const auto [i, j] = sample_pair(s, rng);
    counts[i * 3 + j] += 1;
  }
  const double p = 1.0 / 9.0, sigma = std::sqrt(draws * p * (1 - p));
  for (int c : counts) EXPECT_LE(std::abs(c - draws * p), 3 * sigma);
}

TEST(Matchup, CsvShape) {
  const std::string csv = to_csv(MatchupState::create(2));
  EXPECT_EQ(csv.rfind("i,j,wr_ema,regret,weight\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}
