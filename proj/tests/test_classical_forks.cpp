// Copyright 2026 The bellsel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "bellsel/classical_forks.hpp"
#include "test_support.hpp"

using namespace bellsel;

namespace {

// Exact phi coefficient of K, L by enumerating the 2x2x2 joint of
// (white, K, L).
double mice_exact_corr(double pw, double pk, double pl) {
  double p11 = 0, pk1 = 0, pl1 = 0;
  for (int w = 0; w < 2; ++w)
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l) {
        const double pwv = w ? pw : 1 - pw;
        const double pkv = w ? (k ? pk : 1 - pk) : (k ? 0.0 : 1.0);
        const double plv = w ? (l ? pl : 1 - pl) : (l ? 0.0 : 1.0);
        const double p = pwv * pkv * plv;
        if (k && l) p11 += p;
        if (k) pk1 += p;
        if (l) pl1 += p;
      }
  return (p11 - pk1 * pl1) / std::sqrt(pk1 * (1 - pk1) * pl1 * (1 - pl1));
}

const std::string kData = BELLSEL_DATA_DIR;

}  // namespace

TEST(Phi, matches_pearson_on_indicators_and_is_undefined_for_constants) {
  BinaryTable t;
  t.n = {30, 10, 20, 40};
  // Pearson by moments.
  const double n = 100, ex = 0.6, ey = 0.5, exy = 0.4;
  const double pearson = (exy - ex * ey) / std::sqrt(ex * (1 - ex) * ey * (1 - ey));
  EXPECT_NEAR(*phi_coefficient(t), pearson, 1e-12);
  (void)n;
  t.n = {10, 5, 0, 0};
  EXPECT_FALSE(phi_coefficient(t).has_value());
}

TEST(Collider, independent_population_and_exact_conditional_correlation) {
  const auto r0 = collider_demo(100000, 5, 0);
  EXPECT_LE(std::abs(*r0.population_corr), 0.02);
  EXPECT_DOUBLE_EQ(*r0.restricted_corr, 1.0);
  EXPECT_EQ(r0.direction(), "inducing");
  EXPECT_EQ(r0.kind, ForkKind::kCorrelating);
  const auto r1 = collider_demo(100000, 5, 1);
  EXPECT_DOUBLE_EQ(*r1.restricted_corr, -1.0);
  EXPECT_EQ(r0.population_size, 100000u);
  EXPECT_EQ(r0.restricted_size + r1.restricted_size, 100000u);
  EXPECT_THROW(collider_demo(1, 5), Error);
}

TEST(Parity, synthetic_three_cell_restriction_gives_minus_half) {
  const auto s1 = synthetic_digits(100000, 5, 0), s2 = synthetic_digits(100000, 5, 1);
  const auto r = parity_correlator(s1, s2);
  EXPECT_LE(std::abs(*r.population_corr), 0.02);
  EXPECT_NEAR(*r.restricted_corr, -0.5, 0.02);
  EXPECT_EQ(r.restricted_table.n[3], 0u);
  EXPECT_EQ(r.direction(), "inducing");
  const auto f = r.population_table.frequencies();
  for (double x : f) EXPECT_NEAR(x, 0.25, 5 * oracle::binomial_sigma(0.25, 1e5));
}

TEST(Parity, odd_odd_cell_empty_within_s_for_any_input) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<int> len(1, 500), digit(0, 9);
    DigitSeq a, b;
    const int n = len(gen);
    for (int i = 0; i < n; ++i) {
      a.digits.push_back(static_cast<std::uint8_t>(digit(gen)));
      b.digits.push_back(static_cast<std::uint8_t>(digit(gen)));
    }
    const auto r = parity_correlator(a, b);
    EXPECT_EQ(r.restricted_table.n[3], 0u);
    EXPECT_EQ(r.population_size, static_cast<std::uint64_t>(n));
  }
}

TEST(Parity, rejects_length_mismatch_and_bad_digits) {
  DigitSeq a{{1, 2, 3}, "a"}, b{{1, 2}, "b"};
  EXPECT_THROW(parity_correlator(a, b), Error);
  DigitSeq c{{1, 12, 3}, "c"};
  EXPECT_THROW(parity_correlator(a, c), Error);
}

TEST(Parity, real_pi_and_e_digits) {
  const auto pi = load_digits(kData + "/pi_100k.txt", 100000);
  const auto e = load_digits(kData + "/e_100k.txt", 100000);
  const auto r = parity_correlator(pi, e);
  EXPECT_GE(*r.restricted_corr, -0.56);
  EXPECT_LE(*r.restricted_corr, -0.44);
  EXPECT_LE(std::abs(*r.population_corr), 0.02);
}

TEST(LoadDigits, fixtures_start_with_known_expansions) {
  const auto pi = load_digits(kData + "/pi_100k.txt", 5);
  EXPECT_EQ(pi.digits, (std::vector<std::uint8_t>{1, 4, 1, 5, 9}));
  const auto e = load_digits(kData + "/e_100k.txt", 5);
  EXPECT_EQ(e.digits, (std::vector<std::uint8_t>{7, 1, 8, 2, 8}));
  EXPECT_THROW(load_digits(kData + "/pi_100k.txt", 0), Error);
}

TEST(LoadDigits, short_file_reports_required_and_available) {
  const auto dir = testing_util::temp_dir("digits");
  {
    std::ofstream f(dir / "short.txt");
    f << "12 34\n5x6";
  }
  try {
    load_digits(dir / "short.txt", 10);
    FAIL();
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("has 6 digits"), std::string::npos) << msg;
    EXPECT_NE(msg.find("10 required"), std::string::npos) << msg;
  }
  EXPECT_EQ(load_digits(dir / "short.txt", 6).digits, (std::vector<std::uint8_t>{1, 2, 3, 4, 5, 6}));
  EXPECT_THROW(load_digits(dir / "missing.txt", 1), Error);
}

TEST(Mice, population_correlation_matches_enumeration_and_restriction_masks_it) {
  const double exact = mice_exact_corr(0.5, 0.2, 0.2);
  EXPECT_NEAR(exact, 1.0 / 9, 1e-12);
  const auto r = mice_demo(1000000, 5);
  EXPECT_NEAR(*r.population_corr, exact, 0.02);
  EXPECT_LE(std::abs(*r.restricted_corr), 0.02);
  EXPECT_EQ(r.direction(), "masking");
  EXPECT_EQ(r.kind, ForkKind::kDecorrelating);
}

TEST(Mice, enumeration_oracle_at_other_parameters) {
  for (auto [pw, pk, pl] : {std::tuple{0.3, 0.5, 0.4}, std::tuple{0.8, 0.1, 0.6}}) {
    const auto r = mice_demo(400000, 9, {pw, pk, pl});
    EXPECT_NEAR(*r.population_corr, mice_exact_corr(pw, pk, pl), 0.02);
  }
}

TEST(Mice, all_white_colony_has_no_restriction_effect) {
  const auto r = mice_demo(100000, 5, {1.0, 0.2, 0.2});
  EXPECT_EQ(r.population_size, r.restricted_size);
  EXPECT_DOUBLE_EQ(*r.population_corr, *r.restricted_corr);
}

TEST(Mice, preselection_matches_postselection) {
  const auto post = mice_demo(1000000, 5);
  const auto pre = mice_preselected(post.restricted_size, 6);
  EXPECT_EQ(pre.restricted_size, post.restricted_size);
  EXPECT_NEAR(*pre.restricted_corr, *post.restricted_corr, 0.02);
  EXPECT_THROW(mice_demo(100, 1, {1.5, 0.2, 0.2}), Error);
}
