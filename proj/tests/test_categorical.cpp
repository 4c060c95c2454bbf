#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "gcnbound/categorical.hpp"
#include "gcnbound/rng.hpp"
#include "oracles.hpp"

using gcnbound::CategoricalDist;
using gcnbound::kl_divergence;
using gcnbound::renyi_divergence;
using gcnbound::tv_distance;

TEST(CategoricalDist, RejectsEmptyNegativeAndNonFinite) {
  EXPECT_THROW(CategoricalDist::from({}), std::invalid_argument);
  EXPECT_THROW(CategoricalDist::from({0.5, -0.1, 0.6}), std::invalid_argument);
  EXPECT_THROW(CategoricalDist::from({0.5, std::numeric_limits<double>::quiet_NaN()}),
               std::invalid_argument);
  EXPECT_THROW(CategoricalDist::from({0.5, std::numeric_limits<double>::infinity()}),
               std::invalid_argument);
}

TEST(CategoricalDist, AcceptsExactMassAsIs) {
  CategoricalDist d = CategoricalDist::from({0.3, 0.7});
  EXPECT_EQ(d[0], 0.3);
  EXPECT_EQ(d[1], 0.7);
}

TEST(CategoricalDist, RenormalizesSmallDriftOnly) {
  // Drift of 1e-10 sits between the accept-as-is and reject thresholds.
  CategoricalDist d = CategoricalDist::from({0.25 + 1e-10, 0.25, 0.25, 0.25});
  double total = d[0] + d[1] + d[2] + d[3];
  EXPECT_NEAR(total, 1.0, 1e-15);
  EXPECT_THROW(CategoricalDist::from({0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(CategoricalDist::from({0.5, 0.5 - 1e-8}), std::invalid_argument);
}

TEST(TvDistance, FrozenValuesAndAxioms) {
  CategoricalDist p = CategoricalDist::from({0.6, 0.4});
  CategoricalDist q = CategoricalDist::from({0.5, 0.5});
  EXPECT_NEAR(tv_distance(p, q), 0.1, 1e-15);
  EXPECT_EQ(tv_distance(p, p), 0.0);
  CategoricalDist d1 = CategoricalDist::from({1.0, 0.0, 0.0});
  CategoricalDist d2 = CategoricalDist::from({0.0, 0.0, 1.0});
  EXPECT_NEAR(tv_distance(d1, d2), 1.0, 1e-15);
  EXPECT_THROW(tv_distance(p, d1), std::invalid_argument);
}

TEST(TvDistance, MatchesIndependentHalfL1) {
  gcnbound::Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(5), b(5);
    double sa = 0.0, sb = 0.0;
    for (int i = 0; i < 5; ++i) {
      a[i] = rng.uniform() + 0.01;
      b[i] = rng.uniform() + 0.01;
      sa += a[i];
      sb += b[i];
    }
    for (int i = 0; i < 5; ++i) {
      a[i] /= sa;
      b[i] /= sb;
    }
    EXPECT_NEAR(tv_distance(CategoricalDist::from(a), CategoricalDist::from(b)),
                oracle::tv_half_l1(a, b), 1e-14);
  }
}

TEST(RenyiDivergence, FrozenValueAndSelfDivergence) {
  CategoricalDist p = CategoricalDist::from({1.0, 0.0});
  CategoricalDist q = CategoricalDist::from({0.5, 0.5});
  // sum p^2 q^-1 = 2, so D_2 = log 2.
  EXPECT_NEAR(renyi_divergence(p, q, 2.0), 0.693147180559945, 1e-14);
  CategoricalDist r = CategoricalDist::from({0.3, 0.7});
  EXPECT_EQ(renyi_divergence(r, r, 2.0), 0.0);
  EXPECT_EQ(renyi_divergence(r, r, 0.5), 0.0);
}

TEST(RenyiDivergence, RejectsAlphaOneAndInvalidOrders) {
  CategoricalDist p = CategoricalDist::from({0.3, 0.7});
  CategoricalDist q = CategoricalDist::from({0.6, 0.4});
  EXPECT_THROW(renyi_divergence(p, q, 1.0), std::invalid_argument);
  EXPECT_THROW(renyi_divergence(p, q, 0.0), std::invalid_argument);
  EXPECT_THROW(renyi_divergence(p, q, -2.0), std::invalid_argument);
  EXPECT_THROW(
      renyi_divergence(p, q, std::numeric_limits<double>::infinity()),
      std::invalid_argument);
}

TEST(RenyiDivergence, AbsolutelyDiscontinuousSupportGoesToInfinity) {
  CategoricalDist p = CategoricalDist::from({0.5, 0.5});
  CategoricalDist q = CategoricalDist::from({1.0, 0.0});
  EXPECT_TRUE(std::isinf(renyi_divergence(p, q, 2.0)));
  // For alpha < 1 the same pair stays finite: the q-null coordinate drops.
  EXPECT_TRUE(std::isfinite(renyi_divergence(p, q, 0.5)));
}

TEST(RenyiDivergence, BracketsKlNearAlphaOne) {
  CategoricalDist p = CategoricalDist::from({0.3, 0.7});
  CategoricalDist q = CategoricalDist::from({0.6, 0.4});
  double kl = kl_divergence(p, q);
  EXPECT_NEAR(kl, 0.183786897386812, 1e-14);
  EXPECT_NEAR(kl, oracle::kl({0.3, 0.7}, {0.6, 0.4}), 1e-15);
  double below = renyi_divergence(p, q, 1.0 - 1e-4);
  double above = renyi_divergence(p, q, 1.0 + 1e-4);
  EXPECT_LE(below, kl + 1e-12);  // Renyi order-monotonicity
  EXPECT_GE(above, kl - 1e-12);
  EXPECT_NEAR(below, kl, 1e-3);
  EXPECT_NEAR(above, kl, 1e-3);
}

TEST(RenyiDivergence, MonotoneInOrder) {
  CategoricalDist p = CategoricalDist::from({0.1, 0.2, 0.7});
  CategoricalDist q = CategoricalDist::from({0.5, 0.3, 0.2});
  double prev = -1.0;
  for (double alpha : {0.25, 0.5, 0.75, 1.5, 2.0, 4.0, 8.0}) {
    double d = renyi_divergence(p, q, alpha);
    EXPECT_GE(d, prev - 1e-12) << "alpha=" << alpha;
    prev = d;
  }
}

TEST(KlDivergence, InfiniteOffSupportAndNonNegative) {
  CategoricalDist p = CategoricalDist::from({0.5, 0.5});
  CategoricalDist q = CategoricalDist::from({1.0, 0.0});
  EXPECT_TRUE(std::isinf(kl_divergence(p, q)));
  EXPECT_EQ(kl_divergence(q, p), std::log(2.0));  // 0 log 0 term drops
  gcnbound::Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> a(4), b(4);
    double sa = 0.0, sb = 0.0;
    for (int i = 0; i < 4; ++i) {
      a[i] = rng.uniform() + 0.05;
      b[i] = rng.uniform() + 0.05;
      sa += a[i];
      sb += b[i];
    }
    for (int i = 0; i < 4; ++i) {
      a[i] /= sa;
      b[i] /= sb;
    }
    EXPECT_GE(kl_divergence(CategoricalDist::from(a), CategoricalDist::from(b)), 0.0);
  }
}
