#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "gcnbound/markov.hpp"
#include "oracles.hpp"

using namespace gcnbound;

namespace {

oracle::Mat to_mat(const Matrix& m) {
  oracle::Mat out(m.rows(), oracle::Vec(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

FiniteMarkovChain default_example_chain() {
  return build_example_chain(CategoricalDist::from({0.2, 0.3, 0.5}), {0.1, 0.2, 0.3});
}

}  // namespace

TEST(FiniteMarkovChain, CreateValidation) {
  Matrix bad_shape(2, 3);
  bad_shape.setConstant(1.0 / 3.0);
  EXPECT_THROW(FiniteMarkovChain::create(bad_shape, CategoricalDist::from({0.5, 0.5})),
               std::invalid_argument);
  Matrix bad_mass(2, 2);
  bad_mass << 0.5, 0.4, 0.5, 0.5;
  EXPECT_THROW(FiniteMarkovChain::create(bad_mass, CategoricalDist::from({0.5, 0.5})),
               std::invalid_argument);
  Matrix ok(2, 2);
  ok << 0.5, 0.5, 0.2, 0.8;
  EXPECT_THROW(FiniteMarkovChain::create(ok, CategoricalDist::from({0.2, 0.3, 0.5})),
               std::invalid_argument);
  FiniteMarkovChain c = FiniteMarkovChain::create(ok, CategoricalDist::from({0.5, 0.5}));
  EXPECT_EQ(c.n_states, 2);
  EXPECT_EQ(c.row(1)[0], 0.2);
}

TEST(ExampleChain, RowsStochasticAndStationaryIsP) {
  FiniteMarkovChain chain = default_example_chain();
  for (int i = 0; i < 3; ++i) {
    double s = 0.0;
    for (int j = 0; j < 3; ++j) {
      s += chain.transition(i, j);
      EXPECT_GE(chain.transition(i, j), 0.0);
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
  CategoricalDist pi = stationary_distribution(chain);
  EXPECT_NEAR(pi[0], 0.2, 1e-10);
  EXPECT_NEAR(pi[1], 0.3, 1e-10);
  EXPECT_NEAR(pi[2], 0.5, 1e-10);
  // Initial law defaults to p.
  EXPECT_EQ(chain.initial[2], 0.5);
}

TEST(ExampleChain, EqualAlphaMatchesClosedFormKernel) {
  // Equal mixing weights collapse the family to (1-a) p_j + a 1{i=j}.
  FiniteMarkovChain chain =
      build_example_chain(CategoricalDist::from({0.5, 0.5}), {0.2, 0.2});
  EXPECT_NEAR(chain.transition(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(chain.transition(0, 1), 0.4, 1e-15);
  EXPECT_NEAR(chain.transition(1, 0), 0.4, 1e-15);
  EXPECT_NEAR(chain.transition(1, 1), 0.6, 1e-15);
  EXPECT_NEAR(row_tv_to(chain.transition, 0, {0.5, 0.5}), 0.1, 1e-15);

  // Row-to-stationary TV closed form a (1 - p_i) for the equal-alpha family.
  FiniteMarkovChain c3 =
      build_example_chain(CategoricalDist::from({0.2, 0.3, 0.5}), {0.25, 0.25, 0.25});
  for (int i = 0; i < 3; ++i) {
    double want = 0.25 * (1.0 - c3.initial[i]);
    EXPECT_NEAR(row_tv_to(c3.transition, i, {0.2, 0.3, 0.5}), want, 1e-14) << "row " << i;
  }
}

TEST(ExampleChain, SmallAlphaLimitIsIid) {
  FiniteMarkovChain chain =
      build_example_chain(CategoricalDist::from({0.2, 0.3, 0.5}), {1e-9, 1e-9, 1e-9});
  for (int i = 0; i < 3; ++i)
    EXPECT_LE(row_tv_to(chain.transition, i, {0.2, 0.3, 0.5}), 2e-9) << "row " << i;
}

TEST(ExampleChain, RejectsBadAlphas) {
  CategoricalDist p = CategoricalDist::from({0.5, 0.5});
  EXPECT_THROW(build_example_chain(p, {0.2}), std::invalid_argument);
  EXPECT_THROW(build_example_chain(p, {0.2, 0.0}), std::invalid_argument);
  EXPECT_THROW(build_example_chain(p, {0.2, 1.0}), std::invalid_argument);
  EXPECT_THROW(build_example_chain(p, {0.2, 1.5}), std::invalid_argument);
}

TEST(KernelPower, SemigroupAndValidation) {
  FiniteMarkovChain chain = default_example_chain();
  EXPECT_THROW(kernel_power(chain, 0), std::invalid_argument);
  Matrix p1 = kernel_power(chain, 1);
  EXPECT_NEAR((p1 - chain.transition).cwiseAbs().maxCoeff(), 0.0, 0.0);
  Matrix p5 = kernel_power(chain, 5);
  Matrix p2p3 = kernel_power(chain, 2) * kernel_power(chain, 3);
  EXPECT_LE((p5 - p2p3).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(KernelPower, ExampleChainMixesWithin64Steps) {
  FiniteMarkovChain chain = default_example_chain();
  Matrix p64 = kernel_power(chain, 64);
  for (int i = 0; i < 3; ++i)
    EXPECT_LE(row_tv_to(p64, i, {0.2, 0.3, 0.5}), 1e-6) << "row " << i;
}

TEST(StationaryDistribution, DoublyStochasticGivesUniform) {
  Matrix t(3, 3);
  t << 0.5, 0.3, 0.2, 0.2, 0.5, 0.3, 0.3, 0.2, 0.5;
  FiniteMarkovChain chain =
      FiniteMarkovChain::create(t, CategoricalDist::from({1.0, 0.0, 0.0}));
  CategoricalDist pi = stationary_distribution(chain);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(pi[i], 1.0 / 3.0, 1e-12);
}

TEST(StationaryDistribution, MatchesPowerIterationOracle) {
  Rng rng(12345);
  for (int trial = 0; trial < 10; ++trial) {
    FiniteMarkovChain chain = random_ergodic_chain(4, rng);
    CategoricalDist pi = stationary_distribution(chain);
    auto [v, resid] = oracle::power_iteration_stationary(to_mat(chain.transition), 3000);
    ASSERT_LT(resid, 1e-12);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(pi[i], v[i], 1e-10) << "trial " << trial;
  }
}

TEST(StationaryDistribution, RejectsReducibleAndPeriodicChains) {
  Matrix reducible(2, 2);
  reducible << 1.0, 0.0, 0.0, 1.0;
  EXPECT_THROW(stationary_distribution(FiniteMarkovChain::create(
                   reducible, CategoricalDist::from({0.5, 0.5}))),
               std::invalid_argument);
  Matrix periodic(2, 2);
  periodic << 0.0, 1.0, 1.0, 0.0;
  EXPECT_THROW(stationary_distribution(FiniteMarkovChain::create(
                   periodic, CategoricalDist::from({0.5, 0.5}))),
               std::invalid_argument);
}

TEST(Dobrushin, IidKernelContractsCompletely) {
  Matrix t(3, 3);
  for (int i = 0; i < 3; ++i) {
    t(i, 0) = 0.2;
    t(i, 1) = 0.3;
    t(i, 2) = 0.5;
  }
  EXPECT_EQ(dobrushin_coefficient(t), 0.0);
}

TEST(Dobrushin, EqualAlphaChainContractsAtAlpha) {
  // Rows (1-a) p + a e_i differ by exactly a in TV.
  FiniteMarkovChain chain =
      build_example_chain(CategoricalDist::from({0.5, 0.5}), {0.2, 0.2});
  EXPECT_NEAR(dobrushin_coefficient(chain.transition), 0.2, 1e-14);
}

TEST(ErgodicityProfile, CertifiesGeometricDecay) {
  Rng rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    FiniteMarkovChain chain = random_ergodic_chain(4, rng);
    ErgodicityProfile prof = estimate_ergodicity(chain, 40);
    EXPECT_NEAR(prof.rho, dobrushin_coefficient(chain.transition), 1e-12);
    Matrix power = chain.transition;
    double rho_t = prof.rho;
    for (int t = 1; t <= 30; ++t) {
      for (int x = 0; x < 4; ++x) {
        double tv = row_tv_to(power, x, prof.stationary.probs);
        EXPECT_LE(tv, prof.m_values[x] * rho_t + 1e-12)
            << "trial " << trial << " t=" << t << " x=" << x;
      }
      power = power * chain.transition;
      rho_t *= prof.rho;
    }
  }
}

TEST(ErgodicityProfile, IidKernelHasZeroPrefactors) {
  Matrix t(2, 2);
  t << 0.4, 0.6, 0.4, 0.6;
  FiniteMarkovChain chain =
      FiniteMarkovChain::create(t, CategoricalDist::from({0.4, 0.6}));
  ErgodicityProfile prof = estimate_ergodicity(chain);
  EXPECT_EQ(prof.sup_m(), 0.0);
  EXPECT_GT(prof.rho, 0.0);  // floored so downstream divisions stay finite
}

TEST(ErgodicityProfile, MeanPrefactorWeightsByLaw) {
  FiniteMarkovChain chain = default_example_chain();
  ErgodicityProfile prof = estimate_ergodicity(chain);
  double by_hand = 0.0;
  for (int x = 0; x < 3; ++x) by_hand += chain.initial[x] * prof.m_values[x];
  EXPECT_NEAR(prof.mean_m(chain.initial), by_hand, 1e-15);
  EXPECT_THROW(prof.mean_m(CategoricalDist::from({0.5, 0.5})), std::invalid_argument);
}

TEST(SimulateTrajectory, SeedDeterminismAndValidation) {
  FiniteMarkovChain chain = default_example_chain();
  Rng a(42), b(42), c(43);
  std::vector<int> t1 = simulate_trajectory(chain, 100, a);
  std::vector<int> t2 = simulate_trajectory(chain, 100, b);
  std::vector<int> t3 = simulate_trajectory(chain, 100, c);
  EXPECT_EQ(t1, t2);
  EXPECT_NE(t1, t3);
  for (int s : t1) {
    EXPECT_GE(s, 0);
    EXPECT_LT(s, 3);
  }
  Rng d(1);
  EXPECT_THROW(simulate_trajectory(chain, 0, d), std::invalid_argument);
  EXPECT_EQ(static_cast<int>(simulate_trajectory(chain, 1, d).size()), 1);
}

TEST(StationaryKernelGap, EqualAlphaClosedForm) {
  // E_{x~p} TV(P(x,.), p) = a sum_i p_i (1 - p_i) in the equal-alpha family.
  std::vector<double> p = {0.2, 0.3, 0.5};
  double alpha = 0.25;
  FiniteMarkovChain chain =
      build_example_chain(CategoricalDist::from(p), {alpha, alpha, alpha});
  double expect = 0.0;
  for (double pi : p) expect += pi * alpha * (1.0 - pi);
  EXPECT_NEAR(stationary_kernel_gap(chain), expect, 1e-14);
  // Closed-form cap: <= max_j alpha_j * sum_i p_i (1 - p_i).
  FiniteMarkovChain uneven =
      build_example_chain(CategoricalDist::from(p), {0.1, 0.2, 0.3});
  double cap = 0.0;
  for (double pi : p) cap += pi * (1.0 - pi);
  EXPECT_LE(stationary_kernel_gap(uneven), 0.3 * cap + 1e-14);
}
