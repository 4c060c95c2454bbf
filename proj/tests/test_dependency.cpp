#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "gcnbound/dependency.hpp"
#include "gcnbound/linalg.hpp"
#include "gcnbound/markov.hpp"

using namespace gcnbound;

namespace {

FiniteMarkovChain default_example_chain() {
  return build_example_chain(CategoricalDist::from({0.2, 0.3, 0.5}), {0.1, 0.2, 0.3});
}

std::vector<FiniteMarkovChain> small_chain_grid() {
  std::vector<FiniteMarkovChain> chains;
  chains.push_back(default_example_chain());
  chains.push_back(build_example_chain(CategoricalDist::from({0.5, 0.5}), {0.2, 0.2}));
  Rng rng(2024);
  chains.push_back(random_ergodic_chain(2, rng));
  chains.push_back(random_ergodic_chain(3, rng));
  return chains;
}

}  // namespace

TEST(DependencyMatrices, StructureIsUpperTriangularUnitDiagonal) {
  DependencyMatrices dm = build_dependency_matrices(default_example_chain(), 6);
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(dm.gamma(i, i), 1.0);
    EXPECT_EQ(dm.gamma_tilde(i, i), 0.0);
    for (int j = 0; j < i; ++j) {
      EXPECT_EQ(dm.gamma(i, j), 0.0);
      EXPECT_EQ(dm.gamma_tilde(i, j), 0.0);
    }
    for (int j = i + 2; j < 6; ++j) EXPECT_EQ(dm.gamma_tilde(i, j), 0.0);
  }
  // First superdiagonal of gamma_tilde equals the one-step contraction.
  double rho = dobrushin_coefficient(default_example_chain().transition);
  for (int i = 0; i + 1 < 6; ++i) EXPECT_NEAR(dm.gamma_tilde(i, i + 1), rho, 1e-14);
}

TEST(DependencyMatrices, EntriesMatchBruteForceBlockEnumeration) {
  const int n = 6;
  for (const auto& chain : small_chain_grid()) {
    DependencyMatrices dm = build_dependency_matrices(chain, n, false);
    Rng rng(5);
    for (int i = 1; i < n; ++i) {
      for (int j = i + 1; j <= n; ++j) {
        std::vector<int> zeros(i - 1, 0);
        double brute = brute_force_block_tv(chain, i, j, n, zeros);
        EXPECT_NEAR(dm.gamma(i - 1, j - 1), brute, 1e-12)
            << "N=" << chain.n_states << " i=" << i << " j=" << j;
        // The realized prefix cannot move the conditional block law.
        std::vector<int> random_prefix(i - 1);
        for (int& s : random_prefix)
          s = static_cast<int>(rng.uniform_int(0, chain.n_states - 1));
        EXPECT_NEAR(brute_force_block_tv(chain, i, j, n, random_prefix), brute, 1e-12);
      }
    }
  }
}

TEST(BruteForceBlockTv, ValidatesArgumentsAndBudget) {
  FiniteMarkovChain chain = default_example_chain();
  EXPECT_THROW(brute_force_block_tv(chain, 2, 2, 6, {0}), std::invalid_argument);
  EXPECT_THROW(brute_force_block_tv(chain, 0, 2, 6, {}), std::invalid_argument);
  EXPECT_THROW(brute_force_block_tv(chain, 1, 3, 6, {0}), std::invalid_argument);
  EXPECT_THROW(brute_force_block_tv(chain, 2, 3, 6, {7}), std::invalid_argument);
  EXPECT_THROW(brute_force_block_tv(chain, 1, 2, 30, {}), std::invalid_argument);
}

TEST(GammaNorms, AgreeWithDenseMatrices) {
  for (const auto& chain : small_chain_grid()) {
    for (int n : {4, 17, 40}) {
      DependencyMatrices dm = build_dependency_matrices(chain, n, true);
      GammaNorms gn = gamma_norms(chain, n, true);
      EXPECT_NEAR(gn.inf, inf_norm(dm.gamma), 1e-12);
      EXPECT_NEAR(gn.tilde_inf, inf_norm(dm.gamma_tilde), 1e-12);
      EXPECT_NEAR(gn.op, spectral_norm(dm.gamma), 1e-8 * std::max(1.0, gn.op));
      EXPECT_GE(gn.inf, 1.0);  // unit diagonal alone
    }
  }
  EXPECT_THROW(gamma_norms(default_example_chain(), 1, false), std::invalid_argument);
}

TEST(PairwiseTvProfile, SubmultiplicativeDecay) {
  FiniteMarkovChain chain = default_example_chain();
  std::vector<double> g = pairwise_tv_profile(chain, 12);
  EXPECT_EQ(g[0], 1.0);
  for (int t = 2; t <= 12; ++t)
    EXPECT_LE(g[t], g[1] * g[t - 1] + 1e-12) << "t=" << t;
}

TEST(Term2, EnumerationMatchesCollapsedForm) {
  for (const auto& chain : small_chain_grid()) {
    int max_n = chain.n_states == 2 ? 10 : 8;
    for (int n = 1; n <= max_n; ++n) {
      double full = term2_exact_enumeration(chain, n);
      double fast = term2_exact_collapsed(chain, n);
      EXPECT_NEAR(full, fast, 1e-13) << "N=" << chain.n_states << " n=" << n;
    }
  }
  EXPECT_EQ(term2_exact_collapsed(default_example_chain(), 1), 0.0);
  EXPECT_THROW(term2_exact_enumeration(default_example_chain(), 20),
               std::invalid_argument);
}

TEST(Term2, VanishesForIidKernel) {
  // dyadic masses keep every partial product exact, so the joint and
  // product laws cancel bitwise and the zero is exact, not approximate
  Matrix t(3, 3);
  for (int i = 0; i < 3; ++i) {
    t(i, 0) = 0.25;
    t(i, 1) = 0.25;
    t(i, 2) = 0.5;
  }
  FiniteMarkovChain iid =
      FiniteMarkovChain::create(t, CategoricalDist::from({0.25, 0.25, 0.5}));
  for (int n : {2, 4, 6}) {
    EXPECT_EQ(term2_exact_enumeration(iid, n), 0.0);
    EXPECT_EQ(term2_exact_collapsed(iid, n), 0.0);
  }
}

TEST(Term2, ExactValueStaysBelowProfileBound) {
  for (const auto& chain : small_chain_grid()) {
    ErgodicityProfile prof = estimate_ergodicity(chain);
    for (int n : {4, 8, 12}) {
      double exact = term2_exact_collapsed(chain, n);
      double cap = term2_profile_bound(chain, prof, n);
      EXPECT_LE(exact, cap + 1e-12) << "N=" << chain.n_states << " n=" << n;
    }
  }
}

TEST(Term2, DispatchSelectsExactOrBound) {
  FiniteMarkovChain chain = default_example_chain();
  EXPECT_NEAR(term2_dependence(chain, 6, Term2Mode::kExact),
              term2_exact_enumeration(chain, 6), 0.0);
  EXPECT_NEAR(term2_dependence(chain, 6, Term2Mode::kBound),
              term2_profile_bound(chain, estimate_ergodicity(chain), 6), 0.0);
}

TEST(Term1, VanishesForIidKernelAndValidates) {
  Matrix t(2, 2);
  t << 0.4, 0.6, 0.4, 0.6;
  FiniteMarkovChain iid =
      FiniteMarkovChain::create(t, CategoricalDist::from({0.4, 0.6}));
  EXPECT_EQ(term1_discrepancy(iid, {0, 1, 1, 0, 1}), 0.0);
  FiniteMarkovChain chain = default_example_chain();
  EXPECT_THROW(term1_discrepancy(chain, {}), std::invalid_argument);
  EXPECT_THROW(term1_discrepancy(chain, {0, 3}), std::invalid_argument);
}

TEST(Term1, StationaryCapDominatesOnSampledTrajectories) {
  FiniteMarkovChain chain = default_example_chain();
  CategoricalDist pi = stationary_distribution(chain);
  for (int trial = 0; trial < 50; ++trial) {
    Rng rng(derive_seed(7, "term1_traj", trial));
    std::vector<int> trace = simulate_trajectory(chain, 24, rng);
    double t1 = term1_discrepancy(chain, trace);
    double cap = term1_stationary_cap(chain, trace, pi);
    EXPECT_LE(t1, cap + 1e-12) << "trial " << trial;
  }
}

TEST(ProfileCaps, DominateExactNormsAndEntries) {
  Rng rng(314);
  for (int trial = 0; trial < 20; ++trial) {
    FiniteMarkovChain chain = random_ergodic_chain(3, rng);
    ErgodicityProfile prof = estimate_ergodicity(chain);
    GammaNorms gn = gamma_norms(chain, 32, false);
    EXPECT_LE(gn.inf, gamma_inf_cap(prof) + 1e-9) << "trial " << trial;
    EXPECT_LE(gn.tilde_inf, gamma_tilde_inf_cap(prof) + 1e-9) << "trial " << trial;
    std::vector<double> g = pairwise_tv_profile(chain, 10);
    for (int lag = 1; lag <= 10; ++lag)
      EXPECT_LE(g[lag], gamma_entry_cap(prof, lag) + 1e-9)
          << "trial " << trial << " lag " << lag;
  }
}
