// Finite-state Markov chains: construction, stationary laws, kernel
// powers, and the geometric-ergodicity profile (rho, M(x)) consumed by
// the dependency-matrix caps and the ergodic-chain bound.
#ifndef GCNBOUND_MARKOV_HPP
#define GCNBOUND_MARKOV_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcnbound/categorical.hpp"
#include "gcnbound/linalg.hpp"
#include "gcnbound/rng.hpp"

namespace gcnbound {

struct FiniteMarkovChain {
  int n_states = 0;
  Matrix transition;          // row-stochastic N x N
  CategoricalDist initial;    // law of S_1

  static FiniteMarkovChain create(Matrix p, CategoricalDist init) {
    if (p.rows() != p.cols() || p.rows() < 1)
      throw std::invalid_argument("FiniteMarkovChain: transition matrix must be square");
    const int n = static_cast<int>(p.rows());
    if (static_cast<int>(init.size()) != n)
      throw std::invalid_argument("FiniteMarkovChain: initial law dimension mismatch");
    for (int i = 0; i < n; ++i) {
      std::vector<double> row(n);
      for (int j = 0; j < n; ++j) row[j] = p(i, j);
      CategoricalDist validated = CategoricalDist::from(row);  // throws on bad rows
      for (int j = 0; j < n; ++j) p(i, j) = validated[j];
    }
    FiniteMarkovChain c;
    c.n_states = n;
    c.transition = std::move(p);
    c.initial = std::move(init);
    return c;
  }

  CategoricalDist row(int i) const {
    std::vector<double> r(n_states);
    for (int j = 0; j < n_states; ++j) r[j] = transition(i, j);
    return CategoricalDist::from(std::move(r));
  }
};

// Half l1 distance between two rows of a row-stochastic matrix.
inline double row_tv(const Matrix& m, int r1, int r2) {
  double s = 0.0;
  for (int j = 0; j < m.cols(); ++j) s += std::abs(m(r1, j) - m(r2, j));
  return 0.5 * s;
}

// Half l1 distance between row r of m and a probability vector v.
inline double row_tv_to(const Matrix& m, int r, const std::vector<double>& v) {
  double s = 0.0;
  for (int j = 0; j < m.cols(); ++j) s += std::abs(m(r, j) - v[j]);
  return 0.5 * s;
}

// N-state hold-or-redraw family: from state i, stay put with probability
// alpha_i, otherwise draw a fresh state from q with q_j proportional to
// (1 - alpha_j) p_j.  Rows are stochastic by construction and p is the
// exact stationary law (p_j (1 - alpha_j) = q_j sum_k p_k (1 - alpha_k));
// when all alphas are equal this is exactly
// P_{i,j} = (1 - alpha_j) p_j + alpha_i 1{i = j},
// and as the alphas tend to 0 every row tends to p (i.i.d. sampling).
// The initial law defaults to p.
inline FiniteMarkovChain build_example_chain(const CategoricalDist& p,
                                             const std::vector<double>& alphas) {
  const int n = static_cast<int>(p.size());
  if (static_cast<int>(alphas.size()) != n)
    throw std::invalid_argument("build_example_chain: alpha dimension mismatch");
  for (double a : alphas)
    if (!(a > 0.0 && a < 1.0))
      throw std::invalid_argument("build_example_chain: alphas must lie in (0,1)");
  double c = 0.0;
  for (int j = 0; j < n; ++j) c += (1.0 - alphas[j]) * p[j];
  Matrix t(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      t(i, j) = (1.0 - alphas[i]) * (1.0 - alphas[j]) * p[j] / c +
                (i == j ? alphas[i] : 0.0);
  return FiniteMarkovChain::create(std::move(t), p);
}

inline Matrix kernel_power(const FiniteMarkovChain& chain, int t) {
  if (t < 1) throw std::invalid_argument("kernel_power: t must be >= 1");
  Matrix acc = chain.transition;
  for (int k = 1; k < t; ++k) acc = acc * chain.transition;
  return acc;
}

// True when some power of the transition matrix (up to N^2) is entrywise
// positive -- irreducible and aperiodic, so the stationary law is unique.
inline bool is_primitive(const Matrix& p) {
  const int n = static_cast<int>(p.rows());
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) reach[i][j] = p(i, j) > 0.0;
  auto all_positive = [&] {
    for (const auto& row : reach)
      for (bool b : row)
        if (!b) return false;
    return true;
  };
  if (all_positive()) return true;
  std::vector<std::vector<bool>> base = reach;
  for (int step = 2; step <= n * n; ++step) {
    std::vector<std::vector<bool>> next(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        if (reach[i][k])
          for (int j = 0; j < n; ++j)
            if (base[k][j]) next[i][j] = true;
    reach = std::move(next);
    if (all_positive()) return true;
  }
  return false;
}

// Unique stationary law of a primitive chain, by solving pi^T (P - I) = 0
// with the normalization sum(pi) = 1 replacing one redundant equation.
inline CategoricalDist stationary_distribution(const FiniteMarkovChain& chain) {
  const int n = chain.n_states;
  if (!is_primitive(chain.transition))
    throw std::invalid_argument(
        "stationary_distribution: chain is reducible or periodic; no unique stationary law");
  Matrix a = chain.transition.transpose() - Matrix::Identity(n, n);
  Vector b = Vector::Zero(n);
  for (int j = 0; j < n; ++j) a(n - 1, j) = 1.0;
  b(n - 1) = 1.0;
  Vector pi = a.fullPivLu().solve(b);
  std::vector<double> probs(n);
  for (int i = 0; i < n; ++i) probs[i] = std::max(pi(i), 0.0);
  CategoricalDist result = CategoricalDist::from(std::move(probs));
  // Contract: residual of the fixed-point equation below 1e-12.
  double residual = 0.0;
  for (int j = 0; j < n; ++j) {
    double col = 0.0;
    for (int i = 0; i < n; ++i) col += result[i] * chain.transition(i, j);
    residual = std::max(residual, std::abs(col - result[j]));
  }
  if (residual > 1e-12)
    throw std::runtime_error("stationary_distribution: fixed-point residual " +
                             std::to_string(residual) + " exceeds 1e-12");
  return result;
}

// Dobrushin contraction coefficient: worst-case TV between kernel rows.
inline double dobrushin_coefficient(const Matrix& p) {
  double worst = 0.0;
  for (int x = 0; x < p.rows(); ++x)
    for (int z = x + 1; z < p.rows(); ++z) worst = std::max(worst, row_tv(p, x, z));
  return worst;
}

struct ErgodicityProfile {
  double rho = 0.0;                // contraction rate, clamped to [1e-12, 1-1e-9]
  std::vector<double> m_values;    // per-state prefactors M(x)
  int horizon = 0;                 // steps over which the profile is certified
  CategoricalDist stationary;

  double sup_m() const {
    double s = 0.0;
    for (double v : m_values) s = std::max(s, v);
    return s;
  }
  // E[M(S)] under an arbitrary law over states.
  double mean_m(const CategoricalDist& law) const {
    if (law.size() != m_values.size())
      throw std::invalid_argument("ErgodicityProfile::mean_m: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < m_values.size(); ++i) s += law[i] * m_values[i];
    return s;
  }
};

// Certify TV(P^t(x,.), pi) <= M(x) rho^t for all t <= horizon, with rho the
// Dobrushin coefficient and M(x) the max observed ratio.  rho is floored at
// 1e-12 so i.i.d. kernels (rho = 0) stay divisible; the ratio is taken as 0
// whenever the TV itself is 0, so the floor never inflates M.
inline ErgodicityProfile estimate_ergodicity(const FiniteMarkovChain& chain,
                                             int horizon = 50) {
  if (horizon < 2) throw std::invalid_argument("estimate_ergodicity: horizon must be >= 2");
  const int n = chain.n_states;
  ErgodicityProfile prof;
  prof.stationary = stationary_distribution(chain);
  double raw_rho = dobrushin_coefficient(chain.transition);
  if (raw_rho >= 1.0)
    throw std::runtime_error(
        "estimate_ergodicity: contraction coefficient is 1; supply a contraction rate "
        "manually (e.g. from the second-eigenvalue modulus)");
  prof.rho = std::min(std::max(raw_rho, 1e-12), 1.0 - 1e-9);
  prof.horizon = horizon;
  prof.m_values.assign(n, 0.0);
  Matrix power = chain.transition;
  double rho_t = prof.rho;
  for (int t = 1; t <= horizon; ++t) {
    double max_tv = 0.0;
    for (int x = 0; x < n; ++x) {
      double tv = row_tv_to(power, x, prof.stationary.probs);
      max_tv = std::max(max_tv, tv);
      // TV below the double-precision noise floor is genuinely 0 for this
      // purpose; dividing rounding residue by a geometrically small rho^t
      // would blow up the prefactor.
      if (tv > 1e-14) prof.m_values[x] = std::max(prof.m_values[x], tv / rho_t);
    }
    if (max_tv <= 1e-14) break;  // fully mixed; later powers add nothing
    if (t < horizon) {
      power = power * chain.transition;
      rho_t *= prof.rho;
    }
  }
  return prof;
}

inline std::vector<int> simulate_trajectory(const FiniteMarkovChain& chain, int n,
                                            Rng& rng) {
  if (n < 1) throw std::invalid_argument("simulate_trajectory: n must be >= 1");
  std::vector<int> states(n);
  states[0] = static_cast<int>(rng.discrete(chain.initial.probs));
  std::vector<double> row(chain.n_states);
  for (int i = 1; i < n; ++i) {
    for (int j = 0; j < chain.n_states; ++j) row[j] = chain.transition(states[i - 1], j);
    states[i] = static_cast<int>(rng.discrete(row));
  }
  return states;
}

// E_{S ~ pi}[ TV(P(S,.), pi) ]: how far one kernel step sits from
// stationarity on average.  (Callers scale by 2 where needed.)
inline double stationary_kernel_gap(const FiniteMarkovChain& chain) {
  CategoricalDist pi = stationary_distribution(chain);
  double s = 0.0;
  for (int x = 0; x < chain.n_states; ++x)
    s += pi[x] * row_tv_to(chain.transition, x, pi.probs);
  return s;
}

// Random strictly-positive transition matrix (hence primitive) with a
// random initial law; used by property tests across many seeds.
inline FiniteMarkovChain random_ergodic_chain(int n_states, Rng& rng) {
  if (n_states < 2) throw std::invalid_argument("random_ergodic_chain: need >= 2 states");
  Matrix t(n_states, n_states);
  for (int i = 0; i < n_states; ++i) {
    double total = 0.0;
    for (int j = 0; j < n_states; ++j) {
      double w = 0.15 + rng.uniform();
      t(i, j) = w;
      total += w;
    }
    for (int j = 0; j < n_states; ++j) t(i, j) /= total;
  }
  std::vector<double> init(n_states);
  double total = 0.0;
  for (int j = 0; j < n_states; ++j) {
    init[j] = 0.1 + rng.uniform();
    total += init[j];
  }
  for (double& v : init) v /= total;
  return FiniteMarkovChain::create(std::move(t), CategoricalDist::from(std::move(init)));
}

}  // namespace gcnbound

#endif  // GCNBOUND_MARKOV_HPP
