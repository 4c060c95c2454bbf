// Dependency matrices of a Markov trajectory and the distribution-shift
// terms of the generalization bounds.
//
// Gamma's (i,j) entry measures how much perturbing coordinate i can move
// the conditional law of the block from j onward; for a Markov kernel the
// shared continuation factors cancel and the entry collapses to the worst
// pairwise row TV of the (j-i)-step kernel.  brute_force_block_tv keeps
// the uncollapsed full-sequence enumeration as an independent oracle.
#ifndef GCNBOUND_DEPENDENCY_HPP
#define GCNBOUND_DEPENDENCY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcnbound/categorical.hpp"
#include "gcnbound/linalg.hpp"
#include "gcnbound/markov.hpp"

namespace gcnbound {

struct DependencyMatrices {
  Matrix gamma;        // upper triangular, unit diagonal
  Matrix gamma_tilde;  // first superdiagonal only (Markov kernels)
  double norm_gamma_op = 0.0;
  double norm_gamma_inf = 0.0;
  double norm_gamma_tilde_inf = 0.0;
};

// Worst pairwise row TV of P^t for t = 1..tmax (index 0 unused, set to 1).
// Once the certified tail sum drops below 1e-14 the remaining entries are
// left at zero; the tail bound g(t+k) <= g(t) rho^k justifies the cut.
inline std::vector<double> pairwise_tv_profile(const FiniteMarkovChain& chain, int tmax) {
  std::vector<double> g(static_cast<std::size_t>(tmax) + 1, 0.0);
  g[0] = 1.0;
  if (tmax < 1) return g;
  double rho = dobrushin_coefficient(chain.transition);
  Matrix power = chain.transition;
  for (int t = 1; t <= tmax; ++t) {
    g[t] = dobrushin_coefficient(power);
    if (rho < 1.0 && g[t] * rho / (1.0 - rho) < 1e-14) break;
    if (t < tmax) power = power * chain.transition;
  }
  return g;
}

namespace detail {
// Operator 2-norm of the upper-triangular Toeplitz matrix with unit
// diagonal and superdiagonals g[1..n-1], via power iteration on T^T T
// with implicit matvecs; avoids materializing the n x n matrix.
inline double toeplitz_gamma_op_norm(const std::vector<double>& g, int n) {
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> tv(n), w(n);
  double lambda = 0.0;
  // The spectrum of T^T T clusters near 1 when the profile decays fast, so
  // successive Rayleigh quotients can stall far from the limit; stop on the
  // residual ||Bv - lambda v|| instead, which certifies the eigenvalue.
  for (int iter = 0; iter < 100000; ++iter) {
    for (int i = 0; i < n; ++i) {  // tv = T v
      double s = v[i];
      for (int t = 1; i + t < n; ++t) {
        if (g[t] == 0.0) continue;
        s += g[t] * v[i + t];
      }
      tv[i] = s;
    }
    for (int j = 0; j < n; ++j) {  // w = T^T tv
      double s = tv[j];
      for (int t = 1; t <= j; ++t) {
        if (g[t] == 0.0) continue;
        s += g[t] * tv[j - t];
      }
      w[j] = s;
    }
    double num = 0.0, norm_sq = 0.0;
    for (int i = 0; i < n; ++i) {  // v is unit, so num is the Rayleigh quotient
      num += v[i] * w[i];
      norm_sq += w[i] * w[i];
    }
    lambda = num;
    double residual = std::sqrt(std::max(0.0, norm_sq - num * num));
    double norm = std::sqrt(norm_sq);
    for (int i = 0; i < n; ++i) v[i] = w[i] / norm;
    if (iter > 4 && residual <= 1e-10 * std::max(1.0, lambda)) break;
  }
  return std::sqrt(std::max(lambda, 0.0));
}
}  // namespace detail

// Norms of Gamma / Gamma-tilde without dense matrices; usable at large n.
struct GammaNorms {
  double inf = 0.0;
  double op = 0.0;  // 0 when not requested
  double tilde_inf = 0.0;
};

inline GammaNorms gamma_norms(const FiniteMarkovChain& chain, int n, bool want_op) {
  if (n < 2) throw std::invalid_argument("gamma_norms: n must be >= 2");
  std::vector<double> g = pairwise_tv_profile(chain, n - 1);
  GammaNorms out;
  double s = 1.0;  // unit diagonal; row 1 has every superdiagonal entry
  for (int t = 1; t <= n - 1; ++t) s += g[t];
  out.inf = s;
  out.tilde_inf = g[1];
  if (want_op) out.op = detail::toeplitz_gamma_op_norm(g, n);
  return out;
}

inline DependencyMatrices build_dependency_matrices(const FiniteMarkovChain& chain, int n,
                                                    bool with_op_norm = true) {
  if (n < 2) throw std::invalid_argument("build_dependency_matrices: n must be >= 2");
  std::vector<double> g = pairwise_tv_profile(chain, n - 1);
  DependencyMatrices dm;
  dm.gamma = Matrix::Zero(n, n);
  dm.gamma_tilde = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    dm.gamma(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) dm.gamma(i, j) = g[j - i];
    if (i + 1 < n) dm.gamma_tilde(i, i + 1) = g[1];
  }
  dm.norm_gamma_inf = inf_norm(dm.gamma);
  dm.norm_gamma_tilde_inf = inf_norm(dm.gamma_tilde);
  dm.norm_gamma_op = with_op_norm ? spectral_norm(dm.gamma) : 0.0;
  return dm;
}

inline DependencyMatrices gamma_exact(const FiniteMarkovChain& chain, int n) {
  return build_dependency_matrices(chain, n);
}
inline DependencyMatrices gamma_tilde_exact(const FiniteMarkovChain& chain, int n) {
  return build_dependency_matrices(chain, n);
}

// Independent oracle for the Gamma entries: the exact TV between the two
// conditional laws of the block S_[j..n] induced by s_i versus s'_i,
// maximized over that pair, computed by enumerating every suffix sequence.
// Indices are 1-based; prefix holds the fixed states s_1..s_{i-1} (they
// cannot influence the result for a Markov kernel, but are validated to
// honor the conditioning in the definition).
inline double brute_force_block_tv(const FiniteMarkovChain& chain, int i, int j, int n,
                                   const std::vector<int>& prefix) {
  const int N = chain.n_states;
  if (!(1 <= i && i < j && j <= n))
    throw std::invalid_argument("brute_force_block_tv: need 1 <= i < j <= n");
  if (static_cast<int>(prefix.size()) != i - 1)
    throw std::invalid_argument("brute_force_block_tv: prefix must have length i-1");
  for (int s : prefix)
    if (s < 0 || s >= N) throw std::invalid_argument("brute_force_block_tv: bad prefix state");
  double budget = std::pow(static_cast<double>(N), n - j + 1);
  if (budget > 1e6)
    throw std::invalid_argument("brute_force_block_tv: enumeration budget N^(n-j+1) exceeds 1e6");

  // law_j_given[s] = distribution of S_j when S_i = s, by explicit (j-i)-step
  // propagation (deliberately not reusing the matrix-power helper).
  std::vector<std::vector<double>> law_j_given(N, std::vector<double>(N, 0.0));
  for (int s = 0; s < N; ++s) {
    std::vector<double> v(N, 0.0);
    v[s] = 1.0;
    for (int step = 0; step < j - i; ++step) {
      std::vector<double> next(N, 0.0);
      for (int a = 0; a < N; ++a) {
        if (v[a] == 0.0) continue;
        for (int b = 0; b < N; ++b) next[b] += v[a] * chain.transition(a, b);
      }
      v = std::move(next);
    }
    law_j_given[s] = std::move(v);
  }

  const int block_len = n - j + 1;
  std::vector<int> tuple(block_len, 0);
  double worst = 0.0;
  for (int s = 0; s < N; ++s) {
    for (int z = s + 1; z < N; ++z) {
      std::fill(tuple.begin(), tuple.end(), 0);
      double acc = 0.0;
      while (true) {
        double p_s = law_j_given[s][tuple[0]];
        double p_z = law_j_given[z][tuple[0]];
        for (int t = 1; t < block_len; ++t) {
          double step = chain.transition(tuple[t - 1], tuple[t]);
          p_s *= step;
          p_z *= step;
        }
        acc += std::abs(p_s - p_z);
        int pos = block_len - 1;  // odometer over the N^block_len tuples
        while (pos >= 0 && ++tuple[pos] == N) tuple[pos--] = 0;
        if (pos < 0) break;
      }
      worst = std::max(worst, 0.5 * acc);
    }
  }
  return worst;
}

// Mean TV between the one-step-ahead law at the trajectory end and the law
// each sample point was actually drawn from (i = 1 uses the initial law).
// trajectory holds 0-based states s_1..s_n.
inline double term1_discrepancy(const FiniteMarkovChain& chain,
                                const std::vector<int>& trajectory) {
  const int n = static_cast<int>(trajectory.size());
  if (n < 1) throw std::invalid_argument("term1_discrepancy: empty trajectory");
  for (int s : trajectory)
    if (s < 0 || s >= chain.n_states)
      throw std::invalid_argument("term1_discrepancy: bad state");
  const int last = trajectory[n - 1];
  double s = row_tv_to(chain.transition, last, chain.initial.probs);
  for (int i = 2; i <= n; ++i) s += row_tv(chain.transition, last, trajectory[i - 2]);
  return s / n;
}

// Stationarity-centered cap on term1 (triangle inequality through pi):
// TV(P(s_n,.), pi) + (1/n) sum_i TV(law of S_i given s_{i-1}, pi).
inline double term1_stationary_cap(const FiniteMarkovChain& chain,
                                   const std::vector<int>& trajectory,
                                   const CategoricalDist& pi) {
  const int n = static_cast<int>(trajectory.size());
  if (n < 1) throw std::invalid_argument("term1_stationary_cap: empty trajectory");
  const int last = trajectory[n - 1];
  double inner = tv_distance(chain.initial, pi);
  for (int i = 2; i <= n; ++i) inner += row_tv_to(chain.transition, trajectory[i - 2], pi.probs);
  return row_tv_to(chain.transition, last, pi.probs) + inner / n;
}

// Mean over i of E over prefixes of the TV between the joint conditional
// law of the block S_[i..n] and the product of its S_i marginal with the
// law of the rest -- by full enumeration of prefixes and blocks.
inline double term2_exact_enumeration(const FiniteMarkovChain& chain, int n) {
  const int N = chain.n_states;
  if (n < 1) throw std::invalid_argument("term2_exact_enumeration: n must be >= 1");
  if (std::pow(static_cast<double>(N), n) > 1e6)
    throw std::invalid_argument("term2_exact_enumeration: budget N^n exceeds 1e6");
  double total = 0.0;
  std::vector<int> prefix, block;
  for (int i = 1; i < n; ++i) {  // the i = n block is a single coordinate: TV 0
    const int plen = i - 1, blen = n - i + 1;
    double expect = 0.0;
    prefix.assign(std::max(plen, 1), 0);
    bool more_prefix = true;
    while (more_prefix) {
      // probability of this prefix (empty prefix has probability 1)
      double pprob = 1.0;
      if (plen > 0) {
        pprob = chain.initial[prefix[0]];
        for (int t = 1; t < plen; ++t) pprob *= chain.transition(prefix[t - 1], prefix[t]);
      }
      if (pprob > 0.0) {
        // conditional law of S_i given the prefix
        std::vector<double> head(N);
        for (int s = 0; s < N; ++s)
          head[s] = plen == 0 ? chain.initial[s] : chain.transition(prefix[plen - 1], s);
        block.assign(blen, 0);
        double acc = 0.0;
        while (true) {
          double joint = head[block[0]];
          for (int t = 1; t < blen; ++t) joint *= chain.transition(block[t - 1], block[t]);
          // product law: S_i marginal times the law of the continuation
          // (which sums S_i out of its first step)
          double product = head[block[0]];
          if (blen > 1) {
            double cont = 0.0;
            for (int s = 0; s < N; ++s) cont += head[s] * chain.transition(s, block[1]);
            for (int t = 2; t < blen; ++t) cont *= chain.transition(block[t - 1], block[t]);
            product *= cont;
          }
          acc += std::abs(joint - product);
          int pos = blen - 1;
          while (pos >= 0 && ++block[pos] == N) block[pos--] = 0;
          if (pos < 0) break;
        }
        expect += pprob * 0.5 * acc;
      }
      if (plen == 0) {
        more_prefix = false;
      } else {
        int pos = plen - 1;
        while (pos >= 0 && ++prefix[pos] == N) prefix[pos--] = 0;
        more_prefix = pos >= 0;
      }
    }
    total += expect;
  }
  return total / n;
}

// Same quantity in O(n N^2): for a Markov kernel the continuation factors
// beyond coordinate i+1 are shared between the joint and product laws, so
// each block TV collapses onto coordinates (i, i+1), weighted by the exact
// marginal of S_{i-1}.
inline double term2_exact_collapsed(const FiniteMarkovChain& chain, int n) {
  const int N = chain.n_states;
  if (n < 1) throw std::invalid_argument("term2_exact_collapsed: n must be >= 1");
  if (n == 1) return 0.0;
  const Matrix& P = chain.transition;
  Matrix P2 = P * P;
  double total = 0.0;
  {  // i = 1: empty prefix, S_1 drawn from the initial law
    std::vector<double> mix(N, 0.0);
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) mix[b] += chain.initial[a] * P(a, b);
    double acc = 0.0;
    for (int s1 = 0; s1 < N; ++s1)
      for (int s2 = 0; s2 < N; ++s2)
        acc += chain.initial[s1] * std::abs(P(s1, s2) - mix[s2]);
    total += 0.5 * acc;
  }
  std::vector<double> mu(chain.initial.probs);  // law of S_{i-1}, starting at i = 2
  for (int i = 2; i <= n - 1; ++i) {
    double expect = 0.0;
    for (int a = 0; a < N; ++a) {
      if (mu[a] == 0.0) continue;
      double acc = 0.0;
      for (int si = 0; si < N; ++si) {
        if (P(a, si) == 0.0) continue;
        for (int s1 = 0; s1 < N; ++s1) acc += P(a, si) * std::abs(P(si, s1) - P2(a, s1));
      }
      expect += mu[a] * 0.5 * acc;
    }
    total += expect;
    std::vector<double> next(N, 0.0);  // advance to the law of S_i
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) next[b] += mu[a] * P(a, b);
    mu = std::move(next);
  }
  return total / n;
}

// Ergodicity-profile cap on term2: geometric burn-in of the initial law
// plus twice the stationary kernel gap.
inline double term2_profile_bound(const FiniteMarkovChain& chain,
                                  const ErgodicityProfile& profile, int n) {
  if (n < 2) throw std::invalid_argument("term2_profile_bound: n must be >= 2");
  double rho = profile.rho;
  double mean_m = profile.mean_m(chain.initial);
  double init_tv = tv_distance(chain.initial, profile.stationary);
  double burn_in = 2.0 * rho * (1.0 - std::pow(rho, n - 2)) * mean_m / (1.0 - rho);
  double kernel_gap = 0.0;
  for (int x = 0; x < chain.n_states; ++x)
    kernel_gap += profile.stationary[x] * row_tv_to(chain.transition, x,
                                                    profile.stationary.probs);
  return (burn_in + 4.0 * init_tv) / n + 2.0 * kernel_gap;
}

enum class Term2Mode { kExact, kBound };

inline double term2_dependence(const FiniteMarkovChain& chain, int n, Term2Mode mode) {
  if (mode == Term2Mode::kExact) return term2_exact_enumeration(chain, n);
  return term2_profile_bound(chain, estimate_ergodicity(chain), n);
}

// Closed-form caps on the dependency-matrix norms from an ergodicity profile.
inline double gamma_inf_cap(const ErgodicityProfile& p) {
  return 1.0 + 2.0 * p.sup_m() / (1.0 - p.rho);
}
inline double gamma_tilde_inf_cap(const ErgodicityProfile& p) {
  return 2.0 * p.rho * p.sup_m();
}
inline double gamma_entry_cap(const ErgodicityProfile& p, int lag) {
  return 2.0 * std::pow(p.rho, lag) * p.sup_m();
}

}  // namespace gcnbound

#endif  // GCNBOUND_DEPENDENCY_HPP
