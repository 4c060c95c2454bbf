// Evaluation of the generalization bounds from computed ingredients, with
// per-term breakdowns.  Every function here is a pure formula; the
// ingredients (divergences, TV terms, dependency norms) are produced by
// the other modules.
#ifndef GCNBOUND_BOUNDS_HPP
#define GCNBOUND_BOUNDS_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gcnbound/markov.hpp"

namespace gcnbound {

inline void require_delta(double delta, const char* who) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument(std::string(who) + ": delta must lie in (0,1)");
}
inline void require_alpha(double alpha, const char* who) {
  if (!(alpha > 0.0) || alpha == 1.0)
    throw std::invalid_argument(std::string(who) + ": alpha must lie in (0,1) or (1,inf)");
}

// Change-of-measure bound with a free lambda: the caller supplies the
// prior log-MGF term (0 in the centered applications).
inline double catoni_bound(double lambda, double alpha, double d_alpha,
                           double gamma_c_norm_sq, double delta,
                           double prior_mgf_term = 0.0) {
  if (!(lambda > 0.0)) throw std::invalid_argument("catoni_bound: lambda must be > 0");
  require_alpha(alpha, "catoni_bound");
  require_delta(delta, "catoni_bound");
  if (!(d_alpha >= 0.0) || !(gamma_c_norm_sq >= 0.0))
    throw std::invalid_argument("catoni_bound: negative ingredient");
  return (prior_mgf_term + d_alpha + std::log(1.0 / delta)) / lambda +
         lambda * gamma_c_norm_sq / 8.0;
}

// Lambda-optimized square-root form.
inline double maurer_bound(double alpha, double d_alpha, int n, double delta,
                           double gamma_c_norm_sq) {
  require_alpha(alpha, "maurer_bound");
  require_delta(delta, "maurer_bound");
  if (n < 1) throw std::invalid_argument("maurer_bound: n must be >= 1");
  if (!(d_alpha >= 0.0) || !(gamma_c_norm_sq >= 0.0))
    throw std::invalid_argument("maurer_bound: negative ingredient");
  double inner = d_alpha + std::log(std::sqrt(2.0 * n) / delta);
  return std::sqrt(n * inner * gamma_c_norm_sq / (2.0 * n - 1.0));
}

// Single-draw variant: holds for one posterior sample, paid for by the
// mutual-information term and the alpha/(alpha-1) inflation.
inline double single_draw_bound(double alpha, double i_alpha, double delta,
                                double gamma_c_norm_sq) {
  require_alpha(alpha, "single_draw_bound");
  require_delta(delta, "single_draw_bound");
  if (!(i_alpha >= 0.0) || !(gamma_c_norm_sq >= 0.0))
    throw std::invalid_argument("single_draw_bound: negative ingredient");
  double inner = i_alpha + std::log(2.0) + alpha / (alpha - 1.0) * std::log(1.0 / delta);
  return std::sqrt(gamma_c_norm_sq / 2.0 * inner);
}

struct ModelConstants {
  double c_x = 1.0;          // feature norm cap
  double c_w = 1.0;          // weight spectral cap
  double c_a = 1.0;          // aggregation norm cap
  double lipschitz_l = 1.4142135623730951;
  double relu_lipschitz = 1.0;
  double loss_cap_m = 1.0;
};

// Deviation bound for the suffix-refresh statistic (one-layer).
inline double suffix_refresh_bound(const ModelConstants& c, double gamma_tilde_inf,
                                   double gamma_norm, double d_alpha, int n,
                                   double delta) {
  require_delta(delta, "suffix_refresh_bound");
  if (n < 1) throw std::invalid_argument("suffix_refresh_bound: n must be >= 1");
  double lip = 2.0 * c.c_x * c.c_w * c.c_a * c.lipschitz_l +
               c.loss_cap_m * std::max(1.0, gamma_tilde_inf);
  double inner = d_alpha + std::log(2.0 * std::sqrt(2.0 * n) / delta);
  return 2.0 * std::sqrt(lip * lip * inner * gamma_norm * gamma_norm / (2.0 * n - 1.0));
}

// Deviation-plus-transfer bound for the point-refresh statistic
// (one-layer): three TV transfer terms scaled by the loss cap, plus the
// concentration term.
struct TransferIngredients {
  double term1_discrepancy = 0.0;
  double term2_dependence = 0.0;
  double term3_attachment_tv = 0.0;
};

inline double point_refresh_bound(const ModelConstants& c, const TransferIngredients& tr,
                                  double gamma_tilde_inf, double gamma_norm,
                                  double d_alpha, int n, double delta) {
  require_delta(delta, "point_refresh_bound");
  if (n < 1) throw std::invalid_argument("point_refresh_bound: n must be >= 1");
  if (tr.term1_discrepancy < 0.0 || tr.term2_dependence < 0.0 ||
      tr.term3_attachment_tv < 0.0)
    throw std::invalid_argument("point_refresh_bound: negative transfer term");
  double lip = 2.0 * c.c_x * c.c_w * c.c_a * c.lipschitz_l + c.loss_cap_m * gamma_tilde_inf;
  double inner = d_alpha + std::log(2.0 * std::sqrt(2.0 * n) / delta);
  return c.loss_cap_m *
             (tr.term1_discrepancy + tr.term2_dependence + tr.term3_attachment_tv) +
         std::sqrt(lip * lip * inner * gamma_norm * gamma_norm / (2.0 * n - 1.0));
}

struct BoundReport {
  std::string kind;  // one_layer | two_layer | markov_ergodic
  std::vector<std::pair<std::string, double>> terms;
  double total = 0.0;
  double d_alpha = 0.0;
  double delta = 0.0;
  double alpha = 0.0;
  int n = 0;
  std::string term2_method;  // exact_markov | profile_bound | (empty)

  double term(const std::string& name) const {
    for (const auto& [k, v] : terms)
      if (k == name) return v;
    throw std::invalid_argument("BoundReport: no term named " + name);
  }
};

inline BoundReport finalize_report(BoundReport r) {
  double s = 0.0;
  for (const auto& [name, v] : r.terms) {
    if (!(v >= 0.0))
      throw std::runtime_error("BoundReport: term " + name + " is negative");
    s += v;
  }
  r.total = s;
  return r;
}

// Full one-layer generalization bound: concentration + loss-cap-scaled
// transfer terms.
inline BoundReport one_layer_bound(const ModelConstants& c, const TransferIngredients& tr,
                                   double gamma_tilde_inf, double gamma_norm,
                                   double d_alpha, double alpha, int n, double delta) {
  require_delta(delta, "one_layer_bound");
  require_alpha(alpha, "one_layer_bound");
  if (n < 1) throw std::invalid_argument("one_layer_bound: n must be >= 1");
  double lip = 2.0 * c.c_x * c.c_w * c.c_a * c.lipschitz_l +
               c.loss_cap_m * std::max(1.0, gamma_tilde_inf);
  double inner = d_alpha + std::log(2.0 * std::sqrt(2.0 * n) / delta);
  BoundReport r;
  r.kind = "one_layer";
  r.d_alpha = d_alpha;
  r.delta = delta;
  r.alpha = alpha;
  r.n = n;
  r.terms = {
      {"concentration_term",
       3.0 * std::sqrt(lip * lip * inner * gamma_norm * gamma_norm / (2.0 * n - 1.0))},
      {"term1_discrepancy", c.loss_cap_m * tr.term1_discrepancy},
      {"term2_dependence", c.loss_cap_m * tr.term2_dependence},
      {"term3_attachment_tv", c.loss_cap_m * tr.term3_attachment_tv},
  };
  return finalize_report(std::move(r));
}

// Full two-layer bound: the Lipschitz factor picks up the squared weight
// and aggregation caps, and an aggregation-smoothing remainder scaled by
// the hat-normalization Frobenius norm appears.
inline BoundReport two_layer_bound(const ModelConstants& c, const TransferIngredients& tr,
                                   double gamma_tilde_inf, double gamma_norm,
                                   double frob_hat_sq, double d_alpha, double alpha,
                                   int n, double delta) {
  require_delta(delta, "two_layer_bound");
  require_alpha(alpha, "two_layer_bound");
  if (n < 1) throw std::invalid_argument("two_layer_bound: n must be >= 1");
  if (!(frob_hat_sq >= 0.0))
    throw std::invalid_argument("two_layer_bound: negative Frobenius ingredient");
  double phi2 = c.relu_lipschitz * c.relu_lipschitz;
  double lip = 2.0 * c.c_x * c.c_w * c.c_w * c.c_a * c.c_a * c.lipschitz_l * phi2 +
               c.loss_cap_m * gamma_tilde_inf;
  double inner = d_alpha + std::log(2.0 * std::sqrt(2.0 * n) / delta);
  BoundReport r;
  r.kind = "two_layer";
  r.d_alpha = d_alpha;
  r.delta = delta;
  r.alpha = alpha;
  r.n = n;
  r.terms = {
      {"concentration_term",
       3.0 * std::sqrt(lip * lip * inner * gamma_norm * gamma_norm / (2.0 * n - 1.0))},
      {"term3_attachment_tv", c.loss_cap_m * tr.term3_attachment_tv},
      {"term1_discrepancy", c.loss_cap_m * tr.term1_discrepancy},
      {"term2_dependence", c.loss_cap_m * tr.term2_dependence},
      {"frobenius_term",
       c.c_x * c.c_w * c.c_w * c.lipschitz_l * phi2 * frob_hat_sq / n},
  };
  return finalize_report(std::move(r));
}

// Ergodic-chain instantiation: every trajectory-independent ingredient is
// replaced by its ergodicity-profile cap, and the attachment term is the
// exact 1/sqrt(n) of the perturbed attachment law.
inline BoundReport ergodic_markov_bound(const ModelConstants& c,
                                        const ErgodicityProfile& profile,
                                        const FiniteMarkovChain& chain,
                                        const std::vector<int>& trajectory,
                                        double d_alpha, double alpha, int n,
                                        double delta) {
  require_delta(delta, "ergodic_markov_bound");
  require_alpha(alpha, "ergodic_markov_bound");
  if (n < 2) throw std::invalid_argument("ergodic_markov_bound: n must be >= 2");
  if (static_cast<int>(trajectory.size()) != n)
    throw std::invalid_argument("ergodic_markov_bound: trajectory length mismatch");
  const double rho = profile.rho;
  const double m0 = profile.sup_m();
  const double big_m = c.loss_cap_m;
  double lip = 2.0 * c.c_x * c.c_w * c.c_a * c.lipschitz_l + 2.0 * rho * big_m * m0;
  double gamma_cap = 1.0 - rho + 2.0 * m0;  // (1 - rho) * (gamma inf-norm cap)
  double inner = d_alpha + std::log(2.0 * std::sqrt(static_cast<double>(n)) / delta);
  double concentration = 3.0 * std::sqrt(lip * lip * gamma_cap * gamma_cap * inner /
                                         (2.0 * (1.0 - rho) * (1.0 - rho) * (n - 1.0)));
  double init_tv = tv_distance(chain.initial, profile.stationary);
  double burn_in = 2.0 * big_m / n *
                   (rho * (1.0 - std::pow(rho, n - 2)) * profile.mean_m(chain.initial) /
                        (1.0 - rho) +
                    2.0 * init_tv);
  double kernel_gap = 0.0;
  for (int x = 0; x < chain.n_states; ++x)
    kernel_gap += profile.stationary[x] *
                  row_tv_to(chain.transition, x, profile.stationary.probs);
  double last_state_tv = row_tv_to(chain.transition, trajectory[n - 1],
                                   profile.stationary.probs);
  double row_sum = tv_distance(chain.initial, profile.stationary);
  for (int i = 2; i <= n; ++i)
    row_sum += row_tv_to(chain.transition, trajectory[i - 2], profile.stationary.probs);
  BoundReport r;
  r.kind = "markov_ergodic";
  r.d_alpha = d_alpha;
  r.delta = delta;
  r.alpha = alpha;
  r.n = n;
  r.terms = {
      {"concentration_term", concentration},
      {"attachment_sqrt_n_term", big_m / std::sqrt(static_cast<double>(n))},
      {"burn_in_term", burn_in},
      {"stationary_kernel_term", 2.0 * big_m * kernel_gap},
      {"last_state_term", big_m * last_state_tv},
      {"conditional_row_term", big_m * row_sum / n},
  };
  return finalize_report(std::move(r));
}

}  // namespace gcnbound

#endif  // GCNBOUND_BOUNDS_HPP
