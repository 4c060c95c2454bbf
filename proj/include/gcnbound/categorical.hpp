// Finite probability vectors and the divergences between them.
#ifndef GCNBOUND_CATEGORICAL_HPP
#define GCNBOUND_CATEGORICAL_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace gcnbound {

// Probability vector over {0, ..., K-1}.  Entries are validated
// nonnegative; a total within 1e-12 of 1 is accepted as-is, drift below
// 1e-9 is renormalized, anything larger is rejected.
struct CategoricalDist {
  std::vector<double> probs;

  static CategoricalDist from(std::vector<double> p) {
    if (p.empty()) throw std::invalid_argument("CategoricalDist: empty vector");
    double total = 0.0;
    for (double v : p) {
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("CategoricalDist: entries must be finite and >= 0");
      total += v;
    }
    double drift = std::abs(total - 1.0);
    if (drift > 1e-12) {
      if (drift >= 1e-9)
        throw std::invalid_argument("CategoricalDist: mass " + std::to_string(total) +
                                    " is too far from 1");
      for (double& v : p) v /= total;
    }
    CategoricalDist d;
    d.probs = std::move(p);
    return d;
  }

  std::size_t size() const { return probs.size(); }
  double operator[](std::size_t i) const { return probs[i]; }
};

inline void require_same_dim(const CategoricalDist& p, const CategoricalDist& q,
                             const char* who) {
  if (p.size() != q.size())
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

// Total variation distance: half the l1 distance.
inline double tv_distance(const CategoricalDist& p, const CategoricalDist& q) {
  require_same_dim(p, q, "tv_distance");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

// Renyi divergence of order alpha:  (1/(alpha-1)) log sum_i p_i^a q_i^(1-a).
// alpha = 1 is rejected (callers wanting the KL limit use kl_divergence).
// For alpha > 1, any i with p_i > 0 = q_i forces the value to +infinity.
inline double renyi_divergence(const CategoricalDist& p, const CategoricalDist& q,
                               double alpha) {
  require_same_dim(p, q, "renyi_divergence");
  if (!(alpha > 0.0) || alpha == 1.0 || !std::isfinite(alpha))
    throw std::invalid_argument("renyi_divergence: alpha must lie in (0,1) or (1,inf)");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;  // 0^a q^(1-a) = 0 for a > 0
    if (q[i] == 0.0) {
      if (alpha > 1.0) return std::numeric_limits<double>::infinity();
      continue;  // alpha < 1: p^a 0^(1-a) = 0
    }
    sum += std::pow(p[i], alpha) * std::pow(q[i], 1.0 - alpha);
  }
  if (sum == 0.0) return std::numeric_limits<double>::infinity();
  double d = std::log(sum) / (alpha - 1.0);
  return d < 0.0 && d > -1e-12 ? 0.0 : d;  // absorb rounding at D = 0
}

// Kullback-Leibler divergence, the alpha -> 1 limit of the Renyi family.
inline double kl_divergence(const CategoricalDist& p, const CategoricalDist& q) {
  require_same_dim(p, q, "kl_divergence");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
    s += p[i] * std::log(p[i] / q[i]);
  }
  return s < 0.0 && s > -1e-12 ? 0.0 : s;
}

}  // namespace gcnbound

#endif  // GCNBOUND_CATEGORICAL_HPP
