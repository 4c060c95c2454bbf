// Empirical risk, exact expected risk over the finite law of the next
// node, posterior-gap Monte Carlo, the refresh statistics behind the
// concentration step, and the empirical MGF check against the
// sub-Gaussian envelope.
#ifndef GCNBOUND_RISK_HPP
#define GCNBOUND_RISK_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcnbound/dependency.hpp"
#include "gcnbound/gcn.hpp"
#include "gcnbound/graph.hpp"
#include "gcnbound/markov.hpp"

namespace gcnbound {

// Defensive loss clamp: values above the certified cap are truncated and
// counted; valid runs must report zero events.
struct CapCounter {
  double cap = 0.0;
  long events = 0;
  double operator()(double v) {
    if (v > cap) {
      ++events;
      return cap;
    }
    return v;
  }
};

inline double empirical_risk(const GcnWeights& w, const NodeDataset& ds,
                             const NormalizedGraph& norm, const LossSpec& spec,
                             long* clamp_events = nullptr) {
  Matrix logits = w.arity == Arity::kOneLayer ? forward_one_layer(ds, norm, w)
                                              : forward_two_layer(ds, norm, w);
  CapCounter clamp{spec.loss_cap_m};
  double s = 0.0;
  const int n = static_cast<int>(logits.rows());
  for (int i = 0; i < n; ++i)
    s += clamp(loss_logsoftmax(logits.row(i).transpose(), ds.labels[i]));
  if (clamp_events) *clamp_events += clamp.events;
  return s / n;
}

namespace detail {

// Per-weights precomputation for new-node logits, so sweeping over all
// (next state, attachment atom) pairs does not redo the O(n d h) work.
struct NewNodeEvaluator {
  const NodeDataset* ds = nullptr;
  const NormalizedGraph* norm = nullptr;
  const GcnWeights* w = nullptr;
  Matrix xw;          // one-layer: features * W1 (n x K)
  Matrix sw;          // one-layer: state_embedding * W1 (N x K)
  Matrix hidden_pre;  // two-layer: hat * features * W1 (n x h)
  Matrix feat_w1;     // two-layer: features * W1 (n x h)
  Matrix embed_w1;    // two-layer: state_embedding * W1 (N x h)

  NewNodeEvaluator(const NodeDataset& dataset, const NormalizedGraph& normalized,
                   const GcnWeights& weights)
      : ds(&dataset), norm(&normalized), w(&weights) {
    if (w->arity == Arity::kOneLayer) {
      xw = ds->features * w->w1;
      sw = ds->state_embedding * w->w1;
    } else {
      feat_w1 = ds->features * w->w1;
      hidden_pre = norm->hat * feat_w1;
      embed_w1 = ds->state_embedding * w->w1;
    }
  }

  // Logits of the new node when it lands in `next_state` and aggregates
  // with coefficients `attach` (slot n+1 multiplies the new node itself).
  Vector logits(const std::vector<double>& attach, int next_state) const {
    const int n = norm->n;
    if (w->arity == Arity::kOneLayer) {
      Vector agg = Vector::Zero(xw.cols());
      for (int k = 0; k < n; ++k)
        if (attach[k] != 0.0) agg += attach[k] * xw.row(k).transpose();
      if (attach[n] != 0.0) agg += attach[n] * sw.row(next_state).transpose();
      return agg;  // the display carries no activation here
    }
    Vector x_new_w1 = embed_w1.row(next_state).transpose();  // h
    Vector agg = Vector::Zero(w->w2.cols());
    for (int j = 0; j < n; ++j) {
      if (attach[j] == 0.0) continue;
      Vector hj = hidden_pre.row(j).transpose() + attach[j] * x_new_w1;
      agg += attach[j] * (w->w2.transpose() * relu(std::move(hj)));
    }
    if (attach[n] != 0.0) {
      Vector self = Vector::Zero(x_new_w1.size());
      for (int k = 0; k < n; ++k)
        if (attach[k] != 0.0) self += attach[k] * feat_w1.row(k).transpose();
      self += attach[n] * x_new_w1;
      agg += attach[n] * (w->w2.transpose() * relu(std::move(self)));
    }
    return relu(std::move(agg));
  }
};

}  // namespace detail

// Exact expected risk of the new node: the next state follows the kernel
// row of the last trajectory state, the attachment atom is independent of
// it, and both supports are finite, so the expectation is a double sum.
inline double expected_risk_exact(const GcnWeights& w, const NodeDataset& ds,
                                  const FiniteMarkovChain& chain,
                                  const AttachmentDistribution& attach,
                                  const NormalizedGraph& norm, const LossSpec& spec,
                                  long* clamp_events = nullptr) {
  if (ds.state_trace.empty()) throw std::invalid_argument("expected_risk_exact: empty trace");
  detail::NewNodeEvaluator eval(ds, norm, w);
  CapCounter clamp{spec.loss_cap_m};
  const int last = ds.state_trace.back();
  double total = 0.0;
  for (int s = 0; s < chain.n_states; ++s) {
    double ps = chain.transition(last, s);
    if (ps == 0.0) continue;
    int label = s % ds.n_classes;
    for (std::size_t a = 0; a < attach.atoms.size(); ++a) {
      double pa = attach.probs[a];
      if (pa == 0.0) continue;
      total += ps * pa * clamp(loss_logsoftmax(eval.logits(attach.atoms[a], s), label));
    }
  }
  if (clamp_events) *clamp_events += clamp.events;
  return total;
}

struct PosteriorGap {
  double mean = 0.0;
  double std_error = 0.0;
  int n_samples = 0;
  long clamp_events = 0;
};

// Monte-Carlo over W ~ Q of (expected risk - empirical risk).
inline PosteriorGap posterior_gap(const PosteriorPrior& pp, const NodeDataset& ds,
                                  const FiniteMarkovChain& chain,
                                  const AttachmentDistribution& attach,
                                  const NormalizedGraph& norm, const LossSpec& spec,
                                  int n_weight_samples, std::uint64_t seed) {
  if (n_weight_samples < 1)
    throw std::invalid_argument("posterior_gap: need at least one weight sample");
  PosteriorGap out;
  out.n_samples = n_weight_samples;
  std::vector<double> gaps(n_weight_samples);
  for (int i = 0; i < n_weight_samples; ++i) {
    GcnWeights w = sample_posterior(pp, derive_seed(seed, "gap_sample", i));
    double emp = empirical_risk(w, ds, norm, spec, &out.clamp_events);
    double exp_risk =
        expected_risk_exact(w, ds, chain, attach, norm, spec, &out.clamp_events);
    gaps[i] = exp_risk - emp;
    out.mean += gaps[i];
  }
  out.mean /= n_weight_samples;
  if (n_weight_samples > 1) {
    double var = 0.0;
    for (double g : gaps) var += (g - out.mean) * (g - out.mean);
    out.std_error = std::sqrt(var / (n_weight_samples - 1) / n_weight_samples);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Refresh statistics.
//
// For fixed weights, a one-layer model, and a realized trajectory, the
// suffix-refresh statistic averages over nodes j the exact conditional
// expectation (given s_{[j-1]}) of node j's loss when coordinates j..n are
// redrawn, minus the realized loss.  Node j's logits depend only on the
// states at j and its graph neighbors, so the conditional expectation is a
// sum over joint assignments of the refreshed indices in {j} u N(j) that
// are >= j, weighted by kernel-power gap probabilities.  Its expectation
// over trajectories is exactly zero (tower property).
//
// The point-refresh statistic replaces the realized loss by the same
// suffix-refresh conditional mean and redraws only coordinate j in the
// first part; its trajectory expectation is not zero and is centered
// empirically where needed.
// ---------------------------------------------------------------------------

enum class RefreshStatistic { kSuffixRefresh, kPointRefresh };

namespace detail {

struct RefreshPlan {
  // For each node j (0-based): the sorted refreshed indices (j first),
  // the aggregation coefficient of each, and the fixed (non-refreshed)
  // part of the aggregation, which covers neighbors with index < j.
  std::vector<std::vector<int>> refreshed;
  std::vector<std::vector<double>> coeffs;
  double total_tuples = 0.0;
};

inline RefreshPlan build_refresh_plan(const UndirectedGraph& g, const NormalizedGraph& norm,
                                      int n_states) {
  RefreshPlan plan;
  plan.refreshed.resize(g.n);
  plan.coeffs.resize(g.n);
  for (int j = 0; j < g.n; ++j) {
    std::vector<int>& idx = plan.refreshed[j];
    idx.push_back(j);
    for (int k : g.neighbors[j])
      if (k > j) idx.push_back(k);
    std::sort(idx.begin(), idx.end());
    std::vector<double>& c = plan.coeffs[j];
    c.reserve(idx.size());
    for (int k : idx) c.push_back(norm.tilde(j, k));
    plan.total_tuples += std::pow(static_cast<double>(n_states), idx.size());
  }
  return plan;
}

}  // namespace detail

struct RefreshContext {
  const FiniteMarkovChain* chain = nullptr;
  const UndirectedGraph* graph = nullptr;
  const NormalizedGraph* norm = nullptr;
  const GcnWeights* weights = nullptr;
  Matrix sw;                          // state_embedding * W1 (N x K)
  detail::RefreshPlan plan;
  std::vector<Matrix> kernel_powers;  // [t] = P^t, t = 0..n-1 (index 0 = I)
  int n_classes = 2;
  double enumeration_budget = 1e7;

  RefreshContext(const FiniteMarkovChain& c, const UndirectedGraph& g,
                 const NormalizedGraph& nm, const GcnWeights& w,
                 const Matrix& state_embedding, int k_classes,
                 double budget = 1e7)
      : chain(&c), graph(&g), norm(&nm), weights(&w), n_classes(k_classes),
        enumeration_budget(budget) {
    if (w.arity != Arity::kOneLayer)
      throw std::invalid_argument("RefreshContext: refresh statistics are one-layer");
    sw = state_embedding * w.w1;
    plan = detail::build_refresh_plan(g, nm, c.n_states);
    if (plan.total_tuples > enumeration_budget)
      throw std::invalid_argument(
          "RefreshContext: neighborhood enumeration cost " +
          std::to_string(plan.total_tuples) + " exceeds budget; use a sparser graph");
    const int n = g.n;
    kernel_powers.reserve(n);
    kernel_powers.push_back(Matrix::Identity(c.n_states, c.n_states));
    Matrix p = c.transition;
    for (int t = 1; t < n; ++t) {
      kernel_powers.push_back(p);
      if (t + 1 < n) p = p * c.transition;
    }
    if (n == 1) kernel_powers.push_back(c.transition);
  }
};

namespace detail {

// Exact conditional mean of node j's loss given s_{[j-1]} when the block
// s_j..s_n is refreshed, by enumerating states of the refreshed indices
// that node j actually aggregates.
inline double suffix_conditional_mean(const RefreshContext& ctx,
                                      const std::vector<int>& trace, int j) {
  const int N = ctx.chain->n_states;
  const auto& idx = ctx.plan.refreshed[j];
  const auto& coeff = ctx.plan.coeffs[j];
  const int m = static_cast<int>(idx.size());
  // fixed part of node j's aggregation: neighbors with index < j
  Vector fixed = Vector::Zero(ctx.sw.cols());
  for (int k : ctx.graph->neighbors[j])
    if (k < j) fixed += ctx.norm->tilde(j, k) * ctx.sw.row(trace[k]).transpose();
  std::vector<int> assign(m, 0);
  double mean = 0.0;
  while (true) {
    // probability of this assignment given s_{j-1}
    double pr;
    if (j == 0) {
      pr = ctx.chain->initial[assign[0]];
    } else {
      pr = ctx.kernel_powers[idx[0] - (j - 1)](trace[j - 1], assign[0]);
    }
    for (int r = 1; r < m && pr > 0.0; ++r)
      pr *= ctx.kernel_powers[idx[r] - idx[r - 1]](assign[r - 1], assign[r]);
    if (pr > 0.0) {
      Vector agg = fixed;
      for (int r = 0; r < m; ++r) agg += coeff[r] * ctx.sw.row(assign[r]).transpose();
      int label = assign[0] % ctx.n_classes;  // idx[0] == j: node j's own state
      mean += pr * loss_logsoftmax(relu(std::move(agg)), label);
    }
    int pos = m - 1;
    while (pos >= 0 && ++assign[pos] == N) assign[pos--] = 0;
    if (pos < 0) break;
  }
  return mean;
}

inline double realized_node_loss(const RefreshContext& ctx, const std::vector<int>& trace,
                                 int j) {
  Vector agg = Vector::Zero(ctx.sw.cols());
  agg += ctx.norm->tilde(j, j) * ctx.sw.row(trace[j]).transpose();
  for (int k : ctx.graph->neighbors[j])
    agg += ctx.norm->tilde(j, k) * ctx.sw.row(trace[k]).transpose();
  return loss_logsoftmax(relu(std::move(agg)), trace[j] % ctx.n_classes);
}

// Exact conditional mean when only coordinate j is redrawn: only node j's
// own term (and its label) change, all neighbor states stay realized.
inline double point_conditional_mean(const RefreshContext& ctx,
                                     const std::vector<int>& trace, int j) {
  const int N = ctx.chain->n_states;
  Vector base = Vector::Zero(ctx.sw.cols());
  for (int k : ctx.graph->neighbors[j])
    base += ctx.norm->tilde(j, k) * ctx.sw.row(trace[k]).transpose();
  double self_coeff = ctx.norm->tilde(j, j);
  double mean = 0.0;
  for (int s = 0; s < N; ++s) {
    double pr = j == 0 ? ctx.chain->initial[s] : ctx.chain->transition(trace[j - 1], s);
    if (pr == 0.0) continue;
    Vector agg = base + self_coeff * ctx.sw.row(s).transpose();
    mean += pr * loss_logsoftmax(relu(std::move(agg)), s % ctx.n_classes);
  }
  return mean;
}

}  // namespace detail

// Suffix-refresh statistic: (1/n) sum_j [conditional mean under a full
// suffix redraw - realized loss].  Exactly mean-zero over trajectories.
inline double suffix_refresh_statistic(const RefreshContext& ctx,
                                       const std::vector<int>& trace) {
  const int n = ctx.graph->n;
  if (static_cast<int>(trace.size()) != n)
    throw std::invalid_argument("suffix_refresh_statistic: trace length mismatch");
  double s = 0.0;
  for (int j = 0; j < n; ++j)
    s += detail::suffix_conditional_mean(ctx, trace, j) -
         detail::realized_node_loss(ctx, trace, j);
  return s / n;
}

// Point-refresh statistic: (1/n) sum_j [conditional mean under a single
// coordinate redraw - conditional mean under the full suffix redraw].
inline double point_refresh_statistic(const RefreshContext& ctx,
                                      const std::vector<int>& trace) {
  const int n = ctx.graph->n;
  if (static_cast<int>(trace.size()) != n)
    throw std::invalid_argument("point_refresh_statistic: trace length mismatch");
  double s = 0.0;
  for (int j = 0; j < n; ++j)
    s += detail::point_conditional_mean(ctx, trace, j) -
         detail::suffix_conditional_mean(ctx, trace, j);
  return s / n;
}

// ---------------------------------------------------------------------------
// Empirical MGF check.
// ---------------------------------------------------------------------------

struct MgfGridPoint {
  double lambda = 0.0;
  double empirical_log_mgf = 0.0;
  double envelope = 0.0;  // lambda^2 alpha^2 ||Gamma c||^2 / 8
  double log_std_error = 0.0;
  bool pass = false;
};

struct MgfReport {
  std::vector<MgfGridPoint> points;
  bool all_pass = false;
  bool small_budget = false;  // flagged (not failed) when the estimate is unstable
  double gamma_c_norm_sq = 0.0;
  double centered_mean = 0.0;      // mean of (psi - center) over trials
  double centered_mean_se = 0.0;
  double center = 0.0;             // analytic 0 for suffix refresh, else empirical
  int n_trials = 0;
};

// Hamming-Lipschitz envelope ||Gamma c||^2 assembled as ||Gamma||^2 ||c||^2.
// Suffix refresh: c_i = 2(2 c_x c_w c_a L + M max(1,||Gt||_inf))/n for all i.
// Point refresh:  c_i = (2 c_x c_w c_a L + M ||Gt||_inf)/n for i < n, 0 at n.
inline double refresh_gamma_c_sq(RefreshStatistic stat, double c_x, double c_w, double c_a,
                                 double lipschitz_l, double loss_cap_m,
                                 double gamma_tilde_inf, double gamma_norm, int n) {
  double base = 2.0 * c_x * c_w * c_a * lipschitz_l;
  double c_sq;
  if (stat == RefreshStatistic::kSuffixRefresh) {
    double ci = 2.0 * (base + loss_cap_m * std::max(1.0, gamma_tilde_inf)) / n;
    c_sq = n * ci * ci;
  } else {
    double ci = (base + loss_cap_m * gamma_tilde_inf) / n;
    c_sq = (n - 1) * ci * ci;
  }
  return gamma_norm * gamma_norm * c_sq;
}

// Empirical log-MGF of lambda*alpha*(psi - center) over fresh trajectories,
// compared against the sub-Gaussian envelope at every grid point.
inline MgfReport mgf_concentration_check(
    const FiniteMarkovChain& chain, const RefreshContext& ctx, RefreshStatistic stat,
    const std::vector<double>& lambda_grid, int n_trials, double alpha,
    double gamma_c_norm_sq, std::uint64_t seed) {
  if (n_trials < 2) throw std::invalid_argument("mgf_concentration_check: need >= 2 trials");
  if (lambda_grid.empty())
    throw std::invalid_argument("mgf_concentration_check: empty lambda grid");
  const int n = ctx.graph->n;
  std::vector<double> psi(n_trials);
  for (int t = 0; t < n_trials; ++t) {
    Rng rng(derive_seed(seed, "mgf_trajectory", t));
    std::vector<int> trace = simulate_trajectory(chain, n, rng);
    psi[t] = stat == RefreshStatistic::kSuffixRefresh
                 ? suffix_refresh_statistic(ctx, trace)
                 : point_refresh_statistic(ctx, trace);
  }
  MgfReport report;
  report.n_trials = n_trials;
  report.gamma_c_norm_sq = gamma_c_norm_sq;
  if (stat == RefreshStatistic::kSuffixRefresh) {
    report.center = 0.0;  // exact: the tower property centers this statistic
  } else {
    double m = 0.0;
    for (double v : psi) m += v;
    report.center = m / n_trials;
  }
  double mean = 0.0;
  for (double v : psi) mean += v - report.center;
  mean /= n_trials;
  double var = 0.0;
  for (double v : psi) var += (v - report.center - mean) * (v - report.center - mean);
  report.centered_mean = mean;
  report.centered_mean_se = std::sqrt(var / (n_trials - 1) / n_trials);

  report.all_pass = true;
  for (double lambda : lambda_grid) {
    MgfGridPoint pt;
    pt.lambda = lambda;
    double scale = lambda * alpha;
    double m1 = 0.0;
    std::vector<double> terms(n_trials);
    double max_term = 0.0;
    for (int t = 0; t < n_trials; ++t) {
      terms[t] = std::exp(scale * (psi[t] - report.center));
      m1 += terms[t];
      max_term = std::max(max_term, terms[t]);
    }
    m1 /= n_trials;
    double v = 0.0;
    for (double term : terms) v += (term - m1) * (term - m1);
    double se = std::sqrt(v / (n_trials - 1) / n_trials);
    pt.empirical_log_mgf = std::log(m1);
    pt.log_std_error = se / m1;  // delta method for log of a positive mean
    pt.envelope = lambda * lambda * alpha * alpha * gamma_c_norm_sq / 8.0;
    pt.pass = pt.empirical_log_mgf <= pt.envelope + 3.0 * pt.log_std_error;
    if (max_term > 0.5 * m1 * n_trials) report.small_budget = true;
    report.all_pass = report.all_pass && pt.pass;
    report.points.push_back(pt);
  }
  if (n_trials < 100) report.small_budget = true;
  return report;
}

}  // namespace gcnbound

#endif  // GCNBOUND_RISK_HPP
