// Undirected graphs, the two adjacency normalizations, hub-leaf and
// uniform-degree generators, and the new-node attachment distributions.
#ifndef GCNBOUND_GRAPH_HPP
#define GCNBOUND_GRAPH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gcnbound/categorical.hpp"
#include "gcnbound/linalg.hpp"
#include "gcnbound/rng.hpp"

namespace gcnbound {

struct UndirectedGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;     // i < j, sorted, unique
  std::vector<int> degrees;                   // all >= 1
  std::vector<std::vector<int>> neighbors;    // sorted adjacency lists

  static UndirectedGraph from_edges(int n, std::vector<std::pair<int, int>> raw) {
    if (n < 2) throw std::invalid_argument("UndirectedGraph: need at least 2 nodes");
    std::set<std::pair<int, int>> unique_edges;
    for (auto [a, b] : raw) {
      if (a == b) throw std::invalid_argument("UndirectedGraph: self-loops are not allowed");
      if (a < 0 || b < 0 || a >= n || b >= n)
        throw std::invalid_argument("UndirectedGraph: edge endpoint out of range");
      unique_edges.emplace(std::min(a, b), std::max(a, b));
    }
    UndirectedGraph g;
    g.n = n;
    g.edges.assign(unique_edges.begin(), unique_edges.end());
    g.degrees.assign(n, 0);
    g.neighbors.assign(n, {});
    for (auto [a, b] : g.edges) {
      g.degrees[a]++;
      g.degrees[b]++;
      g.neighbors[a].push_back(b);
      g.neighbors[b].push_back(a);
    }
    for (auto& list : g.neighbors) std::sort(list.begin(), list.end());
    for (int i = 0; i < n; ++i)
      if (g.degrees[i] < 1)
        throw std::invalid_argument("UndirectedGraph: node " + std::to_string(i) +
                                    " is isolated");
    return g;
  }

  bool has_edge(int a, int b) const {
    const auto& list = neighbors[a];
    return std::binary_search(list.begin(), list.end(), b);
  }

  Matrix adjacency_matrix() const {
    Matrix a = Matrix::Zero(n, n);
    for (auto [i, j] : edges) {
      a(i, j) = 1.0;
      a(j, i) = 1.0;
    }
    return a;
  }
};

struct NormalizedGraph {
  int n = 0;
  Matrix tilde;  // diag 1/(D_i+1); off-diag A_ij / sqrt((D_i+1)(D_j+1))
  Matrix hat;    // diag 0;         off-diag A_ij / sqrt(D_i D_j)
  double frob_tilde_sq = 0.0;
  double frob_hat_sq = 0.0;
  double c_a = 0.0;  // certified aggregation cap: max of both Frobenius and
                     // both row-sum norms, so every norm the analysis uses
                     // is covered by the same constant
};

// Frobenius norms of both normalizations from degrees and the edge list
// alone; usable at sizes where dense matrices are not.
struct FrobeniusStats {
  double tilde_sq = 0.0;
  double hat_sq = 0.0;
};

inline FrobeniusStats frobenius_stats(const UndirectedGraph& g) {
  FrobeniusStats s;
  for (int i = 0; i < g.n; ++i) {
    double d = g.degrees[i] + 1.0;
    s.tilde_sq += 1.0 / (d * d);
  }
  for (auto [i, j] : g.edges) {
    s.tilde_sq += 2.0 / ((g.degrees[i] + 1.0) * (g.degrees[j] + 1.0));
    s.hat_sq += 2.0 / (static_cast<double>(g.degrees[i]) * g.degrees[j]);
  }
  return s;
}

inline NormalizedGraph normalize(const UndirectedGraph& g) {
  NormalizedGraph norm;
  norm.n = g.n;
  norm.tilde = Matrix::Zero(g.n, g.n);
  norm.hat = Matrix::Zero(g.n, g.n);
  for (int i = 0; i < g.n; ++i) norm.tilde(i, i) = 1.0 / (g.degrees[i] + 1.0);
  for (auto [i, j] : g.edges) {
    double t = 1.0 / std::sqrt((g.degrees[i] + 1.0) * (g.degrees[j] + 1.0));
    double h = 1.0 / std::sqrt(static_cast<double>(g.degrees[i]) * g.degrees[j]);
    norm.tilde(i, j) = norm.tilde(j, i) = t;
    norm.hat(i, j) = norm.hat(j, i) = h;
  }
  FrobeniusStats fs = frobenius_stats(g);
  norm.frob_tilde_sq = fs.tilde_sq;
  norm.frob_hat_sq = fs.hat_sq;
  norm.c_a = std::max(std::max(std::sqrt(fs.tilde_sq), std::sqrt(fs.hat_sq)),
                      std::max(inf_norm(norm.tilde), inf_norm(norm.hat)));
  return norm;
}

// k fully-interconnected hub nodes (ids 0..k-1); every leaf links to
// min(leaf_degree, ceil(hub_fraction * k)) hubs clamped to [1, k] (all hubs
// by default); exactly m_ll leaf-leaf edges placed uniformly at random.
inline UndirectedGraph hub_leaf_generate(int n, int k, int leaf_degree, int m_ll,
                                         std::uint64_t seed, double hub_fraction = 1.0) {
  if (k < 1) throw std::invalid_argument("hub_leaf_generate: need k >= 1 hubs");
  if (leaf_degree < 1) throw std::invalid_argument("hub_leaf_generate: leaf_degree must be >= 1");
  if (!(hub_fraction > 0.0 && hub_fraction <= 1.0))
    throw std::invalid_argument("hub_leaf_generate: hub_fraction must lie in (0,1]");
  const int leaves = n - k;
  if (leaves < 1) throw std::invalid_argument("hub_leaf_generate: no leaves (n <= k)");
  double max_ll = 0.5 * static_cast<double>(leaves) * (leaves - 1);
  if (m_ll < 0 || static_cast<double>(m_ll) > max_ll)
    throw std::invalid_argument("hub_leaf_generate: m_ll infeasible for " +
                                std::to_string(leaves) + " leaves");
  int per_leaf = static_cast<int>(std::lround(hub_fraction * k));
  per_leaf = std::max(per_leaf, std::min(leaf_degree, k));
  per_leaf = std::min(std::max(per_leaf, 1), k);

  Rng rng(derive_seed(seed, "hub_leaf"));
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) edges.emplace_back(a, b);
  std::vector<int> hub_ids(k);
  std::iota(hub_ids.begin(), hub_ids.end(), 0);
  for (int leaf = k; leaf < n; ++leaf) {
    if (per_leaf == k) {
      for (int h = 0; h < k; ++h) edges.emplace_back(h, leaf);
    } else {
      // seeded partial Fisher-Yates draw of per_leaf distinct hubs
      std::vector<int> pool = hub_ids;
      for (int t = 0; t < per_leaf; ++t) {
        auto pick = static_cast<std::size_t>(rng.uniform_int(t, k - 1));
        std::swap(pool[t], pool[pick]);
        edges.emplace_back(pool[t], leaf);
      }
    }
  }
  std::set<std::pair<int, int>> ll;
  while (static_cast<int>(ll.size()) < m_ll) {
    int a = static_cast<int>(rng.uniform_int(k, n - 1));
    int b = static_cast<int>(rng.uniform_int(k, n - 1));
    if (a == b) continue;
    ll.emplace(std::min(a, b), std::max(a, b));
  }
  edges.insert(edges.end(), ll.begin(), ll.end());
  return UndirectedGraph::from_edges(n, std::move(edges));
}

// Displayed cap on the hat-normalization Frobenius norm of a hub-leaf
// graph, from the hub/leaf degree extremes and the leaf-leaf edge count.
inline double hub_leaf_frobenius_cap(const UndirectedGraph& g, int k) {
  if (k < 1 || k >= g.n) throw std::invalid_argument("hub_leaf_frobenius_cap: bad k");
  double dh_min = 1e300, dh_max = 0.0, dl_min = 1e300;
  for (int i = 0; i < k; ++i) {
    dh_min = std::min(dh_min, static_cast<double>(g.degrees[i]));
    dh_max = std::max(dh_max, static_cast<double>(g.degrees[i]));
  }
  for (int i = k; i < g.n; ++i) dl_min = std::min(dl_min, static_cast<double>(g.degrees[i]));
  int m_ll = 0;
  for (auto [a, b] : g.edges)
    if (a >= k && b >= k) ++m_ll;
  return 2.0 * k * k / (dh_min * dh_min) + 2.0 * k * dh_max / (dh_min * dl_min) +
         2.0 * m_ll / (dl_min * dl_min);
}

// Low-degree graph: a ring over a seeded permutation (degree 2) plus
// floor((degree-2)/2) random chord matchings.  Every node sits on the
// ring, so no isolated vertices can occur.
inline UndirectedGraph uniform_generate(int n, int degree, std::uint64_t seed) {
  if (n < 3) throw std::invalid_argument("uniform_generate: need n >= 3");
  if (degree < 2) throw std::invalid_argument("uniform_generate: degree must be >= 2");
  Rng rng(derive_seed(seed, "uniform_graph"));
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    auto j = static_cast<std::size_t>(rng.uniform_int(0, i));
    std::swap(perm[i], perm[j]);
  }
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(perm[i], perm[(i + 1) % n]);
  int matchings = (degree - 2) / 2;
  for (int m = 0; m < matchings; ++m) {
    std::vector<int> shuffled(n);
    std::iota(shuffled.begin(), shuffled.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      auto j = static_cast<std::size_t>(rng.uniform_int(0, i));
      std::swap(shuffled[i], shuffled[j]);
    }
    for (int i = 0; i + 1 < n; i += 2) edges.emplace_back(shuffled[i], shuffled[i + 1]);
  }
  return UndirectedGraph::from_edges(n, std::move(edges));
}

enum class AttachmentKind { kAuxiliary, kPerturbed };

// Finite law of the new node's aggregation coefficients A_{n+1, [n+1]}.
struct AttachmentDistribution {
  std::vector<std::vector<double>> atoms;  // length n+1 sequences
  CategoricalDist probs;
  AttachmentKind kind = AttachmentKind::kAuxiliary;
  double coefficient_bound = 1.0;  // every entry certified <= this
  int n_nodes = 0;
};

// Atom i: row i of the tilde normalization with slot i zeroed and the
// diagonal value moved to slot n+1 (the new node aggregates exactly the
// way training node i did, with itself in the new node's position).
inline AttachmentDistribution auxiliary_attachment(const NormalizedGraph& norm) {
  const int n = norm.n;
  AttachmentDistribution d;
  d.kind = AttachmentKind::kAuxiliary;
  d.n_nodes = n;
  d.atoms.reserve(n);
  double max_entry = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> atom(n + 1, 0.0);
    for (int j = 0; j < n; ++j)
      if (j != i) atom[j] = norm.tilde(i, j);
    atom[n] = norm.tilde(i, i);
    for (double v : atom) max_entry = std::max(max_entry, v);
    d.atoms.push_back(std::move(atom));
  }
  d.probs = CategoricalDist::from(std::vector<double>(n, 1.0 / n));
  d.coefficient_bound = std::max(1.0, max_entry);
  return d;
}

// Same n row atoms with mass 1/n - n^(-3/2) each, plus k extra bounded
// atoms with mass 1/(k sqrt(n)) each.  Defaults to k copies of the
// constant sequence 1/(n+1) when no extras are supplied.
inline AttachmentDistribution perturbed_attachment(
    const NormalizedGraph& norm, std::vector<std::vector<double>> extras = {},
    double coefficient_bound = 1.0) {
  const int n = norm.n;
  if (extras.empty())
    extras.assign(2, std::vector<double>(n + 1, 1.0 / (n + 1)));
  const int k = static_cast<int>(extras.size());
  for (const auto& seq : extras) {
    if (static_cast<int>(seq.size()) != n + 1)
      throw std::invalid_argument("perturbed_attachment: extra atom has wrong length");
    for (double v : seq)
      if (!(v >= 0.0 && v <= coefficient_bound))
        throw std::invalid_argument(
            "perturbed_attachment: extra atom entry outside [0, bound]");
  }
  AttachmentDistribution d = auxiliary_attachment(norm);
  d.kind = AttachmentKind::kPerturbed;
  d.coefficient_bound = std::max(d.coefficient_bound, coefficient_bound);
  double row_mass = 1.0 / n - std::pow(static_cast<double>(n), -1.5);
  double extra_mass = 1.0 / (k * std::sqrt(static_cast<double>(n)));
  std::vector<double> masses(n, row_mass);
  for (const auto& seq : extras) {
    d.atoms.push_back(seq);
    masses.push_back(extra_mass);
  }
  d.probs = CategoricalDist::from(std::move(masses));
  return d;
}

// Exact TV over the merged support; atoms are identified by exact
// floating-point sequence equality (they are constructed once and copied,
// never recomputed, so equality is reliable).
inline double attachment_tv(const AttachmentDistribution& p,
                            const AttachmentDistribution& q) {
  std::map<std::vector<double>, std::pair<double, double>> merged;
  for (std::size_t i = 0; i < p.atoms.size(); ++i) merged[p.atoms[i]].first += p.probs[i];
  for (std::size_t i = 0; i < q.atoms.size(); ++i) merged[q.atoms[i]].second += q.probs[i];
  double s = 0.0;
  for (const auto& [atom, mass] : merged) s += std::abs(mass.first - mass.second);
  return 0.5 * s;
}

inline const std::vector<double>& sample_attachment(const AttachmentDistribution& d,
                                                    Rng& rng) {
  return d.atoms[rng.discrete(d.probs.probs)];
}

}  // namespace gcnbound

#endif  // GCNBOUND_GRAPH_HPP
