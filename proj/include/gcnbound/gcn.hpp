// One- and two-layer graph convolution models on state-embedded data:
// forward passes (training-node and new-node variants), the log-softmax
// loss with its Lipschitz/cap constants, manual-gradient training under a
// spectral-norm constraint, and the Gaussian posterior/prior pair.
#ifndef GCNBOUND_GCN_HPP
#define GCNBOUND_GCN_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcnbound/graph.hpp"
#include "gcnbound/linalg.hpp"
#include "gcnbound/rng.hpp"

namespace gcnbound {

struct NodeDataset {
  Matrix features;               // n x d, row norms <= c_x
  std::vector<int> labels;       // values in [0, K)
  std::vector<int> state_trace;  // underlying Markov states
  Matrix state_embedding;        // N x d: the fixed state -> feature map
  double c_x = 1.0;
  int n_classes = 2;
};

// Fixed seeded embedding: each state becomes a unit Gaussian direction
// scaled to norm c_x.  Identical states always produce identical rows.
inline Matrix state_embedding_map(int n_states, int d, double c_x, std::uint64_t seed) {
  if (n_states < 1 || d < 1)
    throw std::invalid_argument("state_embedding_map: need n_states >= 1, d >= 1");
  if (!(c_x > 0.0)) throw std::invalid_argument("state_embedding_map: c_x must be > 0");
  Matrix e(n_states, d);
  for (int s = 0; s < n_states; ++s) {
    Rng rng(derive_seed(seed, "state_embed", static_cast<std::uint64_t>(s)));
    double norm_sq = 0.0;
    do {
      norm_sq = 0.0;
      for (int j = 0; j < d; ++j) {
        e(s, j) = rng.gaussian();
        norm_sq += e(s, j) * e(s, j);
      }
    } while (norm_sq < 1e-12);
    e.row(s) *= c_x / std::sqrt(norm_sq);
  }
  return e;
}

inline NodeDataset embed_states(const std::vector<int>& trace, int d, double c_x, int K,
                                std::uint64_t seed, int n_states = -1) {
  if (trace.empty()) throw std::invalid_argument("embed_states: empty trace");
  if (K < 2) throw std::invalid_argument("embed_states: need K >= 2 classes");
  int max_state = 0;
  for (int s : trace) {
    if (s < 0) throw std::invalid_argument("embed_states: negative state");
    max_state = std::max(max_state, s);
  }
  if (n_states < 0) n_states = max_state + 1;
  if (max_state >= n_states) throw std::invalid_argument("embed_states: state out of range");
  NodeDataset ds;
  ds.state_embedding = state_embedding_map(n_states, d, c_x, seed);
  ds.c_x = c_x;
  ds.n_classes = K;
  ds.state_trace = trace;
  const int n = static_cast<int>(trace.size());
  ds.features = Matrix(n, d);
  ds.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    ds.features.row(i) = ds.state_embedding.row(trace[i]);
    ds.labels[i] = trace[i] % K;
  }
  return ds;
}

enum class Arity { kOneLayer, kTwoLayer };

struct GcnWeights {
  Arity arity = Arity::kOneLayer;
  Matrix w1;  // d x h (h = K for one-layer)
  Matrix w2;  // h x K (two-layer only; 0x0 otherwise)
  double c_w = 1.0;
};

// Scale a weight matrix back into the spectral ball of radius c_w.
inline void spectral_project(Matrix& w, double c_w) {
  double s = spectral_norm(w);
  if (s > c_w && s > 0.0) w *= c_w / s;
}

inline Matrix relu(Matrix m) {
  return m.cwiseMax(0.0);
}

inline Vector relu(Vector v) {
  return v.cwiseMax(0.0);
}

// Training-node one-layer logits: row j = ReLU((tilde X W1) row j).
inline Matrix forward_one_layer(const NodeDataset& ds, const NormalizedGraph& norm,
                                const GcnWeights& w) {
  if (w.arity != Arity::kOneLayer)
    throw std::invalid_argument("forward_one_layer: weights are not one-layer");
  if (norm.n != ds.features.rows() || w.w1.rows() != ds.features.cols())
    throw std::invalid_argument("forward_one_layer: dimension mismatch");
  return relu(Matrix(norm.tilde * ds.features * w.w1));
}

// New-node one-layer logits: linear aggregation over all n+1 feature rows.
// The display carries no activation; with_activation exists only for
// sensitivity studies and defaults off.
inline Vector forward_new_node_one_layer(const Matrix& features_np1,
                                         const std::vector<double>& attach,
                                         const GcnWeights& w,
                                         bool with_activation = false) {
  if (w.arity != Arity::kOneLayer)
    throw std::invalid_argument("forward_new_node_one_layer: weights are not one-layer");
  if (static_cast<int>(attach.size()) != features_np1.rows())
    throw std::invalid_argument("forward_new_node_one_layer: attach length mismatch");
  Vector agg = Vector::Zero(features_np1.cols());
  for (int k = 0; k < features_np1.rows(); ++k)
    if (attach[k] != 0.0) agg += attach[k] * features_np1.row(k).transpose();
  Vector out = w.w1.transpose() * agg;
  return with_activation ? relu(std::move(out)) : out;
}

// Training-node two-layer logits: ReLU(hat ReLU(hat X W1) W2).
inline Matrix forward_two_layer(const NodeDataset& ds, const NormalizedGraph& norm,
                                const GcnWeights& w) {
  if (w.arity != Arity::kTwoLayer)
    throw std::invalid_argument("forward_two_layer: weights are not two-layer");
  Matrix hidden = relu(Matrix(norm.hat * ds.features * w.w1));
  return relu(Matrix(norm.hat * hidden * w.w2));
}

// New-node two-layer logits.  attach holds A_{n+1,1..n+1}; the symmetric
// back-edges A_{j,n+1} = A_{n+1,j} feed the new node's feature into every
// neighbor's hidden state, and the final term covers a nonzero self
// coefficient A_{n+1,n+1}.
inline Vector forward_new_node_two_layer(const Matrix& features_np1,
                                         const NormalizedGraph& norm,
                                         const std::vector<double>& attach,
                                         const GcnWeights& w) {
  if (w.arity != Arity::kTwoLayer)
    throw std::invalid_argument("forward_new_node_two_layer: weights are not two-layer");
  const int n = norm.n;
  if (static_cast<int>(attach.size()) != n + 1 || features_np1.rows() != n + 1)
    throw std::invalid_argument("forward_new_node_two_layer: attach length mismatch");
  Vector x_new = features_np1.row(n).transpose();
  Vector agg = Vector::Zero(w.w2.cols());
  Matrix hidden_pre = norm.hat * features_np1.topRows(n) * w.w1;  // n x h
  for (int j = 0; j < n; ++j) {
    if (attach[j] == 0.0) continue;
    Vector hj = hidden_pre.row(j).transpose() + attach[j] * (w.w1.transpose() * x_new);
    agg += attach[j] * (w.w2.transpose() * relu(std::move(hj)));
  }
  if (attach[n] != 0.0) {
    Vector self_agg = Vector::Zero(features_np1.cols());
    for (int k = 0; k < n + 1; ++k)
      if (attach[k] != 0.0) self_agg += attach[k] * features_np1.row(k).transpose();
    Vector h_self = relu(Vector(w.w1.transpose() * self_agg));
    agg += attach[n] * (w.w2.transpose() * h_self);
  }
  return relu(std::move(agg));
}

// Cross-entropy after softmax, stabilized by max subtraction.
inline double loss_logsoftmax(const Vector& logits, int label) {
  const int k = static_cast<int>(logits.size());
  if (label < 0 || label >= k) throw std::invalid_argument("loss_logsoftmax: bad label");
  double mx = logits.maxCoeff();
  if (!std::isfinite(mx)) throw std::invalid_argument("loss_logsoftmax: non-finite logits");
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += std::exp(logits(i) - mx);
  return std::log(sum) - (logits(label) - mx);
}

struct LossSpec {
  int n_classes = 2;
  double lipschitz_l = 1.4142135623730951;  // sqrt(2) for log-softmax
  double loss_cap_m = 1.0;
  double relu_lipschitz = 1.0;
};

// Certified loss cap: admissible logits have euclidean norm at most
// B = c_x c_w c_a (one-layer) or c_x c_w^2 c_a^2 L_phi^2 (two-layer), and
// log-softmax on the radius-B ball is at most log K + 2B.
inline double loss_cap(double c_x, double c_w, double c_a, int n_classes, Arity arity,
                       double relu_lipschitz = 1.0) {
  if (!(c_x > 0.0 && c_w > 0.0 && c_a > 0.0) || n_classes < 2)
    throw std::invalid_argument("loss_cap: invalid constants");
  double b = arity == Arity::kOneLayer
                 ? c_x * c_w * c_a
                 : c_x * c_w * c_w * c_a * c_a * relu_lipschitz * relu_lipschitz;
  return std::log(static_cast<double>(n_classes)) + 2.0 * b;
}

inline LossSpec make_loss_spec(int n_classes, double c_x, double c_w, double c_a,
                               Arity arity) {
  LossSpec spec;
  spec.n_classes = n_classes;
  spec.loss_cap_m = loss_cap(c_x, c_w, c_a, n_classes, arity);
  return spec;
}

struct TrainConfig {
  Arity arity = Arity::kOneLayer;
  int hidden = 8;  // h (ignored for one-layer, where h = K)
  double lr = 0.5;
  int epochs = 50;
  double c_w = 1.0;
  std::uint64_t seed = 1;
};

namespace detail {
inline Matrix softmax_rows(const Matrix& u) {
  Matrix out(u.rows(), u.cols());
  for (int i = 0; i < u.rows(); ++i) {
    double mx = u.row(i).maxCoeff();
    double sum = 0.0;
    for (int j = 0; j < u.cols(); ++j) {
      out(i, j) = std::exp(u(i, j) - mx);
      sum += out(i, j);
    }
    out.row(i) /= sum;
  }
  return out;
}
}  // namespace detail

struct RiskAndGradients {
  double risk = 0.0;
  Matrix grad_w1;
  Matrix grad_w2;  // 0x0 for one-layer
};

// Empirical risk and its exact gradients (ReLU subgradient 0 at 0).
inline RiskAndGradients training_gradients(const GcnWeights& w, const NodeDataset& ds,
                                           const NormalizedGraph& norm) {
  const int n = static_cast<int>(ds.features.rows());
  RiskAndGradients out;
  if (w.arity == Arity::kOneLayer) {
    Matrix tx = norm.tilde * ds.features;  // n x d
    Matrix z = tx * w.w1;                  // n x K
    Matrix u = relu(z);
    Matrix g = detail::softmax_rows(u);    // dLoss/dU + one-hot correction
    for (int i = 0; i < n; ++i) {
      out.risk += loss_logsoftmax(u.row(i).transpose(), ds.labels[i]);
      g(i, ds.labels[i]) -= 1.0;
    }
    out.risk /= n;
    g /= static_cast<double>(n);
    Matrix mask = (z.array() > 0.0).cast<double>().matrix();
    out.grad_w1 = tx.transpose() * Matrix(g.cwiseProduct(mask));
  } else {
    Matrix hx = norm.hat * ds.features;     // n x d
    Matrix z1 = hx * w.w1;                  // n x h
    Matrix h = relu(z1);
    Matrix hh = norm.hat * h;               // n x h
    Matrix z2 = hh * w.w2;                  // n x K
    Matrix u = relu(z2);
    Matrix g2 = detail::softmax_rows(u);
    for (int i = 0; i < n; ++i) {
      out.risk += loss_logsoftmax(u.row(i).transpose(), ds.labels[i]);
      g2(i, ds.labels[i]) -= 1.0;
    }
    out.risk /= n;
    g2 /= static_cast<double>(n);
    Matrix mask2 = (z2.array() > 0.0).cast<double>().matrix();
    Matrix g2m = g2.cwiseProduct(mask2);
    out.grad_w2 = hh.transpose() * g2m;
    Matrix dh = norm.hat * (g2m * w.w2.transpose());  // hat is symmetric
    Matrix mask1 = (z1.array() > 0.0).cast<double>().matrix();
    out.grad_w1 = hx.transpose() * Matrix(dh.cwiseProduct(mask1));
  }
  return out;
}

inline GcnWeights init_weights(Arity arity, int d, int hidden, int n_classes, double c_w,
                               std::uint64_t seed) {
  GcnWeights w;
  w.arity = arity;
  w.c_w = c_w;
  Rng rng(derive_seed(seed, "weight_init"));
  const int h = arity == Arity::kOneLayer ? n_classes : hidden;
  w.w1 = Matrix(d, h);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < h; ++j) w.w1(i, j) = 0.3 * rng.gaussian() / std::sqrt(d);
  spectral_project(w.w1, c_w);
  if (arity == Arity::kTwoLayer) {
    w.w2 = Matrix(h, n_classes);
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < n_classes; ++j) w.w2(i, j) = 0.3 * rng.gaussian() / std::sqrt(h);
    spectral_project(w.w2, c_w);
  }
  return w;
}

// Full-batch gradient descent with spectral projection after every step.
inline GcnWeights train(const NodeDataset& ds, const NormalizedGraph& norm,
                        const TrainConfig& cfg) {
  if (cfg.epochs < 0 || !(cfg.lr >= 0.0))
    throw std::invalid_argument("train: bad epochs/learning rate");
  GcnWeights w = init_weights(cfg.arity, static_cast<int>(ds.features.cols()), cfg.hidden,
                              ds.n_classes, cfg.c_w, cfg.seed);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    RiskAndGradients rg = training_gradients(w, ds, norm);
    if (!std::isfinite(rg.risk))
      throw std::runtime_error("train: non-finite risk at epoch " + std::to_string(epoch));
    w.w1 -= cfg.lr * rg.grad_w1;
    spectral_project(w.w1, cfg.c_w);
    if (cfg.arity == Arity::kTwoLayer) {
      w.w2 -= cfg.lr * rg.grad_w2;
      spectral_project(w.w2, cfg.c_w);
    }
  }
  return w;
}

struct PosteriorPrior {
  GcnWeights posterior_mean;
  GcnWeights prior_mean;  // defaults to zero matrices of matching shape
  double sigma = 0.1;
  double alpha = 2.0;

  static PosteriorPrior around(const GcnWeights& trained, double sigma, double alpha) {
    if (!(sigma > 0.0)) throw std::invalid_argument("PosteriorPrior: sigma must be > 0");
    if (!(alpha > 0.0) || alpha == 1.0)
      throw std::invalid_argument("PosteriorPrior: alpha must lie in (0,1) or (1,inf)");
    PosteriorPrior pp;
    pp.posterior_mean = trained;
    pp.prior_mean = trained;
    pp.prior_mean.w1.setZero();
    if (trained.arity == Arity::kTwoLayer) pp.prior_mean.w2.setZero();
    pp.sigma = sigma;
    pp.alpha = alpha;
    return pp;
  }
};

// Draw from the posterior: isotropic Gaussian noise around the mean, then
// spectral projection back into the admissible ball.  (The divergence
// below is computed for the unprojected Gaussian pair.)
inline GcnWeights sample_posterior(const PosteriorPrior& pp, std::uint64_t seed) {
  GcnWeights w = pp.posterior_mean;
  Rng rng(derive_seed(seed, "posterior_draw"));
  for (int i = 0; i < w.w1.rows(); ++i)
    for (int j = 0; j < w.w1.cols(); ++j) w.w1(i, j) += pp.sigma * rng.gaussian();
  spectral_project(w.w1, w.c_w);
  if (w.arity == Arity::kTwoLayer) {
    for (int i = 0; i < w.w2.rows(); ++i)
      for (int j = 0; j < w.w2.cols(); ++j) w.w2(i, j) += pp.sigma * rng.gaussian();
    spectral_project(w.w2, w.c_w);
  }
  return w;
}

// Renyi divergence between two isotropic Gaussians with shared sigma:
// alpha ||mu_Q - mu_P||^2 / (2 sigma^2), over all vectorized coordinates.
inline double renyi_gaussian(const PosteriorPrior& pp) {
  if (!(pp.sigma > 0.0)) throw std::invalid_argument("renyi_gaussian: sigma must be > 0");
  double sq = (pp.posterior_mean.w1 - pp.prior_mean.w1).squaredNorm();
  if (pp.posterior_mean.arity == Arity::kTwoLayer)
    sq += (pp.posterior_mean.w2 - pp.prior_mean.w2).squaredNorm();
  return pp.alpha * sq / (2.0 * pp.sigma * pp.sigma);
}

}  // namespace gcnbound

#endif  // GCNBOUND_GCN_HPP
