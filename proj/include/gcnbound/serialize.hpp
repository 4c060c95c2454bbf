// JSON (de)serialization for the domain types and deterministic numeric
// formatting for CSV output.
#ifndef GCNBOUND_SERIALIZE_HPP
#define GCNBOUND_SERIALIZE_HPP

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "gcnbound/bounds.hpp"
#include "gcnbound/gcn.hpp"
#include "gcnbound/graph.hpp"
#include "gcnbound/markov.hpp"

namespace gcnbound {

// 17 significant digits: enough to round-trip any double, and identical
// output across runs for identical bits.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline nlohmann::json chain_to_json(const FiniteMarkovChain& chain) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(chain.n_states) * chain.n_states);
  for (int i = 0; i < chain.n_states; ++i)
    for (int j = 0; j < chain.n_states; ++j) flat.push_back(chain.transition(i, j));
  return {{"n_states", chain.n_states},
          {"transition", flat},
          {"initial", chain.initial.probs}};
}

inline FiniteMarkovChain chain_from_json(const nlohmann::json& j) {
  int n = j.at("n_states").get<int>();
  auto flat = j.at("transition").get<std::vector<double>>();
  if (static_cast<int>(flat.size()) != n * n)
    throw std::invalid_argument("chain_from_json: transition length != n_states^2");
  Matrix t(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) t(i, k) = flat[static_cast<std::size_t>(i) * n + k];
  return FiniteMarkovChain::create(
      std::move(t), CategoricalDist::from(j.at("initial").get<std::vector<double>>()));
}

inline nlohmann::json graph_to_json(const UndirectedGraph& g) {
  std::vector<std::vector<int>> edges;
  edges.reserve(g.edges.size());
  for (auto [a, b] : g.edges) edges.push_back({a, b});
  return {{"n", g.n}, {"edges", edges}};
}

inline UndirectedGraph graph_from_json(const nlohmann::json& j) {
  int n = j.at("n").get<int>();
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  return UndirectedGraph::from_edges(n, std::move(edges));
}

namespace detail {
inline nlohmann::json matrix_to_json(const Matrix& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.rows()) * m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", flat}};
}
inline Matrix matrix_from_json(const nlohmann::json& j) {
  int rows = j.at("rows").get<int>();
  int cols = j.at("cols").get<int>();
  auto flat = j.at("data").get<std::vector<double>>();
  if (static_cast<int>(flat.size()) != rows * cols)
    throw std::invalid_argument("matrix_from_json: data length mismatch");
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) m(i, k) = flat[static_cast<std::size_t>(i) * cols + k];
  return m;
}
}  // namespace detail

inline nlohmann::json weights_to_json(const GcnWeights& w) {
  nlohmann::json j = {{"arity", w.arity == Arity::kOneLayer ? "one_layer" : "two_layer"},
                      {"c_w", w.c_w},
                      {"w1", detail::matrix_to_json(w.w1)}};
  if (w.arity == Arity::kTwoLayer) j["w2"] = detail::matrix_to_json(w.w2);
  return j;
}

inline GcnWeights weights_from_json(const nlohmann::json& j) {
  GcnWeights w;
  std::string arity = j.at("arity").get<std::string>();
  if (arity == "one_layer") {
    w.arity = Arity::kOneLayer;
  } else if (arity == "two_layer") {
    w.arity = Arity::kTwoLayer;
  } else {
    throw std::invalid_argument("weights_from_json: bad arity " + arity);
  }
  w.c_w = j.at("c_w").get<double>();
  w.w1 = detail::matrix_from_json(j.at("w1"));
  if (w.arity == Arity::kTwoLayer) w.w2 = detail::matrix_from_json(j.at("w2"));
  return w;
}

inline nlohmann::json attachment_to_json(const AttachmentDistribution& d) {
  return {{"kind", d.kind == AttachmentKind::kAuxiliary ? "auxiliary" : "perturbed"},
          {"n", d.n_nodes},
          {"coefficient_bound", d.coefficient_bound},
          {"atoms", d.atoms},
          {"probs", d.probs.probs}};
}

inline AttachmentDistribution attachment_from_json(const nlohmann::json& j) {
  AttachmentDistribution d;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "auxiliary") {
    d.kind = AttachmentKind::kAuxiliary;
  } else if (kind == "perturbed") {
    d.kind = AttachmentKind::kPerturbed;
  } else {
    throw std::invalid_argument("attachment_from_json: bad kind " + kind);
  }
  d.n_nodes = j.at("n").get<int>();
  d.coefficient_bound = j.at("coefficient_bound").get<double>();
  d.atoms = j.at("atoms").get<std::vector<std::vector<double>>>();
  d.probs = CategoricalDist::from(j.at("probs").get<std::vector<double>>());
  return d;
}

inline nlohmann::json bound_report_to_json(const BoundReport& r) {
  nlohmann::json terms;
  for (const auto& [name, value] : r.terms) terms[name] = value;
  nlohmann::json j = {{"kind", r.kind},   {"n", r.n},         {"alpha", r.alpha},
                      {"delta", r.delta}, {"d_alpha", r.d_alpha},
                      {"terms", terms},   {"total", r.total}};
  if (!r.term2_method.empty()) j["term2_method"] = r.term2_method;
  return j;
}

}  // namespace gcnbound

#endif  // GCNBOUND_SERIALIZE_HPP
