// Experiment configuration: a single JSON document parsed into typed
// specs with field-by-field validation diagnostics.
#ifndef GCNBOUND_CONFIG_HPP
#define GCNBOUND_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gcnbound/gcn.hpp"
#include "gcnbound/markov.hpp"

namespace gcnbound {

using Json = nlohmann::json;

// Configuration problems carry the offending field path so the CLI can
// report them and exit with the config-error status.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {

inline const Json& require_key(const Json& j, const std::string& section,
                               const std::string& key) {
  if (!j.contains(key)) throw ConfigError(section + "." + key + ": missing required field");
  return j.at(key);
}

template <typename T>
inline T get_or(const Json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

}  // namespace detail

struct ChainSpec {
  int n_states = 3;
  std::vector<double> p = {0.2, 0.3, 0.5};
  std::vector<double> alphas = {0.1, 0.2, 0.3};
  std::vector<double> initial;  // defaults to p
  // Optional explicit kernel (row-major rows).  When present it replaces
  // the hold-or-redraw construction; this is how an exactly-i.i.d. kernel
  // (all rows equal) is expressed, which the (p, alphas) family only
  // reaches in the alphas -> 0 limit.
  std::vector<std::vector<double>> transition;

  FiniteMarkovChain build() const {
    CategoricalDist init = CategoricalDist::from(initial.empty() ? p : initial);
    if (!transition.empty()) {
      const int n = static_cast<int>(transition.size());
      Matrix t(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t(i, j) = transition[i][j];
      return FiniteMarkovChain::create(std::move(t), std::move(init));
    }
    FiniteMarkovChain chain = build_example_chain(CategoricalDist::from(p), alphas);
    if (!initial.empty())
      return FiniteMarkovChain::create(chain.transition, std::move(init));
    return chain;
  }
};

struct GraphSpec {
  std::string family = "uniform";  // uniform | hub_leaf
  int n = 64;
  int k = 2;            // hubs (hub_leaf) or target degree (uniform)
  int m_ll = 0;         // leaf-leaf edges (hub_leaf only)
  int leaf_degree = 1;  // minimum hub links per leaf (hub_leaf only)
  double hub_fraction = 1.0;
  std::string attachment = "perturbed";  // perturbed | auxiliary
  bool resample_per_trial = true;

  UndirectedGraph build(int nodes, std::uint64_t seed) const {
    if (family == "hub_leaf")
      return hub_leaf_generate(nodes, k, leaf_degree, m_ll, seed, hub_fraction);
    if (family == "uniform") return uniform_generate(nodes, k, seed);
    throw ConfigError("graph.family: unknown family '" + family + "'");
  }
};

struct ModelSpec {
  Arity arity = Arity::kOneLayer;
  int d = 8;
  int h = 8;
  int n_classes = 3;  // K
  double c_x = 1.0;
  double c_w = 1.0;
  double lr = 0.5;
  int epochs = 60;
  double sigma = 0.1;
  double alpha_renyi = 2.0;
  bool new_node_activation = false;
};

struct BoundSpec {
  double delta = 0.1;
  std::string gamma_norm = "inf";  // inf | op
};

struct RunSpec {
  std::uint64_t master_seed = 1;
  std::vector<std::uint64_t> explicit_seeds;  // optional override
  int n_trials = 50;
  int n_weight_samples = 32;
  std::vector<int> sweep;
  std::string output_dir = "results";

  std::vector<std::uint64_t> trial_seeds() const {
    if (!explicit_seeds.empty()) return explicit_seeds;
    std::vector<std::uint64_t> seeds(n_trials);
    for (int i = 0; i < n_trials; ++i) seeds[i] = derive_seed(master_seed, "trial", i);
    return seeds;
  }
};

struct ExperimentConfig {
  ChainSpec chain;
  GraphSpec graph;
  ModelSpec model;
  BoundSpec bound;
  RunSpec run;

  static ExperimentConfig from_json(const Json& j);
  static ExperimentConfig defaults() { return ExperimentConfig{}; }
  Json to_json() const;
};

inline ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  ExperimentConfig cfg;
  if (j.contains("chain")) {
    const Json& c = j.at("chain");
    cfg.chain.n_states = detail::get_or<int>(c, "N", 3);
    cfg.chain.p = detail::require_key(c, "chain", "p").get<std::vector<double>>();
    cfg.chain.transition =
        detail::get_or<std::vector<std::vector<double>>>(c, "transition", {});
    if (cfg.chain.transition.empty()) {
      cfg.chain.alphas =
          detail::require_key(c, "chain", "alphas").get<std::vector<double>>();
    } else {
      cfg.chain.alphas = detail::get_or<std::vector<double>>(c, "alphas", {});
    }
    cfg.chain.initial = detail::get_or<std::vector<double>>(c, "initial", {});
    if (static_cast<int>(cfg.chain.p.size()) != cfg.chain.n_states)
      throw ConfigError("chain.p: expected " + std::to_string(cfg.chain.n_states) +
                        " entries");
    if (cfg.chain.transition.empty()) {
      if (cfg.chain.alphas.size() != cfg.chain.p.size())
        throw ConfigError("chain.alphas: dimension must match chain.p");
      for (double a : cfg.chain.alphas)
        if (!(a > 0.0 && a < 1.0))
          throw ConfigError("chain.alphas: entries must lie in (0,1), got " +
                            std::to_string(a));
    } else {
      if (static_cast<int>(cfg.chain.transition.size()) != cfg.chain.n_states)
        throw ConfigError("chain.transition: expected " +
                          std::to_string(cfg.chain.n_states) + " rows");
      for (const auto& row : cfg.chain.transition)
        if (static_cast<int>(row.size()) != cfg.chain.n_states)
          throw ConfigError("chain.transition: every row needs " +
                            std::to_string(cfg.chain.n_states) + " entries");
    }
    if (!cfg.chain.initial.empty() && cfg.chain.initial.size() != cfg.chain.p.size())
      throw ConfigError("chain.initial: dimension must match chain.p");
  } else {
    cfg.chain.p = {0.2, 0.3, 0.5};
    cfg.chain.alphas = {0.1, 0.2, 0.3};
  }
  if (j.contains("graph")) {
    const Json& g = j.at("graph");
    cfg.graph.family = detail::get_or<std::string>(g, "family", "uniform");
    if (cfg.graph.family != "uniform" && cfg.graph.family != "hub_leaf")
      throw ConfigError("graph.family: must be 'uniform' or 'hub_leaf'");
    cfg.graph.n = detail::get_or<int>(g, "n", 64);
    cfg.graph.k = detail::get_or<int>(g, "k", 2);
    cfg.graph.m_ll = detail::get_or<int>(g, "m_ll", 0);
    cfg.graph.leaf_degree = detail::get_or<int>(g, "leaf_degree", 1);
    cfg.graph.hub_fraction = detail::get_or<double>(g, "hub_fraction", 1.0);
    cfg.graph.attachment = detail::get_or<std::string>(g, "attachment", "perturbed");
    cfg.graph.resample_per_trial = detail::get_or<bool>(g, "resample_per_trial", true);
    if (cfg.graph.n < 2) throw ConfigError("graph.n: must be >= 2");
    if (cfg.graph.k < 1) throw ConfigError("graph.k: must be >= 1");
    if (cfg.graph.m_ll < 0) throw ConfigError("graph.m_ll: must be >= 0");
    if (cfg.graph.leaf_degree < 1) throw ConfigError("graph.leaf_degree: must be >= 1");
    if (!(cfg.graph.hub_fraction > 0.0 && cfg.graph.hub_fraction <= 1.0))
      throw ConfigError("graph.hub_fraction: must lie in (0,1]");
    if (cfg.graph.attachment != "perturbed" && cfg.graph.attachment != "auxiliary")
      throw ConfigError("graph.attachment: must be 'perturbed' or 'auxiliary'");
  }
  if (j.contains("model")) {
    const Json& m = j.at("model");
    std::string arity = detail::get_or<std::string>(m, "arity", "one_layer");
    if (arity == "one_layer") {
      cfg.model.arity = Arity::kOneLayer;
    } else if (arity == "two_layer") {
      cfg.model.arity = Arity::kTwoLayer;
    } else {
      throw ConfigError("model.arity: must be 'one_layer' or 'two_layer'");
    }
    cfg.model.d = detail::get_or<int>(m, "d", 8);
    cfg.model.h = detail::get_or<int>(m, "h", 8);
    cfg.model.n_classes = detail::get_or<int>(m, "K", 3);
    cfg.model.c_x = detail::get_or<double>(m, "c_x", 1.0);
    cfg.model.c_w = detail::get_or<double>(m, "c_w", 1.0);
    cfg.model.lr = detail::get_or<double>(m, "lr", 0.5);
    cfg.model.epochs = detail::get_or<int>(m, "epochs", 60);
    cfg.model.sigma = detail::get_or<double>(m, "sigma", 0.1);
    cfg.model.alpha_renyi = detail::get_or<double>(m, "alpha_renyi", 2.0);
    cfg.model.new_node_activation = detail::get_or<bool>(m, "new_node_activation", false);
    if (cfg.model.d < 1) throw ConfigError("model.d: must be >= 1");
    if (cfg.model.h < 1) throw ConfigError("model.h: must be >= 1");
    if (cfg.model.n_classes < 2) throw ConfigError("model.K: must be >= 2");
    if (!(cfg.model.c_x > 0.0)) throw ConfigError("model.c_x: must be > 0");
    if (!(cfg.model.c_w > 0.0)) throw ConfigError("model.c_w: must be > 0");
    if (!(cfg.model.lr >= 0.0)) throw ConfigError("model.lr: must be >= 0");
    if (cfg.model.epochs < 0) throw ConfigError("model.epochs: must be >= 0");
    if (!(cfg.model.sigma > 0.0)) throw ConfigError("model.sigma: must be > 0");
    if (!(cfg.model.alpha_renyi > 0.0) || cfg.model.alpha_renyi == 1.0)
      throw ConfigError("model.alpha_renyi: must lie in (0,1) or (1,inf)");
  }
  if (j.contains("bound")) {
    const Json& b = j.at("bound");
    cfg.bound.delta = detail::get_or<double>(b, "delta", 0.1);
    cfg.bound.gamma_norm = detail::get_or<std::string>(b, "gamma_norm", "inf");
    if (!(cfg.bound.delta > 0.0 && cfg.bound.delta < 1.0))
      throw ConfigError("bound.delta: must lie in (0,1)");
    if (cfg.bound.gamma_norm != "inf" && cfg.bound.gamma_norm != "op")
      throw ConfigError("bound.gamma_norm: must be 'inf' or 'op'");
  }
  if (j.contains("run")) {
    const Json& r = j.at("run");
    if (r.contains("seeds")) {
      const Json& s = r.at("seeds");
      if (s.is_array()) {
        cfg.run.explicit_seeds = s.get<std::vector<std::uint64_t>>();
        if (cfg.run.explicit_seeds.empty())
          throw ConfigError("run.seeds: list must be non-empty");
        cfg.run.n_trials = static_cast<int>(cfg.run.explicit_seeds.size());
      } else {
        cfg.run.master_seed = s.get<std::uint64_t>();
      }
    }
    cfg.run.master_seed = detail::get_or<std::uint64_t>(r, "master_seed", cfg.run.master_seed);
    if (cfg.run.explicit_seeds.empty())
      cfg.run.n_trials = detail::get_or<int>(r, "n_trials", cfg.run.n_trials);
    cfg.run.n_weight_samples = detail::get_or<int>(r, "n_weight_samples", 32);
    cfg.run.sweep = detail::get_or<std::vector<int>>(r, "sweep", {});
    cfg.run.output_dir = detail::get_or<std::string>(r, "output_dir", "results");
    if (cfg.run.n_trials < 1) throw ConfigError("run.n_trials: must be >= 1");
    if (cfg.run.n_weight_samples < 1) throw ConfigError("run.n_weight_samples: must be >= 1");
    for (int n : cfg.run.sweep)
      if (n < 2) throw ConfigError("run.sweep: every n must be >= 2");
  }
  if (cfg.model.n_classes > cfg.chain.n_states)
    throw ConfigError("model.K: cannot exceed chain.N (labels are state mod K)");
  return cfg;
}

inline Json ExperimentConfig::to_json() const {
  Json j;
  j["chain"] = {{"N", chain.n_states}, {"p", chain.p}, {"alphas", chain.alphas}};
  if (!chain.transition.empty()) j["chain"]["transition"] = chain.transition;
  if (!chain.initial.empty()) j["chain"]["initial"] = chain.initial;
  j["graph"] = {{"family", graph.family},
                {"n", graph.n},
                {"k", graph.k},
                {"m_ll", graph.m_ll},
                {"leaf_degree", graph.leaf_degree},
                {"hub_fraction", graph.hub_fraction},
                {"attachment", graph.attachment},
                {"resample_per_trial", graph.resample_per_trial}};
  j["model"] = {{"arity", model.arity == Arity::kOneLayer ? "one_layer" : "two_layer"},
                {"d", model.d},
                {"h", model.h},
                {"K", model.n_classes},
                {"c_x", model.c_x},
                {"c_w", model.c_w},
                {"lr", model.lr},
                {"epochs", model.epochs},
                {"sigma", model.sigma},
                {"alpha_renyi", model.alpha_renyi},
                {"new_node_activation", model.new_node_activation}};
  j["bound"] = {{"delta", bound.delta}, {"gamma_norm", bound.gamma_norm}};
  j["run"] = {{"master_seed", run.master_seed},
              {"n_trials", run.n_trials},
              {"n_weight_samples", run.n_weight_samples},
              {"sweep", run.sweep},
              {"output_dir", run.output_dir}};
  if (!run.explicit_seeds.empty()) j["run"]["seeds"] = run.explicit_seeds;
  return j;
}

inline ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config parse error in ") + path + ": " + e.what());
  }
  try {
    return ExperimentConfig::from_json(j);
  } catch (const ConfigError&) {
    throw;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config field error in ") + path + ": " + e.what());
  }
}

}  // namespace gcnbound

#endif  // GCNBOUND_CONFIG_HPP
