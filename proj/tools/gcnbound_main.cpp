// Command-line harness: invariant suites, seeded trials, sweeps over the
// node count, and single-instance bound reports.
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "gcnbound/checks.hpp"
#include "gcnbound/config.hpp"
#include "gcnbound/serialize.hpp"
#include "gcnbound/trial.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigError = 2;

std::filesystem::path output_dir(const gcnbound::ExperimentConfig& cfg) {
  const char* env = std::getenv("GCNBOUND_OUTPUT_DIR");
  std::filesystem::path dir = env && *env ? env : cfg.run.output_dir;
  std::filesystem::create_directories(dir);
  return dir;
}

gcnbound::ExperimentConfig load_or_default(const std::string& config_path) {
  if (config_path.empty()) return gcnbound::ExperimentConfig::defaults();
  return gcnbound::load_config_file(config_path);
}

int cmd_verify(const std::string& config_path, const std::string& only) {
  auto cfg = load_or_default(config_path);
  std::vector<std::string> modules;
  if (only.empty()) {
    modules = gcnbound::check_module_names();
  } else {
    const auto& known = gcnbound::check_module_names();
    if (std::find(known.begin(), known.end(), only) == known.end()) {
      std::cerr << "error: unknown module '" << only << "'; expected one of:";
      for (const auto& name : known) std::cerr << ' ' << name;
      std::cerr << '\n';
      return kExitConfigError;
    }
    modules = {only};
  }

  nlohmann::json report;
  report["modules"] = nlohmann::json::object();
  int failures = 0, total = 0;
  for (const auto& module : modules) {
    auto results = gcnbound::run_module_checks(module);
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& r : results) {
      ++total;
      if (!r.pass) ++failures;
      std::cout << (r.pass ? "PASS" : "FAIL") << "  " << module << "." << r.name;
      if (!r.pass) std::cout << "  (" << r.detail << ")";
      std::cout << '\n';
      entries.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    }
    report["modules"][module] = entries;
  }
  report["total"] = total;
  report["failures"] = failures;
  report["pass"] = failures == 0;

  auto dir = output_dir(cfg);
  std::ofstream out(dir / "verify_report.json");
  out << report.dump(2) << '\n';
  std::cout << (failures == 0 ? "verify: all " : "verify: FAILED ")
            << (failures == 0 ? std::to_string(total) + " checks passed"
                              : std::to_string(failures) + "/" + std::to_string(total) +
                                    " checks failed")
            << '\n';
  return failures == 0 ? kExitPass : kExitCheckFailure;
}

// Least-squares slope of log(y) on log(n); NaN when any mean is <= 0.
double log_log_slope(const std::vector<int>& ns, const std::vector<double>& means) {
  for (double m : means)
    if (!(m > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int k = static_cast<int>(ns.size());
  for (int i = 0; i < k; ++i) {
    double x = std::log(static_cast<double>(ns[i])), y = std::log(means[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = k * sxx - sx * sx;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (k * sxy - sx * sy) / denom;
}

struct ColumnStats {
  std::vector<double> mean, se;  // one entry per sweep n
  double slope = 0.0;
};

int cmd_sweep(const std::string& config_path, int jobs) {
  auto cfg = load_or_default(config_path);
  if (cfg.run.sweep.empty()) {
    std::cerr << "error: run.sweep must list at least one n value\n";
    return kExitConfigError;
  }
  if (jobs < 1) jobs = 1;
  auto seeds = cfg.run.trial_seeds();

  struct Job {
    int n;
    std::uint64_t seed;
  };
  std::vector<Job> job_list;
  for (int n : cfg.run.sweep)
    for (auto seed : seeds) job_list.push_back({n, seed});

  std::vector<gcnbound::TrialRecord> records(job_list.size());
  std::vector<std::string> errors(job_list.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= job_list.size()) return;
      gcnbound::ExperimentConfig local = cfg;
      local.graph.n = job_list[i].n;
      try {
        records[i] = gcnbound::run_trial(local, job_list[i].seed);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  int n_threads = std::min<int>(jobs, static_cast<int>(job_list.size()));
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < job_list.size(); ++i)
    if (!errors[i].empty()) {
      std::cerr << "error: trial n=" << job_list[i].n << " seed=" << job_list[i].seed
                << ": " << errors[i] << '\n';
      return kExitCheckFailure;
    }

  auto dir = output_dir(cfg);
  {
    std::ofstream trials(dir / "trials.csv");
    std::ofstream bounds(dir / "bounds.csv");
    trials << gcnbound::trial_csv_header(records.front()) << '\n';
    bounds << gcnbound::bound_csv_header(records.front().model_report) << '\n';
    for (const auto& rec : records) {
      trials << gcnbound::trial_csv_row(rec) << '\n';
      bounds << gcnbound::bound_csv_row(rec.seed, rec.model_report) << '\n';
    }
  }

  // Summary: per-n means and standard errors for the gap and every bound
  // term, plus the log-log slope of each term's per-n mean (repeated in
  // every row so the schema stays flat).
  const auto& term_names = records.front().model_report.terms;
  std::vector<std::string> columns = {"posterior_gap_mean", "bound_total"};
  for (const auto& [name, v] : term_names) columns.push_back("bound_" + name);
  columns.push_back("ergodic_total");

  auto column_value = [](const gcnbound::TrialRecord& rec, const std::string& col) {
    if (col == "posterior_gap_mean") return rec.posterior_gap_mean;
    if (col == "bound_total") return rec.model_report.total;
    if (col == "ergodic_total") return rec.ergodic_report.total;
    return rec.model_report.term(col.substr(6));  // strip "bound_"
  };

  std::vector<ColumnStats> stats(columns.size());
  const int trials_per_n = static_cast<int>(seeds.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    for (std::size_t block = 0; block < cfg.run.sweep.size(); ++block) {
      double sum = 0.0, sum_sq = 0.0;
      for (int t = 0; t < trials_per_n; ++t) {
        double v = column_value(records[block * trials_per_n + t], columns[c]);
        sum += v;
        sum_sq += v * v;
      }
      double mean = sum / trials_per_n;
      double var = trials_per_n > 1
                       ? std::max(0.0, (sum_sq - trials_per_n * mean * mean) /
                                           (trials_per_n - 1))
                       : 0.0;
      stats[c].mean.push_back(mean);
      stats[c].se.push_back(std::sqrt(var / trials_per_n));
    }
    stats[c].slope = log_log_slope(cfg.run.sweep, stats[c].mean);
  }

  {
    std::ofstream summary(dir / "summary.csv");
    summary << "n,trials";
    for (const auto& col : columns)
      summary << ',' << col << "_mean," << col << "_se," << col << "_slope";
    summary << '\n';
    for (std::size_t block = 0; block < cfg.run.sweep.size(); ++block) {
      summary << cfg.run.sweep[block] << ',' << trials_per_n;
      for (std::size_t c = 0; c < columns.size(); ++c)
        summary << ',' << gcnbound::fmt_double(stats[c].mean[block]) << ','
                << gcnbound::fmt_double(stats[c].se[block]) << ','
                << gcnbound::fmt_double(stats[c].slope);
      summary << '\n';
    }
  }

  std::cout << "sweep: wrote " << job_list.size() << " trials across "
            << cfg.run.sweep.size() << " n values to " << dir.string() << '\n';
  return kExitPass;
}

int cmd_bound_report(const std::string& config_path, int n) {
  auto cfg = load_or_default(config_path);
  if (n > 0) cfg.graph.n = n;
  if (cfg.graph.n < 2) {
    std::cerr << "error: n must be >= 2\n";
    return kExitConfigError;
  }
  auto seeds = cfg.run.trial_seeds();
  auto rec = gcnbound::run_trial(cfg, seeds.front());

  nlohmann::json j = {{"n", rec.n},
                      {"seed", rec.seed},
                      {"bound", gcnbound::bound_report_to_json(rec.model_report)},
                      {"ergodic_bound", gcnbound::bound_report_to_json(rec.ergodic_report)},
                      {"ingredients", gcnbound::ingredients_to_json(rec)},
                      {"config", cfg.to_json()}};
  std::string text = j.dump(2);
  std::cout << text << '\n';
  auto dir = output_dir(cfg);
  std::ofstream out(dir / ("bound_report_n" + std::to_string(rec.n) + ".json"));
  out << text << '\n';
  return kExitPass;
}

int cmd_trial(const std::string& config_path, std::uint64_t seed) {
  auto cfg = load_or_default(config_path);
  auto rec = gcnbound::run_trial(cfg, seed);
  std::cout << gcnbound::trial_record_to_json(rec).dump() << '\n';
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification harness for inductive-node generalization bounds"};
  app.require_subcommand(1);

  std::string config_path, only_module;
  int jobs = 1, report_n = 0;
  std::uint64_t trial_seed = 1;

  auto* verify = app.add_subcommand("verify", "run the per-module invariant suites");
  verify->add_option("--config", config_path, "JSON config file");
  verify->add_option("--only", only_module, "restrict to one module");

  auto* sweep = app.add_subcommand("sweep", "run seeded trials for every n in run.sweep");
  sweep->add_option("--config", config_path, "JSON config file");
  sweep->add_option("--jobs", jobs, "max concurrent trials")->check(CLI::PositiveNumber);

  auto* bound_report =
      app.add_subcommand("bound-report", "single-instance bound breakdown as JSON");
  bound_report->add_option("--config", config_path, "JSON config file");
  bound_report->add_option("--n", report_n, "override the node count");

  auto* trial = app.add_subcommand("trial", "run one seeded trial, print a JSON record");
  trial->add_option("--config", config_path, "JSON config file");
  trial->add_option("--seed", trial_seed, "trial seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (verify->parsed()) return cmd_verify(config_path, only_module);
    if (sweep->parsed()) return cmd_sweep(config_path, jobs);
    if (bound_report->parsed()) return cmd_bound_report(config_path, report_n);
    if (trial->parsed()) return cmd_trial(config_path, trial_seed);
  } catch (const gcnbound::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailure;
  }
  return kExitConfigError;
}
