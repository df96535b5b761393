#ifndef SSHNET_EXPERIMENT_HPP_
#define SSHNET_EXPERIMENT_HPP_

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sshnet/diagnostics.hpp"
#include "sshnet/distributions.hpp"
#include "sshnet/errors.hpp"
#include "sshnet/evidence.hpp"
#include "sshnet/gibbs.hpp"
#include "sshnet/io.hpp"
#include "sshnet/kernel.hpp"
#include "sshnet/netsim.hpp"
#include "sshnet/parallel.hpp"

namespace sshnet {

// Reporting-only threshold: a module is flagged inactive below this norm.
constexpr double kInactiveNormThreshold = 0.1;

struct Preset {
  std::string name;
  Eigen::Index p, q, n, m;
  double snr;
  std::int64_t iters;
};

inline Preset preset_by_name(const std::string& name) {
  if (name == "desk") return {"desk", 20, 3, 500, 100, 10.0, 20000};
  if (name == "paper-5.1") return {"paper-5.1", 50, 3, 1000, 200, 10.0, 200000};
  throw UsageError("unknown preset '" + name + "' (expected desk|paper-5.1)");
}

// "0.8:0.05:0.95,0.99" -> {0.8, 0.85, 0.9, 0.95, 0.99}. Items are single
// values or inclusive start:step:end ranges.
inline std::vector<double> parse_alpha_grid(const std::string& spec) {
  std::vector<double> out;
  std::stringstream items(spec);
  std::string item;
  auto to_double = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw UsageError("malformed alpha grid '" + spec + "'");
    }
  };
  while (std::getline(items, item, ',')) {
    if (item.empty()) continue;
    const auto c1 = item.find(':');
    if (c1 == std::string::npos) {
      out.push_back(to_double(item));
      continue;
    }
    const auto c2 = item.find(':', c1 + 1);
    if (c2 == std::string::npos) throw UsageError("alpha range must be start:step:end");
    const double start = to_double(item.substr(0, c1));
    const double step = to_double(item.substr(c1 + 1, c2 - c1 - 1));
    const double end = to_double(item.substr(c2 + 1));
    if (!(step > 0.0) || end < start) throw UsageError("alpha range must be increasing");
    const auto count = static_cast<long>(std::floor((end - start) / step + 1e-9));
    for (long i = 0; i <= count; ++i) {
      // round to 12 decimals so 0.8 + 2 * 0.05 prints as 0.9
      const double v = std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12;
      out.push_back(v);
    }
  }
  if (out.empty()) throw UsageError("empty alpha grid");
  return out;
}

struct IdentifyOptions {
  std::optional<double> alpha;
  std::vector<double> alpha_grid;
  ChainConfig chain;

  void validate() const {
    if (alpha.has_value() == !alpha_grid.empty()) {
      throw UsageError("exactly one of --alpha / --alpha-grid must be given");
    }
    chain.validate();
  }
};

struct IdentifyResult {
  double alpha = 0.0;
  ChainRecord chain;
  PosteriorSummary summary;
  std::optional<AlphaSelection> selection;
  double seconds = 0.0;
};

inline IdentifyResult identify(const NetworkDataset& ds, const IdentifyOptions& opts) {
  opts.validate();
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const RegressorSet regs = ds.regressors();
  IdentifyResult out;
  if (opts.alpha) {
    const StableSplineKernel kernel(ds.m, *opts.alpha);
    out.alpha = *opts.alpha;
    out.chain = run_chain(ds.outputs, regs, kernel, opts.chain);
  } else {
    AlphaSelection sel = select_alpha(opts.alpha_grid, ds.outputs, regs, opts.chain);
    out.alpha = sel.alpha_best;
    out.chain = sel.chains[sel.best_index];
    // keep only the evidence records; chains of the losing grid values are large
    sel.chains.clear();
    out.selection = std::move(sel);
  }
  out.summary = summarize_posterior(out.chain, ds.truth);
  out.seconds = std::chrono::duration<double>(clock::now() - t0).count();
  return out;
}

inline json chain_config_to_json(const ChainConfig& c) {
  json j;
  j["n_iters"] = c.n_iters;
  j["burn_in_fraction"] = c.burn_in_fraction;
  j["burn_in_sweeps"] = c.burn_in();
  j["thin"] = c.thin;
  j["theta_init_value"] = c.theta_init_value;
  j["variance_init"] = c.variance_init;
  j["seed"] = c.seed;
  j["evidence_stride"] = c.evidence_stride ? json(*c.evidence_stride) : json(nullptr);
  j["residual_refresh"] = c.residual_refresh;
  j["store_theta_samples"] = c.store_theta_samples;
  j["sweep_order"] = "theta_1..p, sigma2, lambda2_1..p, tau2, nu_1..p, xi";
  j["posterior_mean_over"] = "all post-burn-in sweeps";
  return j;
}

inline json evidence_to_json(const EvidenceRecord& r) {
  json j;
  j["alpha"] = r.alpha;
  j["best_log_ml"] = r.best_log_ml;
  json trace = json::array();
  for (const auto& [sweep, v] : r.log_ml_trace) trace.push_back({sweep, v});
  j["trace"] = std::move(trace);
  j["best_hyperparams"] = {{"sigma2", r.best_hyperparams.sigma2},
                           {"tau2", r.best_hyperparams.tau2},
                           {"lambda2", vector_to_json(r.best_hyperparams.lambda2)}};
  return j;
}

// Report JSON. Module indices in maps are 1-based strings.
inline json report_to_json(const IdentifyResult& res, const NetworkDataset& ds,
                           const IdentifyOptions& opts, const json& extra_config = json::object()) {
  json j;
  json config = extra_config;
  config["dims"] = {{"n", ds.n}, {"m", ds.m}, {"p", ds.p}};
  config["dataset_seed"] = ds.seed;
  config["input_kind"] = to_string(ds.input_kind);
  if (opts.alpha) config["alpha"] = *opts.alpha;
  if (!opts.alpha_grid.empty()) config["alpha_grid"] = opts.alpha_grid;
  config["chain"] = chain_config_to_json(opts.chain);
  config["inactive_norm_threshold"] = kInactiveNormThreshold;
  j["config"] = std::move(config);
  j["alpha"] = res.alpha;

  const auto& s = res.summary;
  if (!s.fits.empty()) {
    json fits = json::object();
    for (const auto& [k, f] : s.fits) fits[std::to_string(k + 1)] = f;
    j["fits"] = std::move(fits);
  }
  if (ds.truth) {
    json nulls = json::object();
    for (const auto& [k, v] : s.null_norms) nulls[std::to_string(k + 1)] = v;
    j["null_norms"] = std::move(nulls);
  }
  json norms = json::object();
  json inactive = json::array();
  for (Eigen::Index k = 0; k < s.norms.size(); ++k) {
    norms[std::to_string(k + 1)] = s.norms(k);
    if (s.norms(k) < kInactiveNormThreshold) inactive.push_back(k + 1);
  }
  j["estimated_norms"] = std::move(norms);
  j["flagged_inactive"] = std::move(inactive);

  if (res.selection) {
    j["selected_alpha"] = res.selection->alpha_best;
    json ev = json::array();
    for (const auto& r : res.selection->records) ev.push_back(evidence_to_json(r));
    j["evidence"] = std::move(ev);
  } else if (!res.chain.evidence.empty()) {
    j["evidence"] = json::array({evidence_to_json(make_evidence_record(res.chain))});
  }

  j["posterior_means"] = columns_to_json(s.means);
  if (s.lower && s.upper) {
    j["credible_bands"] = {{"level", 0.95},
                           {"lower", columns_to_json(*s.lower)},
                           {"upper", columns_to_json(*s.upper)}};
  }
  j["diagnostics"] = {{"acceptance_rate", 1.0},
                      {"ess_tau2", s.ess_tau2},
                      {"ess_sigma2", s.ess_sigma2},
                      {"tau2_posterior_mean", s.tau2_mean},
                      {"sigma2_posterior_mean", s.sigma2_mean},
                      {"stored_samples", res.chain.sweeps.size()},
                      {"sweeps_run", res.chain.sweeps_run},
                      {"seconds_per_sweep", res.chain.seconds_per_sweep()}};
  j["timing_seconds"] = res.seconds;
  j["floor_events"] = res.chain.floor_events;
  j["created_at"] = utc_timestamp();
  return j;
}

// ---------------------------------------------------------------------------
// Monte Carlo study

struct MonteCarloOptions {
  int runs = 100;
  std::uint64_t seed = 0;
  Eigen::Index p = 50, n = 1000, m = 200;
  double snr = 10.0;
  Eigen::Index q_max = 3;  // q uniform on {0, ..., q_max}
  InputKind input = InputKind::kWhite;
  double alpha = 0.9;
  ChainConfig chain;
  std::optional<std::filesystem::path> detail_dir;
};

struct MonteCarloRun {
  int run = 0;
  Eigen::Index q = 0;
  std::vector<int> active;
  std::map<int, double> fits;
  std::map<int, double> null_norms;
  double tau2_mean = 0.0;
  double seconds = 0.0;
  bool failed = false;
  std::string error;
};

struct MonteCarloResult {
  std::vector<MonteCarloRun> runs;
  std::vector<double> all_fits;
  std::vector<double> all_null_norms;
  int failures = 0;
};

inline json quantile_summary(const std::vector<double>& x) {
  if (x.empty()) return json{{"count", 0}};
  return json{{"count", x.size()},
              {"min", *std::min_element(x.begin(), x.end())},
              {"q25", quantile(x, 0.25)},
              {"median", quantile(x, 0.5)},
              {"q75", quantile(x, 0.75)},
              {"max", *std::max_element(x.begin(), x.end())}};
}

// Each run draws q, a fresh dataset and an identification, all from a stream
// derived from (seed, run index); results do not depend on thread count.
inline MonteCarloResult run_montecarlo(const MonteCarloOptions& opts) {
  if (opts.runs < 1) throw UsageError("montecarlo: --runs must be >= 1");
  if (opts.q_max < 0 || opts.q_max > opts.p) throw UsageError("montecarlo: q_max must lie in [0, p]");
  opts.chain.validate();
  const RngStream root(opts.seed);
  MonteCarloResult out;
  out.runs.resize(static_cast<std::size_t>(opts.runs));

  parallel_for(out.runs.size(), [&](std::size_t r) {
    MonteCarloRun& run = out.runs[r];
    run.run = static_cast<int>(r);
    RngStream rng = root.derive(r);
    try {
      run.q = std::min<Eigen::Index>(
          static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(opts.q_max + 1)),
          opts.q_max);
      NetworkDataset ds = synthesize_dataset(opts.p, run.q, opts.n, opts.m, opts.snr,
                                             opts.input, rng);
      IdentifyOptions id;
      id.alpha = opts.alpha;
      id.chain = opts.chain;
      id.chain.seed = rng.next_u64();
      IdentifyResult res = identify(ds, id);
      run.active = *ds.active_set;
      run.fits = res.summary.fits;
      run.null_norms = res.summary.null_norms;
      run.tau2_mean = res.summary.tau2_mean;
      run.seconds = res.seconds;
      if (opts.detail_dir) {
        std::ostringstream name;
        name << "run_" << std::setw(4) << std::setfill('0') << r << ".json";
        json extra;
        extra["montecarlo_run"] = r;
        extra["q"] = run.q;
        write_file_atomic(*opts.detail_dir / name.str(),
                          report_to_json(res, ds, id, extra).dump(1) + "\n");
      }
    } catch (const std::exception& e) {
      run.failed = true;
      run.error = e.what();
    }
  });

  for (const auto& run : out.runs) {
    if (run.failed) {
      ++out.failures;
      continue;
    }
    for (const auto& [k, f] : run.fits) out.all_fits.push_back(f);
    for (const auto& [k, v] : run.null_norms) out.all_null_norms.push_back(v);
  }
  return out;
}

inline json montecarlo_to_json(const MonteCarloResult& res, const MonteCarloOptions& opts) {
  json j;
  j["config"] = {{"runs", opts.runs},
                 {"seed", opts.seed},
                 {"dims", {{"n", opts.n}, {"m", opts.m}, {"p", opts.p}}},
                 {"snr", opts.snr},
                 {"q_max", opts.q_max},
                 {"input_kind", to_string(opts.input)},
                 {"alpha", opts.alpha},
                 {"chain", chain_config_to_json(opts.chain)}};
  j["fits"] = quantile_summary(res.all_fits);
  j["null_norms"] = quantile_summary(res.all_null_norms);
  j["failures"] = res.failures;
  json runs = json::array();
  for (const auto& run : res.runs) {
    json r;
    r["run"] = run.run;
    r["q"] = run.q;
    if (run.failed) {
      r["error"] = run.error;
    } else {
      json active = json::array();
      for (int k : run.active) active.push_back(k + 1);
      r["active_set"] = std::move(active);
      json fits = json::object();
      for (const auto& [k, f] : run.fits) fits[std::to_string(k + 1)] = f;
      r["fits"] = std::move(fits);
      double max_null = 0.0;
      for (const auto& [k, v] : run.null_norms) max_null = std::max(max_null, v);
      r["max_null_norm"] = max_null;
      r["tau2_posterior_mean"] = run.tau2_mean;
      r["timing_seconds"] = run.seconds;
    }
    runs.push_back(std::move(r));
  }
  j["runs"] = std::move(runs);
  j["all_fits"] = res.all_fits;
  j["all_null_norms"] = res.all_null_norms;
  return j;
}

// ---------------------------------------------------------------------------
// Prior illustrations

// `count` impulse responses from the prior with tau = 1: lambda ~ C+(0, 1),
// theta ~ N(0, lambda^2 K). Returns the lambdas and an m x count matrix.
struct PriorDraws {
  std::vector<double> lambdas;
  Eigen::MatrixXd thetas;
};

inline PriorDraws sample_prior_impulse_responses(const StableSplineKernel& kernel, int count,
                                                 RngStream& rng) {
  if (count < 1) throw UsageError("prior-sample: --count must be >= 1");
  PriorDraws out;
  out.thetas.resize(kernel.m(), count);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(kernel.m());
  for (int c = 0; c < count; ++c) {
    const double lambda = sample_half_cauchy(rng);
    out.lambdas.push_back(lambda);
    out.thetas.col(c) = lambda * sample_gaussian_factored(zero, kernel.factor(), rng);
  }
  return out;
}

inline std::string prior_draws_to_csv(const PriorDraws& d) {
  std::ostringstream os;
  os << "draw,lambda";
  for (Eigen::Index i = 1; i <= d.thetas.rows(); ++i) os << ",theta_" << i;
  os << "\n";
  for (Eigen::Index c = 0; c < d.thetas.cols(); ++c) {
    os << c + 1 << "," << num(d.lambdas[static_cast<std::size_t>(c)]);
    for (Eigen::Index i = 0; i < d.thetas.rows(); ++i) os << "," << num(d.thetas(i, c));
    os << "\n";
  }
  return os.str();
}

// Columns: x (right bin edge), then one probability column per index.
inline std::string histograms_to_csv(const std::vector<int>& indices,
                                     const std::vector<Histogram>& hists) {
  std::ostringstream os;
  os << "x";
  for (int i : indices) os << ",c_" << i;
  os << "\n";
  if (hists.empty()) return os.str();
  for (std::size_t b = 0; b < hists.front().right_edges.size(); ++b) {
    os << num(hists.front().right_edges[b]);
    for (const auto& h : hists) os << "," << num(h.probabilities[b]);
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Summaries of report files

enum class SummaryFormat { kTable, kCsv };

inline std::string summarize_report(const json& report, SummaryFormat format) {
  std::ostringstream os;
  const bool has_fits = report.contains("fits") && !report["fits"].empty();
  std::vector<double> null_norms;
  const bool has_truth = report.contains("null_norms");
  const char* norms_key = has_truth ? "null_norms" : "estimated_norms";
  const char* norms_kind = has_truth ? "null_norm" : "norm";
  if (report.contains(norms_key)) {
    for (const auto& [k, v] : report[norms_key].items()) null_norms.push_back(v.get<double>());
  }
  const double alpha = report.value("alpha", NAN);
  const double timing = report.value("timing_seconds", NAN);

  if (format == SummaryFormat::kCsv) {
    os << "kind,module,value\n";
    if (has_fits) {
      for (const auto& [k, v] : report["fits"].items()) os << "fit," << k << "," << num(v.get<double>()) << "\n";
    }
    if (report.contains(norms_key)) {
      for (const auto& [k, v] : report[norms_key].items()) {
        os << norms_kind << "," << k << "," << num(v.get<double>()) << "\n";
      }
    }
    os << "alpha,," << num(alpha) << "\n";
    if (report.contains("selected_alpha")) {
      os << "selected_alpha,," << num(report["selected_alpha"].get<double>()) << "\n";
    }
    os << "timing_seconds,," << num(timing) << "\n";
    return os.str();
  }

  os << std::fixed;
  if (has_fits) {
    os << "Active modules\n";
    os << "  " << std::left << std::setw(8) << "module" << std::right << std::setw(10) << "fit %"
       << "\n";
    for (const auto& [k, v] : report["fits"].items()) {
      os << "  " << std::left << std::setw(8) << k << std::right << std::setw(10)
         << std::setprecision(2) << v.get<double>() << "\n";
    }
  }
  os << (report.contains("null_norms") ? "Null-module norms" : "Estimated norms") << " ("
     << null_norms.size() << " modules)\n";
  if (!null_norms.empty()) {
    os << "  " << std::setw(10) << "min" << std::setw(10) << "q25" << std::setw(10) << "median"
       << std::setw(10) << "q75" << std::setw(10) << "max" << "\n";
    os << std::setprecision(5) << "  " << std::setw(10)
       << *std::min_element(null_norms.begin(), null_norms.end()) << std::setw(10)
       << quantile(null_norms, 0.25) << std::setw(10) << quantile(null_norms, 0.5)
       << std::setw(10) << quantile(null_norms, 0.75) << std::setw(10)
       << *std::max_element(null_norms.begin(), null_norms.end()) << "\n";
  }
  os << std::setprecision(3) << "alpha            " << alpha << "\n";
  if (report.contains("selected_alpha")) {
    os << "selected alpha   " << report["selected_alpha"].get<double>() << "\n";
  }
  os << std::setprecision(2) << "timing (s)       " << timing << "\n";
  return os.str();
}

}  // namespace sshnet

#endif  // SSHNET_EXPERIMENT_HPP_
