// sshnet command-line front end: simulate, identify, montecarlo,
// prior-sample, summarize.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sshnet/sshnet.hpp"

namespace fs = std::filesystem;
using namespace sshnet;

namespace {

struct SimulateArgs {
  std::string preset;
  Eigen::Index p = 0, q = 0, n = 0, m = 0;
  double snr = 0.0;
  std::string input = "white";
  std::uint64_t seed = 0;
  std::string out;
};

struct IdentifyArgs {
  std::string data;
  std::string preset;
  std::optional<double> alpha;
  std::string alpha_grid;
  std::int64_t iters = 0;
  double burn_in = 0.25;
  std::int64_t thin = 10;
  std::uint64_t seed = 0;
  std::int64_t evidence_stride = 0;
  std::string out = "report.json";
  std::string chain_csv;
  std::string theta_csv_dir;
  bool bands = false;
};

struct MonteCarloArgs {
  std::string preset = "desk";
  int runs = 100;
  std::string input = "white";
  std::uint64_t seed = 0;
  Eigen::Index p = 0, n = 0, m = 0, q_max = 3;
  double snr = 0.0;
  double alpha = 0.9;
  std::int64_t iters = 0;
  double burn_in = 0.25;
  std::int64_t thin = 10;
  std::string out = "montecarlo";
};

struct PriorArgs {
  double alpha = 0.8;
  int count = 100;
  Eigen::Index m = 50;
  std::uint64_t seed = 0;
  std::string shrinkage;
  double bins = 0.01;
  std::size_t samples = 100000;
  std::string out;
};

struct SummarizeArgs {
  std::string report;
  std::string format = "table";
};

int cmd_simulate(const SimulateArgs& a, const CLI::App& sub) {
  const Preset preset = preset_by_name(a.preset.empty() ? "desk" : a.preset);
  auto pick = [&](const char* flag, auto value, auto fallback) {
    return sub.count(flag) ? value : fallback;
  };
  const Eigen::Index p = pick("--p", a.p, preset.p);
  const Eigen::Index q = pick("--q", a.q, preset.q);
  const Eigen::Index n = pick("--n", a.n, preset.n);
  const Eigen::Index m = pick("--m", a.m, preset.m);
  const double snr = pick("--snr", a.snr, preset.snr);
  if (q > p) throw UsageError("--q must not exceed --p");
  RngStream rng(a.seed);
  const NetworkDataset ds = synthesize_dataset(p, q, n, m, snr, parse_input_kind(a.input), rng);
  save_dataset(ds, a.out);
  std::cout << "wrote " << a.out << " (p = " << p << ", q = " << q << ", n = " << n
            << ", m = " << m << ")\n";
  return 0;
}

int cmd_identify(const IdentifyArgs& a, const CLI::App& sub) {
  const NetworkDataset ds = load_dataset(a.data);
  IdentifyOptions opts;
  if (sub.count("--alpha")) opts.alpha = a.alpha;
  if (!a.alpha_grid.empty()) opts.alpha_grid = parse_alpha_grid(a.alpha_grid);
  if (sub.count("--iters")) {
    opts.chain.n_iters = a.iters;
  } else if (!a.preset.empty()) {
    opts.chain.n_iters = preset_by_name(a.preset).iters;
  }
  opts.chain.burn_in_fraction = a.burn_in;
  opts.chain.thin = a.thin;
  opts.chain.seed = a.seed;
  if (sub.count("--evidence-stride")) opts.chain.evidence_stride = a.evidence_stride;
  opts.chain.store_theta_samples = a.bands || !a.theta_csv_dir.empty();

  const IdentifyResult res = identify(ds, opts);
  json extra;
  extra["data"] = a.data;
  if (!a.preset.empty()) extra["preset"] = a.preset;
  write_file_atomic(a.out, report_to_json(res, ds, opts, extra).dump(1) + "\n");
  if (!a.chain_csv.empty()) write_file_atomic(a.chain_csv, chain_to_csv(res.chain));
  if (!a.theta_csv_dir.empty()) {
    for (Eigen::Index k = 0; k < ds.p; ++k) {
      write_file_atomic(fs::path(a.theta_csv_dir) / ("theta_" + std::to_string(k + 1) + ".csv"),
                        theta_samples_to_csv(res.chain, k));
    }
  }
  std::cout << "wrote " << a.out << " (alpha = " << res.alpha << ", " << res.seconds
            << " s)\n";
  return 0;
}

int cmd_montecarlo(const MonteCarloArgs& a, const CLI::App& sub) {
  const Preset preset = preset_by_name(a.preset);
  MonteCarloOptions opts;
  opts.runs = a.runs;
  opts.seed = a.seed;
  opts.p = sub.count("--p") ? a.p : preset.p;
  opts.n = sub.count("--n") ? a.n : preset.n;
  opts.m = sub.count("--m") ? a.m : preset.m;
  opts.snr = sub.count("--snr") ? a.snr : preset.snr;
  opts.q_max = a.q_max;
  opts.input = parse_input_kind(a.input);
  opts.alpha = a.alpha;
  opts.chain.n_iters = sub.count("--iters") ? a.iters : preset.iters;
  opts.chain.burn_in_fraction = a.burn_in;
  opts.chain.thin = a.thin;
  const fs::path out_dir(a.out);
  opts.detail_dir = out_dir / "runs";

  const MonteCarloResult res = run_montecarlo(opts);
  write_file_atomic(out_dir / "aggregate.json", montecarlo_to_json(res, opts).dump(1) + "\n");
  std::cout << "wrote " << (out_dir / "aggregate.json").string() << " (" << res.all_fits.size()
            << " fits, " << res.all_null_norms.size() << " null norms, " << res.failures
            << " failed runs)\n";
  if (res.failures * 10 > opts.runs) {
    std::cerr << "error: more than 10% of Monte Carlo runs failed\n";
    return static_cast<int>(ExitCode::kNumerical);
  }
  return 0;
}

int cmd_prior_sample(const PriorArgs& a) {
  RngStream rng(a.seed);
  if (!a.shrinkage.empty()) {
    std::vector<int> indices;
    std::stringstream ss(a.shrinkage);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        indices.push_back(std::stoi(item));
      } catch (const std::exception&) {
        throw UsageError("malformed --shrinkage list '" + a.shrinkage + "'");
      }
    }
    std::vector<Histogram> hists;
    for (int i : indices) {
      RngStream stream = rng.derive(static_cast<std::uint64_t>(i));
      hists.push_back(shrinkage_profile(i, a.alpha, a.samples, a.bins, stream));
    }
    const std::string out = a.out.empty() ? "shrinkage.csv" : a.out;
    write_file_atomic(out, histograms_to_csv(indices, hists));
    std::cout << "wrote " << out << "\n";
    return 0;
  }
  const StableSplineKernel kernel(a.m, a.alpha);
  const PriorDraws draws = sample_prior_impulse_responses(kernel, a.count, rng);
  const std::string out = a.out.empty() ? "prior_samples.csv" : a.out;
  write_file_atomic(out, prior_draws_to_csv(draws));
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_summarize(const SummarizeArgs& a) {
  const json report = parse_json_text(read_file(a.report), a.report);
  SummaryFormat format;
  if (a.format == "table") {
    format = SummaryFormat::kTable;
  } else if (a.format == "csv") {
    format = SummaryFormat::kCsv;
  } else {
    throw UsageError("--format must be table or csv");
  }
  std::cout << summarize_report(report, format);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse dynamic network identification with the stable spline horseshoe prior"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic network dataset");
  simulate->add_option("--preset", sim.preset, "desk | paper-5.1 (default desk)");
  simulate->add_option("--p", sim.p, "number of modules");
  simulate->add_option("--q", sim.q, "number of active modules");
  simulate->add_option("--n", sim.n, "number of outputs");
  simulate->add_option("--m", sim.m, "FIR length");
  simulate->add_option("--snr", sim.snr, "linear signal-to-noise ratio");
  simulate->add_option("--input", sim.input, "white | lowpass")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "random seed")->capture_default_str();
  simulate->add_option("--out", sim.out, "output dataset JSON")->required();

  IdentifyArgs id;
  auto* identify_cmd = app.add_subcommand("identify", "Run the Gibbs sampler on a dataset");
  identify_cmd->add_option("--data", id.data, "dataset JSON")->required();
  identify_cmd->add_option("--preset", id.preset, "desk | paper-5.1 (sets --iters)");
  auto* alpha_opt = identify_cmd->add_option("--alpha", id.alpha, "kernel decay rate");
  auto* grid_opt =
      identify_cmd->add_option("--alpha-grid", id.alpha_grid, "e.g. 0.8:0.05:0.95,0.99");
  alpha_opt->excludes(grid_opt);
  identify_cmd->add_option("--iters", id.iters, "Gibbs sweeps (default 20000)");
  identify_cmd->add_option("--burn-in", id.burn_in, "burn-in fraction")->capture_default_str();
  identify_cmd->add_option("--thin", id.thin, "thinning")->capture_default_str();
  identify_cmd->add_option("--seed", id.seed, "chain seed")->capture_default_str();
  identify_cmd->add_option("--evidence-stride", id.evidence_stride,
                           "evaluate the evidence every N sweeps (default 50 with a grid)");
  identify_cmd->add_option("--out", id.out, "report JSON")->capture_default_str();
  identify_cmd->add_option("--chain-csv", id.chain_csv, "thinned chain CSV");
  identify_cmd->add_option("--theta-csv", id.theta_csv_dir, "directory for per-module theta CSVs");
  identify_cmd->add_flag("--bands", id.bands, "store draws and report 95% credible bands");

  MonteCarloArgs mc;
  auto* montecarlo = app.add_subcommand("montecarlo", "Repeated simulate + identify study");
  montecarlo->add_option("--preset", mc.preset, "desk | paper-5.1")->capture_default_str();
  montecarlo->add_option("--runs", mc.runs, "number of runs")->capture_default_str();
  montecarlo->add_option("--input", mc.input, "white | lowpass")->capture_default_str();
  montecarlo->add_option("--seed", mc.seed, "root seed")->capture_default_str();
  montecarlo->add_option("--p", mc.p, "number of modules");
  montecarlo->add_option("--n", mc.n, "number of outputs");
  montecarlo->add_option("--m", mc.m, "FIR length");
  montecarlo->add_option("--snr", mc.snr, "linear SNR");
  montecarlo->add_option("--q-max", mc.q_max, "q uniform on {0..q-max}")->capture_default_str();
  montecarlo->add_option("--alpha", mc.alpha, "kernel decay rate")->capture_default_str();
  montecarlo->add_option("--iters", mc.iters, "Gibbs sweeps per run");
  montecarlo->add_option("--burn-in", mc.burn_in, "burn-in fraction")->capture_default_str();
  montecarlo->add_option("--thin", mc.thin, "thinning")->capture_default_str();
  montecarlo->add_option("--out", mc.out, "output directory")->capture_default_str();

  PriorArgs pr;
  auto* prior = app.add_subcommand("prior-sample", "Draw from the prior / shrinkage profiles");
  prior->add_option("--alpha", pr.alpha, "kernel decay rate")->capture_default_str();
  prior->add_option("--count", pr.count, "number of impulse responses")->capture_default_str();
  prior->add_option("--m", pr.m, "FIR length")->capture_default_str();
  prior->add_option("--seed", pr.seed, "random seed")->capture_default_str();
  prior->add_option("--shrinkage", pr.shrinkage, "indices i for c_i histograms, e.g. 1,5,10");
  prior->add_option("--bins", pr.bins, "histogram bin width")->capture_default_str();
  prior->add_option("--samples", pr.samples, "draws per histogram")->capture_default_str();
  prior->add_option("--out", pr.out, "output CSV");

  SummarizeArgs sm;
  auto* summarize = app.add_subcommand("summarize", "Print a report as a table");
  summarize->add_option("--report", sm.report, "report JSON")->required();
  summarize->add_option("--format", sm.format, "table | csv")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kUsage);
  }

  try {
    if (*simulate) return cmd_simulate(sim, *simulate);
    if (*identify_cmd) return cmd_identify(id, *identify_cmd);
    if (*montecarlo) return cmd_montecarlo(mc, *montecarlo);
    if (*prior) return cmd_prior_sample(pr);
    if (*summarize) return cmd_summarize(sm);
  } catch (const sshnet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kNumerical);
  }
  return static_cast<int>(ExitCode::kUsage);
}
