#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sleap/analysis.hpp"
#include "sleap/builtin_models.hpp"
#include "sleap/stats.hpp"
#include "sleap/stepping.hpp"

namespace {

using namespace sleap;

// Shortest round-trip decimal form, so identical runs emit identical bytes.
std::string num(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::uint64_t resolve_seed(const CLI::App* cmd, std::uint64_t cli_value) {
  if (cmd->count("--seed") > 0) return cli_value;
  if (const char* env = std::getenv("SLEAP_SEED")) {
    std::uint64_t v = 0;
    const char* last = env + std::string_view(env).size();
    auto [p, ec] = std::from_chars(env, last, v);
    if (ec != std::errc() || p != last)
      throw std::invalid_argument("SLEAP_SEED is not an unsigned integer: '" +
                                  std::string(env) + "'");
    return v;
  }
  return cli_value;
}

std::vector<int> resolve_track(const ReactionNetwork& net,
                               const std::string& track_csv) {
  std::vector<int> idx;
  for (const std::string& name : split_csv(track_csv)) {
    const int s = net.species_index(name);
    if (s < 0)
      throw std::invalid_argument("unknown species in --track: '" + name +
                                  "'");
    idx.push_back(s);
  }
  return idx;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = std::filesystem::path(dir) / name;
  std::ofstream out(path);
  if (!out)
    throw std::invalid_argument("cannot open output file " + path.string());
  return out;
}

// Options shared by simulate and compare.
struct RunOpts {
  std::string model;
  double eps = 0.03;
  double t_end = 10.0;
  std::uint64_t seed = 0;
  std::string track;
  std::string out_dir;
  SolverConfig config;
  bool no_fallback = false;
  bool negative_control = false;

  SolverConfig make_config() const {
    SolverConfig cfg = config;
    cfg.epsilon = eps;
    cfg.ssa_fallback = !no_fallback;
    cfg.negative_control = negative_control;
    cfg.validate();
    return cfg;
  }
};

void add_config_flags(CLI::App* cmd, RunOpts& o) {
  cmd->add_option("--model", o.model, "built-in model id or file:<path>")
      ->required();
  cmd->add_option("--eps", o.eps, "leap accuracy parameter");
  cmd->add_option("--t-end", o.t_end, "simulation horizon");
  cmd->add_option("--seed", o.seed, "RNG seed (SLEAP_SEED env as fallback)");
  cmd->add_option("--nc", o.config.n_critical, "critical-reaction threshold");
  cmd->add_option("--theta", o.config.theta,
                  "negative-control bound strength");
  cmd->add_option("--delta", o.config.delta,
                  "partial-equilibrium tolerance");
  cmd->add_option("--reorder-period", o.config.reorder_period,
                  "steps between cascade reorderings");
  cmd->add_flag("--no-ssa-fallback", o.no_fallback,
                "disable the exact-stepping fallback burst");
  cmd->add_flag("--negative-control", o.negative_control,
                "enable the probabilistic firing-count bound");
  cmd->add_option("--track", o.track,
                  "comma-separated species to report (default: all; "
                  "lacz comparisons default to "
                  "TrLacZ2,TrRbsLacZ,RbsribosomeLacY)");
}

int cmd_simulate(const RunOpts& o, const std::string& method, int runs,
                 int grid_points) {
  const ReactionNetwork net = load_model(o.model);
  const SolverKind kind = solver_kind_from_name(method);
  const SolverConfig cfg = o.make_config();
  const std::vector<double> grid = make_grid(o.t_end, grid_points);

  std::vector<int> track = resolve_track(net, o.track);
  if (track.empty()) {
    track.resize(net.species_count());
    for (int s = 0; s < net.species_count(); ++s) track[s] = s;
  }

  std::ofstream file;
  if (!o.out_dir.empty()) file = open_out(o.out_dir, "trajectories.csv");
  std::ostream& out = o.out_dir.empty() ? std::cout : file;

  out << "run_id,time";
  for (int s : track) out << ',' << net.species_names()[s];
  out << '\n';
  for (int k = 0; k < runs; ++k) {
    const Trajectory tr = run_trajectory(net, kind, cfg, RngStream(o.seed, k),
                                         o.t_end, grid);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      out << k << ',' << num(grid[g]);
      for (int s : track) out << ',' << tr.grid_states[g][s];
      out << '\n';
    }
  }
  return 0;
}

int cmd_compare(const RunOpts& o, const std::string& methods_csv,
                const std::vector<double>& eps_list, std::size_t n_runs,
                int bins, int reps, int jobs) {
  const ReactionNetwork net = load_model(o.model);
  std::vector<SolverKind> kinds;
  for (const std::string& m : split_csv(methods_csv))
    kinds.push_back(solver_kind_from_name(m));
  if (kinds.empty()) throw std::invalid_argument("--methods list is empty");

  std::string track_csv = o.track;
  if (track_csv.empty() && o.model.rfind("lacz", 0) == 0)
    track_csv = "TrLacZ2,TrRbsLacZ,RbsribosomeLacY";
  const std::vector<int> track = resolve_track(net, track_csv);

  const std::vector<double> grid = make_grid(o.t_end, 25);
  const double bound = self_distance_bound(bins, n_runs);
  std::cout << "self-distance bound (K=" << bins << ", N_s=" << n_runs
            << ") = " << num(bound) << '\n';

  // The exact-method reference ensemble uses its own stream family so test
  // ensembles with the same seed stay independent of it.
  EnsembleSpec ref_spec;
  ref_spec.model = o.model;
  ref_spec.kind = SolverKind::ssa;
  ref_spec.config = o.make_config();
  ref_spec.n_runs = n_runs;
  ref_spec.grid = grid;
  ref_spec.bins = bins;
  ref_spec.seed = o.seed ^ 0x517cc1b727220a95ull;
  const EnsembleResult ref = run_ensemble(net, ref_spec, track, jobs);

  std::ofstream errors = open_out(o.out_dir, "errors.csv");
  errors << "method,eps,time,species,d,self_distance\n";
  std::ofstream speedup = open_out(o.out_dir, "speedup.csv");
  speedup << "method,eps,mean_steps,mean_wall_ms,speedup\n";

  bool ssa_row_written = false;
  for (const double eps : eps_list) {
    EnsembleSpec spec = ref_spec;
    spec.config.epsilon = eps;
    spec.seed = o.seed;
    for (const SolverKind kind : kinds) {
      spec.kind = kind;
      const EnsembleResult test = run_ensemble(net, spec, track, jobs);
      const ErrorReport report = ensemble_error(test, ref, bins);
      for (const ErrorCell& cell : report.cells) {
        errors << solver_kind_name(kind) << ',' << num(eps) << ','
               << num(cell.time) << ',' << cell.species << ',' << num(cell.d)
               << ',' << num(report.self_distance) << '\n';
      }
      std::cout << "method=" << solver_kind_name(kind) << " eps=" << num(eps)
                << " mean_d=" << num(report.mean_d) << " (bound "
                << num(report.self_distance) << ")\n";
    }

    for (const SpeedupRow& row :
         speedup_report(net, kinds, spec.config, o.seed, o.t_end, reps)) {
      const bool is_ssa = row.method == "ssa";
      if (is_ssa && ssa_row_written) continue;
      if (is_ssa) ssa_row_written = true;
      speedup << row.method << ',' << (is_ssa ? std::string() : num(eps))
              << ',' << num(row.mean_steps) << ',' << num(row.mean_wall_ms)
              << ',' << num(row.speedup) << '\n';
    }
  }
  return 0;
}

// ---- validate: built-in statistical self-checks ----

struct SuiteReport {
  int failures = 0;
  void check(const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "[pass] " : "[FAIL] ") << name << " (" << detail
              << ")\n";
    if (!ok) ++failures;
  }
};

void suite_sampling_gof(SuiteReport& rep, std::uint64_t seed, int n,
                        bool corrupt_poisson) {
  constexpr double kAlpha = 1e-4;
  RngStream rng(seed, 1);

  {  // uniform numbers, ten equal bins
    std::vector<long long> obs(10, 0);
    for (int i = 0; i < n; ++i)
      ++obs[std::min<std::size_t>(9, static_cast<std::size_t>(
                                         rng.uniform01() * 10.0))];
    const std::vector<double> expect(10, n / 10.0);
    const GofResult g = chi_square_gof(obs, expect);
    rep.check("sampling.uniform", g.pvalue > kAlpha, "p=" + num(g.pvalue));
  }
  {  // Poisson(3.7) against its pmf (optionally corrupted by the test hook)
    const double mean = 3.7;
    const double draw_mean = corrupt_poisson ? mean * 1.08 : mean;
    std::vector<long long> obs(16, 0);
    for (int i = 0; i < n; ++i)
      ++obs[std::min<long long>(15, rng.poisson(draw_mean))];
    std::vector<double> expect(16, 0.0);
    double tail = 1.0;
    for (int k = 0; k < 15; ++k) {
      const double pmf = std::exp(-mean + k * std::log(mean) -
                                  std::lgamma(k + 1.0));
      expect[k] = n * pmf;
      tail -= pmf;
    }
    expect[15] = n * std::max(tail, 0.0);
    const GofResult g = chi_square_gof(obs, expect);
    rep.check("sampling.poisson", g.pvalue > kAlpha, "p=" + num(g.pvalue));
  }
  {  // Binomial(24, 0.3) against its pmf
    const int trials = 24;
    const double p = 0.3;
    std::vector<long long> obs(trials + 1, 0);
    for (int i = 0; i < n; ++i) ++obs[rng.binomial(trials, p)];
    std::vector<double> expect(trials + 1, 0.0);
    for (int k = 0; k <= trials; ++k) {
      const double logpmf = std::lgamma(trials + 1.0) - std::lgamma(k + 1.0) -
                            std::lgamma(trials - k + 1.0) +
                            k * std::log(p) + (trials - k) * std::log(1 - p);
      expect[k] = n * std::exp(logpmf);
    }
    const GofResult g = chi_square_gof(obs, expect);
    rep.check("sampling.binomial", g.pvalue > kAlpha, "p=" + num(g.pvalue));
  }
  {  // Exponential(mean 2) in ten equiprobable bins
    const double mean = 2.0;
    std::vector<double> edges(10);
    for (int i = 0; i < 10; ++i) edges[i] = -mean * std::log(1.0 - i / 10.0);
    std::vector<long long> obs(10, 0);
    for (int i = 0; i < n; ++i) {
      const double v = rng.exponential(mean);
      int k = 9;
      while (k > 0 && v < edges[k]) --k;
      ++obs[k];
    }
    const std::vector<double> expect(10, n / 10.0);
    const GofResult g = chi_square_gof(obs, expect);
    rep.check("sampling.exponential", g.pvalue > kAlpha,
              "p=" + num(g.pvalue));
  }
}

void suite_cascade_sum(SuiteReport& rep, std::uint64_t seed, int cases) {
  RngStream rng(seed, 2);
  std::vector<long long> k;
  std::vector<int> order;
  bool sums_ok = true, zeros_ok = true;
  for (int c = 0; c < cases; ++c) {
    const int m = 2 + static_cast<int>(rng.uniform01() * 7);
    std::vector<double> a(m);
    double a0 = 0.0;
    for (int j = 0; j < m; ++j) {
      a[j] = rng.uniform01() < 0.25 ? 0.0 : rng.uniform01() * 10.0;
      a0 += a[j];
    }
    if (a0 == 0.0) {
      a[0] = 1.0;
      a0 = 1.0;
    }
    const long long L = static_cast<long long>(rng.uniform01() * 500.0);
    order.resize(m);
    for (int j = 0; j < m; ++j) order[j] = j;
    k.assign(m, 0);
    binomial_cascade(rng, L, a, a0, order, k);
    long long total = 0;
    for (int j = 0; j < m; ++j) {
      total += k[j];
      if (a[j] == 0.0 && k[j] != 0) zeros_ok = false;
    }
    if (total != L) sums_ok = false;
  }
  rep.check("cascade.sum", sums_ok, std::to_string(cases) + " cases");
  rep.check("cascade.zero-weight", zeros_ok, "idle channels never fire");
}

void suite_cascade_permutation(SuiteReport& rep, std::uint64_t seed, int n) {
  constexpr double kAlpha = 1e-4;
  const std::vector<double> a{5.0, 1.0, 0.5};
  const double a0 = 6.5;
  const long long L = 50;
  const std::vector<int> order_a{0, 1, 2};
  const std::vector<int> order_b{2, 0, 1};

  RngStream rng(seed, 3);
  std::vector<long long> k(3, 0);
  std::vector<long long> tot_a(3, 0), tot_b(3, 0);
  std::vector<double> mean_a(3, 0.0);
  for (int i = 0; i < n; ++i) {
    binomial_cascade(rng, L, a, a0, order_a, k);
    for (int j = 0; j < 3; ++j) {
      tot_a[j] += k[j];
      mean_a[j] += static_cast<double>(k[j]);
    }
    binomial_cascade(rng, L, a, a0, order_b, k);
    for (int j = 0; j < 3; ++j) tot_b[j] += k[j];
  }

  const GofResult g = chi_square_homogeneity(tot_a, tot_b);
  rep.check("cascade.permutation", g.pvalue > kAlpha, "p=" + num(g.pvalue));

  bool means_ok = true;
  std::string detail;
  for (int j = 0; j < 3; ++j) {
    const double p = a[j] / a0;
    const double expected = L * p;
    const double se = std::sqrt(L * p * (1.0 - p) / n);
    const double got = mean_a[j] / n;
    if (std::fabs(got - expected) > 4.0 * se) means_ok = false;
    detail += (j ? " " : "") + num(got);
  }
  rep.check("cascade.marginal-means", means_ok, detail);
}

void suite_ssa_oracle(SuiteReport& rep, std::uint64_t seed, int n) {
  constexpr double kAlpha = 1e-4;
  const ReactionNetwork net = load_model("dimer_nonstiff");
  const SystemState x0 = net.initial_state();
  PropensityView props;
  all_propensities(net, x0, 1.0, props);

  Simulator sim(net, SolverKind::ssa, SolverConfig{}, RngStream(seed, 4));
  std::vector<long long> fired(net.reaction_count(), 0);
  double tau_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sim.reset(x0);
    sim.step(1e9);
    const auto& firings = sim.last_proposal().firings;
    for (int j = 0; j < net.reaction_count(); ++j) fired[j] += firings[j];
    tau_sum += sim.last_proposal().tau;
  }

  std::vector<double> expect(net.reaction_count());
  for (int j = 0; j < net.reaction_count(); ++j)
    expect[j] = n * props.a[j] / props.a0;
  const GofResult g = chi_square_gof(fired, expect);
  rep.check("ssa.channel-frequencies", g.pvalue > kAlpha,
            "p=" + num(g.pvalue));

  const double mean_tau = tau_sum / n;
  const double se = (1.0 / props.a0) / std::sqrt(static_cast<double>(n));
  rep.check("ssa.mean-waiting-time",
            std::fabs(mean_tau - 1.0 / props.a0) < 4.0 * se,
            "mean=" + num(mean_tau) + " expect=" + num(1.0 / props.a0));

  Simulator sim_a(net, SolverKind::ssa, SolverConfig{}, RngStream(seed, 5));
  Simulator sim_b(net, SolverKind::ssa, SolverConfig{}, RngStream(seed, 5));
  bool identical = true;
  for (int i = 0; i < 1000; ++i) {
    sim_a.step(1e9);
    sim_b.step(1e9);
    if (sim_a.state().x != sim_b.state().x ||
        sim_a.state().t != sim_b.state().t)
      identical = false;
  }
  rep.check("ssa.reproducibility", identical, "1000 steps, same stream");
}

int cmd_validate(bool quick, bool corrupt_poisson, std::uint64_t seed) {
  const int n = quick ? 20000 : 100000;
  SuiteReport rep;
  suite_sampling_gof(rep, seed, n, corrupt_poisson);
  suite_cascade_sum(rep, seed, quick ? 300 : 2000);
  suite_cascade_permutation(rep, seed, quick ? 4000 : 20000);
  suite_ssa_oracle(rep, seed, quick ? 20000 : 100000);
  if (rep.failures > 0) {
    std::cout << rep.failures << " suite check(s) failed\n";
    return 1;
  }
  std::cout << "all validation suites passed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic simulation toolkit for reaction networks"};
  app.require_subcommand(1);
  int rc = 0;

  RunOpts sim_opts;
  std::string sim_method = "ssa";
  int sim_runs = 1;
  int sim_grid_points = 25;
  CLI::App* sim = app.add_subcommand(
      "simulate", "run trajectories and emit grid readouts as CSV");
  add_config_flags(sim, sim_opts);
  sim->add_option("--method", sim_method,
                  "ssa | tau | tau-adaptive | r | s | s-adaptive");
  sim->add_option("--runs", sim_runs, "number of trajectories")
      ->check(CLI::PositiveNumber);
  sim->add_option("--grid-points", sim_grid_points, "readout grid size")
      ->check(CLI::PositiveNumber);
  sim->add_option("--out", sim_opts.out_dir,
                  "output directory (default: CSV on stdout)");
  sim->callback([&] {
    sim_opts.seed = resolve_seed(sim, sim_opts.seed);
    rc = cmd_simulate(sim_opts, sim_method, sim_runs, sim_grid_points);
  });

  RunOpts cmp_opts;
  cmp_opts.out_dir = ".";
  std::string cmp_methods = "tau,r,s";
  std::vector<double> cmp_eps;
  std::size_t cmp_ns = 10000;
  int cmp_bins = 10;
  int cmp_reps = 10;
  int cmp_jobs = 1;
  CLI::App* cmp = app.add_subcommand(
      "compare",
      "ensemble accuracy vs the exact reference plus a speed-up table");
  add_config_flags(cmp, cmp_opts);
  cmp->add_option("--methods", cmp_methods, "comma-separated method list");
  cmp->add_option("--eps-list", cmp_eps,
                  "accuracy parameters to sweep (default: --eps value)");
  cmp->add_option("--ns", cmp_ns, "trajectories per ensemble")
      ->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
  cmp->add_option("--bins", cmp_bins, "histogram bins")
      ->check(CLI::Range(2, 100000));
  cmp->add_option("--reps", cmp_reps, "timing repetitions")
      ->check(CLI::PositiveNumber);
  cmp->add_option("--jobs", cmp_jobs, "worker threads for ensembles")
      ->check(CLI::PositiveNumber);
  cmp->add_option("--out", cmp_opts.out_dir, "output directory");
  cmp->callback([&] {
    cmp_opts.seed = resolve_seed(cmp, cmp_opts.seed);
    if (cmp_eps.empty()) cmp_eps.push_back(cmp_opts.eps);
    rc = cmd_compare(cmp_opts, cmp_methods, cmp_eps, cmp_ns, cmp_bins,
                     cmp_reps, cmp_jobs);
  });

  bool val_quick = false;
  bool val_corrupt = false;
  std::uint64_t val_seed = 20240817;
  CLI::App* val = app.add_subcommand(
      "validate", "run the built-in statistical property suites");
  val->add_flag("--quick", val_quick, "reduced sample sizes");
  val->add_option("--seed", val_seed, "suite RNG seed");
  val->add_flag("--corrupt-poisson", val_corrupt)->group("");  // test hook
  val->callback([&] {
    val_seed = resolve_seed(val, val_seed);
    rc = cmd_validate(val_quick, val_corrupt, val_seed);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const sleap::SolverAbort& e) {
    std::cerr << "solver abort: " << e.what() << '\n';
    return 3;
  } catch (const sleap::ModelError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return rc;
}
