#include "sleap/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace sleap {

std::vector<double> make_grid(double t_end, int points) {
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
  if (points < 1) throw std::invalid_argument("grid needs at least one point");
  std::vector<double> grid(points);
  for (int k = 0; k + 1 < points; ++k)
    grid[k] = t_end * (k + 1) / points;
  grid[points - 1] = t_end;
  return grid;
}

double self_distance_bound(int bins, std::size_t n_runs) {
  if (bins <= 0 || n_runs == 0)
    throw std::invalid_argument("bins and n_runs must be positive");
  return std::sqrt(4.0 * bins /
                   (std::numbers::pi * static_cast<double>(n_runs)));
}

HistogramPair build_histograms(std::span<const long long> a,
                               std::span<const long long> b, int bins) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("histogram samples must be nonempty");
  if (bins < 2) throw std::invalid_argument("need at least two bins");

  long long lo = a[0], hi = a[0];
  for (long long v : a) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (long long v : b) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  HistogramPair out;
  out.lo = static_cast<double>(lo);
  out.p.assign(bins, 0.0);
  out.q.assign(bins, 0.0);
  if (lo == hi) {
    // Single-point pooled support: both samples are the same constant.
    out.width = 0.0;
    return out;
  }
  out.width = static_cast<double>(hi - lo) / bins;

  auto accumulate = [&](std::span<const long long> sample,
                        std::vector<double>& dens) {
    const double unit = 1.0 / (static_cast<double>(sample.size()) * out.width);
    for (long long v : sample) {
      int k = static_cast<int>((static_cast<double>(v) - out.lo) / out.width);
      k = std::clamp(k, 0, bins - 1);
      dens[k] += unit;
    }
  };
  accumulate(a, out.p);
  accumulate(b, out.q);
  return out;
}

double histogram_distance(std::span<const long long> a,
                          std::span<const long long> b, int bins) {
  const HistogramPair h = build_histograms(a, b, bins);
  if (h.width == 0.0) return 0.0;
  double sum = 0.0;
  for (int k = 0; k < bins; ++k) sum += std::fabs(h.p[k] - h.q[k]);
  return h.width * sum;
}

void EnsembleSpec::validate() const {
  if (n_runs < 2) throw std::invalid_argument("ensemble needs n_runs >= 2");
  if (bins < 2) throw std::invalid_argument("ensemble needs bins >= 2");
  if (grid.empty()) throw std::invalid_argument("ensemble grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] <= (i == 0 ? 0.0 : grid[i - 1]))
      throw std::invalid_argument("ensemble grid must be strictly increasing");
  }
}

EnsembleResult run_ensemble(const ReactionNetwork& net,
                            const EnsembleSpec& spec,
                            std::span<const int> tracked, int jobs) {
  spec.validate();
  std::vector<int> track(tracked.begin(), tracked.end());
  if (track.empty()) {
    track.resize(net.species_count());
    for (int s = 0; s < net.species_count(); ++s) track[s] = s;
  }
  for (int s : track) {
    if (s < 0 || s >= net.species_count())
      throw std::invalid_argument("tracked species index out of range");
  }

  const std::size_t n_grid = spec.grid.size();
  const std::size_t n_track = track.size();
  const std::size_t n_runs = spec.n_runs;

  EnsembleResult out;
  out.grid = spec.grid;
  out.species_index = track;
  out.species.reserve(n_track);
  for (int s : track) out.species.push_back(net.species_names()[s]);
  out.n_runs = n_runs;
  out.values.resize(n_grid * n_track * n_runs);

  std::vector<double> steps(n_runs), wall(n_runs), draws(n_runs);
  std::atomic<std::size_t> cursor{0};
  const double t_end = spec.t_end();

  auto worker = [&]() {
    for (;;) {
      const std::size_t k = cursor.fetch_add(1, std::memory_order_relaxed);
      if (k >= n_runs) return;
      Simulator sim(net, spec.kind, spec.config, RngStream(spec.seed, k));
      const Trajectory tr = sim.run(t_end, spec.grid);
      for (std::size_t g = 0; g < n_grid; ++g)
        for (std::size_t s = 0; s < n_track; ++s)
          out.values[(g * n_track + s) * n_runs + k] =
              tr.grid_states[g][track[s]];
      steps[k] = static_cast<double>(tr.stats.steps_total);
      wall[k] = tr.stats.wall_seconds;
      draws[k] = static_cast<double>(tr.stats.rng_draws);
    }
  };

  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  for (std::size_t k = 0; k < n_runs; ++k) {
    out.mean_steps += steps[k];
    out.mean_wall_seconds += wall[k];
    out.mean_rng_draws += draws[k];
  }
  out.mean_steps /= static_cast<double>(n_runs);
  out.mean_wall_seconds /= static_cast<double>(n_runs);
  out.mean_rng_draws /= static_cast<double>(n_runs);
  return out;
}

ErrorReport ensemble_error(const EnsembleResult& test,
                           const EnsembleResult& reference, int bins) {
  if (test.grid.size() != reference.grid.size())
    throw std::invalid_argument("ensembles use different grids");
  for (std::size_t g = 0; g < test.grid.size(); ++g) {
    if (std::fabs(test.grid[g] - reference.grid[g]) >
        1e-12 * std::max(1.0, std::fabs(test.grid[g])))
      throw std::invalid_argument("ensembles use different grids");
  }
  if (test.species != reference.species)
    throw std::invalid_argument("ensembles track different species");

  ErrorReport report;
  report.bins = bins;
  report.self_distance = self_distance_bound(bins, test.n_runs);
  for (std::size_t g = 0; g < test.grid.size(); ++g) {
    for (std::size_t s = 0; s < test.species.size(); ++s) {
      const double d =
          histogram_distance(test.slice(g, s), reference.slice(g, s), bins);
      report.cells.push_back({test.grid[g], test.species[s], d});
      report.mean_d += d;
    }
  }
  if (!report.cells.empty())
    report.mean_d /= static_cast<double>(report.cells.size());
  return report;
}

std::vector<SpeedupRow> speedup_report(const ReactionNetwork& net,
                                       std::span<const SolverKind> kinds,
                                       const SolverConfig& config,
                                       std::uint64_t seed, double t_end,
                                       int repetitions) {
  if (repetitions < 1)
    throw std::invalid_argument("repetitions must be positive");
  std::vector<SolverKind> order(kinds.begin(), kinds.end());
  if (std::find(order.begin(), order.end(), SolverKind::ssa) == order.end())
    order.insert(order.begin(), SolverKind::ssa);

  std::vector<SpeedupRow> rows;
  double ssa_wall = 0.0;
  for (SolverKind kind : order) {
    SpeedupRow row;
    row.method = solver_kind_name(kind);
    for (int r = 0; r < repetitions; ++r) {
      Simulator sim(net, kind, config, RngStream(seed, r));
      const Trajectory tr = sim.run(t_end, {});
      row.mean_steps += static_cast<double>(tr.stats.steps_total);
      row.mean_wall_ms += tr.stats.wall_seconds * 1e3;
    }
    row.mean_steps /= repetitions;
    row.mean_wall_ms /= repetitions;
    if (kind == SolverKind::ssa) ssa_wall = row.mean_wall_ms;
    rows.push_back(std::move(row));
  }
  for (SpeedupRow& row : rows)
    row.speedup = row.mean_wall_ms > 0.0 ? ssa_wall / row.mean_wall_ms : 1.0;
  return rows;
}

}  // namespace sleap
