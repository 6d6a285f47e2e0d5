#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sleap/model.hpp"
#include "sleap/solvers.hpp"

namespace sleap {

/// `points` equally spaced readout times in (0, t_end]; the last point is
/// exactly t_end.
std::vector<double> make_grid(double t_end, int points = 25);

/// Statistical floor for histogram distances between two ensembles of
/// n_runs trajectories binned into `bins` bins: sqrt(4*bins / (pi*n_runs)).
double self_distance_bound(int bins, std::size_t n_runs);

/// Two histograms over shared edges spanning the pooled support of both
/// samples; densities are normalized so width * sum == 1.
struct HistogramPair {
  std::vector<double> p, q;
  double lo = 0.0;
  double width = 0.0;
};

HistogramPair build_histograms(std::span<const long long> a,
                               std::span<const long long> b, int bins);

/// Density distance d = width * sum_k |p_k - q_k|, in [0, 2]; 0 when the
/// pooled support is a single point (both samples constant and equal).
double histogram_distance(std::span<const long long> a,
                          std::span<const long long> b, int bins);

/// What to run: model metadata plus solver, tuning, workload and seed.
struct EnsembleSpec {
  std::string model;  // builtin id or "file:<path>" (report metadata only)
  SolverKind kind = SolverKind::ssa;
  SolverConfig config;
  std::size_t n_runs = 10000;
  std::vector<double> grid;  // strictly increasing readout times
  int bins = 10;
  std::uint64_t seed = 0;

  double t_end() const { return grid.empty() ? 0.0 : grid.back(); }
  void validate() const;  // throws std::invalid_argument
};

/// Ensemble readouts for the tracked species, trajectory-indexed so results
/// are identical regardless of how many worker threads produced them.
struct EnsembleResult {
  std::vector<double> grid;
  std::vector<std::string> species;  // tracked species names
  std::vector<int> species_index;
  std::size_t n_runs = 0;
  // Layout: values[(g * species.size() + s) * n_runs + k]
  std::vector<long long> values;
  double mean_steps = 0.0;
  double mean_wall_seconds = 0.0;
  double mean_rng_draws = 0.0;

  long long at(std::size_t g, std::size_t s, std::size_t k) const {
    return values[(g * species.size() + s) * n_runs + k];
  }
  std::span<const long long> slice(std::size_t g, std::size_t s) const {
    return {values.data() + (g * species.size() + s) * n_runs, n_runs};
  }
};

/// Run spec.n_runs trajectories of `net` (trajectory k uses stream k of
/// spec.seed) and collect grid readouts of the tracked species (all species
/// when `tracked` is empty). `jobs` sets the worker thread count.
EnsembleResult run_ensemble(const ReactionNetwork& net,
                            const EnsembleSpec& spec,
                            std::span<const int> tracked = {}, int jobs = 1);

struct ErrorCell {
  double time = 0.0;
  std::string species;
  double d = 0.0;
};

struct ErrorReport {
  std::vector<ErrorCell> cells;  // grid-major, species-minor
  double mean_d = 0.0;
  double self_distance = 0.0;
  int bins = 10;
};

/// Histogram distance of `test` against `reference` per (time, species),
/// plus the average over all cells. Throws on mismatched grids or species.
ErrorReport ensemble_error(const EnsembleResult& test,
                           const EnsembleResult& reference, int bins = 10);

struct SpeedupRow {
  std::string method;
  double mean_steps = 0.0;
  double mean_wall_ms = 0.0;
  double speedup = 1.0;  // wall(ssa) / wall(method)
};

/// Time each solver over `repetitions` full runs to t_end (no readout grid)
/// and report steps, wall time, and speed-up against the SSA baseline. SSA
/// is prepended when missing from `kinds`.
std::vector<SpeedupRow> speedup_report(const ReactionNetwork& net,
                                       std::span<const SolverKind> kinds,
                                       const SolverConfig& config,
                                       std::uint64_t seed, double t_end,
                                       int repetitions = 10);

}  // namespace sleap
