#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sleap/model.hpp"
#include "sleap/sampling.hpp"
#include "sleap/stepping.hpp"

namespace sleap {

enum class SolverKind {
  ssa,
  tau_explicit,
  tau_adaptive,
  r_leap,
  s_leap,
  s_adaptive,
};

/// CLI spelling of a solver ("ssa", "tau", "tau-adaptive", "r", "s",
/// "s-adaptive"); solver_kind_from_name throws std::invalid_argument on an
/// unknown spelling.
std::string solver_kind_name(SolverKind kind);
SolverKind solver_kind_from_name(std::string_view name);

/// Thrown when a step cannot be completed (halving-retry budget exhausted or
/// the implicit solve keeps diverging).
class SolverAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MethodTag {
  exact,          // one exact event
  exact_burst,    // exact event taken inside a fallback burst
  explicit_leap,
  implicit_leap,
  critical,       // leap cut short by a single critical firing
};

// Outcome of the most recent committed step.
struct StepProposal {
  double tau = 0.0;          // committed time advance
  double pre_advance = 0.0;  // firing-free advance taken before the commit
                             // (the empty-leap fallback path)
  std::vector<long long> firings;
  MethodTag method_tag = MethodTag::exact;
};

struct StepStats {
  unsigned long long steps_total = 0;      // committed steps (burst events count
                                           // individually)
  unsigned long long ssa_fallback_steps = 0;
  unsigned long long implicit_steps = 0;
  unsigned long long rejected_proposals = 0;  // halved retries of any kind
  std::uint64_t rng_draws = 0;
  double wall_seconds = 0.0;
};

struct ImplicitSolveResult {
  std::vector<double> x_star;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
};

/// Solve the damped-Newton system
///   y = x + sum_{j in include} nu_j * (tau * a_j(y) + noise_j)
/// for the relaxed state y >= 0, with analytic Jacobian and step halving
/// whenever the residual grows.  `noise` and `include` are sized by
/// reaction; excluded channels contribute nothing.
ImplicitSolveResult implicit_solve(const ReactionNetwork& net,
                                   const std::vector<long long>& x,
                                   std::span<const double> noise,
                                   std::span<const char> include, double tau,
                                   double volume, double tol = 1e-6,
                                   int max_iter = 100);

/// Records trajectory states at fixed readout times: each grid point takes
/// the state of the nearest landed time (earlier state on ties).
class GridRecorder {
 public:
  GridRecorder(std::span<const double> grid, int n_species);

  void start(const SystemState& state);
  void land(double t, const std::vector<long long>& x);
  void finish();

  std::vector<std::vector<long long>>& states() { return states_; }

 private:
  std::span<const double> grid_;
  std::size_t next_ = 0;
  double t_prev_ = 0.0;
  std::vector<long long> x_prev_;
  std::vector<std::vector<long long>> states_;
};

struct Trajectory {
  std::vector<std::vector<long long>> grid_states;  // one row per grid time
  StepStats stats;
};

// One trajectory's worth of solver state: network view, tuning, stream, and
// scratch buffers.  step() advances by one committed step of the selected
// method; run() drives step() to a horizon while recording grid readouts.
class Simulator {
 public:
  Simulator(const ReactionNetwork& net, SolverKind kind, SolverConfig config,
            RngStream rng);

  enum class Outcome { advanced, exhausted };

  /// Take one step.  t_end informs horizon-aware choices (unbounded leaps,
  /// fallback bursts); steps may still land past it — callers stop the loop.
  /// Returns exhausted when no reaction can fire.
  Outcome step(double t_end);

  /// Advance to t_end from the current state, recording grid readouts.
  Trajectory run(double t_end, std::span<const double> grid);

  void reset(SystemState state);

  const SystemState& state() const { return state_; }
  StepStats stats() const {
    StepStats s = stats_;
    s.rng_draws = rng_.draw_count() - draw_base_;
    return s;
  }
  const StepProposal& last_proposal() const { return proposal_; }
  const SolverConfig& config() const { return config_; }
  RngStream& rng() { return rng_; }

 private:
  Outcome step_exact();
  Outcome run_burst(double t_end, bool reuse_current_propensities);
  Outcome step_tau(double t_end, bool adaptive);
  Outcome step_r();
  Outcome step_s(double t_end, bool adaptive);

  void refresh_propensities();
  void note_exact_firing(int j, double tau, MethodTag tag);
  double capped(double tau, double t_end) const;
  bool build_trial(std::span<const long long> k);
  void commit(double tau, MethodTag tag, double pre_advance = 0.0);
  void bump_halvings(int& halvings);
  bool implicit_firings(double tau);

  const ReactionNetwork* net_;
  SolverKind kind_;
  SolverConfig config_;
  RngStream rng_;
  std::uint64_t draw_base_ = 0;
  bool hooks_active_ = false;
  int last_fired_ = -1;  // single nonzero index after an exact step

  SystemState state_;
  double volume_ = 1.0;
  StepStats stats_;
  StepProposal proposal_;
  GridRecorder* recorder_ = nullptr;

  PropensityView props_;
  LeapScratch leap_scratch_;
  std::vector<int> order_;
  std::vector<char> critical_, equilibrium_, excluded_, system_mask_;
  std::vector<long long> k_, trial_;
  std::vector<double> noise_, crit_weights_;
};

/// Convenience wrapper: one trajectory from the network's initial state.
Trajectory run_trajectory(const ReactionNetwork& net, SolverKind kind,
                          const SolverConfig& config, RngStream rng,
                          double t_end, std::span<const double> grid);

}  // namespace sleap
