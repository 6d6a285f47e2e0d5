#pragma once

#include <span>
#include <vector>

#include "sleap/model.hpp"
#include "sleap/sampling.hpp"

namespace sleap {

// Tuning knobs shared by every leap method.  Defaults follow the common
// literature choices; the CLI validates user overrides before use.
struct SolverConfig {
  double epsilon = 0.03;           // leap accuracy parameter
  long long n_critical = 10;       // criticality threshold (max firings left)
  double theta = 0.1;              // negative-population control strength
  double delta = 0.05;             // partial-equilibrium detection tolerance
  long long reorder_period = 10000;  // cascade reordering cadence (steps)
  double stiffness_factor = 100.0;   // implicit/explicit step-size ratio gate
  bool ssa_fallback = true;          // drop to exact stepping when leaps shrink
  double ssa_fallback_threshold = 10.0;  // leap shorter than this many mean
                                         // event gaps triggers the fallback
  int ssa_burst = 100;               // exact steps run per fallback
  bool negative_control = false;     // probabilistic firing-count bound
  long long l_max = 1000000;         // firing-count cap when nothing binds
  int max_halvings = 30;             // step-halving retries before aborting
  double newton_tol = 1e-6;          // implicit solve relative tolerance
  int newton_max_iter = 100;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

// Scratch buffers for the leap-size sweeps, reused across steps.
struct LeapScratch {
  std::vector<double> mu;
  std::vector<double> sigma2;
};

/// Mark reactions that could exhaust a reactant within n_critical firings
/// (only reactions with positive propensity are considered).
void critical_reactions(const ReactionNetwork& net, const SystemState& state,
                        const PropensityView& props, long long n_critical,
                        std::vector<char>& out);

/// Largest time step keeping every reactant species' expected relative
/// change near epsilon, ignoring reactions with excluded[j] != 0 (pass an
/// empty span to include everything).  Returns +infinity when no species
/// constrains the step.
double leap_tau(const ReactionNetwork& net, const SystemState& state,
                const PropensityView& props, double epsilon,
                std::span<const char> excluded, LeapScratch& scratch);

/// Detect a reversible pair whose two directions nearly cancel.
bool in_partial_equilibrium(double a_fwd, double a_rev, double delta);

/// Mark both members of every reversible pair currently in partial
/// equilibrium.
void equilibrium_mask(const ReactionNetwork& net, const PropensityView& props,
                      double delta, std::vector<char>& out);

/// Firing budget for a fixed-count leap: a0 times the variance-corrected
/// leap-condition bound, floored, clamped to [1, l_max].  A non-positive
/// corrected variance deactivates that species' variance bound; if nothing
/// binds at all the cap l_max is returned.
long long r_leap_L(const ReactionNetwork& net, const SystemState& state,
                   const PropensityView& props, double epsilon, long long l_max,
                   LeapScratch& scratch);

/// Probabilistic bound on the firing count that keeps populations
/// non-negative with high probability; LLONG_MAX when no reaction consumes
/// anything.  Result is floored and clamped to >= 1.
long long negative_control_L(const ReactionNetwork& net,
                             const SystemState& state,
                             const PropensityView& props, double theta);

/// Total firing count for a time leap of length tau.
long long s_leap_L(RngStream& rng, double a0, double tau);

/// Split L total firings across reactions with conditional binomials,
/// visiting channels in `order`.  Writes per-reaction counts into k (sized
/// to the reaction count) and returns the number of binomial draws used.
/// The last positive-propensity channel in visit order receives the
/// remainder without a draw, so sum(k) == L always.
int binomial_cascade(RngStream& rng, long long L, std::span<const double> a,
                     double a0, std::span<const int> order,
                     std::span<long long> k);

/// Refresh the cascade visit order (descending propensity, stable ties)
/// every `period` committed steps; otherwise leave it untouched.  An empty
/// `order` is initialized to the identity permutation first.
void reorder_schedule(std::span<const double> a,
                      unsigned long long steps_committed, long long period,
                      std::vector<int>& order);

}  // namespace sleap
