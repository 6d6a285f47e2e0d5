#include "sleap/stepping.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sleap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Round-to-nearest count of firings reaction j can take from species i.
long long exhaustion_count(long long x, int consumed) {
  return std::llround(static_cast<double>(x) / consumed);
}

}  // namespace

void SolverConfig::validate() const {
  check(epsilon > 0.0 && epsilon < 1.0, "epsilon must be in (0, 1)");
  check(n_critical >= 0, "n_critical must be >= 0");
  check(theta >= 0.0 && theta <= 1.0, "theta must be in [0, 1]");
  check(delta >= 0.0 && delta <= 1.0, "delta must be in [0, 1]");
  check(reorder_period >= 1, "reorder_period must be >= 1");
  check(stiffness_factor > 0.0, "stiffness_factor must be > 0");
  check(ssa_fallback_threshold >= 0.0, "ssa_fallback_threshold must be >= 0");
  check(ssa_burst >= 1, "ssa_burst must be >= 1");
  check(l_max >= 1, "l_max must be >= 1");
  check(max_halvings >= 1, "max_halvings must be >= 1");
  check(newton_tol > 0.0, "newton_tol must be > 0");
  check(newton_max_iter >= 1, "newton_max_iter must be >= 1");
}

void critical_reactions(const ReactionNetwork& net, const SystemState& state,
                        const PropensityView& props, long long n_critical,
                        std::vector<char>& out) {
  const int m = net.reaction_count();
  out.assign(m, 0);
  for (int j = 0; j < m; ++j) {
    if (props.a[j] <= 0.0) continue;
    long long left = std::numeric_limits<long long>::max();
    bool consumes = false;
    for (auto [i, d] : net.reactions()[j].delta) {
      if (d < 0) {
        consumes = true;
        left = std::min(left, exhaustion_count(state.x[i], -d));
      }
    }
    if (consumes && left <= n_critical) out[j] = 1;
  }
}

double leap_tau(const ReactionNetwork& net, const SystemState& state,
                const PropensityView& props, double epsilon,
                std::span<const char> excluded, LeapScratch& scratch) {
  const int n = net.species_count();
  const int m = net.reaction_count();
  scratch.mu.assign(n, 0.0);
  scratch.sigma2.assign(n, 0.0);
  for (int j = 0; j < m; ++j) {
    if (!excluded.empty() && excluded[j]) continue;
    const double aj = props.a[j];
    if (aj <= 0.0) continue;
    for (auto [i, d] : net.reactions()[j].delta) {
      scratch.mu[i] += d * aj;
      scratch.sigma2[i] += static_cast<double>(d) * d * aj;
    }
  }

  double tau = kInf;
  for (int i : net.reactant_species()) {
    const double gi = g_factor(net, state, i);
    const double cap =
        std::max(epsilon * static_cast<double>(state.x[i]) / gi, 1.0);
    const double mu = scratch.mu[i];
    const double s2 = scratch.sigma2[i];
    if (mu != 0.0) tau = std::min(tau, cap / std::abs(mu));
    if (s2 > 0.0) tau = std::min(tau, cap * cap / s2);
  }
  return tau;
}

bool in_partial_equilibrium(double a_fwd, double a_rev, double delta) {
  return std::abs(a_fwd - a_rev) <= delta * std::min(a_fwd, a_rev);
}

void equilibrium_mask(const ReactionNetwork& net, const PropensityView& props,
                      double delta, std::vector<char>& out) {
  out.assign(net.reaction_count(), 0);
  for (auto [fwd, rev] : net.reversible_pairs()) {
    if (in_partial_equilibrium(props.a[fwd], props.a[rev], delta)) {
      out[fwd] = 1;
      out[rev] = 1;
    }
  }
}

long long r_leap_L(const ReactionNetwork& net, const SystemState& state,
                   const PropensityView& props, double epsilon, long long l_max,
                   LeapScratch& scratch) {
  const int n = net.species_count();
  const int m = net.reaction_count();
  assert(props.a0 > 0.0);
  scratch.mu.assign(n, 0.0);
  scratch.sigma2.assign(n, 0.0);
  for (int j = 0; j < m; ++j) {
    const double aj = props.a[j];
    if (aj <= 0.0) continue;
    for (auto [i, d] : net.reactions()[j].delta) {
      scratch.mu[i] += d * aj;
      scratch.sigma2[i] += static_cast<double>(d) * d * aj;
    }
  }

  double bound = kInf;
  for (int i : net.reactant_species()) {
    const double gi = g_factor(net, state, i);
    const double cap =
        std::max(epsilon * static_cast<double>(state.x[i]) / gi, 1.0);
    const double mu = scratch.mu[i];
    if (mu != 0.0) bound = std::min(bound, cap / std::abs(mu));
    // Fixing the firing count removes its variance from the leap, so the
    // variance bound is corrected by -mu^2/a0; a non-positive result means
    // the bound cannot bind for this species.
    const double corrected = scratch.sigma2[i] - mu * mu / props.a0;
    if (corrected > 0.0) bound = std::min(bound, cap * cap / corrected);
  }

  if (!std::isfinite(bound)) return l_max;
  const double L_real = props.a0 * bound;
  if (L_real >= static_cast<double>(l_max)) return l_max;
  return std::max<long long>(1, static_cast<long long>(std::floor(L_real)));
}

long long negative_control_L(const ReactionNetwork& net,
                             const SystemState& state,
                             const PropensityView& props, double theta) {
  double best = kInf;
  for (int j = 0; j < net.reaction_count(); ++j) {
    if (props.a[j] <= 0.0) continue;
    long long left = std::numeric_limits<long long>::max();
    bool consumes = false;
    for (auto [i, d] : net.reactions()[j].delta) {
      if (d < 0) {
        consumes = true;
        left = std::min(left, exhaustion_count(state.x[i], -d));
      }
    }
    if (!consumes) continue;
    // Channels drawing a small share of a0 rarely reach their own
    // exhaustion budget, so their bound is relaxed by the odds ratio.
    const double relaxed =
        (1.0 - theta * (1.0 - props.a0 / props.a[j])) * static_cast<double>(left);
    best = std::min(best, relaxed);
  }
  if (!std::isfinite(best)) return std::numeric_limits<long long>::max();
  return std::max<long long>(1, static_cast<long long>(std::floor(best)));
}

long long s_leap_L(RngStream& rng, double a0, double tau) {
  assert(a0 >= 0.0 && tau >= 0.0);
  return rng.poisson(a0 * tau);
}

int binomial_cascade(RngStream& rng, long long L, std::span<const double> a,
                     double a0, std::span<const int> order,
                     std::span<long long> k) {
  assert(a.size() == k.size() && a.size() == order.size());
  std::fill(k.begin(), k.end(), 0);
  if (L <= 0) return 0;
  assert(a0 > 0.0);

  int last = -1;
  for (int idx = static_cast<int>(order.size()); idx-- > 0;) {
    if (a[order[idx]] > 0.0) {
      last = idx;
      break;
    }
  }
  assert(last >= 0);

  long long remaining = L;
  double a_left = a0;
  int draws = 0;
  for (int idx = 0; idx < last && remaining > 0; ++idx) {
    const int j = order[idx];
    const double aj = a[j];
    if (aj <= 0.0) continue;
    // Conditional success probability; clamp against accumulated round-off
    // in the running remainder a_left.
    const double p = (a_left > aj) ? aj / a_left : 1.0;
    k[j] = rng.binomial(remaining, p);
    ++draws;
    remaining -= k[j];
    a_left -= aj;
  }
  if (remaining > 0) k[order[last]] += remaining;
  return draws;
}

void reorder_schedule(std::span<const double> a,
                      unsigned long long steps_committed, long long period,
                      std::vector<int>& order) {
  if (order.size() != a.size()) {
    order.resize(a.size());
    std::iota(order.begin(), order.end(), 0);
  }
  assert(period >= 1);
  if (steps_committed % static_cast<unsigned long long>(period) != 0) return;
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&a](int lhs, int rhs) { return a[lhs] > a[rhs]; });
}

}  // namespace sleap
