#include "sleap/solvers.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <limits>

namespace sleap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Falling factorial x(x-1)...(x-m+1) and its derivative, m in {1,2,3}.
double falling(double v, int m) {
  switch (m) {
    case 1:
      return v;
    case 2:
      return v * (v - 1.0);
    default:
      return v * (v - 1.0) * (v - 2.0);
  }
}

double falling_deriv(double v, int m) {
  switch (m) {
    case 1:
      return 1.0;
    case 2:
      return 2.0 * v - 1.0;
    default:
      return (3.0 * v - 6.0) * v + 2.0;
  }
}

}  // namespace

std::string solver_kind_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::ssa:
      return "ssa";
    case SolverKind::tau_explicit:
      return "tau";
    case SolverKind::tau_adaptive:
      return "tau-adaptive";
    case SolverKind::r_leap:
      return "r";
    case SolverKind::s_leap:
      return "s";
    case SolverKind::s_adaptive:
      return "s-adaptive";
  }
  return "?";
}

SolverKind solver_kind_from_name(std::string_view name) {
  std::string s(name);
  std::replace(s.begin(), s.end(), '_', '-');
  if (s == "ssa") return SolverKind::ssa;
  if (s == "tau" || s == "tau-leap") return SolverKind::tau_explicit;
  if (s == "tau-adaptive") return SolverKind::tau_adaptive;
  if (s == "r" || s == "r-leap") return SolverKind::r_leap;
  if (s == "s" || s == "s-leap") return SolverKind::s_leap;
  if (s == "s-adaptive") return SolverKind::s_adaptive;
  throw std::invalid_argument("unknown method '" + std::string(name) +
                              "' (expected ssa, tau, tau-adaptive, r, s, or "
                              "s-adaptive)");
}

ImplicitSolveResult implicit_solve(const ReactionNetwork& net,
                                   const std::vector<long long>& x,
                                   std::span<const double> noise,
                                   std::span<const char> include, double tau,
                                   double volume, double tol, int max_iter) {
  const int n = net.species_count();
  const int m = net.reaction_count();
  assert(static_cast<int>(x.size()) == n);
  assert(static_cast<int>(noise.size()) == m);
  assert(static_cast<int>(include.size()) == m);

  // Constant part: the known state plus the zero-mean noise drift.
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = static_cast<double>(x[i]);
  for (int j = 0; j < m; ++j) {
    if (!include[j] || noise[j] == 0.0) continue;
    for (auto [i, d] : net.reactions()[j].delta) b[i] += d * noise[j];
  }

  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = static_cast<double>(x[i]);

  auto residual = [&](const Eigen::VectorXd& v, Eigen::VectorXd& f) {
    f = v - b;
    const std::span<const double> vx(v.data(), static_cast<std::size_t>(n));
    for (int j = 0; j < m; ++j) {
      if (!include[j]) continue;
      const double aj = propensity_continuous(net, vx, j, volume);
      if (aj == 0.0) continue;
      for (auto [i, d] : net.reactions()[j].delta) f[i] -= tau * d * aj;
    }
  };
  auto tolerance = [&](const Eigen::VectorXd& v) {
    return tol * (1.0 + v.lpNorm<Eigen::Infinity>());
  };

  Eigen::VectorXd f(n), f_trial(n), y_trial(n), dy(n);
  Eigen::MatrixXd jac(n, n);
  residual(y, f);
  double res = f.lpNorm<Eigen::Infinity>();

  int iter = 0;
  while (res > tolerance(y) && iter < max_iter) {
    // Assemble I - tau * sum_j nu_j grad a_j(y) analytically.
    jac.setIdentity();
    for (int j = 0; j < m; ++j) {
      if (!include[j]) continue;
      const Reaction& r = net.reactions()[j];
      double c = r.rate;
      if (r.volume_scaled) {
        for (int q = 1; q < r.order; ++q) c /= volume;
      }
      for (auto [i, mi] : r.reactants) {
        double partial = c * falling_deriv(y[i], mi);
        for (auto [k, mk] : r.reactants) {
          if (k != i) partial *= falling(y[k], mk);
        }
        if (partial == 0.0) continue;
        for (auto [sp, d] : r.delta) jac(sp, i) -= tau * d * partial;
      }
    }
    dy = jac.partialPivLu().solve(-f);

    // Damped update: halve the step while the residual grows, keeping the
    // iterate clamped to the physical region.
    double scale = 1.0;
    for (int h = 0;; ++h) {
      y_trial = (y + scale * dy).cwiseMax(0.0);
      residual(y_trial, f_trial);
      const double res_trial = f_trial.lpNorm<Eigen::Infinity>();
      if (res_trial < res || h >= 30) {
        res = res_trial;
        break;
      }
      scale *= 0.5;
    }
    y.swap(y_trial);
    f.swap(f_trial);
    ++iter;
  }

  ImplicitSolveResult out;
  out.converged = res <= tolerance(y);
  out.iterations = iter;
  out.residual = res;
  out.x_star.assign(y.data(), y.data() + n);
  return out;
}

GridRecorder::GridRecorder(std::span<const double> grid, int n_species)
    : grid_(grid) {
  (void)n_species;
  states_.resize(grid.size());
}

void GridRecorder::start(const SystemState& state) {
  t_prev_ = state.t;
  x_prev_ = state.x;
  next_ = 0;
  while (next_ < grid_.size() && grid_[next_] <= t_prev_)
    states_[next_++] = x_prev_;
}

void GridRecorder::land(double t, const std::vector<long long>& x) {
  while (next_ < grid_.size() && grid_[next_] <= t) {
    const double g = grid_[next_];
    // Nearest landed time wins; the earlier state takes ties.
    states_[next_] = (g - t_prev_ <= t - g) ? x_prev_ : x;
    ++next_;
  }
  t_prev_ = t;
  x_prev_ = x;
}

void GridRecorder::finish() {
  while (next_ < grid_.size()) states_[next_++] = x_prev_;
}

Simulator::Simulator(const ReactionNetwork& net, SolverKind kind,
                     SolverConfig config, RngStream rng)
    : net_(&net), kind_(kind), config_(config), rng_(rng) {
  config_.validate();
  reset(net.initial_state());
}

void Simulator::reset(SystemState state) {
  if (static_cast<int>(state.x.size()) != net_->species_count())
    throw std::invalid_argument("state size does not match the network");
  for (long long c : state.x)
    if (c < 0) throw std::invalid_argument("state has a negative population");
  state_ = std::move(state);
  volume_ = 1.0;
  stats_ = StepStats{};
  draw_base_ = rng_.draw_count();
  hooks_active_ =
      net_->volume_tgen() > 0.0 || !net_->resample_hooks().empty();
  last_fired_ = -1;
  const int m = net_->reaction_count();
  proposal_ = StepProposal{};
  proposal_.firings.assign(m, 0);
  order_.clear();
  k_.assign(m, 0);
  noise_.assign(m, 0.0);
  crit_weights_.assign(m, 0.0);
  trial_ = state_.x;
}

void Simulator::refresh_propensities() {
  all_propensities(*net_, state_, volume_, props_);
}

double Simulator::capped(double tau, double t_end) const {
  // An unconstrained leap spans whatever is left of the horizon.
  if (std::isfinite(tau)) return tau;
  const double rest = t_end - state_.t;
  return rest > 0.0 ? rest : 1.0;
}

bool Simulator::build_trial(std::span<const long long> k) {
  trial_ = state_.x;
  for (int j = 0; j < net_->reaction_count(); ++j) {
    const long long kj = k[j];
    if (kj == 0) continue;
    for (auto [i, d] : net_->reactions()[j].delta) trial_[i] += kj * d;
  }
  for (long long v : trial_)
    if (v < 0) return false;
  return true;
}

void Simulator::commit(double tau, MethodTag tag, double pre_advance) {
  state_.x.swap(trial_);
  state_.t += tau;
  ++stats_.steps_total;
  if (recorder_) recorder_->land(state_.t, state_.x);
  proposal_.tau = tau;
  proposal_.pre_advance = pre_advance;
  proposal_.firings.assign(k_.begin(), k_.end());
  proposal_.method_tag = tag;
}

void Simulator::bump_halvings(int& halvings) {
  ++stats_.rejected_proposals;
  if (++halvings > config_.max_halvings)
    throw SolverAbort("step halved " + std::to_string(config_.max_halvings) +
                      " times without an acceptable proposal at t=" +
                      std::to_string(state_.t));
}

Simulator::Outcome Simulator::step(double t_end) {
  if (hooks_active_) volume_ = apply_hooks(*net_, state_, rng_);
  refresh_propensities();
  if (props_.a0 <= 0.0) return Outcome::exhausted;
  switch (kind_) {
    case SolverKind::ssa:
      return step_exact();
    case SolverKind::tau_explicit:
      return step_tau(t_end, false);
    case SolverKind::tau_adaptive:
      return step_tau(t_end, true);
    case SolverKind::r_leap:
      return step_r();
    case SolverKind::s_leap:
      return step_s(t_end, false);
    case SolverKind::s_adaptive:
      return step_s(t_end, true);
  }
  return Outcome::exhausted;  // unreachable
}

void Simulator::note_exact_firing(int j, double tau, MethodTag tag) {
  // Exact steps fire one channel; clear just the previous mark when the
  // last step was also exact instead of refilling the whole vector.
  if (last_fired_ >= 0 && (proposal_.method_tag == MethodTag::exact ||
                           proposal_.method_tag == MethodTag::exact_burst)) {
    proposal_.firings[last_fired_] = 0;
  } else {
    std::fill(proposal_.firings.begin(), proposal_.firings.end(), 0);
  }
  proposal_.firings[j] = 1;
  last_fired_ = j;
  proposal_.tau = tau;
  proposal_.pre_advance = 0.0;
  proposal_.method_tag = tag;
}

Simulator::Outcome Simulator::step_exact() {
  const double tau = rng_.exponential(1.0 / props_.a0);
  const int j = static_cast<int>(rng_.discrete(props_.a, props_.a0));
  for (auto [i, d] : net_->reactions()[j].delta) state_.x[i] += d;
  state_.t += tau;
  ++stats_.steps_total;
  if (recorder_) recorder_->land(state_.t, state_.x);
  note_exact_firing(j, tau, MethodTag::exact);
  return Outcome::advanced;
}

Simulator::Outcome Simulator::run_burst(double t_end,
                                        bool reuse_current_propensities) {
  for (int n = 0; n < config_.ssa_burst; ++n) {
    if (n > 0 || !reuse_current_propensities) {
      if (hooks_active_) volume_ = apply_hooks(*net_, state_, rng_);
      refresh_propensities();
      if (props_.a0 <= 0.0) return Outcome::exhausted;
    }
    const double tau = rng_.exponential(1.0 / props_.a0);
    const int j = static_cast<int>(rng_.discrete(props_.a, props_.a0));
    for (auto [i, d] : net_->reactions()[j].delta) state_.x[i] += d;
    state_.t += tau;
    ++stats_.steps_total;
    ++stats_.ssa_fallback_steps;
    if (recorder_) recorder_->land(state_.t, state_.x);
    note_exact_firing(j, tau, MethodTag::exact_burst);
    if (state_.t >= t_end) break;
  }
  return Outcome::advanced;
}

bool Simulator::implicit_firings(double tau) {
  // Partially implicit split for the non-critical channels: the Poisson draw
  // keeps the zero-mean part, the mean relaxes to the unknown state.
  const int m = net_->reaction_count();
  system_mask_.assign(m, 1);
  for (int j = 0; j < m; ++j) {
    if (critical_[j]) {
      system_mask_[j] = 0;
      noise_[j] = 0.0;
      continue;
    }
    const long long kp = rng_.poisson(props_.a[j] * tau);
    noise_[j] = static_cast<double>(kp) - props_.a[j] * tau;
  }
  const ImplicitSolveResult sol =
      implicit_solve(*net_, state_.x, noise_, system_mask_, tau, volume_,
                     config_.newton_tol, config_.newton_max_iter);
  if (!sol.converged) return false;
  const std::span<const double> xs(sol.x_star.data(), sol.x_star.size());
  for (int j = 0; j < m; ++j) {
    if (!system_mask_[j]) {
      k_[j] = 0;
      continue;
    }
    k_[j] =
        std::llround(propensity_continuous(*net_, xs, j, volume_) * tau +
                     noise_[j]);
  }
  return true;
}

Simulator::Outcome Simulator::step_tau(double t_end, bool adaptive) {
  const int m = net_->reaction_count();
  critical_reactions(*net_, state_, props_, config_.n_critical, critical_);
  const double tau_ex = leap_tau(*net_, state_, props_, config_.epsilon,
                                 critical_, leap_scratch_);
  bool stiff = false;
  double tau1 = tau_ex;
  if (adaptive) {
    equilibrium_mask(*net_, props_, config_.delta, equilibrium_);
    excluded_.assign(m, 0);
    for (int j = 0; j < m; ++j)
      excluded_[j] = critical_[j] | equilibrium_[j];
    const double tau_im = leap_tau(*net_, state_, props_, config_.epsilon,
                                   excluded_, leap_scratch_);
    stiff = tau_im > config_.stiffness_factor * tau_ex;
    if (stiff) tau1 = tau_im;
  }
  tau1 = capped(tau1, t_end);

  double a0_crit = 0.0;
  for (int j = 0; j < m; ++j)
    if (critical_[j]) a0_crit += props_.a[j];

  int halvings = 0;
  for (;;) {
    if (config_.ssa_fallback &&
        tau1 < config_.ssa_fallback_threshold / props_.a0)
      return run_burst(t_end, true);

    const double tau2 =
        a0_crit > 0.0 ? rng_.exponential(1.0 / a0_crit) : kInf;
    double tau;
    int jc = -1;
    bool used_implicit = false;

    if (tau1 <= tau2) {
      tau = tau1;
      if (stiff) {
        used_implicit = true;
        if (!implicit_firings(tau)) {
          bump_halvings(halvings);
          tau1 = tau / 2.0;
          continue;
        }
      } else {
        for (int j = 0; j < m; ++j)
          k_[j] = critical_[j] ? 0 : rng_.poisson(props_.a[j] * tau);
      }
    } else {
      // A critical channel fires first, at its own exact clock.
      tau = tau2;
      std::fill(crit_weights_.begin(), crit_weights_.end(), 0.0);
      for (int j = 0; j < m; ++j)
        if (critical_[j]) crit_weights_[j] = props_.a[j];
      jc = static_cast<int>(rng_.discrete(crit_weights_));
      if (stiff && tau2 >= tau_ex) {
        used_implicit = true;
        if (!implicit_firings(tau)) {
          bump_halvings(halvings);
          tau1 = tau / 2.0;
          continue;
        }
      } else {
        for (int j = 0; j < m; ++j)
          k_[j] = critical_[j] ? 0 : rng_.poisson(props_.a[j] * tau);
      }
      ++k_[jc];
    }

    if (!build_trial(k_)) {
      bump_halvings(halvings);
      tau1 = tau / 2.0;
      continue;
    }
    if (used_implicit) ++stats_.implicit_steps;
    commit(tau, jc >= 0 ? MethodTag::critical
                        : (used_implicit ? MethodTag::implicit_leap
                                         : MethodTag::explicit_leap));
    return Outcome::advanced;
  }
}

Simulator::Outcome Simulator::step_r() {
  reorder_schedule(props_.a, stats_.steps_total, config_.reorder_period,
                   order_);
  long long L = r_leap_L(*net_, state_, props_, config_.epsilon, config_.l_max,
                         leap_scratch_);
  if (config_.negative_control)
    L = std::min(L, negative_control_L(*net_, state_, props_, config_.theta));

  int halvings = 0;
  for (;;) {
    binomial_cascade(rng_, L, props_.a, props_.a0, order_, k_);
    if (!build_trial(k_)) {
      bump_halvings(halvings);
      L = std::max<long long>(1, L / 2);
      continue;
    }
    const double tau = rng_.gamma_int(L, 1.0 / props_.a0);
    commit(tau, MethodTag::explicit_leap);
    return Outcome::advanced;
  }
}

Simulator::Outcome Simulator::step_s(double t_end, bool adaptive) {
  const int m = net_->reaction_count();
  reorder_schedule(props_.a, stats_.steps_total, config_.reorder_period,
                   order_);
  const double tau_ex =
      leap_tau(*net_, state_, props_, config_.epsilon, {}, leap_scratch_);
  bool stiff = false;
  double tau = tau_ex;
  if (adaptive) {
    equilibrium_mask(*net_, props_, config_.delta, equilibrium_);
    const double tau_im = leap_tau(*net_, state_, props_, config_.epsilon,
                                   equilibrium_, leap_scratch_);
    stiff = tau_im > config_.stiffness_factor * tau_ex;
    if (stiff) tau = tau_im;
  }
  tau = capped(tau, t_end);

  int halvings = 0;
  double pre_advance = 0.0;
  for (;;) {
    if (!stiff) {
      long long L = s_leap_L(rng_, props_.a0, tau);
      if (L == 0) {
        // Nothing fires within tau: land there, then take one exact event.
        state_.t += tau;
        pre_advance += tau;
        if (recorder_) recorder_->land(state_.t, state_.x);
        L = 1;
        tau = rng_.gamma_int(1, 1.0 / props_.a0);
      }
      if (config_.negative_control) {
        const long long bound =
            negative_control_L(*net_, state_, props_, config_.theta);
        if (bound < L) {
          L = bound;
          tau = rng_.gamma_int(L, 1.0 / props_.a0);
        }
      }
      binomial_cascade(rng_, L, props_.a, props_.a0, order_, k_);
      if (!build_trial(k_)) {
        bump_halvings(halvings);
        tau /= 2.0;
        continue;
      }
      commit(tau, MethodTag::explicit_leap, pre_advance);
      return Outcome::advanced;
    }

    // Stiff branch: multinomial split about the known state, total firings
    // relaxed to their mean at the unknown state.
    const long long L_known = s_leap_L(rng_, props_.a0, tau);
    binomial_cascade(rng_, L_known, props_.a, props_.a0, order_, k_);
    for (int j = 0; j < m; ++j)
      noise_[j] = static_cast<double>(k_[j]) -
                  props_.a[j] / props_.a0 * static_cast<double>(L_known);
    system_mask_.assign(m, 1);
    const ImplicitSolveResult sol =
        implicit_solve(*net_, state_.x, noise_, system_mask_, tau, volume_,
                       config_.newton_tol, config_.newton_max_iter);
    if (sol.converged) {
      const std::span<const double> xs(sol.x_star.data(), sol.x_star.size());
      for (int j = 0; j < m; ++j) {
        const double kj =
            propensity_continuous(*net_, xs, j, volume_) * tau + noise_[j];
        // A strongly negative rounded count would mean un-firing a channel;
        // clamp it away before the negativity check.
        k_[j] = std::max<long long>(0, std::llround(kj));
      }
      if (build_trial(k_)) {
        ++stats_.implicit_steps;
        commit(tau, MethodTag::implicit_leap, pre_advance);
        return Outcome::advanced;
      }
    }
    bump_halvings(halvings);
    tau /= 2.0;
  }
}

Trajectory Simulator::run(double t_end, std::span<const double> grid) {
  GridRecorder rec(grid, net_->species_count());
  rec.start(state_);
  recorder_ = grid.empty() ? nullptr : &rec;
  const auto t0 = std::chrono::steady_clock::now();
  while (state_.t < t_end) {
    if (step(t_end) == Outcome::exhausted) {
      state_.t = t_end;  // nothing can fire anymore
      break;
    }
  }
  const auto t1 = std::chrono::steady_clock::now();
  recorder_ = nullptr;
  rec.finish();
  stats_.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  stats_.rng_draws = rng_.draw_count() - draw_base_;

  Trajectory out;
  out.grid_states = std::move(rec.states());
  out.stats = stats_;
  return out;
}

Trajectory run_trajectory(const ReactionNetwork& net, SolverKind kind,
                          const SolverConfig& config, RngStream rng,
                          double t_end, std::span<const double> grid) {
  Simulator sim(net, kind, config, rng);
  return sim.run(t_end, grid);
}

}  // namespace sleap
