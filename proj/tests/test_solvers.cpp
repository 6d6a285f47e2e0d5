#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "sleap/builtin_models.hpp"
#include "sleap/model.hpp"
#include "sleap/solvers.hpp"
#include "sleap/stats.hpp"

using namespace sleap;

namespace {

const double kBig = 1e18;

std::vector<double> one_point_grid(double t) { return {t}; }

// A state on the stiff dimerization's slow manifold: the reversible pair is
// balanced (10*x1*(x1-1) close to 1000*x2), so the pair sits in partial
// equilibrium and the implicit step dwarfs the explicit one.
SystemState stiff_equilibrium_state() {
  return SystemState{{600, 3600, 0}, 0.0};
}

}  // namespace

TEST_CASE("solver names round-trip and accept aliases") {
  const SolverKind kinds[] = {SolverKind::ssa,        SolverKind::tau_explicit,
                              SolverKind::tau_adaptive, SolverKind::r_leap,
                              SolverKind::s_leap,     SolverKind::s_adaptive};
  for (SolverKind k : kinds)
    CHECK(solver_kind_from_name(solver_kind_name(k)) == k);

  CHECK(solver_kind_from_name("tau") == SolverKind::tau_explicit);
  CHECK(solver_kind_from_name("tau_adaptive") == SolverKind::tau_adaptive);
  CHECK(solver_kind_from_name("tau-leap") == SolverKind::tau_explicit);
  CHECK(solver_kind_from_name("r-leap") == SolverKind::r_leap);
  CHECK(solver_kind_from_name("s_leap") == SolverKind::s_leap);
  CHECK(solver_kind_from_name("s-adaptive") == SolverKind::s_adaptive);
  CHECK_THROWS_AS(solver_kind_from_name("simplex"), std::invalid_argument);
}

TEST_CASE("implicit solve: affine systems land in one iteration") {
  const ReactionNetwork net = ReactionNetwork::parse(
      "species A B\ninit 100 20\n"
      "reaction R1 : A -> B ; rate 1\n"
      "reaction R2 : B -> A ; rate 2\n");
  const std::vector<long long> x{100, 20};
  const std::vector<double> noise{0.0, 0.0};
  const std::vector<char> include{1, 1};

  const ImplicitSolveResult r =
      implicit_solve(net, x, noise, include, 0.1, 1.0);
  REQUIRE(r.converged);
  CHECK(r.iterations == 1);
  // hand-solved 2x2 linear system
  CHECK(r.x_star[0] == doctest::Approx(124.0 / 1.3).epsilon(1e-9));
  CHECK(r.x_star[1] == doctest::Approx(32.0 / 1.3).epsilon(1e-9));

  // noise terms shift the constant part of the system
  const std::vector<double> shifted{2.0, -1.0};
  const ImplicitSolveResult s =
      implicit_solve(net, x, shifted, include, 0.1, 1.0);
  REQUIRE(s.converged);
  CHECK(s.x_star[0] == doctest::Approx(121.0 / 1.3).epsilon(1e-9));
  CHECK(s.x_star[1] == doctest::Approx(35.0 / 1.3).epsilon(1e-9));
}

TEST_CASE("implicit solve: the step vanishes with tau") {
  const ReactionNetwork net = load_model("dimer_nonstiff");
  const std::vector<long long> x{4150, 39565, 3445};
  const std::vector<double> noise{0.5, -0.25, 0.75, 0.0};
  const std::vector<char> include(4, 1);
  const ImplicitSolveResult r =
      implicit_solve(net, x, noise, include, 1e-12, 1.0);
  REQUIRE(r.converged);
  // x* ~ x + sum_j nu_j * noise_j once the tau*a terms are negligible
  std::vector<double> want{4150.0, 39565.0, 3445.0};
  for (int j = 0; j < 4; ++j)
    for (auto [i, d] : net.reactions()[j].delta) want[i] += d * noise[j];
  for (int i = 0; i < 3; ++i)
    CHECK(r.x_star[i] == doctest::Approx(want[i]).epsilon(1e-6));
}

TEST_CASE("implicit solve: stiff dimerization converges quickly") {
  const ReactionNetwork net = load_model("dimer_stiff");
  const SystemState state = stiff_equilibrium_state();
  const std::vector<double> noise(4, 0.0);
  const std::vector<char> include(4, 1);
  const ImplicitSolveResult r =
      implicit_solve(net, state.x, noise, include, 0.015, 1.0);
  REQUIRE(r.converged);
  CHECK(r.iterations <= 50);
  for (double v : r.x_star) CHECK(v >= 0.0);
}

TEST_CASE("implicit solve: results stay nonnegative under pushy noise") {
  const ReactionNetwork net = ReactionNetwork::parse(
      "species A\ninit 3\nreaction R1 : A -> 0 ; rate 1\n");
  const std::vector<long long> x{3};
  const std::vector<double> noise{50.0};  // drives A far negative
  const std::vector<char> include{1};
  const ImplicitSolveResult r = implicit_solve(net, x, noise, include, 0.1, 1.0);
  CHECK(r.x_star[0] >= 0.0);
}

TEST_CASE("exact stepping: waiting times and channel choice") {
  // two self-loop channels keep the state fixed, so no resets are needed
  const ReactionNetwork net = ReactionNetwork::parse(
      "species A\ninit 1\n"
      "reaction R1 : A -> A ; rate 3\n"
      "reaction R2 : A -> A ; rate 1\n");
  Simulator sim(net, SolverKind::ssa, SolverConfig{}, RngStream(404, 0));
  const int n = 1000000;
  double tau_sum = 0.0;
  long long first = 0;
  for (int i = 0; i < n; ++i) {
    REQUIRE(sim.step(kBig) == Simulator::Outcome::advanced);
    tau_sum += sim.last_proposal().tau;
    first += sim.last_proposal().firings[0];
  }
  // a = (3, 1): E[tau] = 1/4, P(R1) = 3/4
  CHECK(tau_sum / n == doctest::Approx(0.25).epsilon(0.008));
  CHECK(first / static_cast<double>(n) == doctest::Approx(0.75).epsilon(0.0067));
  CHECK(sim.stats().steps_total == static_cast<unsigned long long>(n));
  // one waiting-time draw and one channel draw per event
  CHECK(sim.stats().rng_draws == 2ull * n);
}

TEST_CASE("exact stepping: exhaustion terminates the run") {
  const ReactionNetwork net = ReactionNetwork::parse(
      "species A B\ninit 3 0\nreaction R1 : A -> B ; rate 1\n");
  Simulator sim(net, SolverKind::ssa, SolverConfig{}, RngStream(1, 0));
  const std::vector<double> grid{2.0, kBig / 2, kBig};
  const Trajectory traj = sim.run(kBig, grid);
  CHECK(sim.state().t == kBig);  // time jumps to the horizon
  CHECK(sim.stats().steps_total == 3);
  CHECK(traj.grid_states.back() == std::vector<long long>{0, 3});

  // an immediately dead system records its initial state everywhere
  const ReactionNetwork dead = ReactionNetwork::parse(
      "species A B\ninit 0 5\nreaction R1 : A -> B ; rate 1\n");
  Simulator still(dead, SolverKind::ssa, SolverConfig{}, RngStream(1, 0));
  const Trajectory t2 = still.run(10.0, one_point_grid(10.0));
  CHECK(t2.grid_states[0] == std::vector<long long>{0, 5});
  CHECK(still.stats().steps_total == 0);
}

TEST_CASE("ssa ensemble matches the closed-form stationary law") {
  // reversible isomerization, both rates 1, 40 molecules total: X1 at large t
  // is Binomial(40, 1/2)
  const ReactionNetwork net = ReactionNetwork::parse(
      "species S1 S2\ninit 40 0\n"
      "reaction R1 : S1 -> S2 ; rate 1\n"
      "reaction R2 : S2 -> S1 ; rate 1\n"
      "reversible R1 R2\n");
  const int runs = 2000;
  std::vector<long long> obs(41, 0);
  for (int k = 0; k < runs; ++k) {
    const Trajectory traj = run_trajectory(net, SolverKind::ssa, SolverConfig{},
                                           RngStream(5150, k), 20.0,
                                           one_point_grid(20.0));
    ++obs[traj.grid_states[0][0]];
  }
  std::vector<double> expect(41, 0.0);
  for (int k = 0; k <= 40; ++k) {
    const double logpmf = std::lgamma(41.0) - std::lgamma(k + 1.0) -
                          std::lgamma(41.0 - k) + 40.0 * std::log(0.5);
    expect[k] = runs * std::exp(logpmf);
  }
  CHECK(chi_square_gof(obs, expect).pvalue > 0.01);
}

TEST_CASE("trajectories replay exactly for a fixed seed and stream") {
  const ReactionNetwork net = load_model("lacz_small");
  SolverConfig cfg;
  const Trajectory a = run_trajectory(net, SolverKind::s_leap, cfg,
                                      RngStream(99, 3), 20.0,
                                      one_point_grid(20.0));
  const Trajectory b = run_trajectory(net, SolverKind::s_leap, cfg,
                                      RngStream(99, 3), 20.0,
                                      one_point_grid(20.0));
  CHECK(a.grid_states == b.grid_states);
  CHECK(a.stats.steps_total == b.stats.steps_total);
  CHECK(a.stats.rng_draws == b.stats.rng_draws);

  const Trajectory c = run_trajectory(net, SolverKind::s_leap, cfg,
                                      RngStream(99, 4), 20.0,
                                      one_point_grid(20.0));
  CHECK(a.grid_states != c.grid_states);
}

TEST_CASE("adaptive methods equal their explicit forms off the stiff path") {
  const ReactionNetwork net = load_model("dimer_nonstiff");
  SolverConfig cfg;
  const std::vector<double> grid{2.0, 4.0, 6.0, 8.0, 10.0};

  const Trajectory tau_e = run_trajectory(net, SolverKind::tau_explicit, cfg,
                                          RngStream(31, 0), 10.0, grid);
  const Trajectory tau_a = run_trajectory(net, SolverKind::tau_adaptive, cfg,
                                          RngStream(31, 0), 10.0, grid);
  CHECK(tau_e.grid_states == tau_a.grid_states);
  CHECK(tau_e.stats.steps_total == tau_a.stats.steps_total);
  CHECK(tau_a.stats.implicit_steps == 0);

  const Trajectory s_e = run_trajectory(net, SolverKind::s_leap, cfg,
                                        RngStream(32, 0), 10.0, grid);
  const Trajectory s_a = run_trajectory(net, SolverKind::s_adaptive, cfg,
                                        RngStream(32, 0), 10.0, grid);
  CHECK(s_e.grid_states == s_a.grid_states);
  CHECK(s_e.stats.steps_total == s_a.stats.steps_total);
  CHECK(s_a.stats.implicit_steps == 0);
}

TEST_CASE("adaptive tau goes implicit on the stiff dimerization") {
  // Once the fast reversible pair relaxes, the implicit leap is about 0.025
  // time units, so a horizon of 10 needs only a few hundred steps where the
  // explicit scheme needs over a million.
  const ReactionNetwork net = load_model("dimer_stiff");
  SolverConfig cfg;
  Simulator sim(net, SolverKind::tau_adaptive, cfg, RngStream(7, 0));
  const Trajectory traj = sim.run(10.0, one_point_grid(10.0));
  CHECK(sim.stats().implicit_steps > 100);
  CHECK(sim.stats().steps_total < 10000);
  for (long long v : traj.grid_states[0]) CHECK(v >= 0);

  // the same horizon with adaptive S-leaping: also implicit, also cheap
  Simulator sim_s(net, SolverKind::s_adaptive, cfg, RngStream(7, 0));
  const Trajectory traj_s = sim_s.run(10.0, one_point_grid(10.0));
  CHECK(sim_s.stats().implicit_steps > 100);
  CHECK(sim_s.stats().steps_total < 10000);
  for (long long v : traj_s.grid_states[0]) CHECK(v >= 0);
}

TEST_CASE("tau leap fires Poisson counts when nothing is critical") {
  const ReactionNetwork net = ReactionNetwork::parse(
      "species A\ninit 10000\nreaction R1 : A -> 0 ; rate 1\n");
  SolverConfig cfg;
  Simulator sim(net, SolverKind::tau_explicit, cfg, RngStream(88, 0));
  const int reps = 3000;
  double firings = 0.0;
  for (int i = 0; i < reps; ++i) {
    sim.reset(net.initial_state());
    REQUIRE(sim.step(kBig) == Simulator::Outcome::advanced);
    CHECK(sim.last_proposal().tau == doctest::Approx(0.03));  // eps*x/g / |mu|
    firings += static_cast<double>(sim.last_proposal().firings[0]);
  }
  // k ~ Poisson(a0 * tau = 300): the mean lands within 4 standard errors
  CHECK(std::fabs(firings / reps - 300.0) <= 4.0 * std::sqrt(300.0 / reps));
}

TEST_CASE("tau leap falls back to an exact burst when leaps shrink") {
  // balanced birth-death with tiny counts: tau = 1/a0 < 10/a0
  const ReactionNetwork net = ReactionNetwork::parse(
      "species A\ninit 5\n"
      "reaction R1 : 0 -> A ; rate 5\n"
      "reaction R2 : A -> 0 ; rate 1\n");
  SolverConfig cfg;
  Simulator sim(net, SolverKind::tau_explicit, cfg, RngStream(12, 0));
  REQUIRE(sim.step(kBig) == Simulator::Outcome::advanced);
  CHECK(sim.stats().ssa_fallback_steps == 100);
  CHECK(sim.stats().steps_total == 100);  // burst events count individually

  // the fallback is toggleable
  cfg.ssa_fallback = false;
  Simulator noburst(net, SolverKind::tau_explicit, cfg, RngStream(12, 0));
  REQUIRE(noburst.step(kBig) == Simulator::Outcome::advanced);
  CHECK(noburst.stats().ssa_fallback_steps == 0);
  CHECK(noburst.stats().steps_total == 1);
}

TEST_CASE("rejected proposals leave no trace on the committed state") {
  // a leap over 20 molecules with eps=0.9 overshoots often
  const ReactionNetwork net = ReactionNetwork::parse(
      "species A\ninit 20\nreaction R1 : A -> 0 ; rate 1\n");
  SolverConfig cfg;
  cfg.epsilon = 0.9;
  cfg.ssa_fallback = false;
  cfg.n_critical = 0;  // keep the leap path active at low counts

  unsigned long long rejections = 0;
  for (int seed = 0; seed < 200; ++seed) {
    Simulator sim(net, SolverKind::tau_explicit, cfg, RngStream(seed, 0));
    REQUIRE(sim.step(kBig) == Simulator::Outcome::advanced);
    rejections += sim.stats().rejected_proposals;
    // the committed state is exactly the initial state plus the firings
    const long long fired = sim.last_proposal().firings[0];
    CHECK(sim.state().x[0] == 20 - fired);
    CHECK(sim.state().x[0] >= 0);
    CHECK(sim.state().t == sim.last_proposal().tau);
  }
  CHECK(rejections > 0);  // the overshoot path actually ran

  // Same property for the fixed-count method, which halves L instead.  A
  // single decaying species can never overshoot there (the budget is capped
  // by eps*x), so use a scarce bystander: the big channel sets L near 9000
  // and the partition drops ~0.9 expected firings on B, overdrawing its
  // single molecule in roughly a quarter of the attempts.
  const ReactionNetwork net2 = ReactionNetwork::parse(
      "species A B\ninit 10000 1\n"
      "reaction R1 : A -> 0 ; rate 1\n"
      "reaction R2 : B -> 0 ; rate 1\n");
  unsigned long long r_rejections = 0;
  for (int seed = 0; seed < 200; ++seed) {
    Simulator sim(net2, SolverKind::r_leap, cfg, RngStream(seed, 1));
    REQUIRE(sim.step(kBig) == Simulator::Outcome::advanced);
    r_rejections += sim.stats().rejected_proposals;
    const auto& fired = sim.last_proposal().firings;
    CHECK(sim.state().x[0] == 10000 - fired[0]);
    CHECK(sim.state().x[1] == 1 - fired[1]);
    CHECK(sim.state().x[1] >= 0);
    CHECK(sim.state().t == sim.last_proposal().tau);
  }
  CHECK(r_rejections > 0);
}

TEST_CASE("fixed-count leap with a unit budget is an exact step in law") {
  const ReactionNetwork net = load_model("dimer_nonstiff");
  SolverConfig cfg;
  cfg.l_max = 1;  // clamps every leap to a single firing
  const int n = 100000;

  std::vector<double> r_taus(n), ssa_taus(n);
  std::vector<long long> r_channel(4, 0), ssa_channel(4, 0);
  Simulator r_sim(net, SolverKind::r_leap, cfg, RngStream(61, 0));
  Simulator ssa_sim(net, SolverKind::ssa, SolverConfig{}, RngStream(62, 0));
  for (int i = 0; i < n; ++i) {
    r_sim.reset(net.initial_state());
    REQUIRE(r_sim.step(kBig) == Simulator::Outcome::advanced);
    r_taus[i] = r_sim.last_proposal().tau;
    for (int j = 0; j < 4; ++j)
      if (r_sim.last_proposal().firings[j] == 1) ++r_channel[j];

    ssa_sim.reset(net.initial_state());
    REQUIRE(ssa_sim.step(kBig) == Simulator::Outcome::advanced);
    ssa_taus[i] = ssa_sim.last_proposal().tau;
    for (int j = 0; j < 4; ++j)
      if (ssa_sim.last_proposal().firings[j] == 1) ++ssa_channel[j];
  }
  CHECK(ks_two_sample(r_taus, ssa_taus).pvalue > 0.01);
  CHECK(chi_square_homogeneity(r_channel, ssa_channel).pvalue > 0.01);
}

TEST_CASE("time-leap empty draw advances then fires exactly once") {
  const ReactionNetwork net = load_model("bsubtilis");
  SolverConfig cfg;
  cfg.epsilon = 1e-9;  // numerator clamp: a0*tau near 1, L=0 often
  cfg.ssa_fallback = false;

  Simulator s_sim(net, SolverKind::s_leap, cfg, RngStream(71, 0));
  Simulator ssa_sim(net, SolverKind::ssa, SolverConfig{}, RngStream(72, 0));
  std::vector<double> fallback_taus, ssa_taus;
  std::vector<long long> fb_channel(6, 0), ssa_channel(6, 0);
  int fallbacks = 0;
  const int reps = 30000;
  for (int i = 0; i < reps; ++i) {
    s_sim.reset(net.initial_state());
    REQUIRE(s_sim.step(kBig) == Simulator::Outcome::advanced);
    const StepProposal& p = s_sim.last_proposal();
    long long total = 0;
    for (long long kj : p.firings) total += kj;
    if (p.pre_advance > 0.0) {
      ++fallbacks;
      CHECK(total == 1);  // the empty leap resolves into one firing
      fallback_taus.push_back(p.tau);
      for (int j = 0; j < 6; ++j)
        if (p.firings[j] == 1) ++fb_channel[j];
      // committed time covers the empty leap plus the firing wait
      CHECK(s_sim.state().t == doctest::Approx(p.pre_advance + p.tau));
    }

    ssa_sim.reset(net.initial_state());
    REQUIRE(ssa_sim.step(kBig) == Simulator::Outcome::advanced);
    ssa_taus.push_back(ssa_sim.last_proposal().tau);
    for (int j = 0; j < 6; ++j)
      if (ssa_sim.last_proposal().firings[j] == 1) ++ssa_channel[j];
  }
  REQUIRE(fallbacks > 5000);  // the empty-leap path genuinely exercised
  // the post-fallback firing matches the exact method in law
  ssa_taus.resize(fallback_taus.size());
  CHECK(ks_two_sample(fallback_taus, ssa_taus).pvalue > 0.01);
  CHECK(chi_square_homogeneity(fb_channel, ssa_channel).pvalue > 0.01);
}

TEST_CASE("time-leap firing totals follow the expected mean") {
  const ReactionNetwork net = ReactionNetwork::parse(
      "species A\ninit 10000\nreaction R1 : A -> 0 ; rate 1\n");
  SolverConfig cfg;
  Simulator sim(net, SolverKind::s_leap, cfg, RngStream(81, 0));
  const int reps = 10000;
  double total = 0.0;
  for (int i = 0; i < reps; ++i) {
    sim.reset(net.initial_state());
    REQUIRE(sim.step(kBig) == Simulator::Outcome::advanced);
    total += static_cast<double>(sim.last_proposal().firings[0]);
  }
  // L ~ Poisson(a0 tau) with a0 tau = 300
  CHECK(std::fabs(total / reps - 300.0) <= 4.0 * std::sqrt(300.0 / reps));
}

TEST_CASE("probabilistic firing bound keeps leaps committed and nonnegative") {
  const ReactionNetwork net = load_model("dimer_nonstiff");
  SolverConfig cfg;
  cfg.negative_control = true;
  for (SolverKind kind : {SolverKind::r_leap, SolverKind::s_leap}) {
    Simulator sim(net, kind, cfg, RngStream(91, 0));
    const Trajectory traj = sim.run(10.0, one_point_grid(10.0));
    CHECK(sim.stats().steps_total > 0);
    for (long long v : traj.grid_states[0]) CHECK(v >= 0);
  }
}

TEST_CASE("newton failure aborts the run after the halving budget") {
  SolverConfig cfg;
  cfg.ssa_fallback = false;     // keep the implicit path engaged
  cfg.newton_tol = 1e-300;      // unreachable tolerance
  cfg.max_halvings = 8;

  const ReactionNetwork net = load_model("dimer_stiff");
  Simulator sim(net, SolverKind::tau_adaptive, cfg, RngStream(3, 0));
  sim.reset(stiff_equilibrium_state());
  CHECK_THROWS_AS(sim.step(kBig), SolverAbort);

  Simulator sim_s(net, SolverKind::s_adaptive, cfg, RngStream(3, 0));
  sim_s.reset(stiff_equilibrium_state());
  CHECK_THROWS_AS(sim_s.step(kBig), SolverAbort);
}

TEST_CASE("per-step draw economy of the time-budget cascade") {
  const ReactionNetwork net = load_model("lacz_big");
  SolverConfig cfg;
  cfg.ssa_fallback = false;
  const Trajectory s = run_trajectory(net, SolverKind::s_leap, cfg,
                                      RngStream(41, 0), 1.0,
                                      one_point_grid(1.0));
  const Trajectory tau = run_trajectory(net, SolverKind::tau_explicit, cfg,
                                        RngStream(41, 0), 1.0,
                                        one_point_grid(1.0));
  const double s_rate = static_cast<double>(s.stats.rng_draws) /
                        static_cast<double>(s.stats.steps_total);
  const double tau_rate = static_cast<double>(tau.stats.rng_draws) /
                          static_cast<double>(tau.stats.steps_total);
  CHECK(s_rate <= tau_rate);
}

TEST_CASE("grid readout picks the nearest landed time") {
  const std::vector<double> grid{5.0};
  GridRecorder rec(grid, 1);
  rec.start(SystemState{{7}, 0.0});
  rec.land(4.9, {8});
  rec.land(5.2, {9});
  rec.finish();
  CHECK(rec.states()[0] == std::vector<long long>{8});  // 4.9 is closer

  GridRecorder far(grid, 1);
  far.start(SystemState{{7}, 0.0});
  far.land(4.4, {8});
  far.land(5.2, {9});
  far.finish();
  CHECK(far.states()[0] == std::vector<long long>{9});  // 5.2 is closer

  // ties go to the earlier state
  GridRecorder tie(grid, 1);
  tie.start(SystemState{{7}, 0.0});
  tie.land(4.8, {8});
  tie.land(5.2, {9});
  tie.finish();
  CHECK(tie.states()[0] == std::vector<long long>{8});

  // an exact hit wins outright
  GridRecorder hit(grid, 1);
  hit.start(SystemState{{7}, 0.0});
  hit.land(5.0, {8});
  hit.land(5.1, {9});
  hit.finish();
  CHECK(hit.states()[0] == std::vector<long long>{8});

  // grid points at or before the start read the starting state; a run with
  // no landings at all fills everything from the start
  const std::vector<double> grid2{0.0, 3.0};
  GridRecorder still(grid2, 1);
  still.start(SystemState{{7}, 0.0});
  still.finish();
  CHECK(still.states()[0] == std::vector<long long>{7});
  CHECK(still.states()[1] == std::vector<long long>{7});
}

TEST_CASE("zero horizon returns the initial state") {
  const ReactionNetwork net = load_model("dimer_nonstiff");
  const Trajectory traj =
      run_trajectory(net, SolverKind::ssa, SolverConfig{}, RngStream(1, 0),
                     0.0, one_point_grid(0.0));
  CHECK(traj.grid_states[0] == std::vector<long long>{4150, 39565, 3445});
  CHECK(traj.stats.steps_total == 0);
}

TEST_CASE("simulator rejects inconsistent starting states") {
  const ReactionNetwork net = load_model("dimer_nonstiff");
  Simulator sim(net, SolverKind::ssa, SolverConfig{}, RngStream(1, 0));
  CHECK_THROWS(sim.reset(SystemState{{1, 2}, 0.0}));        // wrong width
  CHECK_THROWS(sim.reset(SystemState{{1, -2, 3}, 0.0}));    // negative count
}
