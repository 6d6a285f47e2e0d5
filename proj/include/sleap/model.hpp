#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sleap/sampling.hpp"

namespace sleap {

/// Thrown on malformed model text; the message carries the line number.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mass-action reaction, order <= 3.  reactants/products/delta are sparse
// (species index, count) lists sorted by species index; duplicate species on
// one side are merged into a single entry with the summed multiplicity.
struct Reaction {
  std::string name;
  std::vector<std::pair<int, int>> reactants;
  std::vector<std::pair<int, int>> products;
  std::vector<std::pair<int, int>> delta;  // products minus reactants
  double rate = 0.0;
  int order = 0;            // total reactant multiplicity
  bool volume_scaled = false;

  bool operator==(const Reaction& o) const {
    return name == o.name && reactants == o.reactants &&
           products == o.products && rate == o.rate;
  }
};

// Species whose count is redrawn from a growing normal law before every step:
// N(mean * V(t), stddev), rounded half-away-from-zero and clamped at zero.
struct ResampleHook {
  int species = -1;
  double mean = 0.0;
  double stddev = 0.0;

  bool operator==(const ResampleHook&) const = default;
};

struct SystemState {
  std::vector<long long> x;
  double t = 0.0;
};

// Immutable reaction network.  Built by parse(); all derived tables (state
// deltas, reaction orders, highest-order bookkeeping, flattened mass-action
// factors) are precomputed so the per-step propensity sweep stays cheap.
class ReactionNetwork {
 public:
  ReactionNetwork(std::vector<std::string> species,
                  std::vector<long long> initial,
                  std::vector<Reaction> reactions,
                  std::vector<std::pair<int, int>> reversible_pairs,
                  std::optional<double> volume_tgen,
                  std::vector<ResampleHook> resample_hooks);

  /// Parse the plain-text model format.  Throws ModelError with a line
  /// number on any syntactic or semantic problem.
  static ReactionNetwork parse(std::string_view text);

  /// Inverse of parse(): emits text that parses back to an equal network.
  std::string serialize() const;

  int species_count() const { return static_cast<int>(species_.size()); }
  int reaction_count() const { return static_cast<int>(reactions_.size()); }

  const std::vector<std::string>& species_names() const { return species_; }
  /// Index of a species name, or -1 when unknown.
  int species_index(std::string_view name) const;

  const std::vector<Reaction>& reactions() const { return reactions_; }
  const std::vector<std::pair<int, int>>& reversible_pairs() const {
    return reversible_pairs_;
  }
  /// Reverse partner of reaction j, or -1 when j is not in a declared pair.
  int reverse_partner(int j) const { return partner_[j]; }

  std::optional<double> volume_tgen() const { return volume_tgen_; }
  const std::vector<ResampleHook>& resample_hooks() const {
    return resample_hooks_;
  }

  const std::vector<long long>& initial_counts() const { return initial_; }
  SystemState initial_state() const { return SystemState{initial_, 0.0}; }

  /// Highest order over reactions consuming species i (0 if none do).
  int highest_order(int i) const { return hor_[i]; }
  /// Multiplicity of species i within those highest-order reactions.
  int highest_order_multiplicity(int i) const { return hor_mult_[i]; }
  /// Species that appear as a reactant of at least one reaction.
  const std::vector<int>& reactant_species() const { return reactant_species_; }

  bool operator==(const ReactionNetwork& o) const {
    return species_ == o.species_ && initial_ == o.initial_ &&
           reactions_ == o.reactions_ &&
           reversible_pairs_ == o.reversible_pairs_ &&
           volume_tgen_ == o.volume_tgen_ &&
           resample_hooks_ == o.resample_hooks_;
  }

  // Flattened mass-action factors for the hot propensity sweep: propensity j
  // is rate * prod_q (x[factor_species[q]] - factor_shift[q]) over the slots
  // [factor_begin[j], factor_begin[j+1]), divided by V^(order-1) when the
  // reaction is volume scaled.  With integer states the falling-factorial
  // product is automatically zero whenever a reactant is short.
  const std::vector<int>& factor_begin() const { return factor_begin_; }
  const std::vector<int>& factor_species() const { return factor_species_; }
  const std::vector<int>& factor_shift() const { return factor_shift_; }

 private:
  void validate_and_finalize();

  std::vector<std::string> species_;
  std::vector<long long> initial_;
  std::vector<Reaction> reactions_;
  std::vector<std::pair<int, int>> reversible_pairs_;
  std::optional<double> volume_tgen_;
  std::vector<ResampleHook> resample_hooks_;

  std::vector<int> partner_;
  std::vector<int> hor_;
  std::vector<int> hor_mult_;
  std::vector<int> reactant_species_;
  std::vector<int> factor_begin_;
  std::vector<int> factor_species_;
  std::vector<int> factor_shift_;
};

/// Propensity of reaction j at integer state `state` in volume `volume`
/// (falling-factorial mass action; zero when a reactant count is below its
/// multiplicity).  Inline: this is the innermost kernel of every solver.
inline double propensity(const ReactionNetwork& net, const SystemState& state,
                         int j, double volume) {
  const auto& begin = net.factor_begin();
  const auto& fsp = net.factor_species();
  const auto& fsh = net.factor_shift();
  const Reaction& r = net.reactions()[j];

  double a = r.rate;
  for (int q = begin[j]; q < begin[j + 1]; ++q) {
    const long long c = state.x[fsp[q]] - fsh[q];
    if (c <= 0) return 0.0;  // a reactant is short: falling factorial dies
    a *= static_cast<double>(c);
  }
  if (r.volume_scaled) {
    for (int q = 1; q < r.order; ++q) a /= volume;
  }
  return a;
}

/// Propensity of reaction j at a real-valued state: the same polynomial
/// without the shortfall cutoff, as needed by implicit solves where the
/// state relaxes to continuous values.
double propensity_continuous(const ReactionNetwork& net,
                             std::span<const double> x, int j, double volume);

struct PropensityView {
  std::vector<double> a;
  double a0 = 0.0;
};

/// Evaluate every propensity (in reaction order) and their sum.
inline void all_propensities(const ReactionNetwork& net,
                             const SystemState& state, double volume,
                             PropensityView& out) {
  const int m = net.reaction_count();
  out.a.resize(m);
  out.a0 = 0.0;
  for (int j = 0; j < m; ++j) {
    const double aj = propensity(net, state, j, volume);
    out.a[j] = aj;
    out.a0 += aj;
  }
}

/// Leap-condition denominator g_i for species i; requires that species i is
/// a reactant of some reaction.
double g_factor(const ReactionNetwork& net, const SystemState& state, int i);

/// Run the pre-step hooks: returns the current volume (1 when the model has
/// no volume growth) and redraws any resampled species counts in place.
double apply_hooks(const ReactionNetwork& net, SystemState& state,
                   RngStream& rng);

}  // namespace sleap
