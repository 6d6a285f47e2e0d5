#include "sleap/model.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>

namespace sleap {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ModelError("line " + std::to_string(line) + ": " + msg);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_')
    return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

double parse_real(std::string_view tok, int line, const char* what) {
  double v = 0.0;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [p, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || p != end)
    fail(line, std::string("bad ") + what + " '" + std::string(tok) + "'");
  return v;
}

long long parse_count(std::string_view tok, int line, const char* what) {
  long long v = 0;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [p, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || p != end)
    fail(line, std::string("bad ") + what + " '" + std::string(tok) + "'");
  return v;
}

// "key=value" → value, or fail.
std::string_view keyed_value(std::string_view tok, std::string_view key,
                             int line) {
  if (tok.size() <= key.size() + 1 || tok.substr(0, key.size()) != key ||
      tok[key.size()] != '=')
    fail(line, "expected " + std::string(key) + "=<value>, got '" +
                   std::string(tok) + "'");
  return tok.substr(key.size() + 1);
}

std::string format_real(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  assert(ec == std::errc());
  return std::string(buf, p);
}

// Parse one side of a reaction ("0", or terms like "2 S1 + S2") into merged
// (species, multiplicity) pairs sorted by species index.
std::vector<std::pair<int, int>> parse_side(
    std::string_view side, const std::map<std::string, int, std::less<>>& index,
    int line) {
  side = trim(side);
  if (side.empty()) fail(line, "empty reaction side");
  if (side == "0") return {};

  std::map<int, int> merged;
  std::size_t pos = 0;
  while (pos <= side.size()) {
    std::size_t plus = side.find('+', pos);
    std::string_view term =
        trim(side.substr(pos, (plus == std::string_view::npos ? side.size()
                                                              : plus) -
                                  pos));
    if (term.empty()) fail(line, "empty term in reaction side");

    long long mult = 1;
    std::string_view name = term;
    auto tokens = split_ws(term);
    if (tokens.size() == 2) {
      mult = parse_count(tokens[0], line, "stoichiometric coefficient");
      name = tokens[1];
    } else if (tokens.size() == 1) {
      std::size_t d = 0;
      while (d < term.size() &&
             std::isdigit(static_cast<unsigned char>(term[d])))
        ++d;
      if (d > 0) {
        mult = parse_count(term.substr(0, d), line, "stoichiometric coefficient");
        name = term.substr(d);
      }
    } else {
      fail(line, "bad term '" + std::string(term) + "'");
    }
    if (mult < 1) fail(line, "stoichiometric coefficient must be >= 1");
    if (!is_identifier(name))
      fail(line, "bad species name '" + std::string(name) + "'");
    auto it = index.find(name);
    if (it == index.end())
      fail(line, "unknown species '" + std::string(name) + "'");
    merged[it->second] += static_cast<int>(mult);

    if (plus == std::string_view::npos) break;
    pos = plus + 1;
  }
  return {merged.begin(), merged.end()};
}

}  // namespace

ReactionNetwork::ReactionNetwork(std::vector<std::string> species,
                                 std::vector<long long> initial,
                                 std::vector<Reaction> reactions,
                                 std::vector<std::pair<int, int>> reversible_pairs,
                                 std::optional<double> volume_tgen,
                                 std::vector<ResampleHook> resample_hooks)
    : species_(std::move(species)),
      initial_(std::move(initial)),
      reactions_(std::move(reactions)),
      reversible_pairs_(std::move(reversible_pairs)),
      volume_tgen_(volume_tgen),
      resample_hooks_(std::move(resample_hooks)) {
  validate_and_finalize();
}

void ReactionNetwork::validate_and_finalize() {
  const int n = species_count();
  if (n == 0) throw ModelError("model declares no species");
  if (reactions_.empty()) throw ModelError("model declares no reactions");
  if (initial_.empty()) initial_.assign(n, 0);
  if (static_cast<int>(initial_.size()) != n)
    throw ModelError("init count does not match species count");
  for (long long c : initial_)
    if (c < 0) throw ModelError("negative initial count");
  if (volume_tgen_ && *volume_tgen_ <= 0.0)
    throw ModelError("volume tgen must be positive");
  for (const ResampleHook& h : resample_hooks_) {
    if (h.species < 0 || h.species >= n)
      throw ModelError("resample hook names an unknown species");
    if (h.stddev < 0.0) throw ModelError("resample sd must be >= 0");
  }

  auto normalize = [n](std::vector<std::pair<int, int>>& side) {
    std::map<int, int> merged;
    for (auto [i, m] : side) {
      if (i < 0 || i >= n) throw ModelError("reaction names an unknown species");
      if (m < 1) throw ModelError("stoichiometric coefficient must be >= 1");
      merged[i] += m;
    }
    side.assign(merged.begin(), merged.end());
  };

  for (Reaction& r : reactions_) {
    normalize(r.reactants);
    normalize(r.products);
    if (r.rate < 0.0)
      throw ModelError("reaction '" + r.name + "' has a negative rate");
    r.order = 0;
    for (auto [i, m] : r.reactants) r.order += m;
    if (r.order > 3)
      throw ModelError("reaction '" + r.name + "' has order " +
                       std::to_string(r.order) +
                       "; mass-action orders above 3 are not supported");
    // Volume rescaling applies to bimolecular and higher reactions whenever
    // the model carries a growing volume.
    r.volume_scaled = volume_tgen_.has_value() && r.order >= 2;

    std::map<int, int> d;
    for (auto [i, m] : r.reactants) d[i] -= m;
    for (auto [i, m] : r.products) d[i] += m;
    r.delta.clear();
    for (auto [i, m] : d)
      if (m != 0) r.delta.emplace_back(i, m);
  }

  const int m = reaction_count();
  partner_.assign(m, -1);
  for (auto [fwd, rev] : reversible_pairs_) {
    if (fwd < 0 || fwd >= m || rev < 0 || rev >= m || fwd == rev)
      throw ModelError("bad reversible pair");
    if (partner_[fwd] != -1 || partner_[rev] != -1)
      throw ModelError("reaction '" + reactions_[fwd].name +
                       "' or '" + reactions_[rev].name +
                       "' appears in more than one reversible pair");
    // A declared pair must actually undo each other's state change.
    std::map<int, int> sum;
    for (auto [i, d] : reactions_[fwd].delta) sum[i] += d;
    for (auto [i, d] : reactions_[rev].delta) sum[i] += d;
    for (auto [i, d] : sum)
      if (d != 0)
        throw ModelError("reversible pair " + reactions_[fwd].name + "/" +
                         reactions_[rev].name +
                         " does not have opposite state changes");
    partner_[fwd] = rev;
    partner_[rev] = fwd;
  }

  hor_.assign(n, 0);
  hor_mult_.assign(n, 0);
  for (const Reaction& r : reactions_) {
    for (auto [i, mult] : r.reactants) {
      if (r.order > hor_[i]) {
        hor_[i] = r.order;
        hor_mult_[i] = mult;
      } else if (r.order == hor_[i]) {
        hor_mult_[i] = std::max(hor_mult_[i], mult);
      }
    }
  }
  reactant_species_.clear();
  for (int i = 0; i < n; ++i)
    if (hor_[i] > 0) reactant_species_.push_back(i);

  factor_begin_.assign(m + 1, 0);
  factor_species_.clear();
  factor_shift_.clear();
  for (int j = 0; j < m; ++j) {
    for (auto [i, mult] : reactions_[j].reactants) {
      for (int q = 0; q < mult; ++q) {
        factor_species_.push_back(i);
        factor_shift_.push_back(q);
      }
    }
    factor_begin_[j + 1] = static_cast<int>(factor_species_.size());
  }
}

int ReactionNetwork::species_index(std::string_view name) const {
  for (int i = 0; i < species_count(); ++i)
    if (species_[i] == name) return i;
  return -1;
}

ReactionNetwork ReactionNetwork::parse(std::string_view text) {
  std::vector<std::string> species;
  std::map<std::string, int, std::less<>> species_index;
  std::vector<long long> initial;
  std::vector<Reaction> reactions;
  std::map<std::string, int, std::less<>> reaction_index;
  std::vector<std::pair<int, int>> pairs;
  std::optional<double> tgen;
  std::vector<ResampleHook> hooks;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, (eol == std::string_view::npos ? text.size() : eol) -
                             pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;

    if (std::size_t hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    auto tokens = split_ws(line);
    std::string_view head = tokens[0];

    if (head == "species") {
      if (tokens.size() < 2) fail(line_no, "species line lists no names");
      for (std::size_t k = 1; k < tokens.size(); ++k) {
        if (!is_identifier(tokens[k]))
          fail(line_no, "bad species name '" + std::string(tokens[k]) + "'");
        if (species_index.count(tokens[k]))
          fail(line_no, "duplicate species '" + std::string(tokens[k]) + "'");
        species_index.emplace(std::string(tokens[k]),
                              static_cast<int>(species.size()));
        species.emplace_back(tokens[k]);
      }
    } else if (head == "init") {
      if (species.empty()) fail(line_no, "init appears before species");
      if (!initial.empty()) fail(line_no, "duplicate init line");
      if (tokens.size() - 1 != species.size())
        fail(line_no, "init lists " + std::to_string(tokens.size() - 1) +
                          " counts for " + std::to_string(species.size()) +
                          " species");
      for (std::size_t k = 1; k < tokens.size(); ++k) {
        long long c = parse_count(tokens[k], line_no, "initial count");
        if (c < 0) fail(line_no, "initial counts must be >= 0");
        initial.push_back(c);
      }
    } else if (head == "reaction") {
      // reaction NAME : SIDE -> SIDE ; rate VALUE
      std::size_t colon = line.find(':');
      if (colon == std::string_view::npos) fail(line_no, "missing ':'");
      auto name_tokens = split_ws(line.substr(8, colon - 8));
      if (name_tokens.size() != 1 || !is_identifier(name_tokens[0]))
        fail(line_no, "missing or bad reaction name");
      std::string name(name_tokens[0]);
      if (reaction_index.count(name))
        fail(line_no, "duplicate reaction '" + name + "'");

      std::string_view rest = line.substr(colon + 1);
      std::size_t arrow = rest.find("->");
      if (arrow == std::string_view::npos) fail(line_no, "missing '->'");
      std::size_t semi = rest.find(';', arrow);
      if (semi == std::string_view::npos) fail(line_no, "missing ';'");

      Reaction r;
      r.name = name;
      r.reactants = parse_side(rest.substr(0, arrow), species_index, line_no);
      r.products =
          parse_side(rest.substr(arrow + 2, semi - arrow - 2), species_index,
                     line_no);
      auto rate_tokens = split_ws(rest.substr(semi + 1));
      if (rate_tokens.size() != 2 || rate_tokens[0] != "rate")
        fail(line_no, "expected 'rate <value>' after ';'");
      r.rate = parse_real(rate_tokens[1], line_no, "rate");
      if (r.rate < 0.0) fail(line_no, "rate must be >= 0");

      reaction_index.emplace(name, static_cast<int>(reactions.size()));
      reactions.push_back(std::move(r));
    } else if (head == "reversible") {
      if (tokens.size() != 3)
        fail(line_no, "reversible expects exactly two reaction names");
      int idx[2];
      for (int k = 0; k < 2; ++k) {
        auto it = reaction_index.find(tokens[k + 1]);
        if (it == reaction_index.end())
          fail(line_no, "unknown reaction '" + std::string(tokens[k + 1]) + "'");
        idx[k] = it->second;
      }
      pairs.emplace_back(idx[0], idx[1]);
    } else if (head == "volume") {
      if (tokens.size() != 2) fail(line_no, "volume expects tgen=<value>");
      if (tgen) fail(line_no, "duplicate volume line");
      double v = parse_real(keyed_value(tokens[1], "tgen", line_no), line_no,
                            "tgen value");
      if (v <= 0.0) fail(line_no, "tgen must be positive");
      tgen = v;
    } else if (head == "resample") {
      if (tokens.size() != 4)
        fail(line_no, "resample expects: resample NAME mean=<v> sd=<v>");
      auto it = species_index.find(tokens[1]);
      if (it == species_index.end())
        fail(line_no, "unknown species '" + std::string(tokens[1]) + "'");
      ResampleHook h;
      h.species = it->second;
      h.mean = parse_real(keyed_value(tokens[2], "mean", line_no), line_no,
                          "mean value");
      h.stddev = parse_real(keyed_value(tokens[3], "sd", line_no), line_no,
                            "sd value");
      if (h.stddev < 0.0) fail(line_no, "sd must be >= 0");
      hooks.push_back(h);
    } else {
      fail(line_no, "unknown directive '" + std::string(head) + "'");
    }
  }

  try {
    return ReactionNetwork(std::move(species), std::move(initial),
                           std::move(reactions), std::move(pairs), tgen,
                           std::move(hooks));
  } catch (const ModelError& e) {
    throw ModelError(std::string("model: ") + e.what());
  }
}

std::string ReactionNetwork::serialize() const {
  std::ostringstream out;
  out << "species";
  for (const std::string& s : species_) out << ' ' << s;
  out << '\n';
  out << "init";
  for (long long c : initial_) out << ' ' << c;
  out << '\n';

  auto emit_side = [&](const std::vector<std::pair<int, int>>& side) {
    if (side.empty()) {
      out << '0';
      return;
    }
    bool first = true;
    for (auto [i, m] : side) {
      if (!first) out << " + ";
      first = false;
      if (m != 1) out << m << ' ';
      out << species_[i];
    }
  };

  for (const Reaction& r : reactions_) {
    out << "reaction " << r.name << " : ";
    emit_side(r.reactants);
    out << " -> ";
    emit_side(r.products);
    out << " ; rate " << format_real(r.rate) << '\n';
  }
  for (auto [fwd, rev] : reversible_pairs_)
    out << "reversible " << reactions_[fwd].name << ' ' << reactions_[rev].name
        << '\n';
  if (volume_tgen_) out << "volume tgen=" << format_real(*volume_tgen_) << '\n';
  for (const ResampleHook& h : resample_hooks_)
    out << "resample " << species_[h.species] << " mean=" << format_real(h.mean)
        << " sd=" << format_real(h.stddev) << '\n';
  return out.str();
}


double propensity_continuous(const ReactionNetwork& net,
                             std::span<const double> x, int j, double volume) {
  const auto& begin = net.factor_begin();
  const auto& fsp = net.factor_species();
  const auto& fsh = net.factor_shift();
  const Reaction& r = net.reactions()[j];

  double a = r.rate;
  for (int q = begin[j]; q < begin[j + 1]; ++q)
    a *= x[fsp[q]] - static_cast<double>(fsh[q]);
  if (r.volume_scaled) {
    for (int q = 1; q < r.order; ++q) a /= volume;
  }
  return a;
}


double g_factor(const ReactionNetwork& net, const SystemState& state, int i) {
  const int h = net.highest_order(i);
  const int n = net.highest_order_multiplicity(i);
  assert(h >= 1);
  if (n <= 1) return static_cast<double>(h);
  const long long xi = state.x[i];
  // With xi at or below n-1 the correction terms blow up.  Saturate instead:
  // a huge g collapses the per-species leap cap to its floor of one event,
  // which is the right conservative behaviour for a nearly exhausted species.
  if (xi <= n - 1) return 100.0 * h;
  double sum = 0.0;
  for (int q = 1; q <= n - 1; ++q)
    sum += static_cast<double>(q) / static_cast<double>(xi - q);
  return h + (static_cast<double>(h) / n) * sum;
}

double apply_hooks(const ReactionNetwork& net, SystemState& state,
                   RngStream& rng) {
  double volume = 1.0;
  if (net.volume_tgen()) volume = 1.0 + state.t / *net.volume_tgen();
  for (const ResampleHook& h : net.resample_hooks()) {
    const double v = rng.normal(h.mean * volume, h.stddev);
    state.x[h.species] = std::max<long long>(0, std::llround(v));
  }
  return volume;
}

}  // namespace sleap
