#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>

namespace sleap {

// Counter-based random stream (Philox2x64, 10 rounds).
//
// The key is the user seed and the counter's high word is the stream id, so
// every (seed, stream) pair names a fixed sequence of 64-bit words no matter
// which thread draws from it or in which order streams are created.  One
// stream per trajectory keeps ensembles reproducible under any scheduling.
//
// Satisfies UniformRandomBitGenerator, so it can drive the standard
// distributions directly.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_(stream_id) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~static_cast<result_type>(0); }

  result_type operator()() {
    if (avail_ == 0) refill();
    return buf_[2 - avail_--];
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  /// Number of distribution-level samples handed out so far (raw 64-bit
  /// words are not counted; one call to any sample method counts once).
  std::uint64_t draw_count() const { return draws_; }

  /// Uniform double strictly inside (0, 1).
  double uniform01() {
    ++draws_;
    return canonical();
  }

  /// Exponential with the given mean.  Inline: exact-simulation hot path.
  double exponential(double mean) {
    ++draws_;
    return -std::log(canonical()) * mean;
  }

  /// Gamma with integer shape >= 1 and the given scale.
  double gamma_int(long long shape, double scale);

  long long poisson(double mean);

  long long binomial(long long trials, double prob);

  double normal(double mean, double stddev);

  /// Index j with probability weights[j] / sum(weights).  Weights must be
  /// non-negative with a positive sum; a weight of zero is never selected.
  std::size_t discrete(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    return discrete(weights, total);
  }

  /// Same, with the weight sum already known.  Inline: exact-simulation hot
  /// path, where the solver always has the sum at hand.
  std::size_t discrete(std::span<const double> weights, double total) {
    ++draws_;
    const double u = canonical() * total;
    double acc = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
      acc += weights[j];
      if (u < acc) return j;
    }
    // Floating-point tail: fall back to the last selectable index.
    for (std::size_t j = weights.size(); j-- > 0;) {
      if (weights[j] > 0.0) return j;
    }
    return weights.size() - 1;
  }

 private:
  void refill();
  double canonical() {
    // 53 random bits, offset by half an ulp so 0 and 1 are both excluded.
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  int avail_ = 0;
  std::uint64_t draws_ = 0;
};

}  // namespace sleap
