#include "sleap/sampling.hpp"

#include <cassert>
#include <cmath>
#include <random>

namespace sleap {

namespace {

// Philox2x64 multiplier and Weyl key increment (Salmon et al. constants).
constexpr std::uint64_t kMult = 0xD2B74407B1CE6E93ull;
constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ull;

inline void philox_round(std::uint64_t& c0, std::uint64_t& c1,
                         std::uint64_t key) {
  const unsigned __int128 prod = static_cast<unsigned __int128>(kMult) * c0;
  const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
  const std::uint64_t lo = static_cast<std::uint64_t>(prod);
  c0 = hi ^ key ^ c1;
  c1 = lo;
}

}  // namespace

void RngStream::refill() {
  std::uint64_t c0 = counter_;
  std::uint64_t c1 = stream_;
  std::uint64_t key = seed_;
  for (int r = 0; r < 10; ++r) {
    philox_round(c0, c1, key);
    key += kWeyl;
  }
  buf_[0] = c0;
  buf_[1] = c1;
  avail_ = 2;
  ++counter_;
}

double RngStream::gamma_int(long long shape, double scale) {
  assert(shape >= 1 && scale > 0.0);
  ++draws_;
  std::gamma_distribution<double> dist(static_cast<double>(shape), scale);
  return dist(*this);
}

long long RngStream::poisson(double mean) {
  assert(mean >= 0.0);
  ++draws_;
  if (mean <= 0.0) return 0;
  std::poisson_distribution<long long> dist(mean);
  return dist(*this);
}

long long RngStream::binomial(long long trials, double prob) {
  assert(trials >= 0);
  ++draws_;
  if (trials <= 0 || prob <= 0.0) return 0;
  if (prob >= 1.0) return trials;
  std::binomial_distribution<long long> dist(trials, prob);
  return dist(*this);
}

double RngStream::normal(double mean, double stddev) {
  assert(stddev >= 0.0);
  ++draws_;
  if (stddev == 0.0) return mean;
  std::normal_distribution<double> dist(mean, stddev);
  return dist(*this);
}

}  // namespace sleap
