#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace kex {

// SplitMix64 (Steele/Lea/Flood 2014): one 64-bit word of state advanced by a
// fixed odd gamma, output run through an avalanching finalizer. Every random
// stream in this project is a SplitMix64 whose seed is derived with hash64()
// below, so substreams (generation, crossmatch, betas, solver ties, dynamics)
// are independent and any draw can be reproduced from the master seed alone.

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  constexpr result_type operator()() { return mix64(state_ += kGoldenGamma); }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }

 private:
  std::uint64_t state_;
};

// Child-seed rule, documented for reproducibility elsewhere:
//   h = mix64(seed + gamma); for each part p: h = mix64(h + gamma + p)
// Used as hash64(master, run_index, condition_tag) for per-run seeds and as
// hash64(stream, day, pair_id)-style keys for per-event draws.
template <class... Parts>
constexpr std::uint64_t hash64(std::uint64_t seed, Parts... parts) {
  std::uint64_t h = mix64(seed + kGoldenGamma);
  ((h = mix64(h + kGoldenGamma + static_cast<std::uint64_t>(parts))), ...);
  return h;
}

// Uniform in [0, 1), top 53 bits of one word.
template <class Rng>
double uniform01(Rng& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Uniform in (0, 1], safe as a log() argument.
template <class Rng>
double uniform01_pos(Rng& g) {
  return static_cast<double>((g() >> 11) + 1) * 0x1.0p-53;
}

template <class Rng>
bool bernoulli(Rng& g, double p) {
  return uniform01(g) < p;
}

// Box-Muller, one variate per call. Consumes exactly two words so draw
// sequences stay aligned across call sites.
template <class Rng>
double normal01(Rng& g) {
  const double u1 = uniform01_pos(g);
  const double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Knuth's product method; means above 30 split recursively (a sum of
// independent Poissons is Poisson) to keep the product away from underflow.
template <class Rng>
int poisson(Rng& g, double mean) {
  if (mean <= 0.0) return 0;
  if (mean > 30.0) return poisson(g, mean / 2) + poisson(g, mean - mean / 2);
  const double limit = std::exp(-mean);
  double prod = uniform01_pos(g);
  int n = 0;
  while (prod > limit) {
    prod *= uniform01_pos(g);
    ++n;
  }
  return n;
}

// Index draw by multiply-shift; bias is ~n/2^64, irrelevant at our sizes.
template <class Rng>
std::size_t uniform_index(Rng& g, std::size_t n) {
  return static_cast<std::size_t>(
      (static_cast<unsigned __int128>(g()) * n) >> 64);
}

// Weighted pick over a small categorical; weights need not be normalized.
template <class Rng>
std::size_t categorical(Rng& g, std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = uniform01(g) * total;
  double cum = 0.0;
  for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
    cum += weights[k];
    if (u < cum) return k;
  }
  return weights.size() - 1;
}

}  // namespace kex
