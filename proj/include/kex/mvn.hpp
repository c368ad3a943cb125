#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "kex/rng.hpp"

namespace kex {

// N(mu, Sigma) over the three profile features, held via the lower-triangular
// Cholesky factor in row-major order (l00, l10, l11, l20, l21, l22), so
// Sigma = L L^T is positive semi-definite by construction. chol may be all
// zeros: that is the degenerate point-mass at mu.
struct MvnParams {
  std::array<double, 3> mu{};
  std::array<double, 6> chol{};

  std::array<double, 3> apply_chol(const std::array<double, 3>& z) const {
    return {chol[0] * z[0],
            chol[1] * z[0] + chol[2] * z[1],
            chol[3] * z[0] + chol[4] * z[1] + chol[5] * z[2]};
  }

  // Sigma = L L^T, row-major 3x3.
  std::array<double, 9> sigma() const {
    const double l00 = chol[0], l10 = chol[1], l11 = chol[2];
    const double l20 = chol[3], l21 = chol[4], l22 = chol[5];
    return {l00 * l00, l00 * l10, l00 * l20,
            l10 * l00, l10 * l10 + l11 * l11, l10 * l20 + l11 * l21,
            l20 * l00, l20 * l10 + l21 * l11, l20 * l20 + l21 * l21 + l22 * l22};
  }

  static MvnParams diag(const std::array<double, 3>& mu,
                        const std::array<double, 3>& sigma_diag) {
    MvnParams p;
    p.mu = mu;
    p.chol = {std::sqrt(sigma_diag[0]), 0.0, std::sqrt(sigma_diag[1]),
              0.0, 0.0, std::sqrt(sigma_diag[2])};
    return p;
  }

  friend bool operator==(const MvnParams&, const MvnParams&) = default;
};

// One utility-weight draw; reproducible as beta = mu + L z with the three
// standard normals generated by SplitMix64(source_seed).
struct BetaSample {
  std::array<double, 3> beta{};
  std::uint64_t source_seed = 0;
};

inline BetaSample sample_beta(const MvnParams& params, std::uint64_t seed) {
  SplitMix64 g(seed);
  const std::array<double, 3> z = {normal01(g), normal01(g), normal01(g)};
  const auto lz = params.apply_chol(z);
  return {{params.mu[0] + lz[0], params.mu[1] + lz[1], params.mu[2] + lz[2]}, seed};
}

// Fixed standard-normal draw set shared across every likelihood evaluation of
// one fit (common random numbers).
struct CommonRandomDraws {
  std::vector<std::array<double, 3>> z;

  int count() const { return static_cast<int>(z.size()); }

  static CommonRandomDraws make(int draws, std::uint64_t seed) {
    CommonRandomDraws d;
    d.z.resize(draws);
    SplitMix64 g(seed);
    for (auto& zi : d.z) zi = {normal01(g), normal01(g), normal01(g)};
    return d;
  }
};

}  // namespace kex
