#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kex/cycles.hpp"
#include "kex/errors.hpp"
#include "kex/rng.hpp"
#include "kex/text.hpp"

namespace kex {

// Cycles plus their weights under some edge-weight function. weight[c] is the
// sum of the per-edge weights along the cycle, size[c] is |c|.
struct WeightedCycleSet {
  std::vector<Cycle> cycles;
  std::vector<double> weight;
  std::vector<int> size;

  std::size_t count() const { return cycles.size(); }
};

template <class EdgeWeightFn>
WeightedCycleSet make_weighted_cycle_set(std::vector<Cycle> cycles, EdgeWeightFn&& edge_weight) {
  WeightedCycleSet w;
  w.cycles = std::move(cycles);
  w.weight.reserve(w.cycles.size());
  w.size.reserve(w.cycles.size());
  for (const Cycle& c : w.cycles) {
    double sum = 0.0;
    for (std::size_t k = 0; k < c.verts.size(); ++k) {
      const std::int64_t u = c.verts[k];
      const std::int64_t v = c.verts[(k + 1) % c.verts.size()];
      sum += edge_weight(u, v);
    }
    w.weight.push_back(sum);
    w.size.push_back(c.size());
  }
  return w;
}

// A set of vertex-disjoint cycles. cardinality counts covered vertices
// (= transplants); total_weight excludes tie-breaking perturbations.
struct Matching {
  std::vector<Cycle> cycles;
  int cardinality = 0;
  double total_weight = 0.0;
};

namespace detail {

inline void verify_disjoint(const std::vector<Cycle>& cycles) {
  std::vector<std::int64_t> seen;
  for (const Cycle& c : cycles)
    seen.insert(seen.end(), c.verts.begin(), c.verts.end());
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw NumericalError("solver produced overlapping cycles");
}

inline Matching build_matching(const WeightedCycleSet& set, const std::vector<int>& chosen) {
  Matching m;
  for (int idx : chosen) {
    m.cycles.push_back(set.cycles[idx]);
    m.cardinality += set.size[idx];
    m.total_weight += set.weight[idx];
  }
  std::sort(m.cycles.begin(), m.cycles.end());
  verify_disjoint(m.cycles);
  return m;
}

// Exact branch-and-bound for the cycle-packing program
//   max sum obj[c] x_c   s.t.  each vertex in at most one chosen cycle.
// Branches on the uncovered vertex in the fewest available cycles: one child
// per cycle covering it, plus one child leaving it uncovered. The pruning
// bound is the per-vertex dual sum_{v uncovered} max{obj_c/|c| : c available,
// v in c}, which dominates the LP optimum over the remaining cycles.
class PackingSolver {
 public:
  PackingSolver(const WeightedCycleSet& set, std::span<const double> obj) {
    const std::size_t n = set.count();
    std::map<std::int64_t, int> dense;
    for (const Cycle& c : set.cycles)
      for (std::int64_t v : c.verts) dense.emplace(v, 0);
    int next = 0;
    for (auto& [id, idx] : dense) idx = next++;
    num_verts_ = next;

    verts_.resize(n);
    obj_.assign(obj.begin(), obj.end());
    dens_.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
      dens_[c] = obj[c] / set.size[c];
      for (std::int64_t v : set.cycles[c].verts)
        verts_[c].push_back(dense.at(v));
    }
    used_.assign(num_verts_, 0);
  }

  std::vector<int> solve() {
    best_value_ = -std::numeric_limits<double>::infinity();
    best_.clear();
    current_.clear();
    dfs(0.0);
    std::sort(best_.begin(), best_.end());
    return best_;
  }

 private:
  bool available(std::size_t c) const {
    if (obj_[c] <= 0.0) return false;  // never improves a packing objective
    for (int v : verts_[c])
      if (used_[v]) return false;
    return true;
  }

  void dfs(double value) {
    if (value > best_value_) {
      best_value_ = value;
      best_ = current_;
    }
    // One pass over the available cycles: dual bound plus branching stats.
    std::vector<double> best_dens(num_verts_, 0.0);
    std::vector<int> cover_count(num_verts_, 0);
    for (std::size_t c = 0; c < verts_.size(); ++c) {
      if (!available(c)) continue;
      for (int v : verts_[c]) {
        ++cover_count[v];
        if (dens_[c] > best_dens[v]) best_dens[v] = dens_[c];
      }
    }
    double bound = 0.0;
    for (int v = 0; v < num_verts_; ++v) bound += best_dens[v];
    if (value + bound <= best_value_) return;

    int pick = -1;
    for (int v = 0; v < num_verts_; ++v)
      if (cover_count[v] > 0 && (pick < 0 || cover_count[v] < cover_count[pick]))
        pick = v;
    if (pick < 0) return;

    std::vector<int> candidates;
    for (std::size_t c = 0; c < verts_.size(); ++c) {
      if (!available(c)) continue;
      if (std::find(verts_[c].begin(), verts_[c].end(), pick) != verts_[c].end())
        candidates.push_back(static_cast<int>(c));
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](int a, int b) { return obj_[a] > obj_[b]; });
    for (int c : candidates) {
      for (int v : verts_[c]) used_[v] = 1;
      current_.push_back(c);
      dfs(value + obj_[c]);
      current_.pop_back();
      for (int v : verts_[c]) used_[v] = 0;
    }
    // leave pick uncovered
    used_[pick] = 2;
    dfs(value);
    used_[pick] = 0;
  }

  int num_verts_ = 0;
  std::vector<std::vector<int>> verts_;
  std::vector<double> obj_;
  std::vector<double> dens_;
  std::vector<char> used_;
  std::vector<int> current_, best_;
  double best_value_ = 0.0;
};

inline std::vector<int> solve_packing(const WeightedCycleSet& set, std::span<const double> obj) {
  return PackingSolver(set, obj).solve();
}

// Seeded uniform perturbation in [0, eps) with eps = 1e-7 * (1 + max|obj|);
// realizes random tie-breaking among co-optimal matchings while leaving the
// reported weights untouched.
inline std::vector<double> perturbed(std::span<const double> obj, std::uint64_t seed) {
  double max_abs = 0.0;
  for (double w : obj) max_abs = std::max(max_abs, std::abs(w));
  const double eps = 1e-7 * (1.0 + max_abs);
  SplitMix64 g(seed);
  std::vector<double> out(obj.begin(), obj.end());
  for (double& w : out) w += uniform01(g) * eps;
  return out;
}

inline int max_cardinality_value(const WeightedCycleSet& set) {
  std::vector<double> unit(set.count());
  for (std::size_t c = 0; c < set.count(); ++c) unit[c] = set.size[c];
  const auto chosen = solve_packing(set, unit);
  int q = 0;
  for (int idx : chosen) q += set.size[idx];
  return q;
}

}  // namespace detail

// Maximum-cardinality matching (unit edge weights). Among co-optimal
// matchings the perturbation picks uniformly under the seed. Returns the
// matching and Q, the covered-vertex count.
inline std::pair<Matching, int> solve_max_cardinality(const WeightedCycleSet& set,
                                                      std::uint64_t seed) {
  if (set.count() == 0) return {Matching{}, 0};
  std::vector<double> unit(set.count());
  for (std::size_t c = 0; c < set.count(); ++c) unit[c] = set.size[c];
  const auto obj = detail::perturbed(unit, seed);
  Matching m = detail::build_matching(set, detail::solve_packing(set, obj));
  return {m, m.cardinality};
}

// Maximum-weight matching subject to covering at least floor_q vertices.
// floor_q is the max-cardinality value, so the solve reduces to a scalarized
// objective big*|c| + w_c with big dominating every possible weight sum; the
// result covers exactly floor_q vertices. A floor above the true maximum is
// rejected outright.
inline Matching solve_weighted_with_floor(const WeightedCycleSet& set, int floor_q,
                                          std::uint64_t seed) {
  const int q_max = set.count() == 0 ? 0 : detail::max_cardinality_value(set);
  if (floor_q > q_max)
    throw NumericalError("infeasible cardinality floor " + std::to_string(floor_q) +
                         ": maximum achievable is " + std::to_string(q_max));
  if (set.count() == 0) return Matching{};

  double abs_sum = 0.0;
  for (double w : set.weight) abs_sum += std::abs(w);
  const double big = abs_sum + 2.0;  // dominates any perturbed weight sum
  const auto tie_broken = detail::perturbed(set.weight, seed);
  std::vector<double> obj(set.count());
  for (std::size_t c = 0; c < set.count(); ++c)
    obj[c] = big * set.size[c] + tie_broken[c];
  Matching m = detail::build_matching(set, detail::solve_packing(set, obj));
  if (m.cardinality < floor_q)
    throw NumericalError("solver lost the cardinality floor");  // unreachable
  return m;
}

// Exhaustive oracle: every subset of cycles, filtered to disjoint subsets
// meeting the floor, argmax weight; exact weight ties go to the
// lexicographically smallest cycle-id set. Refuses instances above 20 cycles.
inline Matching brute_force_clear(const WeightedCycleSet& set, int floor_q) {
  const std::size_t n = set.count();
  if (n > 20)
    throw ConfigError("brute_force_clear capped at 20 cycles, got " + std::to_string(n));

  std::map<std::int64_t, int> dense;
  for (const Cycle& c : set.cycles)
    for (std::int64_t v : c.verts) dense.emplace(v, 0);
  int next = 0;
  for (auto& [id, idx] : dense) idx = next++;
  if (next > 64) throw ConfigError("brute_force_clear capped at 64 distinct vertices");
  std::vector<std::uint64_t> mask(n, 0);
  for (std::size_t c = 0; c < n; ++c)
    for (std::int64_t v : set.cycles[c].verts)
      mask[c] |= std::uint64_t{1} << dense.at(v);

  auto ids_of = [](std::uint32_t subset) {
    std::vector<int> ids;
    for (int c = 0; subset; ++c, subset >>= 1)
      if (subset & 1) ids.push_back(c);
    return ids;
  };

  bool found = false;
  double best_weight = 0.0;
  std::vector<int> best_ids;
  for (std::uint32_t subset = 0; subset < (std::uint32_t{1} << n); ++subset) {
    std::uint64_t covered = 0;
    int card = 0;
    double weight = 0.0;
    bool disjoint = true;
    for (std::uint32_t rest = subset, c = 0; rest; ++c, rest >>= 1) {
      if (!(rest & 1)) continue;
      if (covered & mask[c]) {
        disjoint = false;
        break;
      }
      covered |= mask[c];
      card += set.size[c];
      weight += set.weight[c];
    }
    if (!disjoint || card < floor_q) continue;
    if (!found || weight > best_weight) {
      found = true;
      best_weight = weight;
      best_ids = ids_of(subset);
    } else if (weight == best_weight) {
      auto ids = ids_of(subset);
      if (ids < best_ids) best_ids = std::move(ids);
    }
  }
  if (!found)
    throw NumericalError("no disjoint cycle subset meets the cardinality floor " +
                         std::to_string(floor_q));
  return detail::build_matching(set, best_ids);
}

// Debug dump: header with Q, then one line per cycle with id, vertex list and
// weight.
inline std::string dump_instance(const WeightedCycleSet& set, int q) {
  std::ostringstream out;
  out << "Q=" << q << " cycles=" << set.count() << '\n';
  for (std::size_t c = 0; c < set.count(); ++c) {
    out << c << ':';
    for (std::int64_t v : set.cycles[c].verts) out << ' ' << v;
    out << " weight=" << format_g9(set.weight[c]) << '\n';
  }
  return out.str();
}

}  // namespace kex
