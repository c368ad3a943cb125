#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "kex/graph.hpp"

namespace kex {

// A donation cycle, stored in canonical rotation: the sequence starts at its
// minimum pair_id. Consecutive vertices (and last -> first) are graph edges.
struct Cycle {
  std::vector<std::int64_t> verts;

  int size() const { return static_cast<int>(verts.size()); }

  friend bool operator==(const Cycle&, const Cycle&) = default;
  friend auto operator<=>(const Cycle& a, const Cycle& b) { return a.verts <=> b.verts; }
};

// Every simple directed cycle of length 2..max_len, one canonical rotation
// each. The walk roots each cycle at its minimum vertex and only passes
// through larger ids, so no rotation can appear twice. Output is sorted.
inline std::vector<Cycle> enumerate_cycles(const CompatibilityGraph& g, int max_len) {
  if (max_len < 2) throw ConfigError("cycle length cap must be >= 2");
  std::vector<Cycle> out;
  std::vector<std::int64_t> path;

  auto extend = [&](auto&& self, std::int64_t root) -> void {
    const std::int64_t u = path.back();
    for (std::int64_t v : g.out_edges(u)) {
      if (v == root) {
        if (path.size() >= 2) out.push_back(Cycle{path});
        continue;
      }
      if (v < root || static_cast<int>(path.size()) >= max_len) continue;
      if (std::find(path.begin(), path.end(), v) != path.end()) continue;
      path.push_back(v);
      self(self, root);
      path.pop_back();
    }
  };

  for (const auto& [root, unused] : g.vertices()) {
    path.assign(1, root);
    extend(extend, root);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace kex
