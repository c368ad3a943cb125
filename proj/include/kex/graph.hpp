#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "kex/blood.hpp"
#include "kex/errors.hpp"
#include "kex/profile.hpp"
#include "kex/rng.hpp"
#include "kex/text.hpp"

namespace kex {

// Why the pair is in the exchange at all: its own donation failed on blood
// type, failed the internal crossmatch, or was forced incompatible after the
// generator's resampling cap.
enum class IncompatReason : std::uint8_t { BloodIncompatible, CrossmatchFailed, Forced };

struct PatientDonorPair {
  std::int64_t pair_id = 0;
  BloodType donor_blood = BloodType::O;
  BloodType patient_blood = BloodType::O;
  double patient_pra = 0.0;  // probability a crossmatch against a random donor fails
  PatientProfile profile;
  int arrival_day = 0;
  IncompatReason internal_incompat = IncompatReason::BloodIncompatible;
};

// One Bernoulli(1 - patient_pra) draw per directed edge, keyed on
// (seed, donor pair_id, recipient pair_id). The edge set is therefore a pure
// function of the pairs present and the seed, and a draw never changes once
// made. pra_enabled = false gives pure ABO graphs.
struct Crossmatch {
  std::uint64_t seed = 0;
  bool pra_enabled = true;

  bool passes(const PatientDonorPair& from, const PatientDonorPair& to) const {
    if (!pra_enabled) return true;
    SplitMix64 g(hash64(seed, static_cast<std::uint64_t>(from.pair_id),
                        static_cast<std::uint64_t>(to.pair_id)));
    return uniform01(g) < 1.0 - to.patient_pra;
  }
};

struct DirectedEdge {
  std::int64_t from = 0;
  std::int64_t to = 0;
  friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

// Directed compatibility graph over patient-donor pairs. Vertices are keyed
// by pair_id in ordered maps so every iteration order is deterministic.
class CompatibilityGraph {
 public:
  const std::map<std::int64_t, PatientDonorPair>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  bool contains(std::int64_t id) const { return vertices_.count(id) != 0; }

  const PatientDonorPair& vertex(std::int64_t id) const {
    auto it = vertices_.find(id);
    if (it == vertices_.end())
      throw DataError("no such pair in graph: " + std::to_string(id));
    return it->second;
  }

  // Inserts the pair and wires edges against every resident vertex: an edge
  // u->v exists iff blood_compatible(donor(u), patient(v)) and the crossmatch
  // draw for (u, v) succeeds. Returns the edges added.
  std::vector<DirectedEdge> add_pair(const PatientDonorPair& p, const Crossmatch& cm) {
    if (contains(p.pair_id))
      throw DataError("duplicate pair_id: " + std::to_string(p.pair_id));
    std::vector<DirectedEdge> added;
    for (const auto& [uid, u] : vertices_) {
      if (blood_compatible(u.donor_blood, p.patient_blood) && cm.passes(u, p)) {
        out_[uid].insert(p.pair_id);
        in_[p.pair_id].insert(uid);
        added.push_back({uid, p.pair_id});
      }
      if (blood_compatible(p.donor_blood, u.patient_blood) && cm.passes(p, u)) {
        out_[p.pair_id].insert(uid);
        in_[uid].insert(p.pair_id);
        added.push_back({p.pair_id, uid});
      }
    }
    vertices_.emplace(p.pair_id, p);
    return added;
  }

  void remove_pair(std::int64_t id) {
    auto it = vertices_.find(id);
    if (it == vertices_.end()) return;
    for (std::int64_t v : out_[id]) in_[v].erase(id);
    for (std::int64_t u : in_[id]) out_[u].erase(id);
    out_.erase(id);
    in_.erase(id);
    vertices_.erase(it);
  }

  bool has_edge(std::int64_t u, std::int64_t v) const {
    auto it = out_.find(u);
    return it != out_.end() && it->second.count(v) != 0;
  }

  const std::set<std::int64_t>& out_edges(std::int64_t u) const {
    static const std::set<std::int64_t> empty;
    auto it = out_.find(u);
    return it == out_.end() ? empty : it->second;
  }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& [u, vs] : out_) n += vs.size();
    return n;
  }

 private:
  std::map<std::int64_t, PatientDonorPair> vertices_;
  std::map<std::int64_t, std::set<std::int64_t>> out_, in_;
};

// --- pool snapshot: pair_id,donor_blood,patient_blood,pra,profile_id,arrival_day ---

inline constexpr std::string_view kPoolSnapshotHeader =
    "pair_id,donor_blood,patient_blood,pra,profile_id,arrival_day";

inline void write_pool_snapshot(const CompatibilityGraph& g,
                                const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << kPoolSnapshotHeader << '\n';
  for (const auto& [id, p] : g.vertices()) {
    out << id << ',' << to_string(p.donor_blood) << ',' << to_string(p.patient_blood)
        << ',' << format_g9(p.patient_pra) << ',' << p.profile.id << ','
        << p.arrival_day << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

// Rebuilds the graph from a snapshot; edges are re-derived from the
// crossmatch seed, which is what makes snapshots portable.
inline CompatibilityGraph read_pool_snapshot(const std::filesystem::path& path,
                                             const Crossmatch& cm) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != kPoolSnapshotHeader)
    throw DataError(path.string() + ": missing pool snapshot header");
  CompatibilityGraph g;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string ctx = path.string() + ":" + std::to_string(i + 1);
    const auto f = split_csv(lines[i]);
    if (f.size() != 6) throw DataError(ctx + ": expected 6 fields");
    PatientDonorPair p;
    p.pair_id = parse_int(f[0], ctx);
    p.donor_blood = parse_blood_type(f[1]);
    p.patient_blood = parse_blood_type(f[2]);
    p.patient_pra = parse_double(f[3], ctx);
    p.profile = PatientProfile::from_id(static_cast<int>(parse_int(f[4], ctx)));
    p.arrival_day = static_cast<int>(parse_int(f[5], ctx));
    g.add_pair(p, cm);
  }
  return g;
}

}  // namespace kex
