#pragma once

#include <algorithm>
#include <array>
#include <vector>

#include "kex/bt.hpp"
#include "kex/clearing.hpp"
#include "kex/cycles.hpp"
#include "kex/generator.hpp"
#include "kex/graph.hpp"
#include "kex/rng.hpp"
#include "kex/survey.hpp"

namespace testutil {

// Three-pair fixture: v1 (donor A, patient B), v2 (donor B, patient A),
// v3 (donor A, patient B). With PRA = 0 the ABO rules wire exactly the two
// overlapping two-cycles {v1,v2} and {v2,v3}.
inline kex::PatientDonorPair fixture_pair(std::int64_t id, kex::BloodType donor,
                                          kex::BloodType patient, int profile_id = 1) {
  kex::PatientDonorPair p;
  p.pair_id = id;
  p.donor_blood = donor;
  p.patient_blood = patient;
  p.patient_pra = 0.0;
  p.profile = kex::PatientProfile::from_id(profile_id);
  p.internal_incompat = kex::IncompatReason::BloodIncompatible;
  return p;
}

inline std::array<kex::PatientDonorPair, 3> overlap_fixture_pairs(int profile_v1 = 1,
                                                                  int profile_v2 = 1,
                                                                  int profile_v3 = 1) {
  return {fixture_pair(1, kex::BloodType::A, kex::BloodType::B, profile_v1),
          fixture_pair(2, kex::BloodType::B, kex::BloodType::A, profile_v2),
          fixture_pair(3, kex::BloodType::A, kex::BloodType::B, profile_v3)};
}

inline kex::CompatibilityGraph overlap_fixture_graph(int profile_v1 = 1, int profile_v2 = 1,
                                                     int profile_v3 = 1) {
  kex::CompatibilityGraph g;
  const kex::Crossmatch cm{0, true};  // PRA = 0, crossmatch always passes
  for (const auto& p : overlap_fixture_pairs(profile_v1, profile_v2, profile_v3))
    g.add_pair(p, cm);
  return g;
}

// Published single-utility profile weights used as fixture data.
inline std::array<double, 8> published_bt_scores() {
  return {1.000, 0.103, 0.236, 0.036, 0.070, 0.012, 0.024, 0.003};
}

inline kex::BtScores published_bt() {
  kex::BtScores s;
  s.score = published_bt_scores();
  return s;
}

// Random G(n, p) directed graph through the graph's own edge rules: every
// pair is donor O / patient AB (always blood compatible) and patient_pra is
// 1 - p, so each ordered crossmatch draw keeps an edge with probability p.
inline kex::CompatibilityGraph random_graph(int n, double edge_prob, std::uint64_t seed) {
  kex::CompatibilityGraph g;
  const kex::Crossmatch cm{seed, true};
  for (int i = 1; i <= n; ++i) {
    auto p = fixture_pair(i, kex::BloodType::O, kex::BloodType::AB);
    p.patient_pra = 1.0 - edge_prob;
    g.add_pair(p, cm);
  }
  return g;
}

// Exhaustive cycle oracle: every k-subsequence ordering is tested against the
// edge set, then canonicalized and deduplicated. Only viable for tiny graphs.
inline std::vector<kex::Cycle> brute_force_cycles(const kex::CompatibilityGraph& g,
                                                  int max_len) {
  std::vector<std::int64_t> ids;
  for (const auto& [id, p] : g.vertices()) ids.push_back(id);
  std::vector<kex::Cycle> found;
  std::vector<std::int64_t> seq;

  auto closes = [&](const std::vector<std::int64_t>& s) {
    for (std::size_t k = 0; k < s.size(); ++k)
      if (!g.has_edge(s[k], s[(k + 1) % s.size()])) return false;
    return true;
  };
  auto grow = [&](auto&& self) -> void {
    if (seq.size() >= 2 && static_cast<int>(seq.size()) <= max_len && closes(seq)) {
      auto min_it = std::min_element(seq.begin(), seq.end());
      std::vector<std::int64_t> canon(min_it, seq.end());
      canon.insert(canon.end(), seq.begin(), min_it);
      found.push_back(kex::Cycle{canon});
    }
    if (static_cast<int>(seq.size()) >= max_len) return;
    for (std::int64_t id : ids) {
      if (std::find(seq.begin(), seq.end(), id) != seq.end()) continue;
      seq.push_back(id);
      self(self);
      seq.pop_back();
    }
  };
  grow(grow);
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  return found;
}

// Survey sampled from fixed profile scores with independent pairwise choices,
// P(i over j) = s_i / (s_i + s_j). The oracle counterpart of fit_bt.
inline kex::SurveyDataset bt_survey(const std::array<double, 8>& scores, int n,
                                    std::uint64_t seed) {
  kex::SurveyDataset survey;
  kex::SplitMix64 g(seed);
  for (int k = 1; k <= n; ++k) {
    kex::Respondent r;
    r.respondent_id = k;
    for (int q = 0; q < kex::kNumProfilePairs; ++q) {
      const auto [i, j] = kex::kProfilePairs[q];
      const double p = scores[i - 1] / (scores[i - 1] + scores[j - 1]);
      r.chosen[q] = static_cast<std::uint8_t>(kex::bernoulli(g, p) ? i : j);
    }
    survey.respondents.push_back(r);
  }
  return survey;
}

}  // namespace testutil
