#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "kex/errors.hpp"

namespace kex {

enum class Age : std::uint8_t { Young30, Old70 };
enum class Drinking : std::uint8_t { Rare, Frequent };
enum class CancerHistory : std::uint8_t { Healthy, Cancer };

inline constexpr int kNumProfiles = 8;

// One of the eight patient profiles. The id encodes the attribute triple as
//   id - 1 = 4*[age=70] + 2*[cancer] + 1*[drinking=frequent]
// so profile 1 is the 30-year-old rare drinker with no cancer history and
// profile 8 is the 70-year-old frequent drinker with a cancer history.
struct PatientProfile {
  int id = 1;
  Age age = Age::Young30;
  Drinking drinking = Drinking::Rare;
  CancerHistory cancer = CancerHistory::Healthy;

  static PatientProfile from_id(int id) {
    if (id < 1 || id > kNumProfiles)
      throw DataError("profile id out of range: " + std::to_string(id));
    const int bits = id - 1;
    PatientProfile p;
    p.id = id;
    p.age = (bits & 4) ? Age::Old70 : Age::Young30;
    p.cancer = (bits & 2) ? CancerHistory::Cancer : CancerHistory::Healthy;
    p.drinking = (bits & 1) ? Drinking::Frequent : Drinking::Rare;
    return p;
  }

  // Binary features: (age == 30, drinking == rare, no cancer history).
  std::array<double, 3> features() const {
    return {age == Age::Young30 ? 1.0 : 0.0,
            drinking == Drinking::Rare ? 1.0 : 0.0,
            cancer == CancerHistory::Healthy ? 1.0 : 0.0};
  }

  friend bool operator==(const PatientProfile&, const PatientProfile&) = default;
};

inline std::array<double, 3> profile_features(int profile_id) {
  return PatientProfile::from_id(profile_id).features();
}

}  // namespace kex
