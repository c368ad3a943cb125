#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "kex/errors.hpp"

namespace kex {

enum class BloodType : std::uint8_t { O, A, B, AB };

inline constexpr std::array<BloodType, 4> kAllBloodTypes = {
    BloodType::O, BloodType::A, BloodType::B, BloodType::AB};

// ABO rule: the donor's antigens must be a subset of the patient's. O donates
// to everyone, AB receives from everyone, otherwise types must match.
constexpr bool blood_compatible(BloodType donor, BloodType patient) {
  if (donor == BloodType::O || patient == BloodType::AB) return true;
  return donor == patient;
}

constexpr std::string_view to_string(BloodType t) {
  switch (t) {
    case BloodType::O: return "O";
    case BloodType::A: return "A";
    case BloodType::B: return "B";
    case BloodType::AB: return "AB";
  }
  return "?";
}

inline BloodType parse_blood_type(std::string_view s) {
  if (s == "O") return BloodType::O;
  if (s == "A") return BloodType::A;
  if (s == "B") return BloodType::B;
  if (s == "AB") return BloodType::AB;
  throw DataError("unknown blood type: '" + std::string(s) + "'");
}

}  // namespace kex
