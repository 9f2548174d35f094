#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace prc {

/// The five personality traits, in report column order.
enum class Trait { AGR, CON, EXT, OPN, NEU };

inline constexpr std::size_t kTraitCount = 5;

inline constexpr std::array<Trait, kTraitCount> kAllTraits = {
    Trait::AGR, Trait::CON, Trait::EXT, Trait::OPN, Trait::NEU};

std::string_view trait_code(Trait t);   // "AGR"
std::string_view trait_name(Trait t);   // "Agreeableness"
Trait parse_trait(std::string_view code);  // throws on unknown code

inline std::size_t trait_index(Trait t) { return static_cast<std::size_t>(t); }

/// Binary label per trait.
struct TraitVector {
  std::array<int, kTraitCount> values{};  // each 0 or 1

  int& operator[](Trait t) { return values[trait_index(t)]; }
  int operator[](Trait t) const { return values[trait_index(t)]; }

  bool operator==(const TraitVector&) const = default;
};

}  // namespace prc
