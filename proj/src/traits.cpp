#include "prc/traits.hpp"

#include <stdexcept>

namespace prc {

namespace {
constexpr std::array<std::string_view, kTraitCount> kCodes = {"AGR", "CON", "EXT", "OPN", "NEU"};
constexpr std::array<std::string_view, kTraitCount> kNames = {
    "Agreeableness", "Conscientiousness", "Extraversion", "Openness", "Neuroticism"};
}  // namespace

std::string_view trait_code(Trait t) { return kCodes[trait_index(t)]; }

std::string_view trait_name(Trait t) { return kNames[trait_index(t)]; }

Trait parse_trait(std::string_view code) {
  for (std::size_t i = 0; i < kTraitCount; ++i) {
    if (kCodes[i] == code) return static_cast<Trait>(i);
  }
  throw std::invalid_argument("unknown trait code: " + std::string(code));
}

}  // namespace prc
