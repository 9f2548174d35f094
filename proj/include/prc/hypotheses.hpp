#pragma once

#include <array>
#include <filesystem>
#include <string>

#include "prc/traits.hpp"

namespace prc {

enum class Polarity { positive, negative };

inline Polarity opposite(Polarity p) {
  return p == Polarity::positive ? Polarity::negative : Polarity::positive;
}

struct TraitDescription {
  Trait trait;
  Polarity polarity;
  std::string text;
};

/// Fixed 5 x 2 grid of trait descriptions. The standard registry carries the
/// psychology-derived texts; swapping the registry is how description
/// ablations are run.
class DescriptionRegistry {
 public:
  static DescriptionRegistry standard();

  /// Bare label names: positive "Neuroticism", negative "not Neuroticism".
  static DescriptionRegistry label_names();

  static DescriptionRegistry from_file(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  TraitDescription get(Trait trait, Polarity polarity) const;

  /// "{speaker} is {description}", terminal period normalized.
  std::string render_hypothesis(const std::string& speaker, Trait trait,
                                Polarity polarity) const;

 private:
  std::array<std::array<std::string, 2>, kTraitCount> texts_{};
};

}  // namespace prc
