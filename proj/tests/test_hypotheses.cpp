#include <doctest.h>

#include <set>

#include "prc/hypotheses.hpp"
#include "test_util.hpp"

using namespace prc;
using namespace prc::testutil;

TEST_SUITE("hypotheses") {

TEST_CASE("standard registry carries the expected description openings") {
  DescriptionRegistry registry = DescriptionRegistry::standard();
  CHECK(registry.get(Trait::NEU, Polarity::positive)
            .text.starts_with("prone to experiencing negative emotions"));
  CHECK(registry.get(Trait::EXT, Polarity::negative)
            .text.starts_with("introverted, reserved, quiet"));
  CHECK(registry.get(Trait::AGR, Polarity::positive)
            .text.starts_with("friendly, cooperative, empathetic"));
}

TEST_CASE("the grid is total: ten non-empty distinct descriptions") {
  DescriptionRegistry registry = DescriptionRegistry::standard();
  std::set<std::string> seen;
  for (Trait t : kAllTraits) {
    for (Polarity p : {Polarity::positive, Polarity::negative}) {
      TraitDescription d = registry.get(t, p);
      CHECK_FALSE(d.text.empty());
      CHECK(seen.insert(d.text).second);
    }
    CHECK(registry.get(t, Polarity::positive).text != registry.get(t, Polarity::negative).text);
  }
  CHECK(seen.size() == 10);
}

TEST_CASE("hypothesis rendering prefixes the speaker and normalizes the period") {
  DescriptionRegistry registry = DescriptionRegistry::standard();
  std::string h = registry.render_hypothesis("Mrs. Thompson", Trait::NEU, Polarity::positive);
  CHECK(h.starts_with("Mrs. Thompson is prone to experiencing negative emotions,"));
  CHECK(h.ends_with("."));
  CHECK_FALSE(h.ends_with(".."));
  CHECK(h == registry.render_hypothesis("Mrs. Thompson", Trait::NEU, Polarity::positive));
}

TEST_CASE("rendering is injective over speaker, trait and polarity") {
  DescriptionRegistry registry = DescriptionRegistry::standard();
  std::set<std::string> rendered;
  for (const std::string& speaker : {std::string("Sam"), std::string("Riley")}) {
    for (Trait t : kAllTraits) {
      for (Polarity p : {Polarity::positive, Polarity::negative}) {
        CHECK(rendered.insert(registry.render_hypothesis(speaker, t, p)).second);
      }
    }
  }
  CHECK(rendered.size() == 20);
}

TEST_CASE("empty speaker is rejected") {
  DescriptionRegistry registry = DescriptionRegistry::standard();
  CHECK_THROWS_AS(registry.render_hypothesis("", Trait::AGR, Polarity::positive),
                  std::invalid_argument);
}

TEST_CASE("label-name registry holds bare names for the ablation") {
  DescriptionRegistry registry = DescriptionRegistry::label_names();
  CHECK(registry.get(Trait::NEU, Polarity::positive).text == "Neuroticism");
  CHECK(registry.get(Trait::NEU, Polarity::negative).text == "not Neuroticism");
  CHECK(registry.render_hypothesis("Sam", Trait::NEU, Polarity::positive) ==
        "Sam is Neuroticism.");
}

TEST_CASE("registry round-trips through its resource file format") {
  TempDir dir("hypotheses");
  DescriptionRegistry registry = DescriptionRegistry::standard();
  registry.save(dir.path / "descriptions.json");
  DescriptionRegistry loaded = DescriptionRegistry::from_file(dir.path / "descriptions.json");
  for (Trait t : kAllTraits) {
    for (Polarity p : {Polarity::positive, Polarity::negative}) {
      CHECK(loaded.get(t, p).text == registry.get(t, p).text);
    }
  }
}

TEST_CASE("bundled resource files stay in sync with the built-in defaults") {
  std::filesystem::path data = std::filesystem::path(PRC_SOURCE_DIR) / "data";
  DescriptionRegistry bundled = DescriptionRegistry::from_file(data / "trait_descriptions.json");
  DescriptionRegistry standard = DescriptionRegistry::standard();
  DescriptionRegistry names = DescriptionRegistry::from_file(data / "trait_names.json");
  DescriptionRegistry label_names = DescriptionRegistry::label_names();
  for (Trait t : kAllTraits) {
    for (Polarity p : {Polarity::positive, Polarity::negative}) {
      CHECK(bundled.get(t, p).text == standard.get(t, p).text);
      CHECK(names.get(t, p).text == label_names.get(t, p).text);
    }
  }
}

}  // TEST_SUITE
