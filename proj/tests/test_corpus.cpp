#include <doctest.h>

#include <set>

#include "prc/corpus.hpp"
#include "test_util.hpp"

using namespace prc;
using namespace prc::testutil;

namespace {

std::string valid_record(const std::string& id) {
  return R"({"dialogue_id":")" + id + R"(","target_speaker":"Sam","utterances":[)" +
         R"({"speaker":"Sam","text":"hello there"},{"speaker":"Riley","text":"hi"}],)" +
         R"("labels":{"AGR":1,"CON":0,"EXT":1,"OPN":0,"NEU":1}})";
}

std::vector<Dialogue> dialogues_of(std::size_t n, std::uint64_t seed = 42) {
  Rng rng(seed);
  std::vector<Dialogue> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_dialogue(rng, "d" + std::to_string(i)));
  return out;
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("load_dataset accepts valid records and indexes utterances") {
  TempDir dir("corpus-load");
  write_file(dir.path / "data.jsonl", valid_record("a") + "\n" + valid_record("b") + "\n");
  LoadResult result = load_dataset(dir.path / "data.jsonl");
  REQUIRE(result.dialogues.size() == 2);
  CHECK(result.rejected.empty());
  CHECK(result.dialogues[0].utterances[0].index == 0);
  CHECK(result.dialogues[0].utterances[1].index == 1);
  CHECK(result.dialogues[0].utterances[0].is_target);
  CHECK_FALSE(result.dialogues[0].utterances[1].is_target);
  CHECK(result.dialogues[0].labels[Trait::NEU] == 1);
}

TEST_CASE("load_dataset rejects a record whose labels lack NEU, naming the trait") {
  TempDir dir("corpus-neu");
  std::string bad =
      R"({"dialogue_id":"x","target_speaker":"Sam","utterances":[{"speaker":"Sam","text":"hi"}],)"
      R"("labels":{"AGR":1,"CON":0,"EXT":1,"OPN":0}})";
  write_file(dir.path / "data.jsonl", valid_record("a") + "\n" + bad + "\n");
  LoadResult result = load_dataset(dir.path / "data.jsonl");
  CHECK(result.dialogues.size() == 1);
  REQUIRE(result.rejected.size() == 1);
  CHECK(result.rejected[0].line == 2);
  CHECK(result.rejected[0].field == "labels.NEU");
}

TEST_CASE("load_dataset rejects a record with no target-speaker utterance") {
  TempDir dir("corpus-target");
  std::string bad =
      R"({"dialogue_id":"x","target_speaker":"Sam","utterances":[{"speaker":"Riley","text":"hi"}],)"
      R"("labels":{"AGR":1,"CON":0,"EXT":1,"OPN":0,"NEU":1}})";
  write_file(dir.path / "data.jsonl", bad + "\n");
  LoadResult result = load_dataset(dir.path / "data.jsonl");
  CHECK(result.dialogues.empty());
  REQUIRE(result.rejected.size() == 1);
  CHECK(result.rejected[0].field == "target_speaker");
}

TEST_CASE("load_dataset reports malformed JSON with the line number") {
  TempDir dir("corpus-json");
  write_file(dir.path / "data.jsonl", valid_record("a") + "\nnot json\n" + valid_record("b") + "\n");
  LoadResult result = load_dataset(dir.path / "data.jsonl");
  CHECK(result.dialogues.size() == 2);
  REQUIRE(result.rejected.size() == 1);
  CHECK(result.rejected[0].line == 2);
  CHECK(result.rejected[0].field == "json");
}

TEST_CASE("load_dataset rejects whitespace-only utterance text") {
  TempDir dir("corpus-blank");
  std::string bad =
      R"({"dialogue_id":"x","target_speaker":"Sam","utterances":[{"speaker":"Sam","text":"  "}],)"
      R"("labels":{"AGR":1,"CON":0,"EXT":1,"OPN":0,"NEU":1}})";
  write_file(dir.path / "data.jsonl", bad + "\n");
  LoadResult result = load_dataset(dir.path / "data.jsonl");
  REQUIRE(result.rejected.size() == 1);
  CHECK(result.rejected[0].field == "utterances[0].text");
}

TEST_CASE("load_dataset throws on an empty file") {
  TempDir dir("corpus-empty");
  write_file(dir.path / "data.jsonl", "");
  CHECK_THROWS_AS(load_dataset(dir.path / "data.jsonl"), std::runtime_error);
  CHECK_THROWS_AS(load_dataset(dir.path / "missing.jsonl"), std::runtime_error);
}

TEST_CASE("save then load round-trips a dataset") {
  TempDir dir("corpus-roundtrip");
  auto dialogues = dialogues_of(20);
  save_dataset(dir.path / "data.jsonl", dialogues);
  LoadResult result = load_dataset(dir.path / "data.jsonl");
  REQUIRE(result.rejected.empty());
  REQUIRE(result.dialogues.size() == dialogues.size());
  for (std::size_t i = 0; i < dialogues.size(); ++i) {
    CHECK(result.dialogues[i].dialogue_id == dialogues[i].dialogue_id);
    CHECK(result.dialogues[i].labels == dialogues[i].labels);
    CHECK(result.dialogues[i].utterances.size() == dialogues[i].utterances.size());
  }
}

TEST_CASE("split_dataset gives 80/10/10 on 100 dialogues") {
  auto dialogues = dialogues_of(100);
  DatasetSplit split = split_dataset(dialogues, 7);
  CHECK(split.train.size() == 80);
  CHECK(split.validation.size() == 10);
  CHECK(split.test.size() == 10);
}

TEST_CASE("split_dataset on 711 dialogues keeps every record and the ratio") {
  auto dialogues = dialogues_of(711);
  DatasetSplit split = split_dataset(dialogues, 1);
  CHECK(split.train.size() + split.validation.size() + split.test.size() == 711);
  CHECK(split.test.size() >= 64);
  CHECK(split.test.size() <= 78);

  std::set<std::string> ids;
  for (const auto* part : {&split.train, &split.validation, &split.test}) {
    for (const Dialogue& d : *part) CHECK(ids.insert(d.dialogue_id).second);
  }
  CHECK(ids.size() == 711);
}

TEST_CASE("split_dataset is deterministic for a fixed seed") {
  auto dialogues = dialogues_of(100);
  DatasetSplit a = split_dataset(dialogues, 9);
  DatasetSplit b = split_dataset(dialogues, 9);
  REQUIRE(a.test.size() == b.test.size());
  for (std::size_t i = 0; i < a.test.size(); ++i) {
    CHECK(a.test[i].dialogue_id == b.test[i].dialogue_id);
  }
  DatasetSplit c = split_dataset(dialogues, 10);
  bool same = a.test.size() == c.test.size();
  if (same) {
    same = std::equal(a.test.begin(), a.test.end(), c.test.begin(),
                      [](const Dialogue& x, const Dialogue& y) {
                        return x.dialogue_id == y.dialogue_id;
                      });
  }
  CHECK_FALSE(same);
}

TEST_CASE("split_dataset needs at least 10 dialogues") {
  auto dialogues = dialogues_of(9);
  CHECK_THROWS_AS(split_dataset(dialogues, 1), std::invalid_argument);
}

TEST_CASE("split persistence records the seed") {
  TempDir dir("corpus-split");
  auto dialogues = dialogues_of(30);
  DatasetSplit split = split_dataset(dialogues, 5);
  save_split(split, dir.path, 5);
  DatasetSplit loaded = load_split(dir.path);
  CHECK(loaded.train.size() == split.train.size());
  CHECK(loaded.validation.size() == split.validation.size());
  CHECK(loaded.test.size() == split.test.size());
  std::string manifest = read_file(dir.path / "manifest.json");
  CHECK(manifest.find("\"seed\": 5") != std::string::npos);
}

TEST_CASE("flow_prefix covers the ceil rule when the target is early") {
  // m=12, target's first utterance at index 1, fraction 0.25 -> 0..2.
  std::vector<std::pair<std::string, std::string>> turns;
  for (int i = 0; i < 12; ++i) {
    turns.emplace_back(i == 1 || i == 5 ? "Sam" : "Riley", "line " + std::to_string(i));
  }
  Dialogue d = make_dialogue("d", turns, "Sam");
  Dialogue prefix = flow_prefix(d, 0.25);
  REQUIRE(prefix.utterances.size() == 3);
  CHECK(prefix.utterances.back().index == 2);
  CHECK(prefix.target_utterance_count() == 1);
}

TEST_CASE("flow_prefix extends forward until the target appears") {
  // m=8, target's first utterance at index 6, fraction 0.25 -> 0..6.
  std::vector<std::pair<std::string, std::string>> turns;
  for (int i = 0; i < 8; ++i) {
    turns.emplace_back(i >= 6 ? "Sam" : "Riley", "line " + std::to_string(i));
  }
  Dialogue d = make_dialogue("d", turns, "Sam");
  Dialogue prefix = flow_prefix(d, 0.25);
  REQUIRE(prefix.utterances.size() == 7);
  CHECK(prefix.utterances.back().is_target);
  CHECK(raw_prefix_target_count(d, 0.25) == 0);
}

TEST_CASE("flow_prefix at fraction 1.0 returns the dialogue unchanged") {
  Rng rng(3);
  Dialogue d = random_dialogue(rng, "d");
  Dialogue prefix = flow_prefix(d, 1.0);
  REQUIRE(prefix.utterances.size() == d.utterances.size());
  CHECK(prefix.dialogue_id == d.dialogue_id);
  for (std::size_t i = 0; i < d.utterances.size(); ++i) {
    CHECK(prefix.utterances[i].text == d.utterances[i].text);
  }
}

TEST_CASE("partial prefixes carry a derived id, full prefixes keep the original") {
  std::vector<std::pair<std::string, std::string>> turns;
  for (int i = 0; i < 8; ++i) turns.emplace_back(i % 2 ? "Riley" : "Sam", "line");
  Dialogue d = make_dialogue("ep1", turns, "Sam");
  Dialogue quarter = flow_prefix(d, 0.25);
  CHECK(quarter.dialogue_id == "ep1#p2");
  Dialogue full = flow_prefix(d, 1.0);
  CHECK(full.dialogue_id == "ep1");
}

TEST_CASE("flow_prefix always contains a target utterance and prefixes nest") {
  Rng rng(11);
  const std::vector<double> fractions = {0.25, 0.5, 0.75, 1.0};
  for (int trial = 0; trial < 200; ++trial) {
    Dialogue d = random_dialogue(rng, "d" + std::to_string(trial));
    std::size_t previous = 0;
    for (double f : fractions) {
      Dialogue prefix = flow_prefix(d, f);
      CHECK(prefix.target_utterance_count() >= 1);
      CHECK(prefix.utterances.size() >= previous);
      previous = prefix.utterances.size();
      for (std::size_t i = 0; i < prefix.utterances.size(); ++i) {
        CHECK(prefix.utterances[i].text == d.utterances[i].text);
      }
    }
  }
}

TEST_CASE("compute_stats on a single dialogue of identical one-word utterances") {
  Dialogue d = make_dialogue("d", {{"Sam", "hm"}, {"Sam", "hm"}, {"Sam", "hm"}}, "Sam");
  StatsReport report = compute_stats(std::vector<Dialogue>{d});
  CHECK(report.dialogue_count == 1);
  CHECK(report.unique_utterance_count == 1);
  CHECK(report.mean_utterance_length_words == doctest::Approx(1.0));
  CHECK(report.mean_utterances_per_dialogue == doctest::Approx(3.0));
}

TEST_CASE("compute_stats matches an independent brute-force recount") {
  auto dialogues = dialogues_of(60, 17);
  StatsReport report = compute_stats(dialogues);

  // Independent recount, written without reusing the implementation shape.
  std::size_t utterances = 0;
  std::size_t words = 0;
  std::set<std::string> unique;
  std::array<int, kTraitCount> positives{};
  for (const Dialogue& d : dialogues) {
    for (const Utterance& u : d.utterances) {
      ++utterances;
      unique.insert(u.text);
      bool in_word = false;
      for (char c : u.text + " ") {
        if (c == ' ' && in_word) ++words;
        in_word = c != ' ';
      }
    }
    for (Trait t : kAllTraits) positives[trait_index(t)] += d.labels[t];
  }
  CHECK(report.dialogue_count == dialogues.size());
  CHECK(report.unique_utterance_count == unique.size());
  CHECK(report.mean_utterances_per_dialogue ==
        doctest::Approx(double(utterances) / double(dialogues.size())).epsilon(1e-12));
  CHECK(report.mean_utterance_length_words ==
        doctest::Approx(double(words) / double(utterances)).epsilon(1e-12));
  for (Trait t : kAllTraits) {
    CHECK(report.positive_fraction[trait_index(t)] ==
          doctest::Approx(double(positives[trait_index(t)]) / double(dialogues.size()))
              .epsilon(1e-12));
  }
}

TEST_CASE("stats ratio formatting uses two decimals") {
  Dialogue pos = make_dialogue("a", {{"Sam", "x"}}, "Sam");
  pos.labels[Trait::AGR] = 1;
  Dialogue neg = make_dialogue("b", {{"Sam", "x"}}, "Sam");
  std::vector<Dialogue> ds = {pos, neg, neg, neg};
  StatsReport report = compute_stats(ds);
  CHECK(report.ratio_string(Trait::AGR) == ".25:.75");
  CHECK(report.to_json_string().find(".25:.75") != std::string::npos);
}

TEST_CASE("compute_stats rejects an empty list") {
  CHECK_THROWS_AS(compute_stats(std::vector<Dialogue>{}), std::invalid_argument);
}

}  // TEST_SUITE
