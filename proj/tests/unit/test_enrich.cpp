#include <string>

#include "doctest.h"
#include "erctk/corpus.hpp"
#include "erctk/enrich.hpp"
#include "erctk/label_map.hpp"
#include "helpers.hpp"

using erctk::Corpus;
using erctk::Dataset;
using erctk::LabelMap;
using erctk::NormalizeReport;

namespace {

Corpus golden(const std::string& name) {
  return erctk::load_corpus_jsonl(testutil::fixture_dir() + "/goldens/" + name);
}

LabelMap map_for(const std::string& name) {
  return LabelMap::load(testutil::config_dir() + "/label_maps/" + name);
}

}  // namespace

TEST_CASE("normalize: fills canonical labels for every utterance") {
  Corpus meld = golden("meld_canonical.jsonl");
  NormalizeReport report = erctk::normalize_corpus(meld, map_for("meld.labelmap"));
  CHECK(report.normalized == 21);
  CHECK(report.failures.empty());
  CHECK(meld.label_space == erctk::default_label_space(Dataset::MELD));

  // joy -> happiness, everything else identity for this fixture.
  CHECK(meld.conversations[0].utterances[5].canonical_label == "happiness");
  CHECK(meld.conversations[0].utterances[5].raw_label == "joy");  // raw untouched
  CHECK(meld.conversations[0].utterances[0].canonical_label == "surprise");

  // Validation after normalization still passes.
  CHECK(erctk::validate_corpus(meld).empty());
}

TEST_CASE("normalize: IEMOCAP short codes map into the nine-class space") {
  Corpus iemocap = golden("iemocap_canonical.jsonl");
  erctk::normalize_corpus(iemocap, map_for("iemocap.labelmap"));
  const auto& first = iemocap.conversations[0];
  CHECK(first.utterances[0].canonical_label == "neutral");        // neu
  CHECK(first.utterances[2].canonical_label == "frustration");    // fru
  CHECK(first.utterances[5].canonical_label == "excitement");     // exc
  CHECK(first.utterances[6].canonical_label == "happiness");      // hap
  CHECK(iemocap.conversations[1].utterances[5].canonical_label ==
        "disappointment");  // dis
}

TEST_CASE("normalize: strict mode throws with full coordinates") {
  Corpus iemocap = golden("iemocap_canonical.jsonl");
  // The unified seven-class map has no home for exc/fru/dis.
  CHECK_THROWS_WITH_AS(erctk::normalize_corpus(iemocap, map_for("unified_seven.labelmap")),
                       doctest::Contains("Ses01F_impro01"), std::runtime_error);
}

TEST_CASE("normalize: lax mode records failures and leaves gaps") {
  Corpus iemocap = golden("iemocap_canonical.jsonl");
  NormalizeReport report =
      erctk::normalize_corpus(iemocap, map_for("unified_seven.labelmap"), /*strict=*/false);
  // Unmappable under the unified seven: fru(x3), exc(x2), dis, fru... count:
  // Ses01F_impro01: fru,fru,exc -> 3; Ses02M_script01: fru,dis -> 2;
  // Ses05F_impro02: exc -> 1. Total 6 failures, 12 normalized.
  CHECK(report.failures.size() == 6);
  CHECK(report.normalized == 12);
  CHECK_FALSE(iemocap.conversations[0].utterances[2].canonical_label.has_value());
  CHECK(iemocap.conversations[0].utterances[0].canonical_label == "neutral");

  const auto& failure = report.failures.front();
  CHECK(failure.conversation_id == "Ses01F_impro01");
  CHECK(failure.turn_index == 2);
  CHECK(failure.raw_label == "fru");
}

TEST_CASE("normalize: every mini corpus normalizes cleanly with its own map") {
  struct Row {
    const char* golden_file;
    const char* map_file;
    std::size_t expected;
  };
  for (auto [golden_file, map_file, expected] :
       {Row{"meld_canonical.jsonl", "meld.labelmap", 21},
        Row{"iemocap_canonical.jsonl", "iemocap.labelmap", 18},
        Row{"emorynlp_canonical.jsonl", "emorynlp.labelmap", 19},
        Row{"dailydialog_canonical.jsonl", "dailydialog.labelmap", 19},
        Row{"meisd_canonical.jsonl", "meisd.labelmap", 19}}) {
    CAPTURE(golden_file);
    Corpus c = golden(golden_file);
    NormalizeReport report = erctk::normalize_corpus(c, map_for(map_file));
    CHECK(report.failures.empty());
    CHECK(report.normalized == expected);
    CHECK(erctk::validate_corpus(c).empty());
  }
}
