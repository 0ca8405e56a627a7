#include <string>
#include <vector>

#include "doctest.h"
#include "erctk/inference.hpp"
#include "erctk/instruction.hpp"
#include "helpers.hpp"

using erctk::DecodeConfig;
using erctk::InstructionInstance;
using erctk::kUnparsed;
using erctk::ParseOutcome;
using erctk::ParsePolicy;
using erctk::ParseStatus;
using erctk::Prediction;

namespace {

const std::vector<std::string> kSeven = {"happiness", "anger",    "fear",   "sadness",
                                         "disgust",   "surprise", "neutral"};

ParseOutcome strict(const std::string& gen, const std::vector<std::string>& space = kSeven) {
  return erctk::parse_label(gen, space, ParsePolicy{});
}

ParseOutcome lenient(const std::string& gen, const std::vector<std::string>& space = kSeven) {
  ParsePolicy p;
  p.lenient = true;
  p.fallback_label = "neutral";
  return erctk::parse_label(gen, space, p);
}

InstructionInstance instance(const std::string& gold) {
  InstructionInstance inst;
  inst.instruction = erctk::instruction_text(kSeven);
  inst.input = {"S", "some text"};
  inst.output = gold;
  inst.meta = {"MELD", "c0", 0, "test"};
  return inst;
}

}  // namespace

TEST_CASE("parse_label: hand-enumerated rule table") {
  struct Row {
    std::string generation;
    std::string label;
    ParseStatus status;
  };

  // Strict policy rows.
  const Row strict_rows[] = {
      // 1. exact match of the trimmed generation, case-insensitive
      {"neutral", "neutral", ParseStatus::exact},
      {"  Neutral \n", "neutral", ParseStatus::exact},
      {"ANGER", "anger", ParseStatus::exact},
      // 2. whole-word substring
      {"HAPPINESS.", "happiness", ParseStatus::substring},
      {"The emotion is sadness.", "sadness", ParseStatus::substring},
      {"anger!", "anger", ParseStatus::substring},
      {"I would say:\nfear", "fear", ParseStatus::substring},
      {"this is fear", "fear", ParseStatus::substring},
      // 3. earliest occurrence wins
      {"fear or anger", "fear", ParseStatus::substring},
      {"I think it is anger, maybe fear.", "anger", ParseStatus::substring},
      {"sadness but also anger", "sadness", ParseStatus::substring},
      // "sad" is not one of the seven, so only "anger" can match here
      {"sad but also anger", "anger", ParseStatus::substring},
      // 4. word boundaries: embedded occurrences do not count
      {"sadnesses", kUnparsed, ParseStatus::unparsed},
      {"angry", kUnparsed, ParseStatus::unparsed},
      {"unangered", kUnparsed, ParseStatus::unparsed},
      // 5. nothing matched
      {"completely bewildered", kUnparsed, ParseStatus::unparsed},
      {"", kUnparsed, ParseStatus::unparsed},
  };

  for (const auto& row : strict_rows) {
    CAPTURE(row.generation);
    ParseOutcome got = strict(row.generation);
    CHECK(got.label == row.label);
    CHECK(got.status == row.status);
  }
}

TEST_CASE("parse_label: lenient policy substitutes the fallback only on no-match") {
  ParseOutcome fell = lenient("completely bewildered");
  CHECK(fell.label == "neutral");
  CHECK(fell.status == ParseStatus::fallback);

  // A real match is unaffected by leniency.
  CHECK(lenient("fear") == ParseOutcome{"fear", ParseStatus::exact});
  CHECK(lenient("so much fear here") == ParseOutcome{"fear", ParseStatus::substring});

  // The fallback label must belong to the space.
  ParsePolicy bad;
  bad.lenient = true;
  bad.fallback_label = "zzz";
  CHECK_THROWS(erctk::parse_label("completely bewildered", kSeven, bad));
}

TEST_CASE("parse_label: same-position tie is broken by label-space order") {
  // Both labels match starting at offset 5; the space order decides.
  std::vector<std::string> space = {"very sad", "very"};
  ParseOutcome got = strict("I am very sad", space);
  CHECK(got.label == "very sad");
  CHECK(got.status == ParseStatus::substring);

  std::vector<std::string> reversed = {"very", "very sad"};
  CHECK(strict("I am very sad", reversed).label == "very");
}

TEST_CASE("parse_label: empty label space is rejected") {
  CHECK_THROWS(erctk::parse_label("anything", {}, ParsePolicy{}));
}

TEST_CASE("inference: echo backend closes the loop") {
  erctk::EchoBackend echo;
  DecodeConfig decode;
  InstructionInstance inst = instance("surprise");
  CHECK(echo.generate(inst, decode) == "surprise");
}

TEST_CASE("inference: classification preserves order and parses each row") {
  std::vector<InstructionInstance> instances = {instance("neutral"), instance("anger"),
                                                instance("fear")};
  erctk::EchoBackend echo;
  std::vector<Prediction> preds =
      erctk::classify_instances(instances, echo, DecodeConfig{}, ParsePolicy{});
  REQUIRE(preds.size() == 3);
  CHECK(preds[0].predicted == "neutral");
  CHECK(preds[1].predicted == "anger");
  CHECK(preds[2].predicted == "fear");
  for (const auto& p : preds) {
    CHECK(p.status == ParseStatus::exact);
    CHECK(p.gold == p.predicted);
  }

  erctk::FixedBackend noise("I really cannot tell.");
  std::vector<Prediction> unparsed =
      erctk::classify_instances(instances, noise, DecodeConfig{}, ParsePolicy{});
  for (const auto& p : unparsed) {
    CHECK(p.predicted == kUnparsed);
    CHECK(p.status == ParseStatus::unparsed);
    CHECK(p.generation == "I really cannot tell.");
  }
}

TEST_CASE("inference: a throwing backend yields an unparsed row, not a crash") {
  class Exploding : public erctk::GenerationBackend {
   public:
    std::string name() const override { return "exploding"; }
    std::string generate(const InstructionInstance& inst, const DecodeConfig&) override {
      if (inst.meta.turn_index == 1) throw std::runtime_error("backend died");
      return inst.output;
    }
  };

  std::vector<InstructionInstance> instances = {instance("neutral"), instance("anger"),
                                                instance("fear")};
  instances[1].meta.turn_index = 1;
  Exploding backend;
  std::vector<Prediction> preds =
      erctk::classify_instances(instances, backend, DecodeConfig{}, ParsePolicy{});
  REQUIRE(preds.size() == 3);
  CHECK(preds[0].status == ParseStatus::exact);
  CHECK(preds[1].status == ParseStatus::unparsed);
  CHECK(preds[1].predicted == kUnparsed);
  CHECK(preds[1].generation.find("backend died") != std::string::npos);
  CHECK(preds[2].status == ParseStatus::exact);
}

TEST_CASE("inference: predictions jsonl round trip") {
  std::vector<InstructionInstance> instances = {instance("neutral"), instance("anger")};
  erctk::EchoBackend echo;
  std::vector<Prediction> preds =
      erctk::classify_instances(instances, echo, DecodeConfig{}, ParsePolicy{});

  testutil::TempDir dir;
  std::string path = dir.file("preds.jsonl");
  erctk::save_predictions_jsonl(preds, path);
  std::vector<Prediction> back = erctk::load_predictions_jsonl(path);
  REQUIRE(back.size() == preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    CHECK(back[i].meta == preds[i].meta);
    CHECK(back[i].gold == preds[i].gold);
    CHECK(back[i].generation == preds[i].generation);
    CHECK(back[i].predicted == preds[i].predicted);
    CHECK(back[i].status == preds[i].status);
  }

  std::string body = testutil::slurp(path);
  CHECK(body.find("\"parse_status\":\"exact\"") != std::string::npos);
}

TEST_CASE("inference: parse status names round trip") {
  for (auto s : {ParseStatus::exact, ParseStatus::substring, ParseStatus::fallback,
                 ParseStatus::unparsed}) {
    CHECK(erctk::parse_status_from_name(erctk::parse_status_name(s)) == s);
  }
  CHECK_THROWS(erctk::parse_status_from_name("bogus"));
}
