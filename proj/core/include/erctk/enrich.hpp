#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "erctk/corpus.hpp"
#include "erctk/label_map.hpp"

namespace erctk {

struct NormalizeFailure {
  std::string conversation_id;
  int turn_index = 0;
  std::string raw_label;
};

struct NormalizeReport {
  std::size_t normalized = 0;
  std::vector<NormalizeFailure> failures;
};

// Fill canonical_label on every utterance and replace corpus.label_space
// with the map's canonical set. strict=true throws on the first unmapped
// tag, naming the dataset, conversation and turn; strict=false records the
// failure and leaves that utterance's canonical_label unset.
NormalizeReport normalize_corpus(Corpus& corpus, const LabelMap& map, bool strict = true);

}  // namespace erctk
