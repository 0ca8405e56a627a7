#include "erctk/enrich.hpp"

#include <stdexcept>

namespace erctk {

NormalizeReport normalize_corpus(Corpus& corpus, const LabelMap& map, bool strict) {
  NormalizeReport report;
  for (auto& conversation : corpus.conversations) {
    for (auto& utterance : conversation.utterances) {
      if (auto canonical = map.try_normalize(utterance.raw_label)) {
        utterance.canonical_label = *canonical;
        ++report.normalized;
        continue;
      }
      if (strict) {
        throw std::runtime_error("normalize: no canonical label for tag '" +
                                 utterance.raw_label + "' (" + dataset_name(corpus.dataset) +
                                 ", conversation " + conversation.conversation_id + ", turn " +
                                 std::to_string(utterance.turn_index) + ")");
      }
      utterance.canonical_label.reset();
      report.failures.push_back(NormalizeFailure{conversation.conversation_id,
                                                 utterance.turn_index, utterance.raw_label});
    }
  }
  corpus.label_space = map.canonical();
  return report;
}

}  // namespace erctk
