#pragma once

// Internal: per-dataset parsers behind erctk::parse_corpus.

#include <string>

#include "erctk/corpus.hpp"

namespace erctk::detail {

ParseResult parse_meld(const std::string& root);
ParseResult parse_iemocap(const std::string& root);
ParseResult parse_emorynlp(const std::string& root);
ParseResult parse_dailydialog(const std::string& root);
ParseResult parse_meisd(const std::string& root);

// Shared guard: throws when the corpus root directory is absent.
void require_root(const std::string& root, Dataset dataset);

}  // namespace erctk::detail
