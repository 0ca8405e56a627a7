#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace erctk::text {

// Strip ASCII whitespace (space, \t, \r, \n, \f, \v) from both ends.
std::string trim(std::string_view s);

std::string lower_ascii(std::string_view s);

bool is_valid_utf8(std::string_view s);

// Reinterpret each byte as a Latin-1 code point and re-encode as UTF-8.
std::string latin1_to_utf8(std::string_view s);

// Compose "ASCII letter + combining acute/grave/circumflex/tilde/diaeresis"
// pairs into their precomposed Latin-1 forms. Other sequences pass through.
std::string compose_latin(std::string_view s);

// Full ingest canonicalization: UTF-8 repair, composition, trim.
std::string canonicalize(std::string_view s);

// Count whitespace-separated tokens.
std::size_t word_count(std::string_view s);

}  // namespace erctk::text
