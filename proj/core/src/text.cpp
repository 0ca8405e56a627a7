#include "erctk/text.hpp"

namespace erctk::text {
namespace {

bool is_ascii_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

// Latin-1 precomposed forms for ASCII base letters under the five combining
// marks that have partners in that range.
unsigned char precomposed(char base, unsigned mark) {
  auto pick = [&](const char* bases, const unsigned char* composed) -> unsigned char {
    for (const char* p = bases; *p != '\0'; ++p) {
      if (*p == base) return composed[p - bases];
    }
    return 0;
  };
  switch (mark) {
    case 0x0300: {  // grave
      static const unsigned char composed[] = {0xC0, 0xC8, 0xCC, 0xD2, 0xD9,
                                               0xE0, 0xE8, 0xEC, 0xF2, 0xF9};
      return pick("AEIOUaeiou", composed);
    }
    case 0x0301: {  // acute
      static const unsigned char composed[] = {0xC1, 0xC9, 0xCD, 0xD3, 0xDA, 0xDD,
                                               0xE1, 0xE9, 0xED, 0xF3, 0xFA, 0xFD};
      return pick("AEIOUYaeiouy", composed);
    }
    case 0x0302: {  // circumflex
      static const unsigned char composed[] = {0xC2, 0xCA, 0xCE, 0xD4, 0xDB,
                                               0xE2, 0xEA, 0xEE, 0xF4, 0xFB};
      return pick("AEIOUaeiou", composed);
    }
    case 0x0303: {  // tilde
      static const unsigned char composed[] = {0xC3, 0xD1, 0xD5, 0xE3, 0xF1, 0xF5};
      return pick("ANOano", composed);
    }
    case 0x0308: {  // diaeresis
      static const unsigned char composed[] = {0xC4, 0xCB, 0xCF, 0xD6, 0xDC,
                                               0xE4, 0xEB, 0xEF, 0xF6, 0xFC, 0xFF};
      return pick("AEIOUaeiouy", composed);
    }
    default:
      return 0;
  }
}

void append_utf8(std::string& out, unsigned code_point) {
  if (code_point < 0x80) {
    out.push_back(static_cast<char>(code_point));
  } else {  // all our compositions land in [0x80, 0x800)
    out.push_back(static_cast<char>(0xC0 | (code_point >> 6)));
    out.push_back(static_cast<char>(0x80 | (code_point & 0x3F)));
  }
}

}  // namespace

std::string trim(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && is_ascii_space(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && is_ascii_space(static_cast<unsigned char>(s[end - 1]))) --end;
  return std::string(s.substr(begin, end - begin));
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool is_valid_utf8(std::string_view s) {
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    const unsigned char b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
      ++i;
      continue;
    }
    int len = 0;
    unsigned code = 0;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      code = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      code = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      code = b0 & 0x07;
    } else {
      return false;  // stray continuation byte or invalid lead
    }
    if (i + static_cast<std::size_t>(len) > n) return false;
    for (int k = 1; k < len; ++k) {
      const unsigned char b = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
      if ((b & 0xC0) != 0x80) return false;
      code = (code << 6) | (b & 0x3F);
    }
    if (len == 2 && code < 0x80) return false;  // overlong
    if (len == 3 && code < 0x800) return false;
    if (len == 4 && code < 0x10000) return false;
    if (code >= 0xD800 && code <= 0xDFFF) return false;  // surrogate
    if (code > 0x10FFFF) return false;
    i += static_cast<std::size_t>(len);
  }
  return true;
}

std::string latin1_to_utf8(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    append_utf8(out, static_cast<unsigned char>(c));
  }
  return out;
}

std::string compose_latin(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char b0 = static_cast<unsigned char>(s[i]);
    // A combining mark in U+0300..U+036F is the two-byte sequence
    // 0xCC 0x80..0xBF or 0xCD 0x80..0xAF.
    if (b0 < 0x80 && i + 2 < s.size()) {
      const unsigned char b1 = static_cast<unsigned char>(s[i + 1]);
      const unsigned char b2 = static_cast<unsigned char>(s[i + 2]);
      if ((b1 == 0xCC || b1 == 0xCD) && (b2 & 0xC0) == 0x80) {
        const unsigned mark = (static_cast<unsigned>(b1 & 0x1F) << 6) | (b2 & 0x3F);
        const unsigned char composed = precomposed(static_cast<char>(b0), mark);
        if (composed != 0) {
          append_utf8(out, composed);
          i += 3;
          continue;
        }
      }
    }
    out.push_back(static_cast<char>(b0));
    ++i;
  }
  return out;
}

std::string canonicalize(std::string_view s) {
  std::string repaired = is_valid_utf8(s) ? std::string(s) : latin1_to_utf8(s);
  return trim(compose_latin(repaired));
}

std::size_t word_count(std::string_view s) {
  std::size_t count = 0;
  bool in_word = false;
  for (char c : s) {
    if (is_ascii_space(static_cast<unsigned char>(c))) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

}  // namespace erctk::text
