#include "erctk/label_map.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "erctk/jsonl.hpp"
#include "erctk/text.hpp"

namespace erctk {

LabelMap::LabelMap(std::vector<std::string> canonical, std::map<std::string, std::string> synonyms)
    : canonical_(std::move(canonical)), map_(std::move(synonyms)) {}

LabelMap LabelMap::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("label map: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

LabelMap LabelMap::parse(std::string_view contents, const std::string& origin) {
  enum class Section { none, canonical, map };
  Section section = Section::none;
  LabelMap result;

  std::istringstream in{std::string(contents)};
  std::size_t line_no = 0;
  for (std::string raw_line; std::getline(in, raw_line);) {
    ++line_no;
    const std::string line = text::trim(raw_line);
    if (line.empty() || line[0] == '#') continue;
    if (line == "[canonical]") {
      section = Section::canonical;
      continue;
    }
    if (line == "[map]") {
      section = Section::map;
      continue;
    }
    const std::string where = origin + ":" + std::to_string(line_no);
    switch (section) {
      case Section::none:
        throw std::runtime_error("label map: " + where + ": content before any section");
      case Section::canonical: {
        if (result.is_canonical(line)) {
          throw std::runtime_error("label map: " + where + ": duplicate canonical label '" +
                                   line + "'");
        }
        result.canonical_.push_back(line);
        break;
      }
      case Section::map: {
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
          throw std::runtime_error("label map: " + where + ": expected 'raw = canonical'");
        }
        const std::string raw = text::lower_ascii(text::trim(line.substr(0, eq)));
        const std::string canonical = text::trim(line.substr(eq + 1));
        if (raw.empty() || canonical.empty()) {
          throw std::runtime_error("label map: " + where + ": empty side in mapping");
        }
        if (!result.is_canonical(canonical)) {
          throw std::runtime_error("label map: " + where + ": '" + canonical +
                                   "' is not a canonical label");
        }
        const auto [it, inserted] = result.map_.emplace(raw, canonical);
        if (!inserted && it->second != canonical) {
          throw std::runtime_error("label map: " + where + ": synonym '" + raw +
                                   "' maps to both '" + it->second + "' and '" + canonical + "'");
        }
        break;
      }
    }
  }
  if (result.canonical_.empty()) {
    throw std::runtime_error("label map: " + origin + ": no canonical labels declared");
  }
  return result;
}

void LabelMap::save(const std::string& path) const {
  std::ostringstream out;
  out << "[canonical]\n";
  for (const std::string& label : canonical_) out << label << "\n";
  out << "\n[map]\n";
  for (const auto& [raw, canonical] : map_) out << raw << " = " << canonical << "\n";
  jsonl::write_file_atomic(path, out.str());
}

bool LabelMap::is_canonical(std::string_view label) const {
  for (const std::string& c : canonical_) {
    if (c == label) return true;
  }
  return false;
}

std::optional<std::string> LabelMap::try_normalize(std::string_view raw) const {
  const std::string key = text::lower_ascii(text::trim(raw));
  if (is_canonical(key)) return key;
  const auto it = map_.find(key);
  if (it != map_.end()) return it->second;
  return std::nullopt;
}

std::string LabelMap::normalize(std::string_view raw) const {
  if (auto canonical = try_normalize(raw)) return *canonical;
  throw std::runtime_error("label map: no canonical label for tag '" + std::string(raw) + "'");
}

void LabelMap::add_mapping(const std::string& raw, const std::string& canonical) {
  if (!is_canonical(canonical)) {
    throw std::runtime_error("label map: '" + canonical + "' is not a canonical label");
  }
  map_[text::lower_ascii(text::trim(raw))] = canonical;
}

}  // namespace erctk
