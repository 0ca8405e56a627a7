#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace erctk {

// Ordered canonical label set plus raw-tag synonyms. File format: a
// [canonical] section (one label per line, order significant) and a [map]
// section of "raw = canonical" lines; '#' comments and blank lines are
// skipped. Raw tags are matched after trim + ASCII lower-casing. Every
// canonical label maps to itself implicitly.
class LabelMap {
 public:
  LabelMap() = default;
  LabelMap(std::vector<std::string> canonical,
           std::map<std::string, std::string> synonyms);

  static LabelMap load(const std::string& path);
  static LabelMap parse(std::string_view contents, const std::string& origin);
  void save(const std::string& path) const;

  const std::vector<std::string>& canonical() const { return canonical_; }
  bool is_canonical(std::string_view label) const;

  std::optional<std::string> try_normalize(std::string_view raw) const;
  // Throws std::runtime_error naming the tag when unmapped.
  std::string normalize(std::string_view raw) const;

  // Throws when `canonical` is not in the canonical set.
  void add_mapping(const std::string& raw, const std::string& canonical);

  std::size_t mapping_count() const { return map_.size(); }

 private:
  std::vector<std::string> canonical_;
  std::map<std::string, std::string> map_;  // lowered raw -> canonical
};

}  // namespace erctk
