#pragma once

#include <string>
#include <string_view>

namespace erctk::hash {

std::string sha256_hex(std::string_view data);
std::string sha256_hex_file(const std::string& path);

}  // namespace erctk::hash
