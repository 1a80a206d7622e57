#pragma once

#include <string_view>

namespace pathnat {

/// Which path of a pair was judged more natural.
enum class Choice : unsigned char { first, second };

std::string_view to_string(Choice c);
Choice parse_choice(std::string_view s);

}  // namespace pathnat
