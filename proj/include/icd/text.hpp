#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace icd {

// Shortest decimal form that reads back to the same double.
std::string format_double(double v);
// Fixed number of significant digits, for CSV output.
std::string format_significant(double v, int digits = 6);

double parse_double(std::string_view s);
long long parse_int(std::string_view s);
std::uint64_t parse_uint(std::string_view s);
bool parse_bool(std::string_view s);
std::vector<int> parse_ints(std::string_view s);  // comma separated
std::string join_ints(const std::vector<int>& v);

std::string_view trim(std::string_view s);

// "key = value" lines; blank lines and '#' comments skipped. Order kept.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text);

}  // namespace icd
