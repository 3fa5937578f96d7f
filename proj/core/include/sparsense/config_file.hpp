#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace sparsense {

/// Flat "key = value" config text: one pair per line, '#' starts a comment,
/// blank lines ignored. Keys and values are whitespace-trimmed.
using KeyValueMap = std::map<std::string, std::string>;

KeyValueMap parse_key_value_file(const std::filesystem::path& path);
KeyValueMap parse_key_value_text(const std::string& text);  // same grammar, from memory

/// Parse helpers with precise error messages naming the key.
double parse_real(const KeyValueMap& map, const std::string& key);
std::uint64_t parse_unsigned(const KeyValueMap& map, const std::string& key);
bool parse_bool(const KeyValueMap& map, const std::string& key);
std::vector<double> parse_real_list(const KeyValueMap& map, const std::string& key);
std::vector<std::string> split_list(const std::string& value);  // comma-separated

}  // namespace sparsense
