#include "sparsense/config_file.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sparsense/errors.hpp"

namespace sparsense {

namespace {

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

const std::string& require(const KeyValueMap& map, const std::string& key) {
  const auto it = map.find(key);
  if (it == map.end()) throw InvalidArgumentError("missing config key: " + key);
  return it->second;
}

}  // namespace

KeyValueMap parse_key_value_text(const std::string& text) {
  KeyValueMap map;
  std::istringstream stream(text);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    const auto equals = trimmed.find('=');
    if (equals == std::string::npos) {
      throw InvalidArgumentError("config line " + std::to_string(line_number) +
                                 " is not of the form key = value: \"" + trimmed + "\"");
    }
    const std::string key = trim(trimmed.substr(0, equals));
    const std::string value = trim(trimmed.substr(equals + 1));
    if (key.empty()) {
      throw InvalidArgumentError("config line " + std::to_string(line_number) +
                                 " has an empty key");
    }
    map[key] = value;
  }
  return map;
}

KeyValueMap parse_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open config file", path.string());
  std::ostringstream contents;
  contents << in.rdbuf();
  return parse_key_value_text(contents.str());
}

double parse_real(const KeyValueMap& map, const std::string& key) {
  const std::string& value = require(map, key);
  char* end = nullptr;
  const double parsed = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    throw InvalidArgumentError("config key " + key + ": not a real number: " + value);
  }
  return parsed;
}

std::uint64_t parse_unsigned(const KeyValueMap& map, const std::string& key) {
  const std::string& value = require(map, key);
  char* end = nullptr;
  const unsigned long long parsed = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || value.find('-') != std::string::npos) {
    throw InvalidArgumentError("config key " + key + ": not an unsigned integer: " + value);
  }
  return parsed;
}

bool parse_bool(const KeyValueMap& map, const std::string& key) {
  const std::string& value = require(map, key);
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw InvalidArgumentError("config key " + key + ": not a boolean: " + value);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string current;
  std::istringstream stream(value);
  while (std::getline(stream, current, ',')) {
    const std::string item = trim(current);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::vector<double> parse_real_list(const KeyValueMap& map, const std::string& key) {
  const std::string& value = require(map, key);
  std::vector<double> reals;
  for (const std::string& item : split_list(value)) {
    char* end = nullptr;
    const double parsed = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0') {
      throw InvalidArgumentError("config key " + key + ": not a real number: " + item);
    }
    reals.push_back(parsed);
  }
  if (reals.empty()) throw InvalidArgumentError("config key " + key + ": empty list");
  return reals;
}

}  // namespace sparsense
