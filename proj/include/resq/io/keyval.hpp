#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace resq::io {

// Minimal "[section]" + "key = value" document: '#' starts a comment,
// whitespace is trimmed, values may be double-quoted. Duplicate keys within a
// section are rejected.
struct KeyValDocument {
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> find(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key) const;  // throws ParseError
};

KeyValDocument parse_keyval(const std::string& text, const std::string& origin = "<string>");
KeyValDocument load_keyval(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace resq::io
