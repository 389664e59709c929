#include "resq/io/keyval.hpp"

#include <fstream>
#include <sstream>

#include "resq/errors.hpp"

namespace resq::io {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string unquote(std::string value) {
  if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
    return value.substr(1, value.size() - 2);
  return value;
}

}  // namespace

bool KeyValDocument::has(const std::string& section, const std::string& key) const {
  return find(section, key).has_value();
}

std::optional<std::string> KeyValDocument::find(const std::string& section,
                                                const std::string& key) const {
  const auto sec = sections.find(section);
  if (sec == sections.end()) return std::nullopt;
  const auto it = sec->second.find(key);
  if (it == sec->second.end()) return std::nullopt;
  return it->second;
}

std::string KeyValDocument::get(const std::string& section, const std::string& key) const {
  auto value = find(section, key);
  if (!value)
    throw ParseError("missing key '" + key + "' in section [" + section + "]");
  return *value;
}

KeyValDocument parse_keyval(const std::string& text, const std::string& origin) {
  KeyValDocument doc;
  std::istringstream stream(text);
  std::string line;
  std::string section;
  int line_no = 0;
  const auto fail = [&](const std::string& what) {
    throw ParseError(origin + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(stream, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail("empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    if (key.empty()) fail("empty key");
    auto [it, inserted] = doc.sections[section].emplace(key, value);
    (void)it;
    if (!inserted) fail("duplicate key '" + key + "'");
  }
  return doc;
}

KeyValDocument load_keyval(const std::filesystem::path& path) {
  return parse_keyval(read_text_file(path), path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw ParseError("error reading " + path.string());
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw ParseError("error writing " + path.string());
}

}  // namespace resq::io
