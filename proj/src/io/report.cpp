#include "resq/io/report.hpp"

#include <chrono>
#include <cstdio>

#include "resq/io/keyval.hpp"

namespace resq::io {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string fnv1a_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(bytes)));
  return buf;
}

ReportBuilder::ReportBuilder(std::string tool, std::string version)
    : tool_(std::move(tool)), version_(std::move(version)) {}

void ReportBuilder::add_input(const std::filesystem::path& path) {
  nlohmann::json entry;
  entry["path"] = path.filename().string();
  entry["digest"] = fnv1a_hex(read_text_file(path));
  inputs_.push_back(std::move(entry));
}

void ReportBuilder::set_config_digest(const std::string& config_text) {
  config_digest_ = fnv1a_hex(config_text);
}

void ReportBuilder::set_option(const std::string& key, const nlohmann::json& value) {
  options_[key] = value;
}

nlohmann::json ReportBuilder::build(bool with_timestamp) const {
  nlohmann::json header;
  header["tool"] = tool_;
  header["version"] = version_;
  header["inputs"] = inputs_;
  if (!options_.empty()) header["options"] = options_;
  if (!config_digest_.empty()) header["config_digest"] = config_digest_;
  if (with_timestamp) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    header["timestamp"] = buf;
  }
  nlohmann::json report;
  report["header"] = std::move(header);
  report["body"] = body_;
  return report;
}

std::string ReportBuilder::body_string() const { return body_.dump(2); }

void ReportBuilder::write(const std::filesystem::path& path, bool with_timestamp) const {
  write_text_file(path, build(with_timestamp).dump(2) + "\n");
}

}  // namespace resq::io
