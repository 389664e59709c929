#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

namespace resq::io {

std::uint64_t fnv1a(std::string_view bytes);
std::string fnv1a_hex(std::string_view bytes);

// Run reports split volatile context (timestamp, input digests, tool
// version) from the results so the body compares byte-identical between
// reruns on the same inputs.
class ReportBuilder {
 public:
  ReportBuilder(std::string tool, std::string version);

  void add_input(const std::filesystem::path& path);  // records path + content digest
  void set_config_digest(const std::string& config_text);
  void set_option(const std::string& key, const nlohmann::json& value);

  nlohmann::json& body() { return body_; }
  const nlohmann::json& body() const { return body_; }

  nlohmann::json build(bool with_timestamp = true) const;
  std::string body_string() const;  // canonical serialization of the body alone
  void write(const std::filesystem::path& path, bool with_timestamp = true) const;

 private:
  std::string tool_;
  std::string version_;
  nlohmann::json inputs_ = nlohmann::json::array();
  nlohmann::json options_ = nlohmann::json::object();
  std::string config_digest_;
  nlohmann::json body_ = nlohmann::json::object();
};

}  // namespace resq::io
