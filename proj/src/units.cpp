#include "resq/units.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <initializer_list>
#include <utility>

#include "resq/errors.hpp"

namespace resq::units {

namespace {

struct Suffix {
  std::string_view name;
  double factor;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_with_suffixes(std::string_view text, std::initializer_list<Suffix> suffixes,
                           std::string_view what) {
  std::string_view s = trim(text);
  if (s.empty()) throw ParseError("empty " + std::string(what) + " value");

  double factor = 1.0;
  for (const Suffix& suf : suffixes) {
    if (s.size() > suf.name.size() && s.ends_with(suf.name)) {
      factor = suf.factor;
      s = trim(s.substr(0, s.size() - suf.name.size()));
      break;
    }
  }

  std::string num(s);
  char* end = nullptr;
  double value = std::strtod(num.c_str(), &end);
  if (end != num.c_str() + num.size() || num.empty())
    throw ParseError("cannot parse " + std::string(what) + " value '" + std::string(text) + "'");
  if (!std::isfinite(value))
    throw ParseError("non-finite " + std::string(what) + " value '" + std::string(text) + "'");
  return value * factor;
}

}  // namespace

double parse_energy(std::string_view text) {
  // micro variants first: longest suffix must match before "eV".
  return parse_with_suffixes(text,
                             {{"ueV", 1.602176634e-25},
                              {"µeV", 1.602176634e-25},
                              {"meV", 1.602176634e-22},
                              {"eV", 1.602176634e-19},
                              {"J", 1.0}},
                             "energy");
}

double parse_frequency(std::string_view text) {
  return parse_with_suffixes(
      text, {{"GHz", 1e9}, {"MHz", 1e6}, {"kHz", 1e3}, {"Hz", 1.0}}, "frequency");
}

double parse_length(std::string_view text) {
  return parse_with_suffixes(
      text, {{"nm", 1e-9}, {"um", 1e-6}, {"µm", 1e-6}, {"mm", 1e-3}, {"m", 1.0}}, "length");
}

double parse_temperature(std::string_view text) {
  return parse_with_suffixes(text, {{"mK", 1e-3}, {"uK", 1e-6}, {"µK", 1e-6}, {"K", 1.0}},
                             "temperature");
}

double parse_inductance(std::string_view text) {
  return parse_with_suffixes(
      text, {{"fH", 1e-15}, {"pH", 1e-12}, {"nH", 1e-9}, {"uH", 1e-6}, {"H", 1.0}}, "inductance");
}

double parse_double(std::string_view text) {
  return parse_with_suffixes(text, {}, "number");
}

double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

double db_to_power_ratio(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace resq::units
