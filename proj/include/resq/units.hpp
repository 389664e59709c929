#pragma once

#include <string>
#include <string_view>

namespace resq::units {

// Boundary parsers: accept a number with an optional unit suffix and return
// strict SI. A bare number is taken in the SI base unit of the quantity
// (J, Hz, m, K, H). Suffix matching is case-sensitive except where noted;
// "u" is accepted for micro ("182ueV" == 182 micro-eV).
double parse_energy(std::string_view text);       // -> J       (eV, meV, ueV, J)
double parse_frequency(std::string_view text);    // -> Hz      (Hz, kHz, MHz, GHz)
double parse_length(std::string_view text);       // -> m       (m, mm, um, nm)
double parse_temperature(std::string_view text);  // -> K       (K, mK, uK)
double parse_inductance(std::string_view text);   // -> H       (H, nH, pH, fH)
double parse_double(std::string_view text);       // plain number, no suffix

// Power conversions used by the photon-number calibration.
double dbm_to_watts(double dbm);
double db_to_power_ratio(double db);

}  // namespace resq::units
