#pragma once

#include <string>

namespace casimir {

// Internal unit convention: every frequency-like quantity is a wavenumber
// (inverse length) and energies are expressed in units of hbar*c / length.
// SI factors enter only at the CLI boundary.
namespace constants {

inline constexpr double pi = 3.14159265358979323846;

// hbar * c in J*m and the exact SI Boltzmann constant.
inline constexpr double hbar_c_si = 3.16152677e-26;
inline constexpr double k_boltzmann_si = 1.380649e-23;
inline constexpr double speed_of_light_si = 299792458.0;

}  // namespace constants

// Direction of the induced force. `none` covers both "no interaction"
// (decoupled systems) and magnitudes below a caller-defined zero threshold.
enum class Sign { attractive, repulsive, none };

inline std::string sign_label(Sign s, const char* none_label = "none") {
  switch (s) {
    case Sign::attractive: return "attractive";
    case Sign::repulsive: return "repulsive";
    default: return none_label;
  }
}

}  // namespace casimir
