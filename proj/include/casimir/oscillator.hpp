#pragma once

#include <array>
#include <stdexcept>

#include "casimir/common.hpp"
#include "casimir/numerics.hpp"

namespace casimir::oscillator {

// Which pair of couplings ties oscillators 1 and 2 to the mediating
// oscillator 3: both through coordinates (TM analog), both through momenta /
// vector-potential form (TE analog), or one of each (mixed).
enum class CouplingMode { tm_analog, te_analog, mixed };

struct OscillatorTriplet {
  double a1 = 1.0;  // eigenfrequency squared of oscillator 1
  double a2 = 1.0;
  double a3 = 1.0;
  double c = 0.0;   // bilinear coupling strength
  CouplingMode mode = CouplingMode::tm_analog;

  void validate() const {
    if (!(a1 > 0.0) || !(a2 > 0.0) || !(a3 > 0.0))
      throw std::invalid_argument("OscillatorTriplet: a_i must be > 0");
  }
};

using Matrix3 = std::array<std::array<double, 3>, 3>;

// The symmetrized 3x3 coupling matrix at Matsubara frequency zeta. Diagonal
// is (A1, A2, A3) with A_i = a_i + zeta^2; a coordinate-coupled oscillator j
// carries entries (j,3) = (3,j) = c, a momentum-coupled one carries
// (j,3) = zeta*c/sqrt(a_j) and (3,j) = -zeta*c/sqrt(a_j). The momentum
// coupling's diagonal shift c^2/a_j has already been absorbed by the row
// reduction that produces this form, so the corner stays the bare A3;
// a3_shifted() reports the pre-reduction diagonal value.
Matrix3 build_q_matrix(const OscillatorTriplet& t, double zeta);

// Diagonal (3,3) entry of the coordinate-representation matrix, i.e. A3 plus
// the mode's momentum-coupling shift (none for TM, c^2/a1 + c^2/a2 for TE,
// c^2/a2 for mixed).
double a3_shifted(const OscillatorTriplet& t, double zeta);

double q_determinant(const OscillatorTriplet& t, double zeta);

// Factorization Q = A1*A2*A3 * (1-D1) * (1-D2) * casimir_factor with
//   casimir_factor = 1 - D1*D2 / ((1-D1)(1-D2)),
//   TM:    D_j = c^2 / (A_j*A3)                  (> 0)
//   TE:    D_j = -zeta^2*c^2 / (a_j*A_j*A3)      (<= 0)
//   mixed: D1 as TM, D2 as TE.
// The product D1*D2 decides the sign of the induced interaction.
struct ModeFactors {
  double d1 = 0.0;
  double d2 = 0.0;
  double casimir_factor = 1.0;
  double q = 0.0;
};

ModeFactors q_factored(const OscillatorTriplet& t, double zeta);

struct InducedInteraction {
  double delta_f = 0.0;  // (1/(2*beta)) * primed sum of ln(casimir_factor)
  Sign sign = Sign::none;
  numerics::Estimate sum;
};

// Matsubara sum of the interaction factor's log. Attractive when
// delta_f < 0 (D1*D2 > 0), repulsive when delta_f > 0, none for c = 0.
// Requires |D_j| < 1 on the whole sampled ladder.
InducedInteraction induced_free_energy_and_sign(const OscillatorTriplet& t,
                                                const numerics::ThermalState& thermal,
                                                const numerics::QuadratureConfig& cfg = {});

}  // namespace casimir::oscillator
