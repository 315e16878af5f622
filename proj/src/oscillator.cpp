#include "casimir/oscillator.hpp"

#include <cmath>
#include <cstdio>

namespace casimir::oscillator {

namespace {

struct Diagonals {
  double a1, a2, a3;
};

Diagonals diagonals(const OscillatorTriplet& t, double zeta) {
  const double z2 = zeta * zeta;
  return {t.a1 + z2, t.a2 + z2, t.a3 + z2};
}

[[noreturn]] void throw_degenerate(int j, double d) {
  char msg[96];
  std::snprintf(msg, sizeof(msg), "q_factored: D%d = %.17g hits the zero mode D = 1", j, d);
  throw std::domain_error(msg);
}

}  // namespace

Matrix3 build_q_matrix(const OscillatorTriplet& t, double zeta) {
  t.validate();
  const auto [A1, A2, A3] = diagonals(t, zeta);

  const double m1 = zeta * t.c / std::sqrt(t.a1);  // momentum-coupling entry for oscillator 1
  const double m2 = zeta * t.c / std::sqrt(t.a2);

  switch (t.mode) {
    case CouplingMode::tm_analog:
      return {{{A1, 0.0, t.c}, {0.0, A2, t.c}, {t.c, t.c, A3}}};
    case CouplingMode::te_analog:
      return {{{A1, 0.0, m1}, {0.0, A2, m2}, {-m1, -m2, A3}}};
    case CouplingMode::mixed:
      return {{{A1, 0.0, t.c}, {0.0, A2, m2}, {t.c, -m2, A3}}};
  }
  throw std::logic_error("build_q_matrix: unknown mode");
}

double a3_shifted(const OscillatorTriplet& t, double zeta) {
  t.validate();
  const double A3 = t.a3 + zeta * zeta;
  const double c2 = t.c * t.c;
  switch (t.mode) {
    case CouplingMode::tm_analog: return A3;
    case CouplingMode::te_analog: return A3 + c2 / t.a1 + c2 / t.a2;
    case CouplingMode::mixed: return A3 + c2 / t.a2;
  }
  throw std::logic_error("a3_shifted: unknown mode");
}

double q_determinant(const OscillatorTriplet& t, double zeta) {
  const Matrix3 m = build_q_matrix(t, zeta);
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

ModeFactors q_factored(const OscillatorTriplet& t, double zeta) {
  t.validate();
  const auto [A1, A2, A3] = diagonals(t, zeta);
  const double c2 = t.c * t.c;
  const double z2 = zeta * zeta;

  ModeFactors f;
  switch (t.mode) {
    case CouplingMode::tm_analog:
      f.d1 = c2 / (A1 * A3);
      f.d2 = c2 / (A2 * A3);
      break;
    case CouplingMode::te_analog:
      f.d1 = -z2 * c2 / (t.a1 * A1 * A3);
      f.d2 = -z2 * c2 / (t.a2 * A2 * A3);
      break;
    case CouplingMode::mixed:
      f.d1 = c2 / (A1 * A3);
      f.d2 = -z2 * c2 / (t.a2 * A2 * A3);
      break;
  }

  if (f.d1 == 1.0) throw_degenerate(1, f.d1);
  if (f.d2 == 1.0) throw_degenerate(2, f.d2);

  f.casimir_factor = 1.0 - f.d1 * f.d2 / ((1.0 - f.d1) * (1.0 - f.d2));
  f.q = A1 * A2 * A3 * (1.0 - f.d1) * (1.0 - f.d2) * f.casimir_factor;
  return f;
}

InducedInteraction induced_free_energy_and_sign(const OscillatorTriplet& t,
                                                const numerics::ThermalState& thermal,
                                                const numerics::QuadratureConfig& cfg) {
  t.validate();

  auto log_factor = [&](int n, double zeta) -> double {
    const ModeFactors f = q_factored(t, zeta);
    if (std::abs(f.d1) >= 1.0 || std::abs(f.d2) >= 1.0) {
      char msg[128];
      std::snprintf(msg, sizeof(msg),
                    "induced_free_energy_and_sign: |D_j| >= 1 at Matsubara n = %d "
                    "(coupling too strong for a stable system)", n);
      throw std::domain_error(msg);
    }
    return std::log(f.casimir_factor);
  };

  InducedInteraction result;
  result.sum = numerics::matsubara_sum(log_factor, thermal, cfg);
  if (!result.sum.converged)
    throw std::runtime_error("induced_free_energy_and_sign: Matsubara sum did not converge");

  result.delta_f = result.sum.value / (2.0 * thermal.beta());
  if (t.c == 0.0 || result.delta_f == 0.0) {
    result.sign = Sign::none;
  } else {
    result.sign = result.delta_f < 0.0 ? Sign::attractive : Sign::repulsive;
  }
  return result;
}

}  // namespace casimir::oscillator
