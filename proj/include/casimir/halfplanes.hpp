#pragma once

#include <functional>
#include <vector>

#include "casimir/common.hpp"
#include "casimir/materials.hpp"
#include "casimir/numerics.hpp"

namespace casimir::halfplanes {

// Two material half-spaces separated by a vacuum gap: the Lifshitz problem.
struct HalfSpacePair {
  materials::PlateSpec plate1;
  materials::PlateSpec plate2;
  double gap = 1.0;

  void validate() const {
    plate1.validate();
    plate2.validate();
    if (!(gap > 0.0)) throw std::invalid_argument("HalfSpacePair: gap must be > 0");
  }
};

// TM (a) and TE (b) two-interface reflection products at given (q, zeta):
//   a = (eps1 - k1)(eps2 - k2) / ((eps1 + k1)(eps2 + k2))
//   b = (k1 - mu1)(k2 - mu2) / ((k1 + mu1)(k2 + mu2))
// with k_i = kappa(plate_i, q, zeta). Both lie strictly inside (-1, 1) for
// finite positive materials. Ideal plates resolve analytically: an ideal-eps
// plate contributes +1 to both channels, an ideal-mu plate -1 to both.
// At zeta = 0 the per-model limits from zero_freq_class apply.
struct ReflectionPair {
  double a = 0.0;
  double b = 0.0;
};

ReflectionPair reflection(const HalfSpacePair& pair, double q, double zeta);

struct ForceDiagnostics {
  bool converged = true;
  int matsubara_terms = 0;  // 0 on the zero-temperature path
  long evaluations = 0;
  double abs_error = 0.0;
  int failed_n = -1;  // first Matsubara index whose q-integral failed, if any
};

// Force per unit area in hbar*c = 1 units (1/length^4). Negative values
// mean attraction; the sign flips to `none` ("zero") when the magnitude
// drops below 1e-3 of the same-gap ideal-conductor force pi^2/(240 a^4).
struct ForceResult {
  double value = 0.0;
  Sign sign = Sign::none;
  double tm = 0.0;  // A-channel contribution
  double te = 0.0;  // B-channel contribution
  ForceDiagnostics diagnostics;
};

// Lifshitz force per unit area,
//   f = -(1/(pi*beta)) * sum'_n integral_{zeta_n}^inf q^2 dq
//         [ A e^{-2qa}/(1 - A e^{-2qa}) + B e^{-2qa}/(1 - B e^{-2qa}) ],
// evaluated through the substitution y = 2*q*a. The zero-temperature mode
// replaces the primed sum by its integral with weight hbar*c/(2*pi).
ForceResult force_per_area(const HalfSpacePair& pair, const numerics::ThermalState& thermal,
                           const numerics::QuadratureConfig& cfg = {});

// Dimensionless ideal-conductor reference magnitude |f| * a^4 = pi^2/240.
double conductor_reference(double gap);

struct ClassifyPoint {
  double x = 0.0;
  double y = 0.0;
  ForceResult force;
};

// Evaluates force_per_area over the tensor grid x_values times y_values,
// with make_pair building the plate configuration for each grid node.
// Row-major over x (outer) and y (inner); safe to run with threads > 1
// since every grid node is independent.
std::vector<ClassifyPoint> classify(const std::function<HalfSpacePair(double, double)>& make_pair,
                                    const std::vector<double>& x_values,
                                    const std::vector<double>& y_values,
                                    const numerics::ThermalState& thermal,
                                    const numerics::QuadratureConfig& cfg = {}, int threads = 1);

// First-principles boundary-condition solves for the layered ansatz
// (medium 1 | vacuum gap | medium 2). The four unknowns are the reflected
// amplitude B in medium 1, the gap amplitudes C and C1, and the transmitted
// amplitude D in medium 2. Continuity of tangential E and tangential H at
// z = 0 and z = a is assembled as a dense 4x4 system and solved by Gaussian
// elimination; D must reproduce the closed forms d_parallel_closed /
// d_perp_closed.
struct BoundaryCoefficients {
  double b = 0.0;
  double c = 0.0;
  double c1 = 0.0;
  double d = 0.0;
};

BoundaryCoefficients boundary_solve_tm(double eps1, double mu1, double eps2, double mu2,
                                       double q, double zeta, double gap);
BoundaryCoefficients boundary_solve_te(double eps1, double mu1, double eps2, double mu2,
                                       double q, double zeta, double gap);

// Closed-form transmitted amplitudes:
//   D_par  = 4 k1 e^{(q_e2 - q) a} / ((eps1+k1)(eps2+k2)(1 - A e^{-2qa}))
//   D_perp = 4 mu1 mu2 k1 e^{(q_e2 - q) a} / ((k1+mu1)(k2+mu2)(1 - B e^{-2qa}))
double d_parallel_closed(double eps1, double mu1, double eps2, double mu2,
                         double q, double zeta, double gap);
double d_perp_closed(double eps1, double mu1, double eps2, double mu2,
                     double q, double zeta, double gap);

// Cross-channel coefficient identities D_E_perp = mu1*mu2*D_H_par and
// D_H_perp = eps1*eps2*D_E_par, where the H coefficients are the closed
// forms with eps and mu interchanged.
struct CoefficientRelationReport {
  double de_par = 0.0, de_perp = 0.0, dh_par = 0.0, dh_perp = 0.0;
  double rel_err_perp = 0.0;  // |D_E_perp - mu1*mu2*D_H_par| relative
  double rel_err_par = 0.0;   // |D_H_perp - eps1*eps2*D_E_par| relative
  bool ok = false;
};

CoefficientRelationReport coefficient_relations(double eps1, double mu1, double eps2, double mu2,
                                                double q, double zeta, double gap);

// Checks the general-mu interaction-strength identities: the expanded
// bilinear form of S_Q (four terms mixing electric and magnetic channels)
// against its product form and against the fully factored
// q^2 (e-k)(q+q_e) style expression, for both polarizations. All three
// routes must agree to near machine precision; the common D/36 prefactors
// are cleared before comparing.
struct SqIdentityReport {
  double par_expanded = 0.0, par_product = 0.0, par_factored = 0.0;
  double perp_expanded = 0.0, perp_product = 0.0, perp_factored = 0.0;
  double rel_err_par = 0.0;
  double rel_err_perp = 0.0;
  bool ok = false;
};

SqIdentityReport sq_identities(double eps1, double mu1, double eps2, double mu2,
                               double q, double zeta);

// Assembles the statistical-mechanical integrand I*Q*S (source-pair overlap
// integral, strength factor, orientation-averaged interaction) for both
// polarizations with D taken from the boundary solver, and reports its ratio
// to the corresponding Lifshitz integrand term. The ratio must not depend on
// (q, zeta); its value is reported, not pinned. Requires nonmagnetic
// (mu = 1) plates with eps > 1; a vacuum plate makes the assembly vanish
// identically and is reported with defined = false.
struct DerivationAuditReport {
  double tm_ratio = 0.0;
  double te_ratio = 0.0;
  bool defined = false;
};

DerivationAuditReport derivation_audit(const HalfSpacePair& pair, double q, double zeta);

}  // namespace casimir::halfplanes
