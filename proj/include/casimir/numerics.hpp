#pragma once

#include <functional>
#include <stdexcept>

#include "casimir/common.hpp"

namespace casimir::numerics {

// Tolerances and hard limits shared by the quadrature and Matsubara engines.
struct QuadratureConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 2000;
  double sum_truncation_rel = 1e-12;
  int max_matsubara_terms = 1000000;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(sum_truncation_rel > 0.0))
      throw std::invalid_argument("QuadratureConfig: tolerances must be strictly positive");
    if (max_subdivisions < 1 || max_matsubara_terms < 1)
      throw std::invalid_argument("QuadratureConfig: max counts must be >= 1");
  }

  QuadratureConfig tightened(double factor) const {
    QuadratureConfig c = *this;
    c.rel_tol *= factor;
    c.abs_tol *= factor;
    return c;
  }
};

// Result of a quadrature or series evaluation. `converged == false` means the
// engine hit a hard limit before reaching tolerance; the value is the best
// available estimate and must not be trusted silently.
struct Estimate {
  double value = 0.0;
  double abs_error = 0.0;
  long evaluations = 0;
  bool converged = false;
};

// Temperature state plus the Matsubara frequency ladder it induces,
// zeta_n = 2*pi*n / (beta*hbar*c). `beta` is an inverse energy; `hbar_c`
// defaults to 1 for natural-unit work and carries the SI value at the CLI
// boundary so that zeta_n comes out in inverse meters.
class ThermalState {
 public:
  static ThermalState zero_temperature() { return ThermalState(); }

  static ThermalState finite(double beta, double hbar_c = 1.0) {
    if (!(beta > 0.0)) throw std::invalid_argument("ThermalState: beta must be > 0");
    if (!(hbar_c > 0.0)) throw std::invalid_argument("ThermalState: hbar_c must be > 0");
    ThermalState t;
    t.finite_ = true;
    t.beta_ = beta;
    t.beta_hbar_c_ = beta * hbar_c;
    return t;
  }

  bool is_zero_temperature() const { return !finite_; }

  double beta() const {
    require_finite();
    return beta_;
  }

  // beta*hbar*c, a length: the Matsubara spacing is 2*pi over this.
  double beta_hbar_c() const {
    require_finite();
    return beta_hbar_c_;
  }

  double zeta(int n) const {
    require_finite();
    if (n < 0) throw std::invalid_argument("ThermalState: Matsubara index must be >= 0");
    return 2.0 * constants::pi * static_cast<double>(n) / beta_hbar_c_;
  }

 private:
  ThermalState() = default;
  void require_finite() const {
    if (!finite_) throw std::logic_error("ThermalState: zero-temperature state has no beta/zeta ladder");
  }

  bool finite_ = false;
  double beta_ = 0.0;
  double beta_hbar_c_ = 0.0;
};

// Adaptive evaluation of integral(f, [lower, inf)). The tail is mapped onto
// [0,1) by q = lower + t/(1-t) and refined with Gauss-Kronrod 7/15 panels
// until the summed error estimate meets max(abs_tol, rel_tol*|value|).
// A NaN from f raises std::domain_error naming the abscissa; running out of
// subdivisions (e.g. a divergent tail) yields a non-converged Estimate.
Estimate integrate_semi_infinite(const std::function<double(double)>& f, double lower,
                                 const QuadratureConfig& cfg = {});

// term(0)/2 + sum_{n>=1} term(n, zeta_n): the primed Matsubara sum with the
// half-weight n = 0 convention. Truncates after two consecutive terms fall
// below sum_truncation_rel * |partial sum| (plus the abs_tol floor).
Estimate matsubara_sum(const std::function<double(int, double)>& term,
                       const ThermalState& thermal, const QuadratureConfig& cfg = {});

// The T -> 0 replacement of a Matsubara sum: integral(term, [0, inf)) over
// zeta. The caller applies its own hbar*c/(2*pi) weight so downstream
// formulas lose all beta dependence.
Estimate zero_temperature_integral(const std::function<double(double)>& term,
                                   const QuadratureConfig& cfg = {});

}  // namespace casimir::numerics
