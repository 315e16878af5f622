#include "casimir/halfplanes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace casimir::halfplanes {

using constants::pi;
using materials::ZeroFreqKind;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double kappa_scalar(double eps, double mu, double q, double zeta) {
  return std::sqrt(q * q + (eps * mu - 1.0) * zeta * zeta) / q;
}

double q_eps_scalar(double eps, double mu, double q, double zeta) {
  return std::sqrt(q * q + (eps * mu - 1.0) * zeta * zeta);
}

// Per-plate single-interface factors; reflection() multiplies the two
// plates' factors channel by channel.
struct PlateFactors {
  double tm = 0.0;
  double te = 0.0;
};

PlateFactors plate_factors_positive_zeta(const materials::PlateSpec& plate, double q, double zeta) {
  if (plate.eps.is_ideal()) return {1.0, 1.0};
  if (plate.mu.is_ideal()) return {-1.0, -1.0};

  const double eps = plate.eps.eval(zeta);
  const double mu = plate.mu.eval(zeta);
  const double k = kappa_scalar(eps, mu, q, zeta);
  return {(eps - k) / (eps + k), (k - mu) / (k + mu)};
}

int divergence_order(const materials::ChannelZeroLimit& lim) {
  switch (lim.kind) {
    case ZeroFreqKind::finite: return 0;
    case ZeroFreqKind::drude_like: return 1;
    case ZeroFreqKind::plasma_like: return 2;
    case ZeroFreqKind::ideal: return 3;
  }
  return 0;
}

// zeta -> 0 limits of the interface factors, model by model. A channel that
// diverges at zero frequency dominates kappa0 (its divergence order always
// exceeds kappa's), so its factor saturates at +/-1; finite channels keep
// the Fresnel form with the limiting kappa0.
PlateFactors plate_factors_zero_zeta(const materials::PlateSpec& plate, double q) {
  if (plate.eps.is_ideal()) return {1.0, 1.0};
  if (plate.mu.is_ideal()) return {-1.0, -1.0};

  const materials::ZeroFreqClass cls = materials::zero_freq_class(plate);
  PlateFactors f;

  if (divergence_order(cls.eps) > 0) {
    f.tm = 1.0;
  } else {
    const double k0 = cls.kappa0(q);
    f.tm = std::isinf(k0) ? -1.0 : (cls.eps.value0 - k0) / (cls.eps.value0 + k0);
  }

  if (divergence_order(cls.mu) > 0) {
    f.te = -1.0;
  } else {
    const double k0 = cls.kappa0(q);
    f.te = std::isinf(k0) ? 1.0 : (k0 - cls.mu.value0) / (k0 + cls.mu.value0);
  }
  return f;
}

}  // namespace

ReflectionPair reflection(const HalfSpacePair& pair, double q, double zeta) {
  pair.validate();
  if (!(q > 0.0)) throw std::domain_error("reflection: q must be > 0");
  if (!(zeta >= 0.0)) throw std::domain_error("reflection: zeta must be >= 0");
  if (q < zeta) throw std::domain_error("reflection: requires q >= zeta");

  const PlateFactors f1 = zeta == 0.0 ? plate_factors_zero_zeta(pair.plate1, q)
                                      : plate_factors_positive_zeta(pair.plate1, q, zeta);
  const PlateFactors f2 = zeta == 0.0 ? plate_factors_zero_zeta(pair.plate2, q)
                                      : plate_factors_positive_zeta(pair.plate2, q, zeta);
  return {f1.tm * f2.tm, f1.te * f2.te};
}

double conductor_reference(double gap) {
  return pi * pi / (240.0 * gap * gap * gap * gap);
}

namespace {

enum class Channel { tm, te };

// Dimensionless inner integral F(zeta) = integral_{2 zeta a}^inf y^2 *
// r e^{-y} / (1 - r e^{-y}) dy with r the channel reflection at
// q = y / (2a). This is the q-integral of the force after y = 2qa.
numerics::Estimate channel_inner(const HalfSpacePair& pair, double zeta, Channel ch,
                                 const numerics::QuadratureConfig& cfg) {
  const double a = pair.gap;
  auto integrand = [&pair, a, zeta, ch](double y) {
    const double q = y / (2.0 * a);
    const ReflectionPair r = reflection(pair, q, zeta);
    const double coef = ch == Channel::tm ? r.a : r.b;
    if (coef == 0.0) return 0.0;
    const double damped = coef * std::exp(-y);
    return y * y * damped / (1.0 - damped);
  };
  return numerics::integrate_semi_infinite(integrand, 2.0 * zeta * a, cfg);
}

struct ChannelForce {
  double value = 0.0;
  double abs_error = 0.0;
  long evaluations = 0;
  int terms = 0;
  int failed_n = -1;
  bool converged = true;
};

ChannelForce channel_force(const HalfSpacePair& pair, const numerics::ThermalState& thermal,
                           Channel ch, const numerics::QuadratureConfig& cfg) {
  const double a = pair.gap;
  const numerics::QuadratureConfig inner_cfg = cfg.tightened(0.1);

  ChannelForce out;
  double inner_error = 0.0;

  if (thermal.is_zero_temperature()) {
    auto term = [&](double zeta) {
      const numerics::Estimate inner = channel_inner(pair, zeta, ch, inner_cfg);
      out.evaluations += inner.evaluations;
      inner_error = std::max(inner_error, inner.abs_error);
      if (!inner.converged) out.converged = false;
      return inner.value / (8.0 * a * a * a);
    };
    const numerics::Estimate outer = numerics::zero_temperature_integral(term, cfg);
    // -(1/pi) from the force prefactor times the hbar*c/(2 pi) sum-to-
    // integral weight applied to the returned zeta integral.
    const double weight = -1.0 / (2.0 * pi * pi);
    out.value = weight * outer.value;
    out.abs_error = std::abs(weight) * (outer.abs_error + inner_error);
    out.evaluations += outer.evaluations;
    out.converged = out.converged && outer.converged;
    return out;
  }

  const double ell = thermal.beta_hbar_c();
  auto term = [&](int n, double zeta) {
    const numerics::Estimate inner = channel_inner(pair, zeta, ch, inner_cfg);
    out.evaluations += inner.evaluations;
    inner_error += inner.abs_error;
    if (!inner.converged && out.failed_n < 0) {
      out.failed_n = n;
      out.converged = false;
    }
    return inner.value;
  };
  const numerics::Estimate sum = numerics::matsubara_sum(term, thermal, cfg);
  const double weight = -1.0 / (8.0 * pi * ell * a * a * a);
  out.value = weight * sum.value;
  out.abs_error = std::abs(weight) * (sum.abs_error + inner_error);
  out.terms = static_cast<int>(sum.evaluations);
  out.converged = out.converged && sum.converged;
  return out;
}

}  // namespace

ForceResult force_per_area(const HalfSpacePair& pair, const numerics::ThermalState& thermal,
                           const numerics::QuadratureConfig& cfg) {
  pair.validate();
  cfg.validate();

  const ChannelForce tm = channel_force(pair, thermal, Channel::tm, cfg);
  const ChannelForce te = channel_force(pair, thermal, Channel::te, cfg);

  ForceResult out;
  out.tm = tm.value;
  out.te = te.value;
  out.value = tm.value + te.value;
  out.diagnostics.converged = tm.converged && te.converged;
  out.diagnostics.matsubara_terms = std::max(tm.terms, te.terms);
  out.diagnostics.evaluations = tm.evaluations + te.evaluations;
  out.diagnostics.abs_error = tm.abs_error + te.abs_error;
  out.diagnostics.failed_n = tm.failed_n >= 0 ? tm.failed_n : te.failed_n;

  const double zero_threshold = 1e-3 * conductor_reference(pair.gap);
  if (std::abs(out.value) <= zero_threshold) {
    out.sign = Sign::none;
  } else {
    out.sign = out.value < 0.0 ? Sign::attractive : Sign::repulsive;
  }
  return out;
}

std::vector<ClassifyPoint> classify(const std::function<HalfSpacePair(double, double)>& make_pair,
                                    const std::vector<double>& x_values,
                                    const std::vector<double>& y_values,
                                    const numerics::ThermalState& thermal,
                                    const numerics::QuadratureConfig& cfg, int threads) {
  const size_t nx = x_values.size();
  const size_t ny = y_values.size();
  std::vector<ClassifyPoint> grid(nx * ny);

  auto compute = [&](size_t index) {
    const double x = x_values[index / ny];
    const double y = y_values[index % ny];
    ClassifyPoint& p = grid[index];
    p.x = x;
    p.y = y;
    p.force = force_per_area(make_pair(x, y), thermal, cfg);
  };

  const int workers = std::max(1, threads);
  if (workers == 1 || grid.size() < 2) {
    for (size_t i = 0; i < grid.size(); ++i) compute(i);
    return grid;
  }

  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (size_t i = static_cast<size_t>(w); i < grid.size(); i += static_cast<size_t>(workers))
        compute(i);
    });
  }
  for (std::thread& t : pool) t.join();
  return grid;
}

namespace {

// Dense 4x4 solve with partial pivoting; the boundary systems are far from
// singular for passive media, so a failed pivot is treated as a hard error.
std::array<double, 4> solve4(std::array<std::array<double, 5>, 4> m) {
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int row = col + 1; row < 4; ++row) {
      if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
    }
    if (m[pivot][col] == 0.0)
      throw std::runtime_error("boundary solve: singular continuity system");
    std::swap(m[col], m[pivot]);
    for (int row = col + 1; row < 4; ++row) {
      const double f = m[row][col] / m[col][col];
      for (int k = col; k < 5; ++k) m[row][k] -= f * m[col][k];
    }
  }
  std::array<double, 4> x{};
  for (int row = 3; row >= 0; --row) {
    double acc = m[row][4];
    for (int k = row + 1; k < 4; ++k) acc -= m[row][k] * x[k];
    x[row] = acc / m[row][row];
  }
  return x;
}

void check_boundary_inputs(double eps1, double mu1, double eps2, double mu2, double q,
                           double zeta, double gap) {
  if (!(eps1 > 0.0) || !(mu1 > 0.0) || !(eps2 > 0.0) || !(mu2 > 0.0))
    throw std::domain_error("boundary solve: materials must be finite and positive");
  if (!(q > 0.0) || !(zeta >= 0.0) || q < zeta)
    throw std::domain_error("boundary solve: requires q >= zeta >= 0, q > 0");
  if (!(gap > 0.0)) throw std::domain_error("boundary solve: gap must be > 0");
}

}  // namespace

BoundaryCoefficients boundary_solve_tm(double eps1, double mu1, double eps2, double mu2,
                                       double q, double zeta, double gap) {
  check_boundary_inputs(eps1, mu1, eps2, mu2, q, zeta, gap);
  const double qe1 = q_eps_scalar(eps1, mu1, q, zeta);
  const double qe2 = q_eps_scalar(eps2, mu2, q, zeta);
  const double em = std::exp(-q * gap);
  const double ep = std::exp(q * gap);
  const double et = std::exp(-qe2 * gap);

  // Tangential E and tangential H continuity at z = 0 and z = a for the
  // TM field; a mode of amplitude A in medium eps carries E_x ~ A and
  // H_y ~ +/- A * eps / q_eps. Unknowns (B, C, C1, D), source term the
  // incident amplitude q_eps1 / eps1.
  std::array<std::array<double, 5>, 4> m{{
      {qe1, -q, -q, 0.0, -qe1 / eps1},
      {eps1, 1.0, -1.0, 0.0, 1.0},
      {0.0, q * em, q * ep, -qe2 * et, 0.0},
      {0.0, em, -ep, -eps2 * et, 0.0},
  }};
  const auto x = solve4(m);
  return {x[0], x[1], x[2], x[3]};
}

BoundaryCoefficients boundary_solve_te(double eps1, double mu1, double eps2, double mu2,
                                       double q, double zeta, double gap) {
  check_boundary_inputs(eps1, mu1, eps2, mu2, q, zeta, gap);
  const double qe1 = q_eps_scalar(eps1, mu1, q, zeta);
  const double qe2 = q_eps_scalar(eps2, mu2, q, zeta);
  const double em = std::exp(-q * gap);
  const double ep = std::exp(q * gap);
  const double et = std::exp(-qe2 * gap);

  // TE field: E_y ~ A, H_x ~ -/+ A * q_eps / mu. Incident amplitude mu1.
  std::array<std::array<double, 5>, 4> m{{
      {1.0, -1.0, -1.0, 0.0, -mu1},
      {qe1 / mu1, q, -q, 0.0, qe1},
      {0.0, em, ep, -et, 0.0},
      {0.0, q * em, -q * ep, -(qe2 / mu2) * et, 0.0},
  }};
  const auto x = solve4(m);
  return {x[0], x[1], x[2], x[3]};
}

double d_parallel_closed(double eps1, double mu1, double eps2, double mu2,
                         double q, double zeta, double gap) {
  check_boundary_inputs(eps1, mu1, eps2, mu2, q, zeta, gap);
  const double k1 = kappa_scalar(eps1, mu1, q, zeta);
  const double k2 = kappa_scalar(eps2, mu2, q, zeta);
  const double qe2 = k2 * q;
  const double an = (eps1 - k1) * (eps2 - k2) / ((eps1 + k1) * (eps2 + k2));
  return 4.0 * k1 * std::exp((qe2 - q) * gap) /
         ((eps1 + k1) * (eps2 + k2) * (1.0 - an * std::exp(-2.0 * q * gap)));
}

double d_perp_closed(double eps1, double mu1, double eps2, double mu2,
                     double q, double zeta, double gap) {
  check_boundary_inputs(eps1, mu1, eps2, mu2, q, zeta, gap);
  const double k1 = kappa_scalar(eps1, mu1, q, zeta);
  const double k2 = kappa_scalar(eps2, mu2, q, zeta);
  const double qe2 = k2 * q;
  const double bn = (k1 - mu1) * (k2 - mu2) / ((k1 + mu1) * (k2 + mu2));
  return 4.0 * mu1 * mu2 * k1 * std::exp((qe2 - q) * gap) /
         ((k1 + mu1) * (k2 + mu2) * (1.0 - bn * std::exp(-2.0 * q * gap)));
}

CoefficientRelationReport coefficient_relations(double eps1, double mu1, double eps2, double mu2,
                                                double q, double zeta, double gap) {
  CoefficientRelationReport rep;
  rep.de_par = d_parallel_closed(eps1, mu1, eps2, mu2, q, zeta, gap);
  rep.de_perp = d_perp_closed(eps1, mu1, eps2, mu2, q, zeta, gap);
  // H-field coefficients: same closed forms with eps and mu interchanged
  // (kappa is unchanged, it only sees the product eps*mu).
  rep.dh_par = d_parallel_closed(mu1, eps1, mu2, eps2, q, zeta, gap);
  rep.dh_perp = d_perp_closed(mu1, eps1, mu2, eps2, q, zeta, gap);

  auto rel = [](double lhs, double rhs) {
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    return std::abs(lhs - rhs) / scale;
  };
  rep.rel_err_perp = rel(rep.de_perp, mu1 * mu2 * rep.dh_par);
  rep.rel_err_par = rel(rep.dh_perp, eps1 * eps2 * rep.de_par);
  rep.ok = rep.rel_err_perp <= 1e-12 && rep.rel_err_par <= 1e-12;
  return rep;
}

SqIdentityReport sq_identities(double eps1, double mu1, double eps2, double mu2,
                               double q, double zeta) {
  if (!(eps1 > 0.0) || !(mu1 > 0.0) || !(eps2 > 0.0) || !(mu2 > 0.0))
    throw std::domain_error("sq_identities: materials must be finite and positive");
  if (!(q > 0.0) || !(zeta >= 0.0) || q < zeta)
    throw std::domain_error("sq_identities: requires q >= zeta >= 0, q > 0");

  const double z2 = zeta * zeta;
  const double z4 = z2 * z2;
  const double kperp2 = q * q - z2;
  const double qe1 = q_eps_scalar(eps1, mu1, q, zeta);
  const double qe2 = q_eps_scalar(eps2, mu2, q, zeta);
  const double k1 = qe1 / q;
  const double k2 = qe2 / q;
  const double kq1 = kperp2 + qe1 * q;
  const double kq2 = kperp2 + qe2 * q;

  SqIdentityReport rep;

  // TM strength: four bilinear terms mixing the electric and magnetic
  // channels, their product form, and the fully factored form. Common
  // D/36 prefactors are cleared.
  rep.par_expanded = (eps1 - 1.0) * (eps2 - 1.0) * kq1 * kq2 -
                     (eps1 - 1.0) * (mu2 - 1.0) * eps2 * z2 * kq1 -
                     (eps2 - 1.0) * (mu1 - 1.0) * eps1 * z2 * kq2 +
                     (mu1 - 1.0) * (mu2 - 1.0) * eps1 * eps2 * z4;
  rep.par_product = ((eps1 - 1.0) * kq1 - (mu1 - 1.0) * eps1 * z2) *
                    ((eps2 - 1.0) * kq2 - (mu2 - 1.0) * eps2 * z2);
  rep.par_factored = q * q * (eps1 - k1) * (q + qe1) * (eps2 - k2) * (q + qe2);

  // TE strength: the same structure with eps and mu interchanged.
  rep.perp_expanded = (mu1 - 1.0) * (mu2 - 1.0) * kq1 * kq2 -
                      (mu1 - 1.0) * (eps2 - 1.0) * mu2 * z2 * kq1 -
                      (mu2 - 1.0) * (eps1 - 1.0) * mu1 * z2 * kq2 +
                      (eps1 - 1.0) * (eps2 - 1.0) * mu1 * mu2 * z4;
  rep.perp_product = ((mu1 - 1.0) * kq1 - (eps1 - 1.0) * mu1 * z2) *
                     ((mu2 - 1.0) * kq2 - (eps2 - 1.0) * mu2 * z2);
  rep.perp_factored = q * q * (mu1 - k1) * (q + qe1) * (mu2 - k2) * (q + qe2);

  auto rel = [](double a, double b, double c) {
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), 1e-300});
    return std::max(std::abs(a - b), std::abs(b - c)) / scale;
  };
  rep.rel_err_par = rel(rep.par_expanded, rep.par_product, rep.par_factored);
  rep.rel_err_perp = rel(rep.perp_expanded, rep.perp_product, rep.perp_factored);
  rep.ok = rep.rel_err_par <= 1e-12 && rep.rel_err_perp <= 1e-12;
  return rep;
}

DerivationAuditReport derivation_audit(const HalfSpacePair& pair, double q, double zeta) {
  pair.validate();
  if (!(zeta > 0.0) || !(q >= zeta))
    throw std::domain_error("derivation_audit: requires q >= zeta > 0");

  const double mu1 = pair.plate1.mu.eval(zeta);
  const double mu2 = pair.plate2.mu.eval(zeta);
  if (mu1 != 1.0 || mu2 != 1.0)
    throw std::domain_error("derivation_audit: defined for nonmagnetic plates (mu = 1)");
  const double eps1 = pair.plate1.eps.eval(zeta);
  const double eps2 = pair.plate2.eps.eval(zeta);
  if (!std::isfinite(eps1) || !std::isfinite(eps2))
    throw std::domain_error("derivation_audit: requires finite permittivities");

  DerivationAuditReport rep;
  const double strength = (eps1 - 1.0) * (eps2 - 1.0) / 4.0;
  if (strength == 0.0) return rep;  // vacuum plate: assemblies vanish identically

  const double a = pair.gap;
  const double qe1 = q_eps_scalar(eps1, 1.0, q, zeta);
  const double qe2 = q_eps_scalar(eps2, 1.0, q, zeta);
  const double kperp2 = q * q - zeta * zeta;
  const double kq1 = kperp2 + qe1 * q;
  const double kq2 = kperp2 + qe2 * q;

  const double d_par = boundary_solve_tm(eps1, 1.0, eps2, 1.0, q, zeta, a).d;
  const double d_perp = boundary_solve_te(eps1, 1.0, eps2, 1.0, q, zeta, a).d;

  // Source-pair overlap integral over the two half-space depths.
  const double overlap =
      std::exp(-(qe2 + q) * a) / (qe1 * q * (qe1 + q) * (qe2 + q));

  const double s_par = d_par * kq1 * kq2 / 9.0;
  const double s_perp = d_perp * zeta * zeta * zeta * zeta / 9.0;

  const ReflectionPair r = reflection(pair, q, zeta);
  const double e2 = std::exp(-2.0 * q * a);
  const double a_term = r.a * e2 / (1.0 - r.a * e2);
  const double b_term = r.b * e2 / (1.0 - r.b * e2);
  if (a_term == 0.0 || b_term == 0.0) return rep;

  rep.tm_ratio = overlap * strength * s_par / a_term;
  rep.te_ratio = overlap * strength * s_perp / b_term;
  rep.defined = true;
  return rep;
}

}  // namespace casimir::halfplanes
