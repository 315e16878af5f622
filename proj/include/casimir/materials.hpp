#pragma once

#include <limits>
#include <stdexcept>
#include <string>

#include "casimir/common.hpp"

namespace casimir::materials {

enum class ModelKind { constant, plasma, drude, lorentz, ideal_infinite };

// Material response on the imaginary frequency axis. eval(zeta) returns
// eps(i*zeta), mu(i*zeta) or a polarizability, depending on what the model
// stands for; all model frequencies are wavenumbers (inverse length).
//
//   constant          -> value
//   plasma(wp)        -> 1 + wp^2 / zeta^2
//   drude(wp,gamma)   -> 1 + wp^2 / (zeta*(zeta+gamma))
//   lorentz(w0,wp,g)  -> 1 + wp^2 / (w0^2 + zeta^2 + g*zeta)
//   ideal_infinite    -> +inf sentinel, resolved analytically downstream
//
// plasma/drude evaluate to the +inf sentinel at zeta = 0; the zero-frequency
// reflection limits are taken via zero_freq_class instead.
class ResponseModel {
 public:
  static ResponseModel constant(double value) {
    if (!(value >= 0.0)) throw std::invalid_argument("ResponseModel: constant value must be >= 0");
    ResponseModel m(ModelKind::constant);
    m.value_ = value;
    return m;
  }

  static ResponseModel plasma(double wp) {
    if (!(wp >= 0.0)) throw std::invalid_argument("ResponseModel: plasma wp must be >= 0");
    ResponseModel m(ModelKind::plasma);
    m.wp_ = wp;
    return m;
  }

  static ResponseModel drude(double wp, double gamma) {
    if (!(wp >= 0.0) || !(gamma >= 0.0))
      throw std::invalid_argument("ResponseModel: drude parameters must be >= 0");
    ResponseModel m(ModelKind::drude);
    m.wp_ = wp;
    m.gamma_ = gamma;
    return m;
  }

  static ResponseModel lorentz(double w0, double wp, double gamma) {
    if (!(w0 > 0.0)) throw std::invalid_argument("ResponseModel: lorentz w0 must be > 0");
    if (!(wp >= 0.0) || !(gamma >= 0.0))
      throw std::invalid_argument("ResponseModel: lorentz parameters must be >= 0");
    ResponseModel m(ModelKind::lorentz);
    m.w0_ = w0;
    m.wp_ = wp;
    m.gamma_ = gamma;
    return m;
  }

  static ResponseModel ideal_infinite() { return ResponseModel(ModelKind::ideal_infinite); }

  static ResponseModel vacuum() { return constant(1.0); }

  ModelKind kind() const { return kind_; }
  bool is_ideal() const { return kind_ == ModelKind::ideal_infinite; }
  bool is_constant() const { return kind_ == ModelKind::constant; }

  double constant_value() const {
    if (kind_ != ModelKind::constant)
      throw std::logic_error("ResponseModel: not a constant model");
    return value_;
  }

  double wp() const { return wp_; }
  double gamma() const { return gamma_; }
  double w0() const { return w0_; }

  // The paper's formulas assume a response >= 1; sub-unity constants are
  // accepted but flagged so callers can warn.
  bool below_unity() const { return kind_ == ModelKind::constant && value_ < 1.0; }

  double eval(double zeta) const;
  double operator()(double zeta) const { return eval(zeta); }

  std::string describe() const;

 private:
  explicit ResponseModel(ModelKind k) : kind_(k) {}

  ModelKind kind_;
  double value_ = 0.0;
  double wp_ = 0.0;
  double gamma_ = 0.0;
  double w0_ = 0.0;
};

// One half-space: permittivity and permeability models. eps and mu cannot
// both be the ideal sentinel (the joint limit is direction-dependent).
struct PlateSpec {
  ResponseModel eps = ResponseModel::vacuum();
  ResponseModel mu = ResponseModel::vacuum();

  void validate() const {
    if (eps.is_ideal() && mu.is_ideal())
      throw std::invalid_argument("PlateSpec: eps and mu cannot both be ideal_infinite");
    if (eps.is_constant() && !(eps.constant_value() > 0.0))
      throw std::invalid_argument("PlateSpec: constant eps must be > 0");
    if (mu.is_constant() && !(mu.constant_value() > 0.0))
      throw std::invalid_argument("PlateSpec: constant mu must be > 0");
  }

  bool below_unity_warning() const { return eps.below_unity() || mu.below_unity(); }
};

// Particle electric/magnetic polarizabilities (volume units). Must stay
// finite on the whole imaginary axis, so the divergent-at-zero models are
// rejected up front.
struct ParticleSpec {
  ResponseModel alpha_e = ResponseModel::constant(0.0);
  ResponseModel alpha_h = ResponseModel::constant(0.0);

  void validate() const {
    for (const ResponseModel* m : {&alpha_e, &alpha_h}) {
      if (m->is_ideal() || m->kind() == ModelKind::plasma ||
          (m->kind() == ModelKind::drude))
        throw std::invalid_argument(
            "ParticleSpec: polarizability must be finite at zeta = 0 (use constant or lorentz)");
    }
  }
};

// kappa = q_eps / q = sqrt(q^2 + (eps*mu - 1) * zeta^2) / q, the ratio of
// in-medium to vacuum decay wavenumbers. Requires q >= zeta >= 0, q > 0.
// At zeta = 0 the proper model limit is taken (plasma keeps a finite
// eps*zeta^2); an ideal plate yields +inf.
double kappa(const PlateSpec& plate, double q, double zeta);

enum class ZeroFreqKind { finite, plasma_like, drude_like, ideal };

// Leading zeta -> 0 behavior of one response channel:
//   finite       value0 = model(0)
//   plasma_like  strength2 = lim zeta^2 * model  (= wp^2)
//   drude_like   strength1 = lim zeta * model    (= wp^2 / gamma)
//   ideal        divergent at every zeta
struct ChannelZeroLimit {
  ZeroFreqKind kind = ZeroFreqKind::finite;
  double value0 = 1.0;
  double strength2 = 0.0;
  double strength1 = 0.0;
};

struct ZeroFreqClass {
  ZeroFreqKind kind = ZeroFreqKind::finite;  // combined plate classification
  ChannelZeroLimit eps;
  ChannelZeroLimit mu;

  // lim_{zeta->0} eps*mu*zeta^2. +inf when the product diverges (e.g. both
  // channels plasma), in which case kappa0 is +inf as well.
  double eps_mu_zeta2_limit() const;
  double kappa0(double q) const;
};

ZeroFreqClass zero_freq_class(const PlateSpec& plate);

// Parses the CLI/config model grammar:
//   constant:4.0 | plasma:wp=... | drude:wp=...,gamma=... |
//   lorentz:w0=...,wp=...,gamma=... | infinite | <bare number>
// freq_scale multiplies every frequency-like parameter (rad/s -> 1/m at the
// CLI boundary). Throws std::invalid_argument naming the offending token.
ResponseModel parse_response_model(const std::string& spec, double freq_scale = 1.0);

}  // namespace casimir::materials
