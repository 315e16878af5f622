#include "casimir/materials.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace casimir::materials {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double ResponseModel::eval(double zeta) const {
  if (!(zeta >= 0.0)) throw std::domain_error("ResponseModel::eval: zeta must be >= 0");
  switch (kind_) {
    case ModelKind::constant:
      return value_;
    case ModelKind::plasma:
      if (zeta == 0.0) return wp_ == 0.0 ? 1.0 : kInf;
      return 1.0 + (wp_ * wp_) / (zeta * zeta);
    case ModelKind::drude:
      if (zeta == 0.0) return wp_ == 0.0 ? 1.0 : kInf;
      return 1.0 + (wp_ * wp_) / (zeta * (zeta + gamma_));
    case ModelKind::lorentz:
      return 1.0 + (wp_ * wp_) / (w0_ * w0_ + zeta * zeta + gamma_ * zeta);
    case ModelKind::ideal_infinite:
      return kInf;
  }
  return kInf;  // unreachable
}

std::string ResponseModel::describe() const {
  char buf[128];
  switch (kind_) {
    case ModelKind::constant:
      std::snprintf(buf, sizeof(buf), "constant:%.17g", value_);
      break;
    case ModelKind::plasma:
      std::snprintf(buf, sizeof(buf), "plasma:wp=%.17g", wp_);
      break;
    case ModelKind::drude:
      std::snprintf(buf, sizeof(buf), "drude:wp=%.17g,gamma=%.17g", wp_, gamma_);
      break;
    case ModelKind::lorentz:
      std::snprintf(buf, sizeof(buf), "lorentz:w0=%.17g,wp=%.17g,gamma=%.17g", w0_, wp_, gamma_);
      break;
    case ModelKind::ideal_infinite:
      return "infinite";
  }
  return buf;
}

double kappa(const PlateSpec& plate, double q, double zeta) {
  if (!(q > 0.0)) throw std::domain_error("kappa: q must be > 0");
  if (!(zeta >= 0.0)) throw std::domain_error("kappa: zeta must be >= 0");
  if (q < zeta) throw std::domain_error("kappa: requires q >= zeta (k_perp^2 >= 0)");

  if (zeta == 0.0) return zero_freq_class(plate).kappa0(q);

  const double eps = plate.eps.eval(zeta);
  const double mu = plate.mu.eval(zeta);
  if (std::isinf(eps) || std::isinf(mu)) return kInf;

  // Rearranged as sqrt(q^2 + (eps*mu - 1)*zeta^2)/q so that zeta -> 0 and
  // eps*mu -> 1 are exact.
  return std::sqrt(q * q + (eps * mu - 1.0) * zeta * zeta) / q;
}

namespace {

ChannelZeroLimit channel_limit(const ResponseModel& m) {
  ChannelZeroLimit lim;
  switch (m.kind()) {
    case ModelKind::constant:
    case ModelKind::lorentz:
      lim.kind = ZeroFreqKind::finite;
      lim.value0 = m.eval(0.0);
      break;
    case ModelKind::plasma:
      if (m.wp() == 0.0) {
        lim.kind = ZeroFreqKind::finite;
        lim.value0 = 1.0;
      } else {
        lim.kind = ZeroFreqKind::plasma_like;
        lim.strength2 = m.wp() * m.wp();
      }
      break;
    case ModelKind::drude:
      if (m.wp() == 0.0) {
        lim.kind = ZeroFreqKind::finite;
        lim.value0 = 1.0;
      } else if (m.gamma() == 0.0) {
        // gamma = 0 degenerates to the plasma form.
        lim.kind = ZeroFreqKind::plasma_like;
        lim.strength2 = m.wp() * m.wp();
      } else {
        lim.kind = ZeroFreqKind::drude_like;
        lim.strength1 = m.wp() * m.wp() / m.gamma();
      }
      break;
    case ModelKind::ideal_infinite:
      lim.kind = ZeroFreqKind::ideal;
      break;
  }
  return lim;
}

// Divergence order of the channel as zeta -> 0: model ~ coeff / zeta^order.
int channel_order(const ChannelZeroLimit& lim) {
  switch (lim.kind) {
    case ZeroFreqKind::finite: return 0;
    case ZeroFreqKind::drude_like: return 1;
    case ZeroFreqKind::plasma_like: return 2;
    case ZeroFreqKind::ideal: return 1000;
  }
  return 0;
}

double channel_coeff(const ChannelZeroLimit& lim) {
  switch (lim.kind) {
    case ZeroFreqKind::finite: return lim.value0;
    case ZeroFreqKind::drude_like: return lim.strength1;
    case ZeroFreqKind::plasma_like: return lim.strength2;
    case ZeroFreqKind::ideal: return kInf;
  }
  return 0.0;
}

}  // namespace

double ZeroFreqClass::eps_mu_zeta2_limit() const {
  if (eps.kind == ZeroFreqKind::ideal || mu.kind == ZeroFreqKind::ideal) return kInf;
  const int order = channel_order(eps) + channel_order(mu) - 2;
  if (order < 0) return 0.0;
  if (order == 0) return channel_coeff(eps) * channel_coeff(mu);
  return kInf;
}

double ZeroFreqClass::kappa0(double q) const {
  if (!(q > 0.0)) throw std::domain_error("ZeroFreqClass::kappa0: q must be > 0");
  const double p = eps_mu_zeta2_limit();
  if (std::isinf(p)) return kInf;
  return std::sqrt(q * q + p) / q;
}

ZeroFreqClass zero_freq_class(const PlateSpec& plate) {
  plate.validate();
  ZeroFreqClass cls;
  cls.eps = channel_limit(plate.eps);
  cls.mu = channel_limit(plate.mu);

  auto rank = [](ZeroFreqKind k) {
    switch (k) {
      case ZeroFreqKind::finite: return 0;
      case ZeroFreqKind::drude_like: return 1;
      case ZeroFreqKind::plasma_like: return 2;
      case ZeroFreqKind::ideal: return 3;
    }
    return 0;
  };
  cls.kind = rank(cls.eps.kind) >= rank(cls.mu.kind) ? cls.eps.kind : cls.mu.kind;
  return cls;
}

namespace {

[[noreturn]] void bad_token(const std::string& spec, const std::string& token) {
  throw std::invalid_argument("invalid material spec '" + spec + "': bad token '" + token + "'");
}

double parse_number(const std::string& spec, const std::string& token) {
  try {
    size_t pos = 0;
    const double v = std::stod(token, &pos);
    if (pos != token.size()) bad_token(spec, token);
    return v;
  } catch (const std::invalid_argument&) {
    bad_token(spec, token);
  } catch (const std::out_of_range&) {
    bad_token(spec, token);
  }
}

}  // namespace

ResponseModel parse_response_model(const std::string& spec, double freq_scale) {
  if (spec.empty()) throw std::invalid_argument("invalid material spec: empty string");

  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);

  if (head == "infinite") {
    if (colon != std::string::npos) bad_token(spec, spec.substr(colon));
    return ResponseModel::ideal_infinite();
  }

  // Bare number shorthand for a constant model.
  if (colon == std::string::npos) {
    return ResponseModel::constant(parse_number(spec, spec));
  }

  const std::string body = spec.substr(colon + 1);
  if (head == "constant") {
    return ResponseModel::constant(parse_number(spec, body));
  }

  // Remaining kinds take key=value pairs separated by commas.
  double wp = -1.0, gamma = -1.0, w0 = -1.0;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) bad_token(spec, item);
    const std::string key = item.substr(0, eq);
    const double value = parse_number(spec, item.substr(eq + 1)) * freq_scale;
    if (key == "wp") {
      wp = value;
    } else if (key == "gamma") {
      gamma = value;
    } else if (key == "w0") {
      w0 = value;
    } else {
      bad_token(spec, key);
    }
  }

  if (head == "plasma") {
    if (wp < 0.0 || gamma >= 0.0 || w0 >= 0.0) bad_token(spec, body);
    return ResponseModel::plasma(wp);
  }
  if (head == "drude") {
    if (wp < 0.0 || gamma < 0.0 || w0 >= 0.0) bad_token(spec, body);
    return ResponseModel::drude(wp, gamma);
  }
  if (head == "lorentz") {
    if (wp < 0.0 || w0 < 0.0) bad_token(spec, body);
    return ResponseModel::lorentz(w0, wp, gamma < 0.0 ? 0.0 : gamma);
  }
  bad_token(spec, head);
}

}  // namespace casimir::materials
