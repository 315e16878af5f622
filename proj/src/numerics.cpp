#include "casimir/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

namespace casimir::numerics {

namespace {

// Gauss 7 / Kronrod 15 rule on [-1, 1]. Nodes listed for the non-negative
// half; the rule is symmetric. Weights from the standard tables.
constexpr int kHalfNodes = 8;

constexpr double kNodes[kHalfNodes] = {
    0.0,
    0.2077849550078985,
    0.4058451513773972,
    0.5860872354676911,
    0.7415311855993945,
    0.8648644233597691,
    0.9491079123427585,
    0.9914553711208126,
};

constexpr double kKronrodWeights[kHalfNodes] = {
    0.2094821410847278,
    0.2044329400752989,
    0.1903505780647854,
    0.1690047266392679,
    0.1406532597155259,
    0.1047900103222502,
    0.0630920926299786,
    0.0229353220105292,
};

// Gauss-7 weights, nonzero only on the even-indexed Kronrod nodes.
constexpr double kGaussWeights[kHalfNodes] = {
    0.4179591836734694,
    0.0,
    0.3818300505051189,
    0.0,
    0.2797053914892767,
    0.0,
    0.1294849661688697,
    0.0,
};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
};

struct PanelWorse {
  bool operator()(const Panel& lhs, const Panel& rhs) const {
    if (lhs.error != rhs.error) return lhs.error < rhs.error;
    return lhs.a > rhs.a;  // deterministic tie-break
  }
};

[[noreturn]] void throw_nan_abscissa(double q) {
  char msg[96];
  std::snprintf(msg, sizeof(msg), "integrand returned NaN at abscissa %.17g", q);
  throw std::domain_error(msg);
}

}  // namespace

Estimate integrate_semi_infinite(const std::function<double(double)>& f, double lower,
                                 const QuadratureConfig& cfg) {
  cfg.validate();
  if (std::isnan(lower)) throw std::invalid_argument("integrate_semi_infinite: lower bound is NaN");

  long evaluations = 0;

  // Transformed integrand on t in [0,1): f(lower + t/(1-t)) / (1-t)^2.
  // Kronrod nodes are interior, so t never reaches 1 exactly.
  auto g = [&](double t) -> double {
    const double om = 1.0 - t;
    const double q = lower + t / om;
    const double fq = f(q);
    ++evaluations;
    if (std::isnan(fq)) throw_nan_abscissa(q);
    return fq / (om * om);
  };

  auto evaluate_panel = [&](double a, double b) -> Panel {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double kronrod = 0.0;
    double gauss = 0.0;
    for (int i = 0; i < kHalfNodes; ++i) {
      const double offset = half * kNodes[i];
      double y;
      if (i == 0) {
        y = g(center);
      } else {
        y = g(center - offset) + g(center + offset);
      }
      kronrod += kKronrodWeights[i] * y;
      gauss += kGaussWeights[i] * y;
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.value = kronrod * half;
    p.error = std::abs(kronrod - gauss) * half;
    if (!std::isfinite(p.value)) p.error = std::numeric_limits<double>::infinity();
    return p;
  };

  std::vector<Panel> heap;
  heap.push_back(evaluate_panel(0.0, 1.0));
  std::push_heap(heap.begin(), heap.end(), PanelWorse{});

  int subdivisions = 0;
  Estimate result;
  for (;;) {
    double total = 0.0;
    double total_error = 0.0;
    for (const Panel& p : heap) {
      total += p.value;
      total_error += p.error;
    }
    result.value = total;
    result.abs_error = total_error;
    result.evaluations = evaluations;

    if (total_error <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total)) && std::isfinite(total)) {
      result.converged = true;
      return result;
    }
    if (subdivisions >= cfg.max_subdivisions) {
      result.converged = false;
      return result;
    }

    std::pop_heap(heap.begin(), heap.end(), PanelWorse{});
    const Panel worst = heap.back();
    heap.pop_back();

    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval has collapsed to machine resolution; no refinement possible.
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), PanelWorse{});
      result.converged = false;
      return result;
    }

    heap.push_back(evaluate_panel(worst.a, mid));
    std::push_heap(heap.begin(), heap.end(), PanelWorse{});
    heap.push_back(evaluate_panel(mid, worst.b));
    std::push_heap(heap.begin(), heap.end(), PanelWorse{});
    ++subdivisions;
  }
}

Estimate matsubara_sum(const std::function<double(int, double)>& term,
                       const ThermalState& thermal, const QuadratureConfig& cfg) {
  cfg.validate();
  if (thermal.is_zero_temperature())
    throw std::logic_error("matsubara_sum: requires a finite-temperature state");

  auto checked_term = [&](int n) -> double {
    const double t = term(n, thermal.zeta(n));
    if (std::isnan(t)) {
      char msg[64];
      std::snprintf(msg, sizeof(msg), "Matsubara term is NaN at n = %d", n);
      throw std::domain_error(msg);
    }
    return t;
  };

  Estimate result;
  double sum = 0.5 * checked_term(0);
  long terms = 1;
  int consecutive_small = 0;
  double last = 0.0;
  double second_last = 0.0;

  for (int n = 1; n <= cfg.max_matsubara_terms; ++n) {
    const double t = checked_term(n);
    sum += t;
    ++terms;
    second_last = last;
    last = std::abs(t);

    // Two consecutive below-threshold terms guard against even/odd
    // oscillation masking a slowly decaying tail.
    if (last <= cfg.sum_truncation_rel * std::abs(sum) + cfg.abs_tol) {
      if (++consecutive_small >= 2) {
        result.value = sum;
        result.abs_error = last + second_last + cfg.sum_truncation_rel * std::abs(sum);
        result.evaluations = terms;
        result.converged = true;
        return result;
      }
    } else {
      consecutive_small = 0;
    }
  }

  result.value = sum;
  result.abs_error = std::max(last, second_last);
  result.evaluations = terms;
  result.converged = false;
  return result;
}

Estimate zero_temperature_integral(const std::function<double(double)>& term,
                                   const QuadratureConfig& cfg) {
  return integrate_semi_infinite(term, 0.0, cfg);
}

}  // namespace casimir::numerics
