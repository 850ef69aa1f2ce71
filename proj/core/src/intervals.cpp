#include "pnbounds/intervals.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>

namespace pnb {

namespace {

const boost::math::normal_distribution<double>& std_normal() {
  static const boost::math::normal_distribution<double> dist(0.0, 1.0);
  return dist;
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
}

/// Clamp a raw interval into [0,1]; a crossed pair collapses to its midpoint.
IntervalResult finish(double lo, double hi, IntervalMethod method, double alpha,
                      double crit, std::optional<Ci4Case> tag = std::nullopt) {
  IntervalResult r;
  if (lo > hi) lo = hi = 0.5 * (lo + hi);
  r.lower = clamp_unit(lo);
  r.upper = clamp_unit(hi);
  r.method = method;
  r.alpha = alpha;
  r.critical_value = crit;
  r.case_tag = tag;
  return r;
}

/// IM interval around an ordered pair of estimates; falls back to the
/// two-sided quantile when both variances degenerate to zero.
IntervalResult im_interval(double l, double u, double sl, double su, std::size_t n,
                           double alpha, IntervalMethod method,
                           std::optional<Ci4Case> tag = std::nullopt) {
  const double root_n = std::sqrt(static_cast<double>(n));
  double crit;
  if (std::max(sl, su) > 0.0) {
    crit = im_critical_value(l, u, sl, su, n, alpha);
  } else {
    crit = normal_quantile(1.0 - alpha / 2.0);
  }
  return finish(l - crit * sl / root_n, u + crit * su / root_n, method, alpha, crit, tag);
}

}  // namespace

double normal_cdf(double z) { return boost::math::cdf(std_normal(), z); }

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw ConfigError("normal_quantile: argument must lie in (0,1)");
  return boost::math::quantile(std_normal(), u);
}

std::string_view interval_method_tag(IntervalMethod m) {
  switch (m) {
    case IntervalMethod::Ci0: return "CI0";
    case IntervalMethod::Ci1: return "CI1";
    case IntervalMethod::Ci2: return "CI2";
    case IntervalMethod::Ci3: return "CI3";
    case IntervalMethod::Ci4: return "CI4";
    case IntervalMethod::OneSidedLower: return "ONE_SIDED_LOWER";
    case IntervalMethod::OneSidedUpper: return "ONE_SIDED_UPPER";
  }
  throw ConfigError("invalid interval method");
}

std::string_view ci4_case_tag(Ci4Case c) {
  switch (c) {
    case Ci4Case::BothInterior: return "both_interior";
    case Ci4Case::LPosUFree: return "l_pos_u_free";
    case Ci4Case::LFreeUInterior: return "l_free_u_interior";
    case Ci4Case::Vacuous: return "vacuous";
  }
  throw ConfigError("invalid CI4 case");
}

double im_critical_value(double l_hat, double u_hat, double sigma_l, double sigma_u,
                         std::size_t n, double alpha) {
  require_alpha(alpha);
  if (sigma_l < 0.0 || sigma_u < 0.0) throw ConfigError("im_critical_value: negative sigma");
  const double sigma_max = std::max(sigma_l, sigma_u);
  if (sigma_max == 0.0) throw ConfigError("im_critical_value: both sigmas are zero");
  const double gap = std::max(0.0, u_hat - l_hat);
  const double shift = std::sqrt(static_cast<double>(n)) * gap / sigma_max;
  const double target = 1.0 - alpha;

  // The solution is bracketed by the one- and two-sided quantiles; the
  // left side is monotone increasing in C, so bisection is safe even
  // where Phi saturates.
  double lo = normal_quantile(1.0 - alpha) - 1e-8;
  double hi = normal_quantile(1.0 - alpha / 2.0) + 1e-8;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    const double val = normal_cdf(mid + shift) - normal_cdf(-mid);
    if (val < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

IntervalResult ci1(double mu11_hat, double mu10_hat, double p_hat, std::size_t n, double alpha) {
  require_alpha(alpha);
  const PtBounds pt = pt_bounds(p_hat, mu11_hat, mu10_hat, n);
  const double z = normal_quantile(1.0 - alpha / 2.0);
  const double half = z * pt.sigma_l0 / std::sqrt(static_cast<double>(n));
  return finish(pt.l0 - half, pt.l0 + half, IntervalMethod::Ci1, alpha, z);
}

IntervalResult ci2(const BoundEstimate& lower, const BoundEstimate& upper, double alpha) {
  require_alpha(alpha);
  const double z = normal_quantile(1.0 - alpha / 2.0);
  const double root_n = std::sqrt(static_cast<double>(lower.n));
  return finish(lower.value - z * lower.sigma_hat / root_n,
                upper.value + z * upper.sigma_hat / root_n, IntervalMethod::Ci2, alpha, z);
}

IntervalResult ci3(const BoundEstimate& lower, const BoundEstimate& upper, double alpha) {
  require_alpha(alpha);
  return im_interval(lower.value, upper.value, lower.sigma_hat, upper.sigma_hat, lower.n,
                     alpha, IntervalMethod::Ci3);
}

IntervalResult ci0(const PtBounds& pt, std::size_t n, double alpha) {
  require_alpha(alpha);
  return im_interval(pt.l0, pt.u0, pt.sigma_l0, pt.sigma_u0, n, alpha, IntervalMethod::Ci0);
}

IntervalResult ci4(const PtBounds& pt, std::size_t n, double alpha) {
  require_alpha(alpha);
  const double root_n = std::sqrt(static_cast<double>(n));
  const bool l_interior = pt.l0 > 0.0;
  const bool u_interior = pt.u0 < 1.0;
  if (l_interior && u_interior) {
    return im_interval(pt.l0, pt.u0, pt.sigma_l0, pt.sigma_u0, n, alpha, IntervalMethod::Ci4,
                       Ci4Case::BothInterior);
  }
  if (l_interior) {
    const double q = normal_quantile(1.0 - alpha);
    return finish(pt.l0 - q * pt.sigma_l0 / root_n, 1.0, IntervalMethod::Ci4, alpha, q,
                  Ci4Case::LPosUFree);
  }
  if (u_interior) {
    const double q = normal_quantile(1.0 - alpha);
    return finish(0.0, pt.u0 + q * pt.sigma_u0 / root_n, IntervalMethod::Ci4, alpha, q,
                  Ci4Case::LFreeUInterior);
  }
  return finish(0.0, 1.0, IntervalMethod::Ci4, alpha, 0.0, Ci4Case::Vacuous);
}

IntervalResult one_sided(const BoundEstimate& bound, BoundSide side, double alpha) {
  require_alpha(alpha);
  const double q = normal_quantile(1.0 - alpha);
  const double root_n = std::sqrt(static_cast<double>(bound.n));
  if (side == BoundSide::Lower) {
    return finish(bound.value - q * bound.sigma_hat / root_n, 1.0,
                  IntervalMethod::OneSidedLower, alpha, q);
  }
  return finish(0.0, bound.value + q * bound.sigma_hat / root_n,
                IntervalMethod::OneSidedUpper, alpha, q);
}

}  // namespace pnb
