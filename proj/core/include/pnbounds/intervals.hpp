#pragma once

#include <optional>
#include <string_view>

#include "pnbounds/bounds.hpp"

namespace pnb {

/// Standard normal distribution function and its inverse.
double normal_cdf(double z);
double normal_quantile(double u);  // u in (0,1)

/// Adaptive critical value C solving
///   Phi[C + sqrt(n) * gap / max(sigma_l, sigma_u)] - Phi(-C) = 1 - alpha
/// with gap = max(0, u_hat - l_hat); a negative estimated gap is floored
/// at zero, which returns the conservative two-sided quantile. C always
/// lies between the one-sided and two-sided quantiles.
double im_critical_value(double l_hat, double u_hat, double sigma_l, double sigma_u,
                         std::size_t n, double alpha);

enum class IntervalMethod { Ci0, Ci1, Ci2, Ci3, Ci4, OneSidedLower, OneSidedUpper };
enum class Ci4Case { BothInterior, LPosUFree, LFreeUInterior, Vacuous };

std::string_view interval_method_tag(IntervalMethod m);
std::string_view ci4_case_tag(Ci4Case c);

/// A confidence interval for the attribution probability, intersected
/// with [0,1]. critical_value records the multiplier actually used
/// (0 for the vacuous case of Ci4).
struct IntervalResult {
  double lower = 0.0;
  double upper = 1.0;
  IntervalMethod method = IntervalMethod::Ci1;
  double alpha = 0.05;
  double critical_value = 0.0;
  std::optional<Ci4Case> case_tag;
};

/// Wald interval around the point estimate that is valid only under
/// outcome monotonicity (callers must flag the assumption). The point
/// estimate is the identified value l0 with its plug-in variance.
IntervalResult ci1(double mu11_hat, double mu10_hat, double p_hat, std::size_t n, double alpha);

/// Two-sided interval for the identified set [L, U].
IntervalResult ci2(const BoundEstimate& lower, const BoundEstimate& upper, double alpha);

/// Adaptive interval for the parameter itself; narrower than ci2.
IntervalResult ci3(const BoundEstimate& lower, const BoundEstimate& upper, double alpha);

/// Adaptive interval from the smooth no-covariate bounds (l0, u0).
IntervalResult ci0(const PtBounds& pt, std::size_t n, double alpha);

/// Case-selected interval from the no-covariate bounds; the case is chosen
/// by the signs of the estimated l0 and u0 - 1 and recorded in case_tag.
IntervalResult ci4(const PtBounds& pt, std::size_t n, double alpha);

/// One-sided interval from a single bound estimate.
IntervalResult one_sided(const BoundEstimate& bound, BoundSide side, double alpha);

}  // namespace pnb
