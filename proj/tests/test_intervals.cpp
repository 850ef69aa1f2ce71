#include <doctest.h>

#include <cmath>

#include "pnbounds/intervals.hpp"
#include "pnbounds/rng.hpp"
#include "test_oracles.hpp"

using namespace pnb;

namespace {

BoundEstimate make_estimate(double value, double sigma, std::size_t n, BoundSide side) {
  BoundEstimate b;
  b.value = value;
  b.sigma_hat = sigma;
  b.n = n;
  b.which = side;
  b.k_folds = 5;
  return b;
}

void check_unit_interval(const IntervalResult& r) {
  CHECK(r.lower >= 0.0);
  CHECK(r.upper <= 1.0);
  CHECK(r.lower <= r.upper);
}

}  // namespace

TEST_CASE("normal cdf matches high-precision references") {
  CHECK(normal_cdf(0.0) == 0.5);
  // reference values carry 18 significant digits
  CHECK(std::abs(normal_cdf(0.5) - 0.691462461274013104) < 1e-10);
  CHECK(std::abs(normal_cdf(1.0) - 0.841344746068542949) < 1e-10);
  CHECK(std::abs(normal_cdf(2.0) - 0.977249868051820793) < 1e-10);
  CHECK(std::abs(normal_cdf(3.0) - 0.998650101968369905) < 1e-10);
  CHECK(std::abs(normal_cdf(5.0) - 0.999999713348428121) < 1e-10);
  CHECK(std::abs(normal_cdf(8.0) - 0.999999999999999378) < 1e-10);
  CHECK(std::abs(normal_cdf(-1.0) - 0.158655253931457051) < 1e-10);
  CHECK(std::abs(normal_cdf(-3.0) - 0.00134989803163009453) < 1e-10);
  CHECK(std::abs(normal_cdf(-5.0) - 2.86651571879193912e-7) < 1e-12);
  CHECK(std::abs(normal_cdf(-8.0) - 6.22096057427178412e-16) < 1e-18);
}

TEST_CASE("normal quantile matches references and inverts the cdf") {
  CHECK(std::abs(normal_quantile(0.975) - 1.9599639845) < 1e-9);
  CHECK(std::abs(normal_quantile(0.95) - 1.64485362695147271) < 1e-9);
  CHECK(std::abs(normal_quantile(0.995) - 2.57582930354890076) < 1e-9);
  CHECK(std::abs(normal_quantile(0.5)) < 1e-12);
  for (double u = 0.0005; u < 1.0; u += 0.0100471) {
    CHECK(std::abs(normal_cdf(normal_quantile(u)) - u) < 1e-9);
  }
  CHECK_THROWS_AS(normal_quantile(0.0), ConfigError);
  CHECK_THROWS_AS(normal_quantile(1.0), ConfigError);
  CHECK_THROWS_AS(normal_quantile(-0.2), ConfigError);
}

TEST_CASE("critical value degenerates to the familiar quantiles") {
  // zero gap: two-sided quantile
  CHECK(std::abs(im_critical_value(0.4, 0.4, 1.0, 1.0, 100, 0.05) -
                 normal_quantile(0.975)) < 1e-9);
  // saturated gap: one-sided quantile
  const double c = im_critical_value(0.0, 0.5, 0.5, 0.5, 10000, 0.05);  // shift = 100
  CHECK(std::abs(c - normal_quantile(0.95)) < 1e-8);
  // negative estimated gap floors at zero
  CHECK(std::abs(im_critical_value(0.6, 0.4, 1.0, 1.0, 100, 0.05) -
                 normal_quantile(0.975)) < 1e-9);
  CHECK_THROWS_AS(im_critical_value(0.1, 0.2, 0.0, 0.0, 100, 0.05), ConfigError);
}

TEST_CASE("critical value solves its defining equation") {
  // frozen from an independent 1e-12 bisection oracle
  CHECK(std::abs(im_critical_value(0.0, 0.1, 0.5, 0.5, 100, 0.05) - 1.6461455482) < 1e-8);

  Rng rng(2024);
  for (int t = 0; t < 500; ++t) {
    const double alpha = 0.01 + 0.2 * rng.uniform01();
    const double l = rng.uniform(-0.5, 0.8);
    const double u = l + rng.uniform(0.0, 1.0);
    const double sl = rng.uniform(0.01, 3.0);
    const double su = rng.uniform(0.01, 3.0);
    const std::size_t n = 20 + rng.below(5000);
    const double c = im_critical_value(l, u, sl, su, n, alpha);
    const double lo = normal_quantile(1.0 - alpha);
    const double hi = normal_quantile(1.0 - alpha / 2.0);
    CHECK(c >= lo - 1e-7);
    CHECK(c <= hi + 1e-7);
    const double shift = std::sqrt(static_cast<double>(n)) * (u - l) / std::max(sl, su);
    CHECK(std::abs(normal_cdf(c + shift) - normal_cdf(-c) - (1.0 - alpha)) < 1e-8);
    CHECK(std::abs(c - testing::ref_critical_value(shift, alpha, lo, hi)) < 1e-7);
  }
}

TEST_CASE("critical value is nonincreasing in the standardized gap") {
  double prev = im_critical_value(0.0, 0.0, 1.0, 1.0, 400, 0.05);
  for (double gap = 0.01; gap < 0.5; gap += 0.01) {
    const double c = im_critical_value(0.0, gap, 1.0, 1.0, 400, 0.05);
    CHECK(c <= prev + 1e-9);
    prev = c;
  }
}

TEST_CASE("ci1 reduces to a point when the variance degenerates") {
  // mu10 = 0 puts the variance formulas on their boundary
  const IntervalResult r = ci1(0.5, 0.0, 0.5, 100, 0.05);
  CHECK(r.lower == r.upper);
  CHECK(r.lower == 1.0);  // l0 = 1 clamped point
  CHECK(r.method == IntervalMethod::Ci1);
}

TEST_CASE("ci2 with zero variances is the clamped estimate pair") {
  const auto lo = make_estimate(-0.25, 0.0, 100, BoundSide::Lower);
  const auto up = make_estimate(1.4, 0.0, 100, BoundSide::Upper);
  const IntervalResult r = ci2(lo, up, 0.05);
  CHECK(r.lower == 0.0);
  CHECK(r.upper == 1.0);
}

TEST_CASE("ci3 is contained in ci2 and coincides at zero gap") {
  Rng rng(99);
  for (int t = 0; t < 300; ++t) {
    const double l = rng.uniform(-0.3, 0.9);
    const double u = l + rng.uniform(0.0, 0.8);
    const auto lo = make_estimate(l, rng.uniform(0.05, 2.0), 250, BoundSide::Lower);
    const auto up = make_estimate(u, rng.uniform(0.05, 2.0), 250, BoundSide::Upper);
    const IntervalResult two = ci2(lo, up, 0.05);
    const IntervalResult three = ci3(lo, up, 0.05);
    check_unit_interval(two);
    check_unit_interval(three);
    CHECK(three.lower >= two.lower - 1e-12);
    CHECK(three.upper <= two.upper + 1e-12);
    CHECK(three.critical_value >= normal_quantile(0.95) - 1e-7);
    CHECK(three.critical_value <= normal_quantile(0.975) + 1e-7);
  }
  const auto lo = make_estimate(0.4, 1.0, 250, BoundSide::Lower);
  const auto up = make_estimate(0.4, 1.0, 250, BoundSide::Upper);
  const IntervalResult two = ci2(lo, up, 0.05);
  const IntervalResult three = ci3(lo, up, 0.05);
  CHECK(std::abs(three.lower - two.lower) < 1e-8);
  CHECK(std::abs(three.upper - two.upper) < 1e-8);
}

namespace {

PtBounds make_pt(double l0, double u0, double sl, double su) {
  PtBounds pt;
  pt.l0 = l0;
  pt.u0 = u0;
  pt.l_pt = std::max(0.0, l0);
  pt.u_pt = std::min(1.0, u0);
  pt.sigma_l0 = sl;
  pt.sigma_u0 = su;
  return pt;
}

}  // namespace

TEST_CASE("ci4 selects its case from the estimated bounds") {
  const std::size_t n = 400;
  SUBCASE("both interior: adaptive interval") {
    const IntervalResult r = ci4(make_pt(0.2, 0.8, 1.0, 1.0), n, 0.05);
    CHECK(r.case_tag == Ci4Case::BothInterior);
    CHECK(r.critical_value > normal_quantile(0.95) - 1e-9);
    CHECK(r.lower < 0.2);
    CHECK(r.upper > 0.8);
    // identical to the smooth-bound interval in this case
    const IntervalResult r0 = ci0(make_pt(0.2, 0.8, 1.0, 1.0), n, 0.05);
    CHECK(r.lower == r0.lower);
    CHECK(r.upper == r0.upper);
  }
  SUBCASE("lower interior, upper free") {
    const IntervalResult r = ci4(make_pt(0.3, 1.2, 1.0, 1.0), n, 0.05);
    CHECK(r.case_tag == Ci4Case::LPosUFree);
    CHECK(r.upper == 1.0);
    CHECK(std::abs(r.critical_value - normal_quantile(0.95)) < 1e-9);
    CHECK(std::abs(r.lower - (0.3 - normal_quantile(0.95) / 20.0)) < 1e-12);
    // contained in the always-adaptive smooth interval
    const IntervalResult r0 = ci0(make_pt(0.3, 1.2, 1.0, 1.0), n, 0.05);
    CHECK(r.lower >= r0.lower - 1e-12);
    CHECK(r.upper <= r0.upper + 1e-12);
  }
  SUBCASE("lower free, upper interior") {
    const IntervalResult r = ci4(make_pt(-0.1, 0.7, 1.0, 1.0), n, 0.05);
    CHECK(r.case_tag == Ci4Case::LFreeUInterior);
    CHECK(r.lower == 0.0);
    CHECK(std::abs(r.upper - (0.7 + normal_quantile(0.95) / 20.0)) < 1e-12);
    const IntervalResult r0 = ci0(make_pt(-0.1, 0.7, 1.0, 1.0), n, 0.05);
    CHECK(r.lower >= r0.lower - 1e-12);
    CHECK(r.upper <= r0.upper + 1e-12);
  }
  SUBCASE("vacuous") {
    const IntervalResult r = ci4(make_pt(-0.2, 1.1, 1.0, 1.0), n, 0.05);
    CHECK(r.case_tag == Ci4Case::Vacuous);
    CHECK(r.lower == 0.0);
    CHECK(r.upper == 1.0);
  }
}

TEST_CASE("one-sided intervals") {
  const auto lo = make_estimate(0.55, 0.0, 100, BoundSide::Lower);
  const IntervalResult r = one_sided(lo, BoundSide::Lower, 0.05);
  CHECK(r.lower == 0.55);
  CHECK(r.upper == 1.0);
  CHECK(r.method == IntervalMethod::OneSidedLower);

  // reject PN <= 0.5 exactly when 0.5 falls below the interval
  const auto est = make_estimate(0.6, 0.8, 400, BoundSide::Lower);
  const IntervalResult s = one_sided(est, BoundSide::Lower, 0.05);
  const double expected_lower = 0.6 - normal_quantile(0.95) * 0.8 / 20.0;
  CHECK(std::abs(s.lower - expected_lower) < 1e-12);
  CHECK((0.5 < s.lower) == (0.5 < expected_lower));

  const auto up = make_estimate(0.8, 1.0, 400, BoundSide::Upper);
  const IntervalResult t = one_sided(up, BoundSide::Upper, 0.05);
  CHECK(t.lower == 0.0);
  CHECK(std::abs(t.upper - (0.8 + normal_quantile(0.95) / 20.0)) < 1e-12);
}

TEST_CASE("all intervals land inside the unit interval") {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const double l0 = rng.uniform(-1.5, 1.5);
    const double u0 = l0 + rng.uniform(0.0, 1.5);
    const PtBounds pt = make_pt(l0, u0, rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0));
    const std::size_t n = 30 + rng.below(3000);
    check_unit_interval(ci4(pt, n, 0.05));
    if (pt.sigma_l0 > 0 || pt.sigma_u0 > 0) check_unit_interval(ci0(pt, n, 0.05));
    const auto lo = make_estimate(l0, rng.uniform(0.0, 3.0), n, BoundSide::Lower);
    const auto up = make_estimate(u0, rng.uniform(0.0, 3.0), n, BoundSide::Upper);
    check_unit_interval(ci2(lo, up, 0.05));
    check_unit_interval(one_sided(lo, BoundSide::Lower, 0.05));
    check_unit_interval(one_sided(up, BoundSide::Upper, 0.05));
  }
}
