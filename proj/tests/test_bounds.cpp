#include <doctest.h>

#include <cmath>
#include <numeric>

#include "pnbounds/bounds.hpp"
#include "pnbounds/simulation.hpp"
#include "test_oracles.hpp"

using namespace pnb;

namespace {
const char* kDataDir = PNB_DATA_DIR;

NuisanceFit binary_example_fit() {
  NuisanceFit fit;
  fit.p_hat = 0.5;
  fit.mu11_hat = 0.25;  // mean of pi(1,V) over the two equally likely strata
  fit.model = std::make_shared<testing::StubModel>(testing::binary_example_pi);
  fit.delta_l_hat = 0.15;
  fit.delta_u_hat = 0.0;
  return fit;
}

}  // namespace

TEST_CASE("pt_bounds on the binary-example marginals") {
  const PtBounds b = pt_bounds(0.5, 0.25, 0.45, 100);
  CHECK(std::abs(b.l0 - (-0.8)) < 1e-12);
  CHECK(std::abs(b.u0 - 2.2) < 1e-12);
  CHECK(b.l_pt == 0.0);
  CHECK(b.u_pt == 1.0);
  CHECK(b.sigma_l0 > 0.0);
  CHECK(b.sigma_u0 > b.sigma_l0);  // (1-mu10)^2 > mu10^2 here
  CHECK_FALSE(b.degenerate_variance);
}

TEST_CASE("pt_bounds licorice values") {
  const Dataset d = load_csv(std::string(kDataDir) + "/licorice_pain30min.csv");
  const Marginals m = fit_marginals(d);
  const PtBounds b = pt_bounds(m.p_hat, m.mu11_hat, m.mu10_hat, d.size());
  CHECK(std::abs(b.l_pt - 0.481) < 0.001);
  CHECK(b.u_pt == 1.0);
}

TEST_CASE("pt_bounds edge cases") {
  const PtBounds zero_effect = pt_bounds(0.5, 0.3, 0.3, 50);
  CHECK(zero_effect.l0 == 0.0);
  CHECK(zero_effect.l_pt == 0.0);

  CHECK_THROWS_AS(pt_bounds(0.5, 0.0, 0.3, 50), EstimationError);
  CHECK_THROWS_AS(pt_bounds(0.0, 0.3, 0.3, 50), EstimationError);

  const PtBounds degenerate = pt_bounds(0.5, 0.3, 0.0, 50);
  CHECK(degenerate.degenerate_variance);
  CHECK(degenerate.sigma_l0 == 0.0);
  CHECK(degenerate.sigma_u0 == 0.0);
}

TEST_CASE("influence functions vanish or collapse in the trivial regimes") {
  // pi(1,v) <= pi(0,v) everywhere and a zero lower delta force psi_L = 0
  NuisanceFit fit;
  fit.p_hat = 0.4;
  fit.mu11_hat = 0.3;
  fit.model = std::make_shared<testing::StubModel>(
      [](int x, std::span<const double>) { return x ? 0.2 : 0.6; });
  fit.delta_l_hat = 0.0;
  fit.delta_u_hat = 0.0;
  for (int x : {0, 1}) {
    for (int y : {0, 1}) {
      const Record o{x, y, {0.5}};
      CHECK(psi_lower(o, fit) == 0.0);
      CHECK(psi_upper(o, fit) == 1.0);  // d_U = 0 too: 0.2 < 1 - 0.6 fails
    }
  }
}

TEST_CASE("influence function value on the binary example") {
  const NuisanceFit fit = binary_example_fit();
  const Record o{1, 1, {1.0}};
  // (1/0.25)(0.3 + 1.2) - (0.15/0.0625)(1.2 + 0.4 - 0.25) = 6 - 3.24
  CHECK(std::abs(psi_lower(o, fit) - 2.76) < 1e-12);
  // d_U = 0 and delta_U = 0: the upper influence is the constant 1
  CHECK(psi_upper(o, fit) == 1.0);
}

TEST_CASE("exact discrete enumeration of the binary example") {
  const std::vector<DiscreteStratum> strata{{0.5, 0.4, 0.1}, {0.5, 0.1, 0.8}};
  const ExactBounds b = exact_bounds_discrete(strata);
  CHECK(std::abs(b.lower - 0.6) < 1e-12);
  CHECK(std::abs(b.upper - 1.0) < 1e-12);
  CHECK(std::abs(b.mu11 - 0.25) < 1e-15);

  CHECK_THROWS_AS(exact_bounds_discrete(std::vector<DiscreteStratum>{}), ConfigError);
  CHECK_THROWS_AS(exact_bounds_discrete(std::vector<DiscreteStratum>{{0.7, 0.5, 0.5}}),
                  ConfigError);
}

TEST_CASE("crossfit is deterministic in the seed") {
  const Dataset d = load_csv(std::string(kDataDir) + "/licorice_pain30min.csv");
  const CrossfitBounds a = crossfit_bounds(d, 4, LearnerKind::LocalAverage, 7);
  const CrossfitBounds b = crossfit_bounds(d, 4, LearnerKind::LocalAverage, 7);
  CHECK(a.lower.value == b.lower.value);
  CHECK(a.upper.value == b.upper.value);
  CHECK(a.lower.sigma_hat == b.lower.sigma_hat);
  CHECK(a.lower.if_values == b.lower.if_values);

  const CrossfitBounds c = crossfit_bounds(d, 4, LearnerKind::LocalAverage, 8);
  CHECK(c.lower.value != a.lower.value);
}

TEST_CASE("per-fold influence means reproduce the fold estimates exactly") {
  const Dataset d = load_csv(std::string(kDataDir) + "/licorice_pain90min.csv");
  const std::uint64_t seed = 5;
  const CrossfitBounds cf = crossfit_bounds(d, 4, LearnerKind::ArmMean, seed);
  const FoldPlan plan = make_stratified_folds(d, 4, seed);
  const auto folds = plan.folds();
  REQUIRE(cf.lower.fold_estimates.size() == folds.size());
  double pooled = 0.0;
  for (std::size_t k = 0; k < folds.size(); ++k) {
    double mean = 0.0;
    for (std::size_t i : folds[k]) mean += cf.lower.if_values[i] + cf.lower.value;
    mean /= static_cast<double>(folds[k].size());
    CHECK(std::abs(mean - cf.lower.fold_estimates[k]) < 1e-12);
    pooled += cf.lower.fold_estimates[k];
  }
  CHECK(std::abs(pooled / static_cast<double>(folds.size()) - cf.lower.value) < 1e-12);
}

TEST_CASE("with no covariates the crossfit collapses to the smooth bound") {
  Rng rng(31);
  std::vector<Record> recs;
  for (int i = 0; i < 4000; ++i) {
    const int x = rng.bernoulli(0.5) ? 1 : 0;
    const int y = rng.bernoulli(x ? 0.55 : 0.35) ? 1 : 0;
    recs.push_back({x, y, {}});
  }
  const Dataset d(std::move(recs));
  const Marginals m = fit_marginals(d);
  const PtBounds pt = pt_bounds(m.p_hat, m.mu11_hat, m.mu10_hat, d.size());
  const CrossfitBounds cf = crossfit_bounds(d, 5, LearnerKind::ArmMean, 17);
  const double se = cf.lower.sigma_hat / std::sqrt(static_cast<double>(d.size()));
  CHECK(std::abs(cf.lower.value - pt.l0) < 3.0 * se);
}

TEST_CASE("crossfit recovers the enumerated bounds on the binary example") {
  Rng rng(2718);
  const Dataset d = testing::binary_example_sample(50000, rng);
  const CrossfitBounds cf = crossfit_bounds(d, 5, LearnerKind::LogisticInteraction, 99);
  CHECK(std::abs(cf.lower.value - 0.6) < 0.02);
  CHECK(std::abs(cf.upper.value - 1.0) < 0.02);
}

TEST_CASE("informative covariates tighten the estimated bounds") {
  Rng rng(555);
  const Dataset d = dgp_sample(20000, 0.0, rng);
  const Marginals m = fit_marginals(d);
  const PtBounds pt = pt_bounds(m.p_hat, m.mu11_hat, m.mu10_hat, d.size());
  const CrossfitBounds cf = crossfit_bounds(d, 5, LearnerKind::LogisticInteraction, 4);
  const double n = static_cast<double>(d.size());
  CHECK(cf.lower.value >= pt.l_pt - 3.0 * cf.lower.sigma_hat / std::sqrt(n));
  CHECK(cf.upper.value <= pt.u_pt + 3.0 * cf.upper.sigma_hat / std::sqrt(n));
  // here the tightening is strict and large
  CHECK(cf.lower.value > pt.l_pt + 0.2);
  CHECK(cf.upper.value < pt.u_pt - 0.02);
}

TEST_CASE("estimator scale: sigma_hat tracks the replication spread") {
  const OracleTruth truth = oracle_truth(0.0);
  const int reps = 120;
  std::vector<double> values;
  double sigma_acc = 0.0;
  for (int r = 0; r < reps; ++r) {
    Rng rng(40000 + static_cast<std::uint64_t>(r));
    const Dataset d = dgp_sample(2000, 0.0, rng);
    const CrossfitBounds cf =
        crossfit_bounds(d, 5, LearnerKind::LogisticInteraction,
                        derive_seed(40000 + static_cast<std::uint64_t>(r), 1));
    values.push_back(cf.lower.value);
    sigma_acc += cf.lower.sigma_hat / std::sqrt(2000.0);
  }
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / reps;
  double sd = 0.0;
  for (double v : values) sd += (v - mean) * (v - mean);
  sd = std::sqrt(sd / (reps - 1));
  const double claimed = sigma_acc / reps;
  CHECK(std::abs(claimed - sd) / sd < 0.15);
  // and the replication mean sits near the population bound
  CHECK(std::abs(mean - truth.l_true) < 4.0 * sd / std::sqrt(static_cast<double>(reps)));
}

TEST_CASE("inverted estimates collapse to their midpoint for intervals") {
  CrossfitBounds cf;
  cf.lower.value = 0.62;
  cf.upper.value = 0.58;
  cf.lower.n = cf.upper.n = 100;
  cf.inverted = true;
  const auto [lo, up] = cf.for_intervals();
  CHECK(lo.value == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(up.value == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("crossfit input validation") {
  const Dataset d = parse_csv("x,y\n1,1\n0,0\n1,0\n0,1\n");
  CHECK_THROWS_AS(crossfit_bounds(d, 1, LearnerKind::ArmMean, 1), ConfigError);
  const Dataset bad = parse_csv("x,y\n1,0\n0,1\n1,0\n0,0\n");
  CHECK_THROWS_AS(crossfit_bounds(bad, 2, LearnerKind::ArmMean, 1), EstimationError);
}
