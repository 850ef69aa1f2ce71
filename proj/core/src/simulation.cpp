#include "pnbounds/simulation.hpp"

#include <atomic>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "pnbounds/intervals.hpp"
#include "pnbounds/nuisance.hpp"

namespace pnb {

void SimConfig::validate() const {
  if (n < 10) throw ConfigError("simulation: n must be at least 10");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("simulation: lambda must lie in [0,1]");
  if (reps < 1) throw ConfigError("simulation: reps must be at least 1");
  if (k_folds < 2) throw ConfigError("simulation: k_folds must be at least 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("simulation: alpha must lie in (0,1)");
  if (threads < 1) throw ConfigError("simulation: threads must be at least 1");
}

namespace {

double expit(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

double dgp_pi(int x, double v1, double v2) {
  return expit(x - v1 + 2.0 * v2 + 5.0 * x * v1 - 5.0 * x * v2);
}

JointCells dgp_joint_cells(double pi1, double pi0, double lambda) {
  JointCells c;
  c.p10 = lambda * std::min(pi1, 1.0 - pi0) + (1.0 - lambda) * std::max(0.0, pi1 - pi0);
  c.p11 = pi1 - c.p10;
  c.p01 = pi0 - pi1 + c.p10;
  c.p00 = 1.0 - pi0 - c.p10;
  constexpr double kTol = -1e-12;
  if (c.p10 < kTol || c.p11 < kTol || c.p01 < kTol || c.p00 < kTol) {
    throw std::logic_error("dgp_joint_cells: negative cell probability");
  }
  c.p10 = std::max(0.0, c.p10);
  c.p11 = std::max(0.0, c.p11);
  c.p01 = std::max(0.0, c.p01);
  c.p00 = std::max(0.0, c.p00);
  return c;
}

Dataset dgp_sample(std::size_t n, double lambda, Rng& rng) {
  std::vector<Record> records;
  records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v1 = rng.uniform(-1.0, 1.0);
    const double v2 = rng.uniform(-1.0, 1.0);
    const JointCells c = dgp_joint_cells(dgp_pi(1, v1, v2), dgp_pi(0, v1, v2), lambda);
    const double u = rng.uniform01();
    int y1;
    int y0;
    if (u < c.p10) {
      y1 = 1;
      y0 = 0;
    } else if (u < c.p10 + c.p11) {
      y1 = 1;
      y0 = 1;
    } else if (u < c.p10 + c.p11 + c.p01) {
      y1 = 0;
      y0 = 1;
    } else {
      y1 = 0;
      y0 = 0;
    }
    const int x = rng.bernoulli(0.5) ? 1 : 0;
    records.push_back({x, x ? y1 : y0, {v1, v2}});
  }
  return Dataset(std::move(records), {"v1", "v2"});
}

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on the
// Legendre recurrence.
struct GaussLegendre {
  std::vector<double> nodes, weights;
};

GaussLegendre gauss_legendre(int m) {
  GaussLegendre gl;
  gl.nodes.resize(static_cast<std::size_t>(m));
  gl.weights.resize(static_cast<std::size_t>(m));
  const int half = (m + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= m; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      pp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    gl.nodes[static_cast<std::size_t>(i)] = -x;
    gl.weights[static_cast<std::size_t>(i)] = w;
    gl.nodes[static_cast<std::size_t>(m - 1 - i)] = x;
    gl.weights[static_cast<std::size_t>(m - 1 - i)] = w;
  }
  return gl;
}

}  // namespace

DgpMoments dgp_moments_quadrature(int nodes_per_axis) {
  if (nodes_per_axis < 2) throw ConfigError("quadrature needs at least 2 nodes per axis");
  const GaussLegendre gl = gauss_legendre(nodes_per_axis);
  DgpMoments m;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
      const double w = gl.weights[i] * gl.weights[j] * 0.25;  // uniform density 1/4
      const double p1 = dgp_pi(1, gl.nodes[i], gl.nodes[j]);
      const double p0 = dgp_pi(0, gl.nodes[i], gl.nodes[j]);
      m.mu11 += w * p1;
      m.mu10 += w * p0;
      m.delta_l += w * std::max(0.0, p1 - p0);
      m.delta_u += w * std::max(0.0, p1 + p0 - 1.0);
    }
  }
  return m;
}

DgpMoments dgp_moments_monte_carlo(std::size_t draws, std::uint64_t seed) {
  if (draws == 0) throw ConfigError("monte carlo oracle needs at least one draw");
  Rng rng(seed);
  DgpMoments m;
  for (std::size_t i = 0; i < draws; ++i) {
    const double v1 = rng.uniform(-1.0, 1.0);
    const double v2 = rng.uniform(-1.0, 1.0);
    const double p1 = dgp_pi(1, v1, v2);
    const double p0 = dgp_pi(0, v1, v2);
    m.mu11 += p1;
    m.mu10 += p0;
    m.delta_l += std::max(0.0, p1 - p0);
    m.delta_u += std::max(0.0, p1 + p0 - 1.0);
  }
  const double dn = static_cast<double>(draws);
  m.mu11 /= dn;
  m.mu10 /= dn;
  m.delta_l /= dn;
  m.delta_u /= dn;
  return m;
}

namespace {

OracleTruth truth_from_moments(const DgpMoments& m, double lambda) {
  OracleTruth t;
  t.l_true = m.delta_l / m.mu11;
  t.u_true = 1.0 - m.delta_u / m.mu11;
  t.pn_true = lambda * t.u_true + (1.0 - lambda) * t.l_true;
  return t;
}

}  // namespace

OracleTruth oracle_truth(double lambda) {
  static const DgpMoments m = dgp_moments_quadrature();
  return truth_from_moments(m, lambda);
}

OracleTruth oracle_truth_monte_carlo(double lambda, std::size_t draws, std::uint64_t seed) {
  return truth_from_moments(dgp_moments_monte_carlo(draws, seed), lambda);
}

OracleTruth verified_oracle_truth(double lambda, std::size_t mc_draws, std::uint64_t mc_seed,
                                  double tolerance) {
  const OracleTruth quad = oracle_truth(lambda);
  const OracleTruth mc = oracle_truth_monte_carlo(lambda, mc_draws, mc_seed);
  if (std::abs(quad.l_true - mc.l_true) > tolerance ||
      std::abs(quad.u_true - mc.u_true) > tolerance) {
    throw EstimationError("oracle truth: quadrature and Monte Carlo disagree beyond tolerance");
  }
  return quad;
}

namespace {

constexpr int kMethods = 4;  // CI1..CI4

struct RepOutcome {
  bool failed = false;
  bool inverted = false;
  double width[kMethods] = {0, 0, 0, 0};
  bool covered[kMethods] = {false, false, false, false};
};

constexpr std::uint64_t kFoldSeedSalt = 0x666f6c64;  // distinct fold-split stream

RepOutcome run_rep(const SimConfig& cfg, int rep, double pn_true) {
  RepOutcome out;
  Rng rng(cfg.seed + static_cast<std::uint64_t>(rep));
  const Dataset data = dgp_sample(cfg.n, cfg.lambda, rng);
  try {
    const Marginals m = fit_marginals(data);
    const PtBounds pt = pt_bounds(m.p_hat, m.mu11_hat, m.mu10_hat, data.size());
    const IntervalResult i1 = ci1(m.mu11_hat, m.mu10_hat, m.p_hat, data.size(), cfg.alpha);
    const IntervalResult i4 = ci4(pt, data.size(), cfg.alpha);
    const CrossfitBounds cf = crossfit_bounds(
        data, cfg.k_folds, cfg.learner,
        derive_seed(cfg.seed + static_cast<std::uint64_t>(rep), kFoldSeedSalt));
    out.inverted = cf.inverted;
    const auto [lo, up] = cf.for_intervals();
    const IntervalResult i2 = ci2(lo, up, cfg.alpha);
    const IntervalResult i3 = ci3(lo, up, cfg.alpha);
    const IntervalResult all[kMethods] = {i1, i2, i3, i4};
    for (int m_i = 0; m_i < kMethods; ++m_i) {
      out.width[m_i] = all[m_i].upper - all[m_i].lower;
      out.covered[m_i] = all[m_i].lower <= pn_true && pn_true <= all[m_i].upper;
    }
  } catch (const EstimationError&) {
    out.failed = true;
  }
  return out;
}

}  // namespace

StudyReport run_study(const SimConfig& cfg) {
  cfg.validate();
  const OracleTruth truth = verified_oracle_truth(cfg.lambda);

  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(cfg.reps));
  const auto worker_body = [&](std::atomic<int>& next) {
    for (int r = next.fetch_add(1); r < cfg.reps; r = next.fetch_add(1)) {
      outcomes[static_cast<std::size_t>(r)] = run_rep(cfg, r, truth.pn_true);
    }
  };
  // Replications own private seed streams, so any worker count produces
  // the same outcomes; the reduction below runs in replication order.
  std::atomic<int> next{0};
  if (cfg.threads <= 1) {
    worker_body(next);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(cfg.threads));
    for (int t = 0; t < cfg.threads; ++t) pool.emplace_back([&] { worker_body(next); });
    for (auto& th : pool) th.join();
  }

  StudyReport report;
  report.truth = truth;
  report.n = cfg.n;
  report.lambda = cfg.lambda;
  report.reps_requested = cfg.reps;

  double width_sum[kMethods] = {0, 0, 0, 0};
  int cover_sum[kMethods] = {0, 0, 0, 0};
  int used = 0;
  for (const RepOutcome& o : outcomes) {
    if (o.failed) {
      ++report.reps_failed;
      continue;
    }
    if (o.inverted) ++report.inverted_bounds;
    ++used;
    for (int m_i = 0; m_i < kMethods; ++m_i) {
      width_sum[m_i] += o.width[m_i];
      cover_sum[m_i] += o.covered[m_i] ? 1 : 0;
    }
  }
  if (report.reps_failed * 100 >= cfg.reps) {
    throw EstimationError("study aborted: at least 1% of replications failed (" +
                          std::to_string(report.reps_failed) + " of " +
                          std::to_string(cfg.reps) + ")");
  }
  static const char* kNames[kMethods] = {"CI1", "CI2", "CI3", "CI4"};
  for (int m_i = 0; m_i < kMethods; ++m_i) {
    StudyRow row;
    row.method = kNames[m_i];
    row.average_width = used > 0 ? width_sum[m_i] / used : 0.0;
    row.coverage_rate = used > 0 ? static_cast<double>(cover_sum[m_i]) / used : 0.0;
    row.reps = used;
    row.n = cfg.n;
    row.lambda = cfg.lambda;
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string study_csv(const std::vector<StudyReport>& reports) {
  std::ostringstream out;
  out << "lambda,n,reps,ci1_aw,ci1_cr,ci2_aw,ci2_cr,ci3_aw,ci3_cr,ci4_aw,ci4_cr\n";
  out.precision(6);
  out << std::fixed;
  for (const StudyReport& r : reports) {
    out << r.lambda << ',' << r.n << ',' << (r.rows.empty() ? 0 : r.rows.front().reps);
    for (const StudyRow& row : r.rows) {
      out << ',' << row.average_width << ',' << row.coverage_rate;
    }
    out << '\n';
  }
  return out.str();
}

std::string study_json(const std::vector<StudyReport>& reports) {
  nlohmann::json cells = nlohmann::json::array();
  for (const StudyReport& r : reports) {
    nlohmann::json cell;
    cell["lambda"] = r.lambda;
    cell["n"] = r.n;
    cell["reps_requested"] = r.reps_requested;
    cell["reps_failed"] = r.reps_failed;
    cell["inverted_bounds"] = r.inverted_bounds;
    cell["truth"] = {{"l_true", r.truth.l_true},
                     {"u_true", r.truth.u_true},
                     {"pn_true", r.truth.pn_true}};
    nlohmann::json methods = nlohmann::json::array();
    for (const StudyRow& row : r.rows) {
      methods.push_back({{"method", row.method},
                         {"average_width", row.average_width},
                         {"coverage_rate", row.coverage_rate},
                         {"reps", row.reps},
                         {"n", row.n},
                         {"lambda", row.lambda}});
    }
    cell["methods"] = std::move(methods);
    cells.push_back(std::move(cell));
  }
  nlohmann::json j;
  j["schema_version"] = 1;
  j["cells"] = std::move(cells);
  return j.dump(2);
}

}  // namespace pnb
