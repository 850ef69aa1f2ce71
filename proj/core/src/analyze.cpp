#include "pnbounds/analyze.hpp"

#include <charconv>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>

namespace pnb {

AnalysisReport run_analysis(const Dataset& data, const AnalyzeOptions& options) {
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
  data.require_inference_ready();

  AnalysisReport report;
  report.n = data.size();
  report.covariate_dim = data.covariate_dim();
  report.covariate_names = data.covariate_names();
  report.options = options;
  report.marginals = fit_marginals(data);
  report.pt = pt_bounds(report.marginals.p_hat, report.marginals.mu11_hat,
                        report.marginals.mu10_hat, data.size());

  report.intervals.push_back(ci1(report.marginals.mu11_hat, report.marginals.mu10_hat,
                                 report.marginals.p_hat, data.size(), options.alpha));
  report.intervals.push_back(ci4(report.pt, data.size(), options.alpha));

  if (!options.no_covariates) {
    report.crossfit = crossfit_bounds(data, options.k_folds, options.learner, options.seed);
    const auto [lo, up] = report.crossfit->for_intervals();
    report.intervals.push_back(ci2(lo, up, options.alpha));
    report.intervals.push_back(ci3(lo, up, options.alpha));
    report.intervals.push_back(one_sided(lo, BoundSide::Lower, options.alpha));
    report.intervals.push_back(one_sided(up, BoundSide::Upper, options.alpha));
  }
  return report;
}

namespace {

nlohmann::json interval_json(const IntervalResult& r) {
  nlohmann::json j;
  j["method"] = std::string(interval_method_tag(r.method));
  j["alpha"] = r.alpha;
  j["lower"] = r.lower;
  j["upper"] = r.upper;
  j["critical_value"] = r.critical_value;
  j["case_tag"] = r.case_tag ? nlohmann::json(std::string(ci4_case_tag(*r.case_tag)))
                             : nlohmann::json(nullptr);
  return j;
}

nlohmann::json bound_estimate_json(const BoundEstimate& b) {
  return nlohmann::json::parse(b.to_json());
}

std::string format_shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::string AnalysisReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["metadata"] = {{"n", n},
                   {"covariate_dim", covariate_dim},
                   {"covariates", covariate_names},
                   {"alpha", options.alpha},
                   {"k_folds", options.k_folds},
                   {"learner", std::string(learner_tag(options.learner))},
                   {"seed", options.seed},
                   {"no_covariates", options.no_covariates}};
  j["marginals"] = {{"p_hat", marginals.p_hat},
                    {"mu11_hat", marginals.mu11_hat},
                    {"mu10_hat", marginals.mu10_hat}};
  j["pt_bounds"] = {{"l0", pt.l0},
                    {"u0", pt.u0},
                    {"l_pt", pt.l_pt},
                    {"u_pt", pt.u_pt},
                    {"sigma_l0", pt.sigma_l0},
                    {"sigma_u0", pt.sigma_u0},
                    {"degenerate_variance", pt.degenerate_variance}};
  if (crossfit) {
    nlohmann::json fold_models = nlohmann::json::array();
    for (const std::string& c : crossfit->fold_model_coefficients) {
      fold_models.push_back(nlohmann::json::parse(c));
    }
    j["crossfit"] = {{"lower", bound_estimate_json(crossfit->lower)},
                     {"upper", bound_estimate_json(crossfit->upper)},
                     {"inverted", crossfit->inverted},
                     {"fold_models", std::move(fold_models)}};
  } else {
    j["crossfit"] = nullptr;
  }
  nlohmann::json intervals_json = nlohmann::json::array();
  for (const IntervalResult& r : intervals) intervals_json.push_back(interval_json(r));
  j["intervals"] = std::move(intervals_json);
  return j.dump(2);
}

std::string AnalysisReport::to_table_csv() const {
  std::string out = "row,lower,upper,critical_value\n";
  out += "bounds_no_covariates," + format_shortest(pt.l_pt) + "," + format_shortest(pt.u_pt) + ",\n";
  if (crossfit) {
    out += "bounds_covariate_assisted," + format_shortest(crossfit->lower.value) + "," +
           format_shortest(crossfit->upper.value) + ",\n";
  }
  for (const IntervalResult& r : intervals) {
    out += std::string(interval_method_tag(r.method)) + "," + format_shortest(r.lower) + "," +
           format_shortest(r.upper) + "," + format_shortest(r.critical_value) + "\n";
  }
  return out;
}

std::string AnalysisReport::to_text() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  out << "N = " << n << ", covariates = " << covariate_dim
      << ", learner = " << learner_tag(options.learner) << ", K = " << options.k_folds
      << ", alpha = " << options.alpha << ", seed = " << options.seed << "\n";
  out << "p_hat = " << marginals.p_hat << ", mu11_hat = " << marginals.mu11_hat
      << ", mu10_hat = " << marginals.mu10_hat << "\n\n";
  out << "  no-covariate bounds     [" << pt.l_pt << ", " << pt.u_pt << "]\n";
  if (crossfit) {
    out << "  covariate bounds        [" << crossfit->lower.value << ", "
        << crossfit->upper.value << "]   (SE " << crossfit->lower.sigma_hat / std::sqrt(n)
        << ", " << crossfit->upper.sigma_hat / std::sqrt(n) << ")"
        << (crossfit->inverted ? "  [inverted, collapsed for intervals]" : "") << "\n";
  }
  for (const IntervalResult& r : intervals) {
    out << "  " << std::setw(16) << std::left << interval_method_tag(r.method) << std::right
        << "        [" << r.lower << ", " << r.upper << "]";
    if (r.method == IntervalMethod::Ci1) out << "   (assumes monotonicity)";
    if (r.case_tag) out << "   (case " << ci4_case_tag(*r.case_tag) << ")";
    out << "\n";
  }
  return out.str();
}

}  // namespace pnb
