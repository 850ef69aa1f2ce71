#include "pnbounds/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "pnbounds/rng.hpp"

namespace pnb {

Dataset::Dataset(std::vector<Record> records, std::vector<std::string> covariate_names)
    : records_(std::move(records)), names_(std::move(covariate_names)) {
  if (records_.empty()) throw DataError("dataset is empty");
  covariate_dim_ = static_cast<int>(records_.front().v.size());
  if (names_.empty()) {
    for (int j = 0; j < covariate_dim_; ++j) names_.push_back("v" + std::to_string(j + 1));
  }
  if (static_cast<int>(names_.size()) != covariate_dim_) {
    throw DataError("covariate name count does not match covariate dimension");
  }
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const Record& r = records_[i];
    if (r.x != 0 && r.x != 1) {
      throw DataError("row " + std::to_string(i + 1) + ": treatment x must be 0 or 1");
    }
    if (r.y != 0 && r.y != 1) {
      throw DataError("row " + std::to_string(i + 1) + ": outcome y must be 0 or 1");
    }
    if (static_cast<int>(r.v.size()) != covariate_dim_) {
      throw DataError("row " + std::to_string(i + 1) + ": inconsistent covariate dimension");
    }
    for (double c : r.v) {
      if (!std::isfinite(c)) {
        throw DataError("row " + std::to_string(i + 1) + ": non-finite covariate");
      }
    }
    n_treated_ += static_cast<std::size_t>(r.x);
    n_treated_success_ += static_cast<std::size_t>(r.x == 1 && r.y == 1);
  }
}

void Dataset::require_inference_ready() const {
  if (n_treated_ == 0) throw EstimationError("no treated units in sample (positivity fails in-sample)");
  if (n_treated_ == size()) throw EstimationError("no control units in sample (positivity fails in-sample)");
  if (n_treated_success_ == 0) {
    throw EstimationError("no treated unit with Y=1: the attribution target is undefined in-sample");
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

int parse_binary(std::string_view field, const std::string& what, std::size_t row) {
  if (field == "0") return 0;
  if (field == "1") return 1;
  throw DataError("row " + std::to_string(row) + ": " + what + " must be 0 or 1, got '" +
                  std::string(field) + "'");
}

double parse_real(std::string_view field, std::size_t row) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || field.empty()) {
    throw DataError("row " + std::to_string(row) + ": malformed numeric field '" +
                    std::string(field) + "'");
  }
  if (!std::isfinite(value)) {
    throw DataError("row " + std::to_string(row) + ": non-finite covariate value");
  }
  return value;
}

}  // namespace

Dataset parse_csv(const std::string& content, const std::string& origin) {
  std::vector<std::string_view> lines;
  {
    std::string_view rest = content;
    while (!rest.empty()) {
      const std::size_t pos = rest.find('\n');
      std::string_view line = rest.substr(0, pos);
      if (pos == std::string_view::npos) rest = {};
      else rest.remove_prefix(pos + 1);
      if (!trim(line).empty()) lines.push_back(line);
    }
  }
  if (lines.empty()) throw DataError(origin + ": file is empty");

  const auto header = split_fields(lines.front());
  if (header.size() < 2 || header[0] != "x" || header[1] != "y") {
    throw DataError(origin + ": header must start with columns 'x,y'");
  }
  std::vector<std::string> names(header.begin() + 2, header.end());
  for (const auto& n : names) {
    if (n.empty()) throw DataError(origin + ": empty covariate column name");
  }

  if (lines.size() == 1) throw DataError(origin + ": no data rows");
  std::vector<Record> records;
  records.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_fields(lines[i]);
    if (fields.size() != header.size()) {
      throw DataError(origin + ": row " + std::to_string(i) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    Record r;
    r.x = parse_binary(fields[0], "treatment x", i);
    r.y = parse_binary(fields[1], "outcome y", i);
    r.v.reserve(fields.size() - 2);
    for (std::size_t j = 2; j < fields.size(); ++j) r.v.push_back(parse_real(fields[j], i));
    records.push_back(std::move(r));
  }
  return Dataset(std::move(records), std::move(names));
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), path.string());
}

namespace {

void append_double(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

void write_csv(const Dataset& data, std::ostream& out) {
  std::string line = "x,y";
  for (const auto& n : data.covariate_names()) {
    line += ',';
    line += n;
  }
  line += '\n';
  out << line;
  for (const Record& r : data.records()) {
    line.clear();
    line += r.x ? '1' : '0';
    line += ',';
    line += r.y ? '1' : '0';
    for (double c : r.v) {
      line += ',';
      append_double(line, c);
    }
    line += '\n';
    out << line;
  }
}

std::vector<std::vector<std::size_t>> FoldPlan::folds() const {
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    out[static_cast<std::size_t>(assignment[i])].push_back(i);
  }
  return out;
}

FoldPlan make_folds(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("fold count must be at least 2");
  if (static_cast<std::size_t>(k) > n) throw ConfigError("fold count exceeds sample size");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);

  FoldPlan plan;
  plan.k = k;
  plan.assignment.resize(n);
  const std::size_t q = n / static_cast<std::size_t>(k);
  const std::size_t r = n % static_cast<std::size_t>(k);
  std::size_t pos = 0;
  for (int f = 0; f < k; ++f) {
    const std::size_t sz = q + (static_cast<std::size_t>(f) < r ? 1 : 0);
    for (std::size_t j = 0; j < sz; ++j) plan.assignment[order[pos++]] = f;
  }
  return plan;
}

FoldPlan make_stratified_folds(const Dataset& data, int k, std::uint64_t seed) {
  const std::size_t n = data.size();
  if (k < 2) throw ConfigError("fold count must be at least 2");
  if (static_cast<std::size_t>(k) > n) throw ConfigError("fold count exceeds sample size");
  std::vector<std::size_t> treated, control;
  for (std::size_t i = 0; i < n; ++i) (data[i].x ? treated : control).push_back(i);
  Rng rng(seed);
  rng.shuffle(treated);
  rng.shuffle(control);

  FoldPlan plan;
  plan.k = k;
  plan.assignment.resize(n);
  // One continuous round-robin across both arms keeps per-arm and total
  // fold sizes within one of each other.
  std::size_t pos = 0;
  for (std::size_t i : treated) plan.assignment[i] = static_cast<int>(pos++ % k);
  for (std::size_t i : control) plan.assignment[i] = static_cast<int>(pos++ % k);
  return plan;
}

}  // namespace pnb
