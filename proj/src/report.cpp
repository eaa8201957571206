#include "mfglab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace mfglab::experiments {

LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y, std::string label) {
  LogLogFit fit;
  fit.label = std::move(label);
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  fit.points = lx.size();
  if (lx.size() < 2) return fit;
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

const char* to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Pass: return "pass";
    case Outcome::Fail: return "fail";
    case Outcome::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Verdict judge(std::string name, double measured, std::string comparison, double threshold,
              std::string detail) {
  Verdict v;
  v.name = std::move(name);
  v.measured = measured;
  v.threshold = threshold;
  v.detail = std::move(detail);
  bool ok = false;
  if (comparison == ">=") {
    ok = measured >= threshold;
  } else if (comparison == "<=") {
    ok = measured <= threshold;
  } else if (comparison == "<") {
    ok = measured < threshold;
  } else if (comparison == ">") {
    ok = measured > threshold;
  }
  v.comparison = std::move(comparison);
  v.outcome = std::isfinite(measured) ? (ok ? Outcome::Pass : Outcome::Fail) : Outcome::Inconclusive;
  return v;
}

StudyReport::StudyReport(std::string name, std::string parameter)
    : name_(std::move(name)), parameter_(std::move(parameter)) {}

void StudyReport::set_meta(const std::string& key, const std::string& value) {
  for (auto& [k, v] : meta_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  meta_.emplace_back(key, value);
}

void StudyReport::set_meta(const std::string& key, double value) {
  set_meta(key, format_number(value));
}

void StudyReport::add_row(double parameter, std::map<std::string, double> values, std::string note) {
  for (const auto& [k, v] : values) {
    if (std::find(columns_.begin(), columns_.end(), k) == columns_.end()) columns_.push_back(k);
  }
  rows_.push_back({parameter, std::move(values), std::move(note)});
}

void StudyReport::add_fit(LogLogFit fit) { fits_.push_back(std::move(fit)); }
void StudyReport::add_verdict(Verdict verdict) { verdicts_.push_back(std::move(verdict)); }

std::vector<StudyReport::Row> StudyReport::rows() const {
  std::vector<Row> sorted = rows_;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Row& a, const Row& b) { return a.parameter < b.parameter; });
  return sorted;
}

std::vector<double> StudyReport::column(const std::string& key) const {
  std::vector<double> out;
  for (const auto& row : rows()) {
    if (auto it = row.values.find(key); it != row.values.end()) out.push_back(it->second);
  }
  return out;
}

std::vector<double> StudyReport::parameters() const {
  std::vector<double> out;
  for (const auto& row : rows()) out.push_back(row.parameter);
  return out;
}

Outcome StudyReport::overall() const {
  if (verdicts_.empty()) return Outcome::Inconclusive;
  bool all_pass = true;
  for (const auto& v : verdicts_) {
    if (v.outcome == Outcome::Fail) return Outcome::Fail;
    if (v.outcome != Outcome::Pass) all_pass = false;
  }
  return all_pass ? Outcome::Pass : Outcome::Inconclusive;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string StudyReport::to_csv() const {
  std::ostringstream out;
  out << "# report: " << name_ << '\n';
  for (const auto& [k, v] : meta_) out << "# " << k << ": " << v << '\n';
  for (const auto& f : fits_) {
    out << "# fit " << f.label << ": slope=" << format_number(f.slope)
        << " intercept=" << format_number(f.intercept) << " r2=" << format_number(f.r_squared)
        << " points=" << f.points << '\n';
  }
  for (const auto& v : verdicts_) {
    out << "# verdict " << v.name << ": " << to_string(v.outcome) << " (measured "
        << format_number(v.measured) << ' ' << v.comparison << ' ' << format_number(v.threshold)
        << ')';
    if (!v.detail.empty()) out << ' ' << v.detail;
    out << '\n';
  }
  out << "# overall: " << to_string(overall()) << '\n';
  const bool notes = std::any_of(rows_.begin(), rows_.end(), [](const Row& r) { return !r.note.empty(); });
  out << "# columns: " << parameter_ << " = swept parameter";
  for (const auto& c : columns_) out << ", " << c;
  if (notes) out << ", note = row status";
  out << '\n';
  out << parameter_;
  for (const auto& c : columns_) out << ',' << c;
  if (notes) out << ",note";
  out << '\n';
  for (const auto& row : rows()) {
    out << format_number(row.parameter);
    for (const auto& c : columns_) {
      out << ',';
      if (auto it = row.values.find(c); it != row.values.end()) out << format_number(it->second);
    }
    if (notes) out << ',' << row.note;
    out << '\n';
  }
  return out.str();
}

}  // namespace mfglab::experiments
