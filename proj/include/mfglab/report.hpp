#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mfglab::experiments {

struct LogLogFit {
  std::string label;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Least-squares line through (log x, log y). Non-positive entries are skipped.
LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y, std::string label = {});

enum class Outcome { Pass, Fail, Inconclusive };
const char* to_string(Outcome outcome);

struct Verdict {
  std::string name;
  Outcome outcome = Outcome::Inconclusive;
  double measured = 0.0;
  std::string comparison;  // e.g. ">=" or "<="
  double threshold = 0.0;
  std::string detail;
};

/// Judges `measured comparison threshold`.
Verdict judge(std::string name, double measured, std::string comparison, double threshold,
              std::string detail = {});

/// Table of (parameter, measured quantities) rows plus fits and verdicts.
class StudyReport {
 public:
  StudyReport(std::string name, std::string parameter);

  const std::string& name() const noexcept { return name_; }
  const std::string& parameter() const noexcept { return parameter_; }

  void set_meta(const std::string& key, const std::string& value);
  void set_meta(const std::string& key, double value);
  void add_row(double parameter, std::map<std::string, double> values, std::string note = {});
  void add_fit(LogLogFit fit);
  void add_verdict(Verdict verdict);

  struct Row {
    double parameter;
    std::map<std::string, double> values;
    std::string note;
  };
  /// Rows sorted by parameter (stable for ties).
  std::vector<Row> rows() const;
  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<LogLogFit>& fits() const noexcept { return fits_; }
  const std::vector<Verdict>& verdicts() const noexcept { return verdicts_; }
  const std::vector<std::pair<std::string, std::string>>& meta() const noexcept { return meta_; }

  /// Column of values in row order; missing entries are skipped.
  std::vector<double> column(const std::string& key) const;
  std::vector<double> parameters() const;

  /// Pass when every verdict passes, Fail when any fails, else Inconclusive.
  Outcome overall() const;

  std::string to_csv() const;

 private:
  std::string name_;
  std::string parameter_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::string> columns_;
  std::vector<Row> rows_;
  std::vector<LogLogFit> fits_;
  std::vector<Verdict> verdicts_;
};

/// Deterministic decimal rendering used in every CSV.
std::string format_number(double value);

}  // namespace mfglab::experiments
