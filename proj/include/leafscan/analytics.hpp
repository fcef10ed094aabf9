#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace leafscan {

/// Paired manual/automatic measurements (cm^2 or ratios) for one group.
struct MeasurementSeries {
  std::string label;
  std::vector<double> manual;
  std::vector<double> automatic;

  std::size_t size() const noexcept { return manual.size(); }
  void add(double manual_value, double automatic_value) {
    manual.push_back(manual_value);
    automatic.push_back(automatic_value);
  }
};

/// Throws OutOfRange on mismatched lengths, n < 2 or non-finite values.
void validate(const MeasurementSeries &series);

/// Product-moment coefficient. Throws UndefinedCorrelation if either
/// variable is constant.
double pearson_r(const MeasurementSeries &series);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares, automatic ~ slope * manual + intercept.
LinearFit linear_fit(const MeasurementSeries &series);

/// Sample standard deviation (n - 1) of automatic - manual.
double sd_difference(const MeasurementSeries &series);

/// Lin's concordance correlation coefficient (population moments).
double concordance_ccc(const MeasurementSeries &series);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

/// Student-t CDF with `dof` degrees of freedom.
double student_t_cdf(double t, double dof);

/// Two-sided p-value of r under H0: rho = 0, with t = r sqrt((n-2)/(1-r^2)).
/// Returns 1 for n = 2, where the test has no degrees of freedom.
double correlation_p_value(double r, std::size_t n);

/// p-values below this are displayed as "<1e-12".
inline constexpr double kPValueFloor = 1e-12;

struct CorrelationResult {
  std::string label;
  std::size_t n = 0;
  double r = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double p_value = 1.0;
  double sd_diff = 0.0;
  /// Lin's CCC, reported alongside r.
  double concordance = 0.0;
};

CorrelationResult correlate(const MeasurementSeries &series);

struct SeriesOutcome {
  std::string label;
  std::optional<CorrelationResult> result;
  std::string error;
};

struct PlotLine {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
};

struct PlotSeries {
  std::string label;
  std::vector<double> manual;
  std::vector<double> automatic;
  /// Absent when the series failed.
  std::optional<PlotLine> fit_line;
  PlotLine identity_line;
};

struct CorrelationReport {
  std::vector<SeriesOutcome> outcomes;
  std::vector<PlotSeries> plots;
};

/// Correlates every series independently; a failing series yields an error
/// entry without aborting the others.
CorrelationReport correlation_report(std::span<const MeasurementSeries> series);

} // namespace leafscan
