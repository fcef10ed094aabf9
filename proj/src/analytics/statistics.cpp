#include "leafscan/analytics.hpp"

#include "leafscan/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace leafscan {

namespace {

struct Moments {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
};

// Two-pass centred sums.
Moments moments(const MeasurementSeries &s) {
  Moments m;
  const auto n = static_cast<double>(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    m.mean_x += s.manual[i];
    m.mean_y += s.automatic[i];
  }
  m.mean_x /= n;
  m.mean_y /= n;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double dx = s.manual[i] - m.mean_x;
    const double dy = s.automatic[i] - m.mean_y;
    m.sxx += dx * dx;
    m.syy += dy * dy;
    m.sxy += dx * dy;
  }
  return m;
}

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) {
    d = kTiny;
  }
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) {
      d = kTiny;
    }
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) {
      c = kTiny;
    }
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) {
      d = kTiny;
    }
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) {
      c = kTiny;
    }
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) {
      break;
    }
  }
  return h;
}

} // namespace

void validate(const MeasurementSeries &series) {
  if (series.manual.size() != series.automatic.size()) {
    throw OutOfRange("series '" + series.label + "' has unequal manual/automatic lengths");
  }
  if (series.size() < 2) {
    throw OutOfRange("series '" + series.label + "': need at least 2 pairs");
  }
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(series.manual.begin(), series.manual.end(), finite) ||
      !std::all_of(series.automatic.begin(), series.automatic.end(), finite)) {
    throw OutOfRange("series '" + series.label + "' contains non-finite values");
  }
}

double pearson_r(const MeasurementSeries &series) {
  validate(series);
  const auto m = moments(series);
  if (m.sxx == 0.0 || m.syy == 0.0) {
    throw UndefinedCorrelation("series '" + series.label + "': correlation undefined for a constant variable");
  }
  return std::clamp(m.sxy / std::sqrt(m.sxx * m.syy), -1.0, 1.0);
}

LinearFit linear_fit(const MeasurementSeries &series) {
  validate(series);
  const auto m = moments(series);
  if (m.sxx == 0.0) {
    throw UndefinedCorrelation("series '" + series.label + "': constant predictor, slope undefined");
  }
  const double slope = m.sxy / m.sxx;
  return LinearFit{slope, m.mean_y - slope * m.mean_x};
}

double sd_difference(const MeasurementSeries &series) {
  validate(series);
  double mean = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    mean += series.automatic[i] - series.manual[i];
  }
  mean /= static_cast<double>(series.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double d = series.automatic[i] - series.manual[i] - mean;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(series.size() - 1));
}

double concordance_ccc(const MeasurementSeries &series) {
  validate(series);
  const auto m = moments(series);
  const auto n = static_cast<double>(series.size());
  const double dm = m.mean_x - m.mean_y;
  const double denom = m.sxx / n + m.syy / n + dm * dm;
  if (denom == 0.0) {
    throw UndefinedCorrelation("series '" + series.label + "': concordance undefined for identical constants");
  }
  return 2.0 * (m.sxy / n) / denom;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
    throw OutOfRange("incomplete beta arguments out of domain");
  }
  if (x == 0.0 || x == 1.0) {
    return x;
  }
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The fraction converges fast for x < (a + 1) / (a + b + 2); use symmetry otherwise.
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
  if (!(dof > 0.0)) {
    throw OutOfRange("Student-t needs positive degrees of freedom");
  }
  if (std::isinf(t)) {
    return t > 0 ? 1.0 : 0.0;
  }
  const double tail = 0.5 * regularized_incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
  return t >= 0.0 ? 1.0 - tail : tail;
}

double correlation_p_value(double r, std::size_t n) {
  if (n < 2 || !(std::abs(r) <= 1.0)) {
    throw OutOfRange("correlation p-value needs n >= 2 and |r| <= 1");
  }
  if (n == 2) {
    return 1.0;
  }
  // With t^2 = r^2 (n-2) / (1-r^2), the two-sided tail 2(1 - F(|t|)) equals
  // I_{1-r^2}((n-2)/2, 1/2).
  const double dof = static_cast<double>(n - 2);
  return regularized_incomplete_beta(0.5 * dof, 0.5, 1.0 - r * r);
}

CorrelationResult correlate(const MeasurementSeries &series) {
  CorrelationResult out;
  out.label = series.label;
  out.n = series.size();
  out.r = pearson_r(series);
  const auto fit = linear_fit(series);
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.p_value = correlation_p_value(out.r, out.n);
  out.sd_diff = sd_difference(series);
  out.concordance = concordance_ccc(series);
  return out;
}

} // namespace leafscan
