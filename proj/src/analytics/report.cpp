#include "leafscan/analytics.hpp"

#include "leafscan/error.hpp"

#include <algorithm>

namespace leafscan {

CorrelationReport correlation_report(std::span<const MeasurementSeries> series) {
  CorrelationReport report;
  for (const auto &s : series) {
    SeriesOutcome outcome{s.label, std::nullopt, {}};
    PlotSeries plot{s.label, s.manual, s.automatic, std::nullopt, {}};
    try {
      outcome.result = correlate(s);
    } catch (const Error &e) {
      outcome.error = e.what();
    }

    if (!s.manual.empty()) {
      const auto [lo_it, hi_it] = std::minmax_element(s.manual.begin(), s.manual.end());
      const double lo = *lo_it;
      const double hi = *hi_it;
      plot.identity_line = PlotLine{lo, lo, hi, hi};
      if (outcome.result) {
        const auto &r = *outcome.result;
        plot.fit_line = PlotLine{lo, r.slope * lo + r.intercept, hi, r.slope * hi + r.intercept};
      }
    }
    report.outcomes.push_back(std::move(outcome));
    report.plots.push_back(std::move(plot));
  }
  return report;
}

} // namespace leafscan
