#include "membrane/breakdown.hpp"

#include <algorithm>
#include <cmath>

#include "membrane/error.hpp"

namespace membrane {

std::string_view to_string(Mechanism m) noexcept {
  switch (m) {
    case Mechanism::ImmersivityLoss: return "ImmersivityLoss";
    case Mechanism::RegularitySuspected: return "RegularitySuspected";
    case Mechanism::Undetermined: return "Undetermined";
  }
  return "Unknown";
}

Mechanism parse_mechanism(std::string_view s) {
  for (Mechanism m :
       {Mechanism::ImmersivityLoss, Mechanism::RegularitySuspected, Mechanism::Undetermined}) {
    if (to_string(m) == s) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown mechanism '" + std::string(s) + "'");
}

std::optional<double> extrapolate_zero_crossing(std::span<const DiagnosticsRecord> records) {
  if (records.size() < 2) return std::nullopt;
  // Centre the abscissa for conditioning.
  double tm = 0.0;
  double fm = 0.0;
  for (const auto& r : records) {
    tm += r.t;
    fm += r.min_indicator;
  }
  tm /= static_cast<double>(records.size());
  fm /= static_cast<double>(records.size());
  double stt = 0.0;
  double stf = 0.0;
  for (const auto& r : records) {
    stt += (r.t - tm) * (r.t - tm);
    stf += (r.t - tm) * (r.min_indicator - fm);
  }
  if (!(stt > 0.0)) return std::nullopt;
  const double slope = stf / stt;
  const double direction = records.back().t >= records.front().t ? 1.0 : -1.0;
  if (!(slope * direction < 0.0)) return std::nullopt;
  return tm - fm / slope;
}

BreakdownReport detect_breakdown(Termination termination, Direction direction,
                                 std::span<const DiagnosticsRecord> records,
                                 const GaugeBudget& budget, int window) {
  BreakdownReport report;
  report.direction = direction;
  report.trigger = termination;

  const bool healthy =
      termination == Termination::HorizonReached || termination == Termination::MaxSteps;
  if (!healthy && records.size() < 3) {
    throw Error(ErrorCode::InsufficientHistory,
                "breakdown classification needs at least 3 records, got " +
                    std::to_string(records.size()));
  }

  const std::size_t w = std::min(records.size(), static_cast<std::size_t>(std::max(window, 2)));
  const auto tail = records.subspan(records.size() - w);
  for (const auto& r : tail) {
    report.trend_times.push_back(r.t);
    report.trend_indicator.push_back(r.min_indicator);
  }
  if (!tail.empty()) {
    for (std::size_t j = 0; j < tail.front().mean_radii.size(); ++j) {
      report.trend_mean_radius_d2.push_back(
          mean_radius_second_differences(tail, static_cast<int>(j)));
    }
  }

  report.monotone_window = tail.size() >= 2;
  for (std::size_t i = 1; i < tail.size(); ++i) {
    if (!(tail[i].min_indicator < tail[i - 1].min_indicator)) report.monotone_window = false;
  }
  for (const auto& r : records) {
    if (r.x_inf > budget.x_inf || r.y_inf > budget.y_inf) report.budget_exceeded = true;
  }

  if (healthy) {
    report.mechanism = Mechanism::Undetermined;
    report.note = "run did not break down";
    return report;
  }

  report.t_star = extrapolate_zero_crossing(tail);
  if (termination == Termination::NaNDetected) {
    report.mechanism = Mechanism::RegularitySuspected;
    report.note = "non-finite values appeared";
  } else if (report.budget_exceeded) {
    report.mechanism = Mechanism::RegularitySuspected;
    report.note = "gauge residuals exceeded their budget before the floor";
  } else if (report.monotone_window) {
    report.mechanism = Mechanism::ImmersivityLoss;
  } else {
    report.mechanism = Mechanism::Undetermined;
    report.note = "indicator not monotone over the trend window";
  }
  return report;
}

BreakdownReport detect_breakdown(const RunResult& result, const GaugeBudget& budget, int window) {
  return detect_breakdown(result.termination, result.direction, result.records, budget, window);
}

}  // namespace membrane
