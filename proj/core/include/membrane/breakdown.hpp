#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "membrane/evolution.hpp"

namespace membrane {

/// ImmersivityLoss: the indicator went to zero monotonically with the gauge
/// intact. RegularitySuspected is a heuristic label (NaN, or the gauge drifted
/// past its budget first); it is not a proof that regularity was lost.
enum class Mechanism { ImmersivityLoss, RegularitySuspected, Undetermined };

std::string_view to_string(Mechanism m) noexcept;
Mechanism parse_mechanism(std::string_view s);

struct GaugeBudget {
  double x_inf = 1e-3;
  double y_inf = 1e-3;
};

struct BreakdownReport {
  Direction direction = Direction::Forward;
  std::optional<double> t_star;
  Mechanism mechanism = Mechanism::Undetermined;
  Termination trigger = Termination::HorizonReached;
  bool monotone_window = false;
  bool budget_exceeded = false;
  std::vector<double> trend_times;
  std::vector<double> trend_indicator;
  /// Per sphere factor, second differences of the mean radius over the window.
  std::vector<std::vector<double>> trend_mean_radius_d2;
  std::string note;
};

/// Least-squares line through (t, min_indicator) of the given records and its
/// zero crossing; empty if the fit does not decrease in the run direction.
std::optional<double> extrapolate_zero_crossing(std::span<const DiagnosticsRecord> records);

/// Classifies a terminated run from its diagnostics series. Needs at least
/// three records unless the run reached its horizon or step budget (those are
/// Undetermined with no T*). Throws Error(InsufficientHistory).
BreakdownReport detect_breakdown(Termination termination, Direction direction,
                                 std::span<const DiagnosticsRecord> records,
                                 const GaugeBudget& budget, int window = 10);

BreakdownReport detect_breakdown(const RunResult& result, const GaugeBudget& budget,
                                 int window = 10);

}  // namespace membrane
