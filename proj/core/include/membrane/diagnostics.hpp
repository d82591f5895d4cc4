#pragma once

#include <span>
#include <vector>

#include "membrane/gauge.hpp"
#include "membrane/geometry.hpp"

namespace membrane {

/// Monitored invariants on one time slice.
struct DiagnosticsRecord {
  double t = 0.0;
  double min_indicator = 0.0;       // inf_y |g_tt| r_1 ... r_k
  std::vector<double> mean_radii;   // (1 / 2 pi) \oint r_j dy
  double density_spread = 0.0;      // max_y |C sqrt|det g| / |g_tt| - 1|
  double x_inf = 0.0;
  double y_inf = 0.0;
  double max_speed = 0.0;           // max_y C prod r_i^{d_i}
  double velocity_margin = 0.0;     // 1 - max_y (|vz|^2 + sum vr^2)
  double gtt_integral = 0.0;        // \oint |g_tt| dy
  std::vector<double> max_radii;    // max_y r_j, not part of the CSV schema
};

struct DensityField {
  std::vector<double> values;
  double spread = 0.0;
};

/// sqrt|det g| / |g_tt| per point, and its max relative deviation from 1 / C.
/// Throws Error(NonTimelike).
DensityField conserved_density(const FieldState& state, GaugeConstant C,
                               const AxisymmetryShape& shape);

std::vector<double> mean_radii(const FieldState& state);

/// Trapezoidal \oint |g_tt| dy.
double gtt_integral(const FieldState& state);

DiagnosticsRecord make_record(const FieldState& state, GaugeConstant C,
                              const AxisymmetryShape& shape);

struct ConvexityVerdict {
  bool convex = true;
  double max_second_difference = 0.0;
  /// 1e-8 max_t rbar_j, the allowance for discretization noise.
  double tolerance = 0.0;
  /// Index of the first interior record exceeding its allowance, or -1.
  int first_violation = -1;
};

/// Three-point second differences of each mean radius at every interior
/// record (non-uniform spacing handled exactly). A difference passes if it is
/// below the tolerance plus the floating-point resolution of the quotient
/// itself. Throws Error(InsufficientHistory) for fewer than 3 records.
std::vector<ConvexityVerdict> convexity_check(std::span<const DiagnosticsRecord> records);

struct BoundsVerdict {
  bool velocity_ok = true;
  bool lipschitz_ok = true;
  /// Index of the first record violating either bound, or -1.
  int first_violation = -1;
  double min_velocity_margin = 1.0;
  /// max over records of max_y r_j(t) - max_y r_j(t0) - |t - t0|.
  double max_lipschitz_excess = 0.0;
};

/// Velocity bound margin > 0 and max_y r_j(t) <= max_y r_j(t0) + |t - t0| + tolerance
/// at every record, with t0 taken from the first record.
BoundsVerdict apriori_bounds(std::span<const DiagnosticsRecord> records, double tolerance = 1e-6);

/// Second differences of mean radius j at interior records.
std::vector<double> mean_radius_second_differences(std::span<const DiagnosticsRecord> records,
                                                   int j);

}  // namespace membrane
