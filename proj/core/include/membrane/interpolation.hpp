#pragma once

#include <memory>
#include <span>
#include <vector>

namespace membrane {

/// Interpolant of samples f_j = f(2 pi j / n) of a 2 pi periodic function.
class PeriodicInterpolant {
 public:
  virtual ~PeriodicInterpolant() = default;

  virtual double value(double y) const = 0;
  virtual double derivative(double y) const = 0;
  /// Integral of the interpolant from 0 to y (not wrapped: grows with y by the
  /// mean times y).
  virtual double antiderivative(double y) const = 0;
};

/// C^2 periodic cubic spline on the uniform grid.
class PeriodicCubicSpline final : public PeriodicInterpolant {
 public:
  explicit PeriodicCubicSpline(std::span<const double> samples);

  double value(double y) const override;
  double derivative(double y) const override;
  double antiderivative(double y) const override;

  std::span<const double> second_derivatives() const noexcept { return m_; }

 private:
  struct Locator {
    std::size_t j;
    double s;      // offset within [y_j, y_j + h)
    long periods;  // whole periods wrapped away
  };
  Locator locate(double y) const;
  double segment_integral(std::size_t j, double s) const;

  std::vector<double> f_;
  std::vector<double> m_;
  std::vector<double> cumulative_;  // integral from 0 to y_j
  double h_;
  double period_integral_;
};

/// Trigonometric interpolant (band-limited to the n/2 Nyquist mode, which is
/// carried as a pure cosine so the interpolant is real and interpolatory).
class TrigonometricInterpolant final : public PeriodicInterpolant {
 public:
  explicit TrigonometricInterpolant(std::span<const double> samples);

  double value(double y) const override;
  double derivative(double y) const override;
  double antiderivative(double y) const override;

  double mean() const noexcept { return a_[0]; }

 private:
  std::vector<double> a_;  // cosine coefficients, a_[0] is the mean
  std::vector<double> b_;  // sine coefficients
  int n_;
};

enum class Resampler { Trigonometric, PeriodicCubicSpline };

std::unique_ptr<PeriodicInterpolant> make_interpolant(Resampler kind,
                                                      std::span<const double> samples);

/// Cyclic tridiagonal solve with constant (sub, diag, super) coefficients.
std::vector<double> solve_cyclic_tridiagonal(double sub, double diag, double super,
                                              std::span<const double> rhs);

}  // namespace membrane
