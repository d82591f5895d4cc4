#include "membrane/interpolation.hpp"

#include <cmath>

#include "membrane/error.hpp"
#include "membrane/geometry.hpp"

namespace membrane {

std::vector<double> solve_cyclic_tridiagonal(double sub, double diag, double super,
                                              std::span<const double> rhs) {
  // Sherman-Morrison on top of a Thomas sweep.
  const std::size_t n = rhs.size();
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "cyclic system needs n >= 3");
  const double gamma = -diag;
  std::vector<double> b(n, diag);
  b[0] = diag - gamma;
  b[n - 1] = diag - sub * super / gamma;

  auto thomas = [&](std::span<const double> d) {
    std::vector<double> c(n), x(n);
    c[0] = super / b[0];
    x[0] = d[0] / b[0];
    for (std::size_t i = 1; i < n; ++i) {
      const double denom = b[i] - sub * c[i - 1];
      c[i] = super / denom;
      x[i] = (d[i] - sub * x[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
    return x;
  };

  std::vector<double> x = thomas(rhs);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = super;
  std::vector<double> z = thomas(u);
  const double vx = x[0] + sub / gamma * x[n - 1];
  const double vz = z[0] + sub / gamma * z[n - 1];
  const double factor = vx / (1.0 + vz);
  for (std::size_t i = 0; i < n; ++i) x[i] -= factor * z[i];
  return x;
}

PeriodicCubicSpline::PeriodicCubicSpline(std::span<const double> samples)
    : f_(samples.begin(), samples.end()) {
  const std::size_t n = f_.size();
  if (n < 4) throw Error(ErrorCode::InvalidArgument, "spline needs at least 4 samples");
  h_ = kTwoPi / static_cast<double>(n);
  std::vector<double> rhs(n);
  for (std::size_t j = 0; j < n; ++j) {
    rhs[j] = 6.0 / (h_ * h_) * (f_[(j + 1) % n] - 2.0 * f_[j] + f_[(j + n - 1) % n]);
  }
  m_ = solve_cyclic_tridiagonal(1.0, 4.0, 1.0, rhs);

  cumulative_.assign(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    cumulative_[j + 1] = cumulative_[j] + segment_integral(j, h_);
  }
  period_integral_ = cumulative_[n];
}

PeriodicCubicSpline::Locator PeriodicCubicSpline::locate(double y) const {
  const double periods = std::floor(y / kTwoPi);
  double local = y - periods * kTwoPi;
  const auto n = f_.size();
  auto j = static_cast<std::size_t>(local / h_);
  if (j >= n) j = n - 1;
  return {j, local - static_cast<double>(j) * h_, static_cast<long>(periods)};
}

double PeriodicCubicSpline::value(double y) const {
  const auto [j, s, periods] = locate(y);
  const std::size_t k = (j + 1) % f_.size();
  const double a = (h_ - s) / h_;
  const double b = s / h_;
  return a * f_[j] + b * f_[k] +
         ((a * a * a - a) * m_[j] + (b * b * b - b) * m_[k]) * h_ * h_ / 6.0;
}

double PeriodicCubicSpline::derivative(double y) const {
  const auto [j, s, periods] = locate(y);
  const std::size_t k = (j + 1) % f_.size();
  const double a = (h_ - s) / h_;
  const double b = s / h_;
  return (f_[k] - f_[j]) / h_ +
         (-(3.0 * a * a - 1.0) * m_[j] + (3.0 * b * b - 1.0) * m_[k]) * h_ / 6.0;
}

double PeriodicCubicSpline::segment_integral(std::size_t j, double s) const {
  const std::size_t k = (j + 1) % f_.size();
  const double h = h_;
  // Integral over [0, s] of the segment cubic, written in local coordinate s.
  const double lin = f_[j] * (s - s * s / (2.0 * h)) + f_[k] * s * s / (2.0 * h);
  const double pa = -std::pow(h - s, 4) / (4.0 * h * h * h) + (h - s) * (h - s) / (2.0 * h) +
                    h / 4.0 - h / 2.0;
  const double pb = std::pow(s, 4) / (4.0 * h * h * h) - s * s / (2.0 * h);
  return lin + (m_[j] * pa + m_[k] * pb) * h * h / 6.0;
}

double PeriodicCubicSpline::antiderivative(double y) const {
  const auto [j, s, periods] = locate(y);
  return static_cast<double>(periods) * period_integral_ + cumulative_[j] + segment_integral(j, s);
}

TrigonometricInterpolant::TrigonometricInterpolant(std::span<const double> samples)
    : n_(static_cast<int>(samples.size())) {
  if (n_ < 4 || n_ % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument, "trigonometric interpolant needs even n >= 4");
  }
  const int half = n_ / 2;
  a_.assign(static_cast<std::size_t>(half + 1), 0.0);
  b_.assign(static_cast<std::size_t>(half + 1), 0.0);
  for (int k = 0; k <= half; ++k) {
    double ca = 0.0;
    double cb = 0.0;
    for (int j = 0; j < n_; ++j) {
      // Reduce k j mod n before scaling so the angle stays in [0, 2 pi).
      const double angle = kTwoPi * static_cast<double>((k * j) % n_) / n_;
      ca += samples[static_cast<std::size_t>(j)] * std::cos(angle);
      cb += samples[static_cast<std::size_t>(j)] * std::sin(angle);
    }
    const double w = (k == 0 || k == half) ? 1.0 / n_ : 2.0 / n_;
    a_[static_cast<std::size_t>(k)] = w * ca;
    b_[static_cast<std::size_t>(k)] = (k == 0 || k == half) ? 0.0 : w * cb;
  }
}

double TrigonometricInterpolant::value(double y) const {
  double sum = a_[0];
  for (std::size_t k = 1; k < a_.size(); ++k) {
    const double ky = static_cast<double>(k) * y;
    sum += a_[k] * std::cos(ky) + b_[k] * std::sin(ky);
  }
  return sum;
}

double TrigonometricInterpolant::derivative(double y) const {
  double sum = 0.0;
  for (std::size_t k = 1; k < a_.size(); ++k) {
    const double kd = static_cast<double>(k);
    sum += kd * (-a_[k] * std::sin(kd * y) + b_[k] * std::cos(kd * y));
  }
  return sum;
}

double TrigonometricInterpolant::antiderivative(double y) const {
  double sum = a_[0] * y;
  for (std::size_t k = 1; k < a_.size(); ++k) {
    const double kd = static_cast<double>(k);
    sum += (a_[k] * std::sin(kd * y) - b_[k] * (std::cos(kd * y) - 1.0)) / kd;
  }
  return sum;
}

std::unique_ptr<PeriodicInterpolant> make_interpolant(Resampler kind,
                                                      std::span<const double> samples) {
  switch (kind) {
    case Resampler::Trigonometric:
      return std::make_unique<TrigonometricInterpolant>(samples);
    case Resampler::PeriodicCubicSpline:
      return std::make_unique<PeriodicCubicSpline>(samples);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown resampler");
}

}  // namespace membrane
