#ifndef WETE_MATH_HPP
#define WETE_MATH_HPP

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace wete {

// Inner products are clamped to this range before any exponentiation.
inline constexpr double kInnerProductClamp = 30.0;

inline double clamp_inner(double x) {
  return std::clamp(x, -kInnerProductClamp, kInnerProductClamp);
}

// log(sum_i exp(x_i)), max-shifted. Entries equal to -inf contribute nothing;
// all -inf yields -inf.
inline double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const double m = x.maxCoeff();
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::isfinite(x[i])) s += std::exp(x[i] - m);
  }
  return m + std::log(s);
}

// Overflow-safe log(1 + e^x).
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  return x > 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

// Central difference (f(x+h) - f(x-h)) / 2h for a scalar function applied at
// a single mutable coordinate. The coordinate is restored on exit.
template <typename F>
double central_difference(F&& f, double& coord, double h) {
  const double saved = coord;
  coord = saved + h;
  const double fp = f();
  coord = saved - h;
  const double fm = f();
  coord = saved;
  return (fp - fm) / (2.0 * h);
}

}  // namespace wete

#endif  // WETE_MATH_HPP
