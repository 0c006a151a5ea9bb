#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace spinqec {

struct FitResult {
  Eigen::Vector4d coeffs = Eigen::Vector4d::Zero();  // a0 + a1 t + a2 t^2 + a3 t^3
  Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();
  double relative_fit_error = 0;  // ||residual||_2 / ||f||_2
  int n_points = 0;
};

// Ordinary least squares on the cubic monomial basis; covariance from the
// residual variance. Needs at least 5 distinct abscissae.
FitResult fit_cubic(const std::vector<std::pair<double, double>>& points);

double eval_cubic(const Eigen::Vector4d& c, double t);

struct RatioResult {
  double value = 0;
  double sigma = 0;      // first-order propagation from the two fit covariances
  bool defined = false;  // false when the denominator a1 is consistent with 0
};

// a1(fa) / a1(fb); undefined unless |a1(fb)| > 10 * sigma(a1(fb)).
RatioResult first_order_ratio(const FitResult& fa, const FitResult& fb);

// Least squares through the origin: f_exp ~ A * f_ideal on a shared t grid.
// Returns (A, sigma_A).
std::pair<double, double> scale_fit(const std::vector<std::pair<double, double>>& exp_points,
                                    const std::vector<std::pair<double, double>>& ideal_points);

// Bisection root of fa - fb on [t_lo, t_hi] to 1e-6 s; the bracket must
// straddle a sign change.
double crossover_time(const FitResult& fa, const FitResult& fb, double t_lo, double t_hi);

}  // namespace spinqec
