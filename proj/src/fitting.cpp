#include "spinqec/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace spinqec {

using Eigen::MatrixXd;
using Eigen::VectorXd;

FitResult fit_cubic(const std::vector<std::pair<double, double>>& points) {
  const int n = static_cast<int>(points.size());
  std::set<double> distinct;
  for (const auto& [t, f] : points) distinct.insert(t);
  if (n < 5 || distinct.size() < 5)
    throw std::invalid_argument("fit_cubic: need at least 5 distinct t values");

  MatrixXd x(n, 4);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const double t = points[static_cast<size_t>(i)].first;
    x(i, 0) = 1.0;
    x(i, 1) = t;
    x(i, 2) = t * t;
    x(i, 3) = t * t * t;
    y(i) = points[static_cast<size_t>(i)].second;
  }

  FitResult r;
  r.n_points = n;
  r.coeffs = x.colPivHouseholderQr().solve(y);
  const VectorXd resid = y - x * r.coeffs;
  const double ynorm = y.norm();
  r.relative_fit_error = ynorm > 0 ? resid.norm() / ynorm : resid.norm();
  const double dof = std::max(1, n - 4);
  const double s2 = resid.squaredNorm() / dof;
  r.covariance = s2 * (x.transpose() * x).inverse();
  return r;
}

double eval_cubic(const Eigen::Vector4d& c, double t) {
  return ((c(3) * t + c(2)) * t + c(1)) * t + c(0);
}

RatioResult first_order_ratio(const FitResult& fa, const FitResult& fb) {
  RatioResult r;
  const double b = fb.coeffs(1);
  const double sb = std::sqrt(std::max(0.0, fb.covariance(1, 1)));
  if (!(std::abs(b) > 10.0 * sb)) return r;  // denominator consistent with zero
  const double a = fa.coeffs(1);
  const double sa = std::sqrt(std::max(0.0, fa.covariance(1, 1)));
  r.value = a / b;
  r.sigma = std::abs(r.value) *
            std::sqrt((a != 0 ? (sa / a) * (sa / a) : 0.0) + (sb / b) * (sb / b));
  r.defined = true;
  return r;
}

std::pair<double, double> scale_fit(const std::vector<std::pair<double, double>>& exp_points,
                                    const std::vector<std::pair<double, double>>& ideal_points) {
  const size_t n = exp_points.size();
  if (n == 0 || n != ideal_points.size())
    throw std::invalid_argument("scale_fit: point sets must be non-empty and equally sized");
  for (size_t i = 0; i < n; ++i)
    if (std::abs(exp_points[i].first - ideal_points[i].first) > 1e-12)
      throw std::invalid_argument("scale_fit: t grids do not match");

  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < n; ++i) {
    sxy += exp_points[i].second * ideal_points[i].second;
    sxx += ideal_points[i].second * ideal_points[i].second;
  }
  if (sxx == 0) throw std::invalid_argument("scale_fit: ideal values are all zero");
  const double a = sxy / sxx;
  double ssr = 0;
  for (size_t i = 0; i < n; ++i) {
    const double r = exp_points[i].second - a * ideal_points[i].second;
    ssr += r * r;
  }
  const double dof = std::max<size_t>(1, n - 1);
  return {a, std::sqrt(ssr / dof / sxx)};
}

double crossover_time(const FitResult& fa, const FitResult& fb, double t_lo, double t_hi) {
  if (!(t_lo < t_hi)) throw std::invalid_argument("crossover_time: bad bracket");
  auto diff = [&](double t) { return eval_cubic(fa.coeffs, t) - eval_cubic(fb.coeffs, t); };
  double flo = diff(t_lo), fhi = diff(t_hi);
  if (flo == 0) return t_lo;
  if (fhi == 0) return t_hi;
  if ((flo < 0) == (fhi < 0))
    throw std::invalid_argument("crossover_time: no sign change on the bracket");
  double lo = t_lo, hi = t_hi;
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    const double fm = diff(mid);
    if (fm == 0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace spinqec
