#include "fd.h"

#include <algorithm>
#include <cmath>

namespace lcgln::testing {

Eigen::VectorXd CentralDifference(const std::function<double(const Eigen::VectorXd&)>& f,
                                  Eigen::VectorXd x, double step) {
  Eigen::VectorXd grad(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double up = f(x);
    x[i] = saved - step;
    const double down = f(x);
    x[i] = saved;
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

double RelativeError(double a, double b, double floor) {
  const double diff = std::abs(a - b);
  if (diff <= floor) return 0.0;
  return diff / std::max(std::abs(a), std::abs(b));
}

double MaxRelativeError(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                        double floor) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    worst = std::max(worst, RelativeError(a[i], b[i], floor));
  }
  return worst;
}

}  // namespace lcgln::testing
