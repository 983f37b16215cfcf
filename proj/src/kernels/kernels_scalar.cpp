#include "algebroid/kernels.hpp"

#include <cmath>

namespace algebroid::kernels::scalar {

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void combine3(double a, const double* x, double b, const double* y, double c, const double* z, double* out,
              std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i] + c * z[i];
}

double max_abs_diff(const double* x, const double* y, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(x[i] - y[i]));
  return m;
}

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

}  // namespace algebroid::kernels::scalar
