#include "algebroid/matfun.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>

namespace algebroid::matfun {
namespace {

double norm1(const Mat& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

// Higham (2005) coefficients for the [13/13] Padé approximant.
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0, 129060195264000.0,
    10559470521600.0,    670442572800.0,      33522128640.0,      1323241920.0,       40840800.0,
    960960.0,            16380.0,             182.0,              1.0};
constexpr double kTheta13 = 5.371920351148152;

}  // namespace

Mat expm(const Mat& a) {
  const auto n = a.rows();
  if (n == 0) return a;
  const double nrm = norm1(a);
  if (nrm == 0.0) return Mat::Identity(n, n);
  int s = 0;
  if (nrm > kTheta13) s = static_cast<int>(std::ceil(std::log2(nrm / kTheta13)));
  const Mat as = a / std::ldexp(1.0, s);

  const Mat id = Mat::Identity(n, n);
  const Mat a2 = as * as;
  const Mat a4 = a2 * a2;
  const Mat a6 = a4 * a2;
  const auto& b = kPade13;
  const Mat u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
  const Mat u = as * u_inner;
  const Mat v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  Mat r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < s; ++k) r = r * r;
  return r;
}

std::optional<Mat> sqrtm(const Mat& a) {
  const auto n = a.rows();
  const Mat id = Mat::Identity(n, n);
  Mat m = a;
  Mat y = a;
  for (int it = 0; it < 100; ++it) {
    Eigen::PartialPivLU<Mat> lu(m);
    if (!std::isfinite(lu.determinant()) || std::abs(lu.determinant()) < 1e-300) return std::nullopt;
    const Mat m_inv = lu.inverse();
    y = y * (id + m_inv) * 0.5;
    m = 0.5 * (id + 0.5 * (m + m_inv));
    if ((m - id).norm() <= 1e-15 * std::sqrt(static_cast<double>(n))) return y;
  }
  return std::nullopt;
}

bool has_nonpositive_real_eigenvalue(const Mat& a, double tol) {
  Eigen::EigenSolver<Mat> es(a, false);
  if (es.info() != Eigen::Success) return true;
  for (const auto& lambda : es.eigenvalues()) {
    const double scale = std::max(1.0, std::abs(lambda));
    if (std::abs(lambda.imag()) <= tol * scale && lambda.real() <= tol * scale) return true;
  }
  return false;
}

std::optional<Mat> logm(const Mat& a, double check_tol) {
  const auto n = a.rows();
  if (n == 0) return a;
  if (has_nonpositive_real_eigenvalue(a)) return std::nullopt;
  const Mat id = Mat::Identity(n, n);

  Mat x = a;
  int k = 0;
  while ((x - id).norm() > 0.25) {
    if (k >= 60) return std::nullopt;
    auto root = sqrtm(x);
    if (!root) return std::nullopt;
    x = *root;
    ++k;
  }
  // log X = 2 atanh(Y), Y = (X - I)(X + I)^{-1}
  const Mat y = (x + id).partialPivLu().solve(x - id).eval();
  const Mat y2 = y * y;
  Mat term = y;
  Mat sum = y;
  for (int m = 1; m < 200; ++m) {
    term = term * y2;
    const Mat contrib = term / static_cast<double>(2 * m + 1);
    sum += contrib;
    if (contrib.norm() <= 1e-18 * std::max(1.0, sum.norm())) break;
  }
  Mat result = std::ldexp(2.0, k) * sum;
  if ((expm(result) - a).norm() > check_tol * std::max(1.0, a.norm())) return std::nullopt;
  return result;
}

}  // namespace algebroid::matfun
