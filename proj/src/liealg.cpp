#include "algebroid/liealg.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>

#include "algebroid/kernels.hpp"
#include "algebroid/matfun.hpp"

namespace algebroid {

LieAlgebra::LieAlgebra(std::string name, int dim, std::vector<double> constants)
    : name_(std::move(name)), dim_(dim), c_(std::move(constants)) {
  if (dim_ < 1 || dim_ > kMaxAlgebraDim) throw InputError("algebra dimension must lie in [1, 16]");
  if (c_.size() != static_cast<std::size_t>(dim_) * dim_ * dim_)
    throw InputError("structure constant tensor has " + std::to_string(c_.size()) + " entries, expected dim^3");
  ad_basis_.assign(dim_, Mat::Zero(dim_, dim_));
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k) ad_basis_[i](k, j) = c(i, j, k);
}

AlgebraValidation validate_algebra(const LieAlgebra& g, double tol) {
  const int n = g.dim();
  AlgebraValidation r;
  r.worst_index = {};
  double worst_anti = -1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double res = std::abs(g.c(i, j, k) + g.c(j, i, k));
        if (res > worst_anti) {
          worst_anti = res;
          if (res > tol) r.worst_index = {i, j, k};
        }
      }
  r.antisymmetry_residual = std::max(0.0, worst_anti);

  double worst_jac = 0.0;
  std::vector<int> jac_index;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int m = 0; m < n; ++m)
            s += g.c(i, j, m) * g.c(m, k, l) + g.c(k, i, m) * g.c(m, j, l) + g.c(j, k, m) * g.c(m, i, l);
          if (std::abs(s) > worst_jac) {
            worst_jac = std::abs(s);
            jac_index = {i, j, k, l};
          }
        }
  r.jacobi_residual = worst_jac;
  if (r.worst_index.empty() && worst_jac > tol) r.worst_index = jac_index;
  r.passed = r.antisymmetry_residual <= tol && r.jacobi_residual <= tol;
  return r;
}

namespace {

void check_len(const LieAlgebra& g, const Vec& x) {
  if (x.size() != g.dim()) throw InputError("fiber vector length does not match algebra dimension");
}

void check_square(const LieAlgebra& g, const Mat& m) {
  if (m.rows() != g.dim() || m.cols() != g.dim()) throw InputError("matrix shape does not match algebra dimension");
}

// Linear map vec(D) -> stacked Leibniz defects over all basis pairs; column index a + b*n for D(a, b).
Mat leibniz_system(const LieAlgebra& g) {
  const int n = g.dim();
  Mat k = Mat::Zero(static_cast<Eigen::Index>(n) * n * n, static_cast<Eigen::Index>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int out = 0; out < n; ++out) {
        const auto row = (static_cast<Eigen::Index>(i) * n + j) * n + out;
        // D[e_i, e_j]
        for (int m = 0; m < n; ++m) k(row, out + m * n) += g.c(i, j, m);
        // -[D e_i, e_j]
        for (int m = 0; m < n; ++m) k(row, m + i * n) -= g.c(m, j, out);
        // -[e_i, D e_j]
        for (int m = 0; m < n; ++m) k(row, m + j * n) -= g.c(i, m, out);
      }
  return k;
}

}  // namespace

Vec bracket(const LieAlgebra& g, const Vec& x, const Vec& y) {
  check_len(g, x);
  check_len(g, y);
  const int n = g.dim();
  Vec out = Vec::Zero(n);
  const auto& c = g.constants();
  for (int i = 0; i < n; ++i) {
    if (x[i] == 0.0) continue;
    for (int j = 0; j < n; ++j) {
      const double coef = x[i] * y[j];
      if (coef == 0.0) continue;
      kernels::axpy(coef, std::span<const double>(c.data() + (static_cast<std::size_t>(i) * n + j) * n, n),
                    std::span<double>(out.data(), n));
    }
  }
  return out;
}

Mat ad(const LieAlgebra& g, const Vec& x) {
  check_len(g, x);
  const int n = g.dim();
  Mat out = Mat::Zero(n, n);
  const std::size_t len = static_cast<std::size_t>(n) * n;
  for (int i = 0; i < n; ++i) {
    if (x[i] == 0.0) continue;
    kernels::axpy(x[i], std::span<const double>(g.ad_basis(i).data(), len), std::span<double>(out.data(), len));
  }
  return out;
}

std::vector<Vec> center_basis(const LieAlgebra& g, double tol) {
  const int n = g.dim();
  Mat stacked(static_cast<Eigen::Index>(n) * n, n);
  for (int i = 0; i < n; ++i) stacked.col(i) = g.ad_basis(i).reshaped();
  Eigen::JacobiSVD<Mat> svd(stacked, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double thresh = tol * std::max(1.0, s.size() ? s[0] : 0.0);
  std::vector<Vec> basis;
  for (int i = 0; i < n; ++i) {
    const double sv = i < s.size() ? s[i] : 0.0;
    if (sv <= thresh) basis.push_back(svd.matrixV().col(i));
  }
  return basis;
}

std::vector<Mat> derivations_basis(const LieAlgebra& g, double tol) {
  const int n = g.dim();
  const Mat k = leibniz_system(g);
  Eigen::BDCSVD<Mat> svd(k, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double thresh = tol * std::max(1.0, s.size() ? s[0] : 0.0);
  std::vector<Mat> basis;
  for (int i = 0; i < n * n; ++i) {
    const double sv = i < s.size() ? s[i] : 0.0;
    if (sv <= thresh) basis.push_back(svd.matrixV().col(i).reshaped(n, n));
  }
  return basis;
}

double derivation_residual(const LieAlgebra& g, const Mat& d) {
  check_square(g, d);
  const int n = g.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec ei = Vec::Unit(n, i), ej = Vec::Unit(n, j);
      const Vec defect = d * bracket(g, ei, ej) - bracket(g, d.col(i), ej) - bracket(g, ei, d.col(j));
      worst = std::max(worst, defect.norm());
    }
  return worst;
}

double automorphism_residual(const LieAlgebra& g, const Mat& a) {
  check_square(g, a);
  const int n = g.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Vec defect = a * bracket(g, Vec::Unit(n, i), Vec::Unit(n, j)) - bracket(g, a.col(i), a.col(j));
      worst = std::max(worst, defect.norm());
    }
  return worst;
}

bool is_derivation(const LieAlgebra& g, const Mat& d, double tol) {
  return derivation_residual(g, d) <= tol * std::max(1.0, d.norm());
}

bool is_automorphism(const LieAlgebra& g, const Mat& a, double tol) {
  const double scale = std::max(1.0, a.squaredNorm());
  if (automorphism_residual(g, a) > tol * scale) return false;
  return std::abs(a.determinant()) > tol;
}

Mat exp_derivation(const LieAlgebra& g, const Mat& d, double tol) {
  check_square(g, d);
  if (!is_derivation(g, d, tol)) throw InputError("exp_derivation: input is not a derivation");
  return matfun::expm(d);
}

std::optional<Mat> principal_log(const Mat& a, double tol) {
  if (a.rows() != a.cols()) throw InputError("principal_log: matrix is not square");
  return matfun::logm(a, 100.0 * tol);
}

InnerProjector::InnerProjector(const LieAlgebra& g, double tol) : dim_(g.dim()) {
  const int n = g.dim();
  basis_.resize(static_cast<Eigen::Index>(n) * n, n);
  for (int i = 0; i < n; ++i) basis_.col(i) = g.ad_basis(i).reshaped();
  Eigen::JacobiSVD<Mat> svd(basis_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double thresh = tol * std::max(1.0, s.size() ? s[0] : 0.0);
  Vec inv = Vec::Zero(s.size());
  rank_ = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > thresh) {
      inv[i] = 1.0 / s[i];
      ++rank_;
    }
  pinv_ = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

InnerProjector::Projection InnerProjector::project(const Mat& d) const {
  const Vec flat = d.reshaped();
  Vec x = pinv_ * flat;
  const double residual = (basis_ * x - flat).norm();
  return {std::move(x), residual};
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Inner:
      return "inner";
    case Verdict::Outer:
      return "outer";
    case Verdict::Undecided:
      return "undecided";
  }
  return "undecided";
}

namespace {

double product_defect(const LieAlgebra& g, const Mat& a, const std::vector<double>& params, int k) {
  const int n = g.dim();
  Mat prod = Mat::Identity(n, n);
  for (int f = 0; f < k; ++f) {
    const Vec x = Eigen::Map<const Vec>(params.data() + static_cast<std::size_t>(f) * n, n);
    prod = prod * matfun::expm(ad(g, x));
  }
  return (a - prod).norm();
}

// Gradient-free coordinate descent over k factors with random restarts.
InnerVerdict factor_search(const LieAlgebra& g, const Mat& a, const InnerOptions& opt) {
  const int n = g.dim();
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> uni(-M_PI, M_PI);
  InnerVerdict best;
  best.verdict = Verdict::Undecided;
  best.residual = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= opt.max_factors; ++k) {
    for (int restart = 0; restart < opt.restarts; ++restart) {
      std::vector<double> p(static_cast<std::size_t>(k) * n);
      for (auto& v : p) v = restart == 0 ? 0.0 : uni(rng);
      double f = product_defect(g, a, p, k);
      double step = 0.5;
      for (int sweep = 0; sweep < 400 && step > 1e-12 && f > opt.inner_tol; ++sweep) {
        bool improved = false;
        for (std::size_t c = 0; c < p.size(); ++c) {
          for (double dir : {1.0, -1.0}) {
            const double saved = p[c];
            p[c] = saved + dir * step;
            const double trial = product_defect(g, a, p, k);
            if (trial < f) {
              f = trial;
              improved = true;
              break;
            }
            p[c] = saved;
          }
        }
        if (!improved) step *= 0.5;
      }
      if (f < best.residual) {
        best.residual = f;
        best.factors.clear();
        for (int fi = 0; fi < k; ++fi)
          best.factors.push_back(Eigen::Map<const Vec>(p.data() + static_cast<std::size_t>(fi) * n, n));
      }
      if (best.residual <= opt.inner_tol) {
        best.verdict = Verdict::Inner;
        return best;
      }
    }
  }
  return best;
}

}  // namespace

InnerVerdict is_inner(const LieAlgebra& g, const Mat& a, const InnerOptions& opt) {
  return is_inner(g, InnerProjector(g, opt.alg_tol), a, opt);
}

InnerVerdict is_inner(const LieAlgebra& g, const InnerProjector& proj, const Mat& a, const InnerOptions& opt) {
  check_square(g, a);
  if (!is_automorphism(g, a, opt.aut_tol)) throw InputError("is_inner: input is not an automorphism");
  const int n = g.dim();
  const Mat id = Mat::Identity(n, n);

  InnerVerdict v;
  if ((a - id).norm() <= opt.inner_tol) {
    v.verdict = Verdict::Inner;
    v.witness = Vec::Zero(n);
    v.residual = (a - id).norm();
    return v;
  }

  if (auto log = principal_log(a, opt.alg_tol)) {
    auto p = proj.project(*log);
    v.residual = p.residual;
    if (p.residual <= opt.inner_tol) {
      v.verdict = Verdict::Inner;
      v.witness = std::move(p.x);
      return v;
    }
    if (is_derivation(g, *log, std::max(opt.alg_tol, opt.aut_tol))) {
      v.verdict = Verdict::Outer;
      return v;
    }
  } else if (proj.rank() == 0) {
    // ad vanishes identically, so Inn(g) = {id}.
    v.verdict = Verdict::Outer;
    v.residual = (a - id).norm();
    return v;
  }

  InnerVerdict searched = factor_search(g, a, opt);
  if (searched.verdict != Verdict::Inner && v.residual > 0.0) searched.residual = std::min(searched.residual, v.residual);
  return searched;
}

InnerVerdict outer_equal(const LieAlgebra& g, const Mat& a, const Mat& b, const InnerOptions& opt) {
  check_square(g, a);
  check_square(g, b);
  const Mat ratio = a * b.partialPivLu().inverse();
  return is_inner(g, ratio, opt);
}

}  // namespace algebroid
