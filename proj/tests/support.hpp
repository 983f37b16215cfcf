// Hand-rolled generators and brute-force oracles shared by the test suites.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "algebroid/chartman.hpp"
#include "algebroid/liealg.hpp"

namespace testsupport {

using algebroid::LieAlgebra;
using algebroid::Mat;
using algebroid::Vec;

class Gen {
 public:
  explicit Gen(unsigned long long seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Vec vec(int n, double r = 1.0) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(-r, r);
    return v;
  }

  // Uniform direction, radius uniform in [0, r].
  Vec ball(int n, double r = 1.0) {
    Vec v(n);
    std::normal_distribution<double> normal;
    for (int i = 0; i < n; ++i) v[i] = normal(rng_);
    if (v.norm() == 0.0) return v;
    return v.normalized() * uniform(0.0, r);
  }

  Mat mat(int rows, int cols, double r = 1.0) {
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = uniform(-r, r);
    return m;
  }

  std::vector<double> doubles(std::size_t n, double r = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(-r, r);
    return v;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Bracket by direct summation over the structure constants.
inline Vec bracket_sum(const LieAlgebra& g, const Vec& x, const Vec& y) {
  const int n = g.dim();
  Vec out = Vec::Zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) out[k] += x[i] * y[j] * g.c(i, j, k);
  return out;
}

inline Vec basis(int n, int i) { return Vec::Unit(n, i); }

// max_{i,j} |A[e_i,e_j] - [Ae_i, Ae_j]|, absolute
inline double aut_defect(const LieAlgebra& g, const Mat& a) {
  const int n = g.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec lhs = a * bracket_sum(g, basis(n, i), basis(n, j));
      const Vec rhs = bracket_sum(g, a.col(i), a.col(j));
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  return worst;
}

inline double der_defect(const LieAlgebra& g, const Mat& d) {
  const int n = g.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec lhs = d * bracket_sum(g, basis(n, i), basis(n, j));
      const Vec rhs = bracket_sum(g, d.col(i), basis(n, j)) + bracket_sum(g, basis(n, i), d.col(j));
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  return worst;
}

// Rank by Gaussian elimination with full pivoting.
inline int gauss_rank(Mat m, double tol = 1e-10) {
  int rank = 0;
  const int rows = static_cast<int>(m.rows()), cols = static_cast<int>(m.cols());
  std::vector<bool> used(cols, false);
  for (int step = 0; step < std::min(rows, cols); ++step) {
    int pr = -1, pc = -1;
    double best = tol;
    for (int r = rank; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        if (!used[c] && std::abs(m(r, c)) > best) {
          best = std::abs(m(r, c));
          pr = r;
          pc = c;
        }
    if (pr < 0) break;
    m.row(pr).swap(m.row(rank));
    for (int r = rank + 1; r < rows; ++r) m.row(r) -= (m(r, pc) / m(rank, pc)) * m.row(rank);
    used[pc] = true;
    ++rank;
  }
  return rank;
}

// Dimension of Der(g): feed every elementary matrix E_pq through the Leibniz defect
// and count the null space of the resulting linear map.
inline int derivation_dim_oracle(const LieAlgebra& g) {
  const int n = g.dim();
  Mat system(n * n * n, n * n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      Mat e = Mat::Zero(n, n);
      e(p, q) = 1.0;
      int row = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const Vec defect = e * bracket_sum(g, basis(n, i), basis(n, j)) - bracket_sum(g, e.col(i), basis(n, j)) -
                             bracket_sum(g, basis(n, i), e.col(j));
          for (int k = 0; k < n; ++k) system(row++, p * n + q) = defect[k];
        }
    }
  return n * n - gauss_rank(system);
}

inline int center_dim_oracle(const LieAlgebra& g) {
  const int n = g.dim();
  Mat stacked(n * n, n);
  for (int x = 0; x < n; ++x) {
    int row = 0;
    for (int y = 0; y < n; ++y) {
      const Vec b = bracket_sum(g, basis(n, x), basis(n, y));
      for (int k = 0; k < n; ++k) stacked(row++, x) = b[k];
    }
  }
  return n - gauss_rank(stacked);
}

// Smooth column field: each component a sum of two cosines of random wavevectors,
// evaluated in each chart's own coordinates.
struct TrigField {
  int rows = 0;
  std::vector<Vec> amp, phase;
  std::vector<Mat> wave;  // rows x base_dim per term

  TrigField(int rows_, int base_dim, Gen& gen, double scale = 0.5) : rows(rows_) {
    for (int t = 0; t < 2; ++t) {
      amp.push_back(gen.vec(rows, scale));
      phase.push_back(gen.vec(rows, 3.14159));
      wave.push_back(gen.mat(rows, base_dim, 1.5));
    }
  }

  Vec operator()(const Vec& p) const {
    Vec v = Vec::Zero(rows);
    for (std::size_t t = 0; t < amp.size(); ++t)
      for (int i = 0; i < rows; ++i) v[i] += amp[t][i] * std::cos(wave[t].row(i).dot(p) + phase[t][i]);
    return v;
  }

  algebroid::Field sample(const algebroid::ChartedManifold& m) const {
    return algebroid::sample_field(m, rows, 1, [&](int, const Vec& p) -> Mat { return (*this)(p); });
  }
};

inline double max_block(const algebroid::Field& f) {
  double worst = 0.0;
  for (int c = 0; c < f.chart_count(); ++c)
    for (double v : f.chart_data(c)) worst = std::max(worst, std::abs(v));
  return worst;
}

inline double max_diff(const algebroid::Field& a, const algebroid::Field& b) {
  double worst = 0.0;
  for (int c = 0; c < a.chart_count(); ++c)
    for (std::size_t i = 0; i < a.chart_data(c).size(); ++i)
      worst = std::max(worst, std::abs(a.chart_data(c)[i] - b.chart_data(c)[i]));
  return worst;
}

inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace testsupport
