// Lie connections on a trivialized bundle, stored as per-chart connection
// forms in the chart's local g-coordinates: nabla_i = d_i + omega_i.
//
// Local forms of two charts are related by the gauge law
//   omega_b(d_a,j) = phi omega_a,j phi^{-1} - (d_a,j phi) phi^{-1},  phi = phi_ab,
// re-expressed in beta axes through the overlap Jacobian.
#pragma once

#include <utility>
#include <vector>

#include "algebroid/lab.hpp"

namespace algebroid {

struct ConnectionForm {
  Trivialization bundle;
  /// omega[i]: dim(g) x dim(g) derivation per node, the form evaluated on d_i.
  std::vector<Field> omega;
};

ConnectionForm zero_connection(const Trivialization& t);

/// Samples omega_i(chart, point) for every axis.
template <typename Fn>
ConnectionForm sample_connection(const Trivialization& t, Fn&& fn) {
  ConnectionForm c{t, {}};
  const int n = t.algebra.dim();
  for (int i = 0; i < t.manifold.dim(); ++i)
    c.omega.push_back(sample_field(t.manifold, n, n, [&](int chart, const Vec& p) { return fn(chart, p, i); }));
  return c;
}

/// Throws InputError unless omega has one correctly shaped field per axis.
void check_connection_shape(const ConnectionForm& c);

/// omega at an arbitrary point of a chart (multilinear interpolation), contracted with v.
Mat omega_at(const ConnectionForm& c, int chart, const Vec& p, const Vec& v);

/// (nabla_X u)(x) = sum_i X^i (d_i u + omega_i u), finite differences for d_i.
Field apply_connection(const ConnectionForm& c, const Field& u, const Field& x);

/// Pointwise derivation residual (relative, against ALG_TOL) and gauge residual on
/// every overlap node (against GAUGE_TOL).
ValidationReport validate_connection(const ConnectionForm& c, const Tolerances& tol = {});

/// Ambient (fiber-coordinate) form F omega_i F^{-1} - (d_i F) F^{-1} of one chart.
std::vector<Field> ambient_form(const ConnectionForm& c);

/// Unordered axis pairs (i < j) in lexicographic order.
std::vector<std::pair<int, int>> axis_pairs(int dim);

struct CurvatureData {
  std::vector<std::pair<int, int>> pairs;
  /// R_ij per unordered pair, dim(g) x dim(g) blocks.
  std::vector<Field> r;
  /// Minimum-norm Omega_ij (dim(g) x 1) and the least-squares residual (1 x 1), filled by accordance().
  std::vector<Field> omega2;
  std::vector<Field> residual;

  /// R_ij for any ordered pair, using antisymmetry.
  Mat r_at(int i, int j, int chart, int node) const;
  /// Omega_ij for any ordered pair.
  Vec omega2_at(int i, int j, int chart, int node) const;
};

/// R_ij = d_i omega_j - d_j omega_i + [omega_i, omega_j] with finite differences.
CurvatureData curvature(const ConnectionForm& c);

/// Largest ||R_b - phi R_a phi^{-1}|| over overlap nodes, Jacobian-transformed.
double curvature_gauge_residual(const ConnectionForm& c, const CurvatureData& r);

struct AccordanceResult {
  bool passed = false;
  double max_residual = 0.0;
  double max_curvature = 0.0;
  double max_omega2 = 0.0;
  double mean_omega2 = 0.0;
  CurvatureData data;
};

/// Least-squares R_ij ~ ad(Omega_ij) nodewise; passes iff the residual is <= tol.acc.
AccordanceResult accordance(const ConnectionForm& c, const Tolerances& tol = {});

/// Cyclic covariant-derivative expression of Omega evaluated on smooth test vector
/// fields, max over nodes of ||ad(.)||. Zero for one-dimensional bases.
double bianchi_residual(const ConnectionForm& c, const AccordanceResult& acc, unsigned long long seed = 7);

/// Fiber-valued one-form: l[i] holds l(d_i) as dim(g) x 1 blocks.
using FiberOneForm = std::vector<Field>;

/// Largest covariance defect of l across overlaps.
double one_form_gauge_residual(const Trivialization& t, const FiberOneForm& l);

/// omega'_i = omega_i + ad(l_i). Throws InputError if l is not covariant within tol.gauge.
ConnectionForm shift_by_inner(const ConnectionForm& c, const FiberOneForm& l, const Tolerances& tol = {});

/// Glues per-chart local one-forms m_gamma into a covariant one through a partition
/// of unity: l_a = sum_gamma h_gamma * (m_gamma carried to chart a).
FiberOneForm glue_one_form(const Trivialization& t, const PartitionOfUnity& h, const FiberOneForm& local);

/// The same connection expressed against different frames over the same base and
/// algebra. The gauge change G = F^{-1} F' must be automorphism valued.
ConnectionForm reexpress(const ConnectionForm& c, const Trivialization& target);

struct CouplingEquivalence {
  bool passed = false;
  double max_residual = 0.0;
  /// Recovered l (minimum norm), in the frames of the first argument.
  FiberOneForm l;
};

/// omega' - omega must lie in the ad-span nodewise. The second connection is first
/// re-expressed in the first one's frames. Mismatched algebra or base -> InputError.
CouplingEquivalence coupling_equivalent(const ConnectionForm& c, const ConnectionForm& c2, const Tolerances& tol = {});

/// omega'_a,i(x) = sum_j J_ji omega_A(a),j(f(x)) over pullback_lab(t, f).
ConnectionForm pullback_connection(const ConnectionForm& c, const SmoothMapSpec& f);

/// Orthogonal projection onto Der(g) given an orthonormal basis of it.
Mat project_onto(const std::vector<Mat>& basis, const Mat& d);

}  // namespace algebroid
