// Lie algebra bundles as per-chart frame fields over a charted manifold.
//
// A frame F_a(x) maps g-coordinates into the bundle's fiber coordinates. The
// local g-coordinates of two charts are related by the transition
// phi_ab(x) = F_b(x)^{-1} F_a(x), s_b = phi_ab s_a, which must be an
// automorphism of g at every overlap node. Frames are the primary data.
#pragma once

#include <vector>

#include "algebroid/chartman.hpp"
#include "algebroid/liealg.hpp"

namespace algebroid {

struct Trivialization {
  LieAlgebra algebra;
  ChartedManifold manifold;
  /// dim(g) x dim(g) block per node.
  Field frames;
};

/// Same dimension and structure constants.
bool same_algebra(const LieAlgebra& a, const LieAlgebra& b);
/// Same chart boxes, resolutions and overlap count.
bool same_base(const ChartedManifold& a, const ChartedManifold& b);

/// Identity frames on every chart.
Trivialization trivial_bundle(const LieAlgebra& g, const ChartedManifold& m);

/// phi_ab sampled on the alpha-grid nodes of one overlap record.
struct OverlapTransition {
  int overlap = -1;
  std::vector<Mat> values;  // aligned with manifold.overlap_nodes(overlap)
};

/// Frame of chart `chart` at a point (multilinear interpolation off-grid).
Mat frame_at(const Trivialization& t, int chart, const Vec& p);

/// Transition matrix phi_ab = F_b^{-1} F_a at one overlap node.
Mat transition_at(const Trivialization& t, int overlap, const OverlapNode& node);

std::vector<OverlapTransition> transitions(const Trivialization& t);

enum class LogSide { Left, Right };

/// phi^{-1} d_axis phi (Left) or (d_axis phi) phi^{-1} (Right) at region node k of
/// one overlap record, differentiating matrix logarithms of the ratios to nearby
/// region nodes: central inside the region, second-order one-sided at its faces.
/// Left derivatives of phi^{-1} and right derivatives of phi agree up to sign.
Mat transition_log_derivative(const ChartedManifold& m, const OverlapTransition& tr, int k, int axis, LogSide side);

/// Pointwise automorphism and cocycle checks on every overlap node.
ValidationReport validate_lab(const Trivialization& t, const Tolerances& tol = {});

struct VerdictCounts {
  int inner = 0;
  int outer = 0;
  int undecided = 0;
};

struct DeltaEntry {
  /// Overlap id for continuity reports, chart id for equivalence reports.
  int id = -1;
  double max_inner_residual = 0.0;
  /// Largest automorphism defect of the compared maps (equivalence reports only).
  double max_aut_residual = 0.0;
  bool pointwise_aut = true;
  VerdictCounts counts;
};

struct DeltaReport {
  bool passed = true;
  bool undecided = false;
  std::vector<DeltaEntry> entries;

  VerdictCounts totals() const;
};

/// Outer class of phi_ab constant on every (connected) overlap record, tested
/// nodewise as is_inner(phi_ab(x) phi_ab(x0)^{-1}) against the first region node x0.
DeltaReport check_delta_continuity(const Trivialization& t, const Tolerances& tol = {});

/// F'_a^{-1} F_a must be automorphism valued and Aut^delta-continuous on every chart;
/// continuity is tested on the row-major spanning tree of grid edges.
DeltaReport trivializations_equivalent(const Trivialization& t, const Trivialization& t2, const Tolerances& tol = {});

/// Chart-compatible affine map from `source` into the target atlas: source chart a
/// lands in target chart target_chart[a] through maps[a].
struct SmoothMapSpec {
  ChartedManifold source;
  std::vector<int> target_chart;
  std::vector<AffineMap> maps;
};

Trivialization pullback_lab(const Trivialization& t, const SmoothMapSpec& f);

}  // namespace algebroid
