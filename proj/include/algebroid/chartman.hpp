// Discretized manifolds: finite atlases of gridded coordinate boxes glued by
// affine overlap maps, fields sampled on the grids, and finite-difference
// calculus on those fields.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "algebroid/common.hpp"

namespace algebroid {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct AffineMap {
  Mat matrix;
  Vec offset;

  Vec apply(const Vec& p) const { return matrix * p + offset; }
  AffineMap inverse() const;
  AffineMap then(const AffineMap& next) const;  // next ∘ this
};

struct Chart {
  std::vector<Interval> box;
  std::vector<int> resolution;
  std::vector<int> center;

  int dim() const { return static_cast<int>(box.size()); }
  int node_count() const;
  double spacing(int axis) const { return (box[axis].hi - box[axis].lo) / (resolution[axis] - 1); }
  /// Row-major flattening, axis 0 slowest.
  int flat_index(std::span<const int> index) const;
  std::vector<int> multi_index(int flat) const;
  Vec node_point(int flat) const;
  Vec center_point() const;
  int center_flat() const { return flat_index(center); }
  bool contains(const Vec& p, double tol = 1e-9) const;
};

struct Overlap {
  int alpha = 0;
  int beta = 0;
  /// Sub-box in alpha coordinates.
  std::vector<Interval> region;
  /// alpha coordinates -> beta coordinates.
  AffineMap map;

  bool contains(const Vec& p_alpha, double tol = 1e-9) const;
};

/// Alpha-grid node inside an overlap region and its image in the beta chart.
struct OverlapNode {
  int alpha_node = -1;
  /// Beta-grid node coinciding with the image, or -1 when the image falls between nodes.
  int beta_node = -1;
  Vec beta_point;
};

struct ManifoldSpec {
  std::string name;
  int dim = 1;
  std::vector<Chart> charts;
  std::vector<Overlap> overlaps;
};

/// A validated atlas. Only build_manifold() produces instances.
class ChartedManifold {
 public:
  ChartedManifold() = default;

  const std::string& name() const { return spec_.name; }
  int dim() const { return spec_.dim; }
  int chart_count() const { return static_cast<int>(spec_.charts.size()); }
  const Chart& chart(int id) const { return spec_.charts.at(id); }
  const std::vector<Chart>& charts() const { return spec_.charts; }
  const std::vector<Overlap>& overlaps() const { return spec_.overlaps; }
  const Overlap& overlap(int id) const { return spec_.overlaps.at(id); }
  /// Nodes of the overlap's alpha chart lying in its region, row-major order.
  const std::vector<OverlapNode>& overlap_nodes(int id) const { return overlap_nodes_.at(id); }
  /// Id of the overlap record (beta, alpha) that inverts record `id`.
  int reverse_overlap(int id) const { return reverse_.at(id); }
  const ManifoldSpec& spec() const { return spec_; }

  /// Overlaps whose alpha chart is `chart` and whose region contains `p`.
  std::vector<int> overlaps_containing(int chart, const Vec& p, double tol = 1e-9) const;

 private:
  friend ChartedManifold build_manifold(ManifoldSpec spec);
  ManifoldSpec spec_;
  std::vector<std::vector<OverlapNode>> overlap_nodes_;
  std::vector<int> reverse_;
};

/// Validates a spec and returns the manifold. Throws InputError naming the failing overlap.
ChartedManifold build_manifold(ManifoldSpec spec);

/// Named fixtures: interval1, circle2, disk2d, cyl2, circle4. `resolution` is the node count
/// per axis along the chart boxes; circle-type charts need (resolution - 1) divisible by 4.
ChartedManifold fixture_manifold(const std::string& name, int resolution = 33);
std::vector<std::string> manifold_fixture_names();

// ---------------------------------------------------------------------------
// Fields

/// Per-chart grid of rows x cols blocks (scalar 1x1, fiber n x 1, frame n x n,
/// tangent d x 1). Blocks are stored column-major and contiguously per chart.
class Field {
 public:
  Field() = default;
  Field(const ChartedManifold& m, int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int block_size() const { return rows_ * cols_; }
  int chart_count() const { return static_cast<int>(data_.size()); }
  int node_count(int chart) const { return static_cast<int>(data_[chart].size()) / block_size(); }

  std::span<double> block(int chart, int node) {
    return {data_[chart].data() + static_cast<std::size_t>(node) * block_size(), static_cast<std::size_t>(block_size())};
  }
  std::span<const double> block(int chart, int node) const {
    return {data_[chart].data() + static_cast<std::size_t>(node) * block_size(), static_cast<std::size_t>(block_size())};
  }
  Eigen::Map<Mat> mat(int chart, int node) { return {block(chart, node).data(), rows_, cols_}; }
  Eigen::Map<const Mat> mat(int chart, int node) const { return {block(chart, node).data(), rows_, cols_}; }
  Eigen::Map<Vec> vec(int chart, int node) { return {block(chart, node).data(), block_size()}; }
  Eigen::Map<const Vec> vec(int chart, int node) const { return {block(chart, node).data(), block_size()}; }
  double scalar(int chart, int node) const { return data_[chart][node]; }

  std::vector<double>& chart_data(int chart) { return data_[chart]; }
  const std::vector<double>& chart_data(int chart) const { return data_[chart]; }

  bool same_shape(const Field& other) const;
  /// Throws InputError unless the field matches the manifold's grids and the block shape.
  void check_shape(const ChartedManifold& m, int rows, int cols, const char* what) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::vector<double>> data_;
};

/// Samples `fn(chart, point)` into a field of the given block shape.
template <typename Fn>
Field sample_field(const ChartedManifold& m, int rows, int cols, Fn&& fn) {
  Field f(m, rows, cols);
  for (int c = 0; c < m.chart_count(); ++c)
    for (int node = 0; node < m.chart(c).node_count(); ++node) {
      const Mat value = fn(c, m.chart(c).node_point(node));
      f.mat(c, node) = value;
    }
  return f;
}

/// Second-order finite difference of the block at one node along `axis`:
/// central in the interior, one-sided at the boundary.
std::vector<double> directional_derivative(const ChartedManifold& m, const Field& f, int chart, int node, int axis);

/// Whole-field partial derivative along `axis` in every chart.
Field partial(const ChartedManifold& m, const Field& f, int axis);

/// Nodewise [X, Y]^i = sum_j (X^j d_j Y^i - Y^j d_j X^i).
Field lie_bracket_fields(const ChartedManifold& m, const Field& x, const Field& y);

/// Multilinear interpolation weights of a point in a chart.
struct InterpStencil {
  std::vector<int> nodes;
  std::vector<double> weights;
};
/// Throws InputError if the point lies outside the chart box.
InterpStencil locate(const Chart& chart, const Vec& p, double tol = 1e-9);
Mat interpolate(const Field& f, int chart, const InterpStencil& stencil);

// ---------------------------------------------------------------------------
// Paths and partitions of unity

struct Path {
  int chart = 0;
  double dt = 1.0;
  std::vector<Vec> points;
  std::vector<Vec> velocities;
};

/// Straight segment in chart coordinates from the chart center to `node`, steps + 1 samples.
Path ray_path(const ChartedManifold& m, int chart, int node, int steps);
/// Straight segment between two points of a chart.
Path segment_path(const ChartedManifold& m, int chart, const Vec& from, const Vec& to, int steps);

struct BumpProfile {
  /// Exponent scale k in exp(-k / (1 - r^2)).
  double sharpness = 1.0;
};

/// Smooth partition of unity subordinate to the atlas, from per-axis bumps
/// normalized by their pointwise sum over all charts covering a point.
class PartitionOfUnity {
 public:
  PartitionOfUnity() = default;
  PartitionOfUnity(const ChartedManifold& m, BumpProfile profile);

  /// h_chart at a point given in that chart's coordinates.
  double value(int chart, const Vec& p) const;
  /// h_alpha sampled on chart alpha's own grid, for every alpha.
  const Field& sampled() const { return sampled_; }
  const BumpProfile& profile() const { return profile_; }

 private:
  double raw(int chart, const Vec& p) const;

  ChartedManifold m_;
  BumpProfile profile_;
  /// Per chart and axis: whether the low/high face is interior to another chart.
  std::vector<std::vector<std::pair<bool, bool>>> interior_faces_;
  Field sampled_;
};

/// Throws CoverageError when a node is covered by no bump support.
PartitionOfUnity partition_of_unity(const ChartedManifold& m, BumpProfile profile = {});

}  // namespace algebroid
