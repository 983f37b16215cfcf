#include "algebroid/chartman.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "algebroid/kernels.hpp"

namespace algebroid {

AffineMap AffineMap::inverse() const {
  const Mat inv = matrix.inverse();
  return {inv, -inv * offset};
}

AffineMap AffineMap::then(const AffineMap& next) const {
  return {next.matrix * matrix, next.matrix * offset + next.offset};
}

int Chart::node_count() const {
  int n = 1;
  for (int r : resolution) n *= r;
  return n;
}

int Chart::flat_index(std::span<const int> index) const {
  int flat = 0;
  for (int a = 0; a < dim(); ++a) flat = flat * resolution[a] + index[a];
  return flat;
}

std::vector<int> Chart::multi_index(int flat) const {
  std::vector<int> idx(dim());
  for (int a = dim() - 1; a >= 0; --a) {
    idx[a] = flat % resolution[a];
    flat /= resolution[a];
  }
  return idx;
}

Vec Chart::node_point(int flat) const {
  const auto idx = multi_index(flat);
  Vec p(dim());
  for (int a = 0; a < dim(); ++a) p[a] = box[a].lo + idx[a] * spacing(a);
  return p;
}

Vec Chart::center_point() const {
  Vec p(dim());
  for (int a = 0; a < dim(); ++a) p[a] = box[a].lo + center[a] * spacing(a);
  return p;
}

bool Chart::contains(const Vec& p, double tol) const {
  for (int a = 0; a < dim(); ++a) {
    const double slack = tol * std::max(1.0, box[a].hi - box[a].lo);
    if (p[a] < box[a].lo - slack || p[a] > box[a].hi + slack) return false;
  }
  return true;
}

bool Overlap::contains(const Vec& p, double tol) const {
  for (std::size_t a = 0; a < region.size(); ++a) {
    const double slack = tol * std::max(1.0, region[a].hi - region[a].lo);
    if (p[a] < region[a].lo - slack || p[a] > region[a].hi + slack) return false;
  }
  return true;
}

std::vector<int> ChartedManifold::overlaps_containing(int chart, const Vec& p, double tol) const {
  std::vector<int> ids;
  for (int o = 0; o < static_cast<int>(spec_.overlaps.size()); ++o)
    if (spec_.overlaps[o].alpha == chart && spec_.overlaps[o].contains(p, tol)) ids.push_back(o);
  return ids;
}

namespace {

constexpr double kGeomTol = 1e-9;

std::string overlap_label(int id, const Overlap& o) {
  std::ostringstream s;
  s << "overlap " << id << " (" << o.alpha << "->" << o.beta << ")";
  return s.str();
}

// Corner points of a box.
std::vector<Vec> corners(const std::vector<Interval>& box) {
  const int d = static_cast<int>(box.size());
  std::vector<Vec> out;
  for (int mask = 0; mask < (1 << d); ++mask) {
    Vec p(d);
    for (int a = 0; a < d; ++a) p[a] = (mask >> a) & 1 ? box[a].hi : box[a].lo;
    out.push_back(p);
  }
  return out;
}

std::vector<Interval> image_box(const std::vector<Interval>& box, const AffineMap& map) {
  const int d = static_cast<int>(box.size());
  std::vector<Interval> out(d, {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
  for (const auto& c : corners(box)) {
    const Vec q = map.apply(c);
    for (int a = 0; a < d; ++a) {
      out[a].lo = std::min(out[a].lo, q[a]);
      out[a].hi = std::max(out[a].hi, q[a]);
    }
  }
  return out;
}

bool boxes_equal(const std::vector<Interval>& x, const std::vector<Interval>& y, double tol) {
  for (std::size_t a = 0; a < x.size(); ++a)
    if (std::abs(x[a].lo - y[a].lo) > tol || std::abs(x[a].hi - y[a].hi) > tol) return false;
  return true;
}

// Grid node at a point, or -1 if the point is off-grid.
int node_at(const Chart& chart, const Vec& p) {
  std::vector<int> idx(chart.dim());
  for (int a = 0; a < chart.dim(); ++a) {
    const double u = (p[a] - chart.box[a].lo) / chart.spacing(a);
    const double r = std::round(u);
    if (std::abs(u - r) > 1e-7 || r < 0 || r > chart.resolution[a] - 1) return -1;
    idx[a] = static_cast<int>(r);
  }
  return chart.flat_index(idx);
}

}  // namespace

ChartedManifold build_manifold(ManifoldSpec spec) {
  if (spec.dim != 1 && spec.dim != 2) throw InputError("manifold dimension must be 1 or 2");
  if (spec.charts.empty()) throw InputError("manifold has no charts");
  for (std::size_t c = 0; c < spec.charts.size(); ++c) {
    const auto& ch = spec.charts[c];
    const std::string label = "chart " + std::to_string(c);
    if (ch.dim() != spec.dim || static_cast<int>(ch.resolution.size()) != spec.dim ||
        static_cast<int>(ch.center.size()) != spec.dim)
      throw InputError(label + ": box/resolution/center rank differs from manifold dimension");
    for (int a = 0; a < spec.dim; ++a) {
      if (!(ch.box[a].lo < ch.box[a].hi)) throw InputError(label + ": empty box");
      if (ch.resolution[a] < 9) throw InputError(label + ": resolution below 9 nodes");
      if (ch.center[a] < 0 || ch.center[a] >= ch.resolution[a]) throw InputError(label + ": center outside grid");
    }
  }

  const int n_over = static_cast<int>(spec.overlaps.size());
  std::vector<int> reverse(n_over, -1);
  for (int o = 0; o < n_over; ++o) {
    const auto& ov = spec.overlaps[o];
    const std::string label = overlap_label(o, ov);
    const int n_charts = static_cast<int>(spec.charts.size());
    if (ov.alpha < 0 || ov.alpha >= n_charts || ov.beta < 0 || ov.beta >= n_charts || ov.alpha == ov.beta)
      throw InputError(label + ": invalid chart ids");
    if (static_cast<int>(ov.region.size()) != spec.dim || ov.map.matrix.rows() != spec.dim ||
        ov.map.matrix.cols() != spec.dim || ov.map.offset.size() != spec.dim)
      throw InputError(label + ": shape mismatch");
    if (std::abs(ov.map.matrix.determinant()) < 1e-12) throw InputError(label + ": singular affine map");
    const auto& alpha = spec.charts[ov.alpha];
    const auto& beta = spec.charts[ov.beta];
    for (int a = 0; a < spec.dim; ++a)
      if (ov.region[a].lo > ov.region[a].hi) throw InputError(label + ": empty region");
    for (const auto& c : corners(ov.region)) {
      if (!alpha.contains(c, kGeomTol)) throw InputError(label + ": region leaves the alpha box");
      if (!beta.contains(ov.map.apply(c), kGeomTol)) throw InputError(label + ": map carries region outside beta box");
    }
    // Symmetric partner: (beta, alpha) with the image region and inverse map.
    const auto img = image_box(ov.region, ov.map);
    const auto inv = ov.map.inverse();
    for (int q = 0; q < n_over; ++q) {
      const auto& other = spec.overlaps[q];
      if (other.alpha != ov.beta || other.beta != ov.alpha) continue;
      if (static_cast<int>(other.region.size()) != spec.dim) continue;
      if (!boxes_equal(other.region, img, kGeomTol)) continue;
      if ((other.map.matrix - inv.matrix).cwiseAbs().maxCoeff() > kGeomTol ||
          (other.map.offset - inv.offset).cwiseAbs().maxCoeff() > kGeomTol)
        continue;
      reverse[o] = q;
      break;
    }
    if (reverse[o] < 0) throw InputError(label + ": no symmetric partner record with inverse map");
  }

  ChartedManifold m;
  m.spec_ = std::move(spec);
  m.reverse_ = std::move(reverse);
  m.overlap_nodes_.resize(n_over);
  for (int o = 0; o < n_over; ++o) {
    const auto& ov = m.spec_.overlaps[o];
    const auto& alpha = m.spec_.charts[ov.alpha];
    const auto& beta = m.spec_.charts[ov.beta];
    for (int node = 0; node < alpha.node_count(); ++node) {
      const Vec p = alpha.node_point(node);
      if (!ov.contains(p, kGeomTol)) continue;
      OverlapNode on;
      on.alpha_node = node;
      on.beta_point = ov.map.apply(p);
      on.beta_node = node_at(beta, on.beta_point);
      m.overlap_nodes_[o].push_back(std::move(on));
    }
    if (m.overlap_nodes_[o].empty()) throw InputError(overlap_label(o, ov) + ": region contains no grid node");
  }

  // Triple overlaps: whenever x in U_alpha maps into U_beta and then into U_gamma, some
  // record (alpha, gamma) must contain x with the same composed image.
  for (int o = 0; o < n_over; ++o) {
    const auto& ab = m.spec_.overlaps[o];
    for (const auto& on : m.overlap_nodes_[o]) {
      const Vec x = m.spec_.charts[ab.alpha].node_point(on.alpha_node);
      for (int q : m.overlaps_containing(ab.beta, on.beta_point, kGeomTol)) {
        const auto& bc = m.spec_.overlaps[q];
        if (bc.beta == ab.alpha) continue;
        const Vec composed = bc.map.apply(on.beta_point);
        bool found = false;
        for (int r : m.overlaps_containing(ab.alpha, x, kGeomTol)) {
          const auto& ac = m.spec_.overlaps[r];
          if (ac.beta != bc.beta) continue;
          if ((ac.map.apply(x) - composed).cwiseAbs().maxCoeff() <= kGeomTol) found = true;
        }
        if (!found) throw InputError(overlap_label(o, ab) + ": triple-overlap maps disagree");
      }
    }
  }
  return m;
}

namespace {

Chart make_chart(std::vector<Interval> box, std::vector<int> res) {
  Chart c;
  c.box = std::move(box);
  c.resolution = std::move(res);
  for (int r : c.resolution) c.center.push_back((r - 1) / 2);
  return c;
}

Overlap make_overlap(int alpha, int beta, std::vector<Interval> region, Vec shift) {
  Overlap o;
  o.alpha = alpha;
  o.beta = beta;
  o.region = std::move(region);
  o.map.matrix = Mat::Identity(shift.size(), shift.size());
  o.map.offset = std::move(shift);
  return o;
}

Vec shift_vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

void require_circle_resolution(int resolution) {
  if (resolution < 9 || (resolution - 1) % 4 != 0)
    throw InputError("circle charts need resolution >= 9 with (resolution - 1) divisible by 4");
}

}  // namespace

std::vector<std::string> manifold_fixture_names() { return {"interval1", "circle2", "disk2d", "cyl2", "circle4"}; }

ChartedManifold fixture_manifold(const std::string& name, int resolution) {
  ManifoldSpec spec;
  spec.name = name;
  if (name == "interval1") {
    spec.dim = 1;
    spec.charts.push_back(make_chart({{0.0, 1.0}}, {resolution}));
  } else if (name == "disk2d") {
    spec.dim = 2;
    spec.charts.push_back(make_chart({{-0.5, 0.5}, {-0.5, 0.5}}, {resolution, resolution}));
  } else if (name == "circle2" || name == "cyl2") {
    // Unit-circumference circle; chart 0 covers t in [0, 2/3], chart 1 covers t = s + 1/2.
    require_circle_resolution(resolution);
    const bool cyl = name == "cyl2";
    spec.dim = cyl ? 2 : 1;
    std::vector<Interval> box = {{0.0, 2.0 / 3.0}};
    std::vector<int> res = {resolution};
    if (cyl) {
      box.push_back({0.0, 1.0});
      res.push_back(resolution);
    }
    spec.charts.push_back(make_chart(box, res));
    spec.charts.push_back(make_chart(box, res));
    auto region = [&](double lo, double hi) {
      std::vector<Interval> r = {{lo, hi}};
      if (cyl) r.push_back({0.0, 1.0});
      return r;
    };
    auto shift = [&](double s) { return cyl ? shift_vec({s, 0.0}) : shift_vec({s}); };
    spec.overlaps.push_back(make_overlap(0, 1, region(0.5, 2.0 / 3.0), shift(-0.5)));
    spec.overlaps.push_back(make_overlap(0, 1, region(0.0, 1.0 / 6.0), shift(0.5)));
    spec.overlaps.push_back(make_overlap(1, 0, region(0.0, 1.0 / 6.0), shift(0.5)));
    spec.overlaps.push_back(make_overlap(1, 0, region(0.5, 2.0 / 3.0), shift(-0.5)));
  } else if (name == "circle4") {
    // Unit-circumference circle; chart k covers t = s + k/4, s in [0, 1/3].
    require_circle_resolution(resolution);
    spec.dim = 1;
    for (int k = 0; k < 4; ++k) spec.charts.push_back(make_chart({{0.0, 1.0 / 3.0}}, {resolution}));
    for (int k = 0; k < 4; ++k) {
      const int next = (k + 1) % 4;
      spec.overlaps.push_back(make_overlap(k, next, {{0.25, 1.0 / 3.0}}, shift_vec({-0.25})));
      spec.overlaps.push_back(make_overlap(next, k, {{0.0, 1.0 / 12.0}}, shift_vec({0.25})));
    }
  } else {
    throw InputError("unknown manifold fixture: " + name);
  }
  return build_manifold(std::move(spec));
}

// ---------------------------------------------------------------------------

Field::Field(const ChartedManifold& m, int rows, int cols) : rows_(rows), cols_(cols) {
  data_.resize(m.chart_count());
  for (int c = 0; c < m.chart_count(); ++c)
    data_[c].assign(static_cast<std::size_t>(m.chart(c).node_count()) * rows * cols, 0.0);
}

bool Field::same_shape(const Field& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_ || data_.size() != other.data_.size()) return false;
  for (std::size_t c = 0; c < data_.size(); ++c)
    if (data_[c].size() != other.data_[c].size()) return false;
  return true;
}

void Field::check_shape(const ChartedManifold& m, int rows, int cols, const char* what) const {
  bool ok = rows_ == rows && cols_ == cols && chart_count() == m.chart_count();
  for (int c = 0; ok && c < m.chart_count(); ++c)
    ok = data_[c].size() == static_cast<std::size_t>(m.chart(c).node_count()) * rows * cols;
  if (!ok) throw InputError(std::string(what) + ": field shape does not match manifold grids");
}

std::vector<double> directional_derivative(const ChartedManifold& m, const Field& f, int chart, int node, int axis) {
  const Chart& ch = m.chart(chart);
  auto idx = ch.multi_index(node);
  const int n = ch.resolution[axis];
  const double h = ch.spacing(axis);
  auto at = [&](int i) {
    auto j = idx;
    j[axis] = i;
    return f.block(chart, ch.flat_index(j));
  };
  std::vector<double> out(f.block_size());
  const int i = idx[axis];
  if (i == 0) {
    kernels::combine3(-3.0 / (2 * h), at(0), 4.0 / (2 * h), at(1), -1.0 / (2 * h), at(2), out);
  } else if (i == n - 1) {
    kernels::combine3(3.0 / (2 * h), at(n - 1), -4.0 / (2 * h), at(n - 2), 1.0 / (2 * h), at(n - 3), out);
  } else {
    kernels::combine3(1.0 / (2 * h), at(i + 1), -1.0 / (2 * h), at(i - 1), 0.0, at(i), out);
  }
  return out;
}

Field partial(const ChartedManifold& m, const Field& f, int axis) {
  Field out = f;
  const int bs = f.block_size();
  for (int c = 0; c < m.chart_count(); ++c) {
    const Chart& ch = m.chart(c);
    const int n = ch.resolution[axis];
    const double h = ch.spacing(axis);
    std::size_t inner = bs;  // doubles per step along `axis`
    for (int a = axis + 1; a < ch.dim(); ++a) inner *= ch.resolution[a];
    std::size_t outer = 1;
    for (int a = 0; a < axis; ++a) outer *= ch.resolution[a];
    const double* src = f.chart_data(c).data();
    double* dst = out.chart_data(c).data();
    const double k = 1.0 / (2 * h);
    for (std::size_t o = 0; o < outer; ++o) {
      const std::size_t base = o * n * inner;
      auto slab = [&](const double* p, int i, std::size_t count) {
        return std::span<const double>(p + base + i * inner, count * inner);
      };
      auto dslab = [&](int i, std::size_t count) { return std::span<double>(dst + base + i * inner, count * inner); };
      // Interior nodes 1..n-2 in one contiguous sweep.
      kernels::combine3(k, slab(src, 2, n - 2), -k, slab(src, 0, n - 2), 0.0, slab(src, 1, n - 2), dslab(1, n - 2));
      kernels::combine3(-3.0 * k, slab(src, 0, 1), 4.0 * k, slab(src, 1, 1), -k, slab(src, 2, 1), dslab(0, 1));
      kernels::combine3(3.0 * k, slab(src, n - 1, 1), -4.0 * k, slab(src, n - 2, 1), k, slab(src, n - 3, 1),
                        dslab(n - 1, 1));
    }
  }
  return out;
}

Field lie_bracket_fields(const ChartedManifold& m, const Field& x, const Field& y) {
  x.check_shape(m, m.dim(), 1, "lie_bracket_fields");
  y.check_shape(m, m.dim(), 1, "lie_bracket_fields");
  const int d = m.dim();
  std::vector<Field> dx, dy;
  for (int a = 0; a < d; ++a) {
    dx.push_back(partial(m, x, a));
    dy.push_back(partial(m, y, a));
  }
  Field out(m, d, 1);
  for (int c = 0; c < m.chart_count(); ++c)
    for (int node = 0; node < m.chart(c).node_count(); ++node) {
      auto o = out.vec(c, node);
      const auto xv = x.vec(c, node);
      const auto yv = y.vec(c, node);
      for (int i = 0; i < d; ++i) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += xv[j] * dy[j].vec(c, node)[i] - yv[j] * dx[j].vec(c, node)[i];
        o[i] = s;
      }
    }
  return out;
}

InterpStencil locate(const Chart& chart, const Vec& p, double tol) {
  if (!chart.contains(p, tol)) throw InputError("point lies outside the chart box");
  const int d = chart.dim();
  std::vector<int> base(d);
  std::vector<double> frac(d);
  for (int a = 0; a < d; ++a) {
    double u = (p[a] - chart.box[a].lo) / chart.spacing(a);
    u = std::clamp(u, 0.0, static_cast<double>(chart.resolution[a] - 1));
    int i = static_cast<int>(std::floor(u));
    i = std::clamp(i, 0, chart.resolution[a] - 2);
    double t = u - i;
    if (t < 1e-12) t = 0.0;
    if (t > 1.0 - 1e-12) t = 1.0;
    base[a] = i;
    frac[a] = t;
  }
  InterpStencil s;
  for (int mask = 0; mask < (1 << d); ++mask) {
    double w = 1.0;
    std::vector<int> idx(d);
    for (int a = 0; a < d; ++a) {
      const bool up = (mask >> a) & 1;
      idx[a] = base[a] + (up ? 1 : 0);
      w *= up ? frac[a] : 1.0 - frac[a];
    }
    if (w == 0.0) continue;
    s.nodes.push_back(chart.flat_index(idx));
    s.weights.push_back(w);
  }
  return s;
}

Mat interpolate(const Field& f, int chart, const InterpStencil& stencil) {
  Mat out = Mat::Zero(f.rows(), f.cols());
  for (std::size_t k = 0; k < stencil.nodes.size(); ++k) {
    kernels::axpy(stencil.weights[k], f.block(chart, stencil.nodes[k]),
                  std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  }
  return out;
}

Path segment_path(const ChartedManifold& m, int chart, const Vec& from, const Vec& to, int steps) {
  if (steps < 1) throw InputError("path needs at least one step");
  const Chart& ch = m.chart(chart);
  if (!ch.contains(from) || !ch.contains(to)) throw InputError("path leaves the chart box");
  Path p;
  p.chart = chart;
  p.dt = 1.0 / steps;
  const Vec vel = to - from;
  for (int k = 0; k <= steps; ++k) {
    p.points.push_back(from + (static_cast<double>(k) / steps) * vel);
    p.velocities.push_back(vel);
  }
  return p;
}

Path ray_path(const ChartedManifold& m, int chart, int node, int steps) {
  const Chart& ch = m.chart(chart);
  return segment_path(m, chart, ch.center_point(), ch.node_point(node), steps);
}

// ---------------------------------------------------------------------------

PartitionOfUnity::PartitionOfUnity(const ChartedManifold& m, BumpProfile profile) : m_(m), profile_(profile) {
  interior_faces_.resize(m.chart_count());
  for (int c = 0; c < m.chart_count(); ++c) {
    const Chart& ch = m.chart(c);
    for (int a = 0; a < ch.dim(); ++a) {
      auto face_interior = [&](double coord) {
        Vec p(ch.dim());
        for (int b = 0; b < ch.dim(); ++b) p[b] = 0.5 * (ch.box[b].lo + ch.box[b].hi);
        p[a] = coord;
        for (int o : m.overlaps_containing(c, p)) {
          const Vec q = m.overlap(o).map.apply(p);
          const Chart& other = m.chart(m.overlap(o).beta);
          bool strict = true;
          for (int b = 0; b < other.dim(); ++b) {
            const double margin = 1e-7 * (other.box[b].hi - other.box[b].lo);
            if (q[b] <= other.box[b].lo + margin || q[b] >= other.box[b].hi - margin) strict = false;
          }
          if (strict) return true;
        }
        return false;
      };
      interior_faces_[c].push_back({face_interior(ch.box[a].lo), face_interior(ch.box[a].hi)});
    }
  }
  sampled_ = Field(m, 1, 1);
  for (int c = 0; c < m.chart_count(); ++c)
    for (int node = 0; node < m.chart(c).node_count(); ++node)
      sampled_.chart_data(c)[node] = value(c, m.chart(c).node_point(node));
}

double PartitionOfUnity::raw(int chart, const Vec& p) const {
  const Chart& ch = m_.chart(chart);
  double w = 1.0;
  for (int a = 0; a < ch.dim(); ++a) {
    const auto [lo_in, hi_in] = interior_faces_[chart][a];
    const double len = ch.box[a].hi - ch.box[a].lo;
    double r;
    if (lo_in && hi_in)
      r = 2.0 * (p[a] - ch.box[a].lo) / len - 1.0;
    else if (hi_in)
      r = (p[a] - ch.box[a].lo) / len;
    else if (lo_in)
      r = (ch.box[a].hi - p[a]) / len;
    else
      continue;
    const double r2 = r * r;
    if (r2 >= 1.0) return 0.0;
    w *= std::exp(-profile_.sharpness / (1.0 - r2));
  }
  return w;
}

double PartitionOfUnity::value(int chart, const Vec& p) const {
  const double own = raw(chart, p);
  double total = own;
  for (int o : m_.overlaps_containing(chart, p)) total += raw(m_.overlap(o).beta, m_.overlap(o).map.apply(p));
  if (!(total > 1e-300)) throw CoverageError("point of chart " + std::to_string(chart) + " is covered by no bump");
  return own / total;
}

PartitionOfUnity partition_of_unity(const ChartedManifold& m, BumpProfile profile) {
  if (!(profile.sharpness > 0.0)) throw InputError("bump sharpness must be positive");
  return PartitionOfUnity(m, profile);
}

}  // namespace algebroid
