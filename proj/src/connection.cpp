#include "algebroid/connection.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace algebroid {

namespace {

double rel_derivation_residual(const LieAlgebra& g, const Mat& d) {
  return derivation_residual(g, d) / std::max(1.0, d.norm());
}

Mat ad_of(const LieAlgebra& g, const Eigen::Ref<const Vec>& x) {
  Mat out = Mat::Zero(g.dim(), g.dim());
  for (int k = 0; k < g.dim(); ++k)
    if (x[k] != 0.0) out += x[k] * g.ad_basis(k);
  return out;
}

/// Value of a field block at a point of a chart: the node itself when given, interpolation otherwise.
Mat field_at(const ChartedManifold& m, const Field& f, int chart, int node, const Vec& p) {
  if (node >= 0) return f.mat(chart, node);
  return interpolate(f, chart, locate(m.chart(chart), p));
}

std::vector<Field> frame_partials(const Trivialization& t) {
  std::vector<Field> out;
  for (int a = 0; a < t.manifold.dim(); ++a) out.push_back(partial(t.manifold, t.frames, a));
  return out;
}

/// Omega(X, Y) = sum_{i<j} (X^i Y^j - X^j Y^i) Omega_ij, nodewise.
Field contract_omega2(const ChartedManifold& m, const CurvatureData& r, const Field& x, const Field& y, int n) {
  Field out(m, n, 1);
  for (int c = 0; c < m.chart_count(); ++c)
    for (int node = 0; node < m.chart(c).node_count(); ++node) {
      const auto xv = x.vec(c, node);
      const auto yv = y.vec(c, node);
      auto o = out.vec(c, node);
      for (std::size_t p = 0; p < r.pairs.size(); ++p) {
        const auto [i, j] = r.pairs[p];
        const double w = xv[i] * yv[j] - xv[j] * yv[i];
        if (w != 0.0) o += w * r.omega2[p].vec(c, node);
      }
    }
  return out;
}

Field random_tangent_field(const ChartedManifold& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(-0.5, 0.5), freq(-1.0, 1.0), phase(0.0, 6.283185307179586);
  const int d = m.dim();
  struct Term {
    Vec k;
    double a, ph;
  };
  std::vector<std::vector<Term>> terms(d);
  for (int i = 0; i < d; ++i)
    for (int h = 0; h < 2; ++h) {
      Term t{Vec(d), amp(rng), phase(rng)};
      for (int a = 0; a < d; ++a) t.k[a] = freq(rng);
      terms[i].push_back(t);
    }
  return sample_field(m, d, 1, [&](int, const Vec& p) {
    Vec v = Vec::Zero(d);
    for (int i = 0; i < d; ++i)
      for (const auto& t : terms[i]) v[i] += t.a * std::cos(t.k.dot(p) + t.ph);
    return Mat(v);
  });
}

}  // namespace

ConnectionForm zero_connection(const Trivialization& t) {
  const int n = t.algebra.dim();
  ConnectionForm c{t, {}};
  for (int i = 0; i < t.manifold.dim(); ++i) c.omega.emplace_back(t.manifold, n, n);
  return c;
}

void check_connection_shape(const ConnectionForm& c) {
  const int n = c.bundle.algebra.dim();
  c.bundle.frames.check_shape(c.bundle.manifold, n, n, "connection bundle frames");
  if (static_cast<int>(c.omega.size()) != c.bundle.manifold.dim())
    throw InputError("connection form needs one component per base axis");
  for (const auto& w : c.omega) w.check_shape(c.bundle.manifold, n, n, "connection form");
}

Mat omega_at(const ConnectionForm& c, int chart, const Vec& p, const Vec& v) {
  const auto st = locate(c.bundle.manifold.chart(chart), p);
  const int n = c.bundle.algebra.dim();
  Mat out = Mat::Zero(n, n);
  for (int i = 0; i < static_cast<int>(c.omega.size()); ++i)
    if (v[i] != 0.0) out += v[i] * interpolate(c.omega[i], chart, st);
  return out;
}

Field apply_connection(const ConnectionForm& c, const Field& u, const Field& x) {
  check_connection_shape(c);
  const auto& m = c.bundle.manifold;
  const int n = c.bundle.algebra.dim();
  u.check_shape(m, n, 1, "apply_connection section");
  x.check_shape(m, m.dim(), 1, "apply_connection vector field");
  Field out(m, n, 1);
  for (int i = 0; i < m.dim(); ++i) {
    const Field du = partial(m, u, i);
    for (int ch = 0; ch < m.chart_count(); ++ch)
      for (int node = 0; node < m.chart(ch).node_count(); ++node) {
        const double xi = x.vec(ch, node)[i];
        if (xi == 0.0) continue;
        out.vec(ch, node) += xi * (du.vec(ch, node) + c.omega[i].mat(ch, node) * u.vec(ch, node));
      }
  }
  return out;
}

std::vector<Field> ambient_form(const ConnectionForm& c) {
  check_connection_shape(c);
  const auto& m = c.bundle.manifold;
  const auto dframes = frame_partials(c.bundle);
  std::vector<Field> out;
  for (int i = 0; i < m.dim(); ++i) {
    Field a = c.omega[i];
    for (int ch = 0; ch < m.chart_count(); ++ch)
      for (int node = 0; node < m.chart(ch).node_count(); ++node) {
        const Mat f = c.bundle.frames.mat(ch, node);
        const Mat finv = f.inverse();
        a.mat(ch, node) = f * c.omega[i].mat(ch, node) * finv - dframes[i].mat(ch, node) * finv;
      }
    out.push_back(std::move(a));
  }
  return out;
}

ValidationReport validate_connection(const ConnectionForm& c, const Tolerances& tol) {
  check_connection_shape(c);
  const auto& t = c.bundle;
  const auto& m = t.manifold;
  const auto& g = t.algebra;
  ValidationReport r;
  double worst_der = 0.0;
  for (int i = 0; i < m.dim(); ++i)
    for (int ch = 0; ch < m.chart_count(); ++ch)
      for (int node = 0; node < m.chart(ch).node_count(); ++node) {
        const double res = rel_derivation_residual(g, c.omega[i].mat(ch, node));
        if (res > worst_der) {
          worst_der = res;
          if (res > tol.alg)
            r.worst = "chart " + std::to_string(ch) + " node " + std::to_string(node) + " axis " + std::to_string(i) +
                      ": not a derivation";
        }
      }

  double worst_gauge = 0.0;
  for (const auto& tr : transitions(t)) {
    const auto& ov = m.overlap(tr.overlap);
    const auto& nodes = m.overlap_nodes(tr.overlap);
    const Mat minv = ov.map.matrix.inverse();
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const auto& nd = nodes[k];
      const Mat& phi = tr.values[k];
      const Mat phiinv = phi.inverse();
      std::vector<Mat> along_alpha;
      for (int j = 0; j < m.dim(); ++j)
        along_alpha.push_back(phi * c.omega[j].mat(ov.alpha, nd.alpha_node) * phiinv -
                              transition_log_derivative(m, tr, static_cast<int>(k), j, LogSide::Right));
      for (int i = 0; i < m.dim(); ++i) {
        Mat expect = Mat::Zero(g.dim(), g.dim());
        for (int j = 0; j < m.dim(); ++j)
          if (minv(j, i) != 0.0) expect += minv(j, i) * along_alpha[j];
        const double res = (field_at(m, c.omega[i], ov.beta, nd.beta_node, nd.beta_point) - expect).norm();
        if (res > worst_gauge) {
          worst_gauge = res;
          if (res > tol.gauge && worst_der <= tol.alg)
            r.worst = "overlap " + std::to_string(tr.overlap) + " node " + std::to_string(nd.alpha_node) +
                      ": gauge law violated";
        }
      }
    }
  }
  r.residuals["derivation"] = worst_der;
  r.residuals["gauge"] = worst_gauge;
  r.passed = worst_der <= tol.alg && worst_gauge <= tol.gauge;
  return r;
}

std::vector<std::pair<int, int>> axis_pairs(int dim) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) out.emplace_back(i, j);
  return out;
}

Mat CurvatureData::r_at(int i, int j, int chart, int node) const {
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    if (pairs[p] == std::make_pair(i, j)) return r[p].mat(chart, node);
    if (pairs[p] == std::make_pair(j, i)) return -r[p].mat(chart, node);
  }
  const int n = r.empty() ? 0 : r.front().rows();
  return Mat::Zero(n, n);
}

Vec CurvatureData::omega2_at(int i, int j, int chart, int node) const {
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    if (pairs[p] == std::make_pair(i, j)) return omega2[p].vec(chart, node);
    if (pairs[p] == std::make_pair(j, i)) return -omega2[p].vec(chart, node);
  }
  const int n = omega2.empty() ? 0 : omega2.front().rows();
  return Vec::Zero(n);
}

CurvatureData curvature(const ConnectionForm& c) {
  check_connection_shape(c);
  const auto& m = c.bundle.manifold;
  CurvatureData out;
  out.pairs = axis_pairs(m.dim());
  for (const auto& [i, j] : out.pairs) {
    const Field dij = partial(m, c.omega[j], i);
    const Field dji = partial(m, c.omega[i], j);
    Field r = dij;
    for (int ch = 0; ch < m.chart_count(); ++ch)
      for (int node = 0; node < m.chart(ch).node_count(); ++node) {
        const auto wi = c.omega[i].mat(ch, node);
        const auto wj = c.omega[j].mat(ch, node);
        r.mat(ch, node) = dij.mat(ch, node) - dji.mat(ch, node) + wi * wj - wj * wi;
      }
    out.r.push_back(std::move(r));
  }
  return out;
}

double curvature_gauge_residual(const ConnectionForm& c, const CurvatureData& r) {
  const auto& t = c.bundle;
  const auto& m = t.manifold;
  const int d = m.dim();
  double worst = 0.0;
  for (int o = 0; o < static_cast<int>(m.overlaps().size()); ++o) {
    const auto& ov = m.overlap(o);
    const Mat& jac = ov.map.matrix;
    for (const auto& nd : m.overlap_nodes(o)) {
      const Mat phi = transition_at(t, o, nd);
      const Mat phiinv = phi.inverse();
      for (const auto& [a, b] : r.pairs) {
        Mat lhs = Mat::Zero(t.algebra.dim(), t.algebra.dim());
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) {
            const double w = jac(i, a) * jac(j, b);
            if (w == 0.0 || i == j) continue;
            Mat rb;
            for (std::size_t q = 0; q < r.pairs.size(); ++q) {
              if (r.pairs[q] == std::make_pair(i, j)) rb = field_at(m, r.r[q], ov.beta, nd.beta_node, nd.beta_point);
              if (r.pairs[q] == std::make_pair(j, i)) rb = -field_at(m, r.r[q], ov.beta, nd.beta_node, nd.beta_point);
            }
            lhs += w * rb;
          }
        const Mat rhs = phi * r.r_at(a, b, ov.alpha, nd.alpha_node) * phiinv;
        worst = std::max(worst, (lhs - rhs).norm());
      }
    }
  }
  return worst;
}

AccordanceResult accordance(const ConnectionForm& c, const Tolerances& tol) {
  AccordanceResult out;
  out.data = curvature(c);
  const auto& m = c.bundle.manifold;
  const auto& g = c.bundle.algebra;
  const InnerProjector proj(g, tol.alg);
  double sum_omega = 0.0;
  long count = 0;
  for (std::size_t p = 0; p < out.data.pairs.size(); ++p) {
    Field om(m, g.dim(), 1), res(m, 1, 1);
    for (int ch = 0; ch < m.chart_count(); ++ch)
      for (int node = 0; node < m.chart(ch).node_count(); ++node) {
        const Mat r = out.data.r[p].mat(ch, node);
        const auto pr = proj.project(r);
        om.vec(ch, node) = pr.x;
        res.chart_data(ch)[node] = pr.residual;
        out.max_residual = std::max(out.max_residual, pr.residual);
        out.max_curvature = std::max(out.max_curvature, r.norm());
        out.max_omega2 = std::max(out.max_omega2, pr.x.norm());
        sum_omega += pr.x.norm();
        ++count;
      }
    out.data.omega2.push_back(std::move(om));
    out.data.residual.push_back(std::move(res));
  }
  out.mean_omega2 = count ? sum_omega / count : 0.0;
  out.passed = out.max_residual <= tol.acc;
  return out;
}

double bianchi_residual(const ConnectionForm& c, const AccordanceResult& acc, unsigned long long seed) {
  const auto& m = c.bundle.manifold;
  const auto& g = c.bundle.algebra;
  if (m.dim() < 2) return 0.0;
  std::mt19937_64 rng(seed);
  std::vector<Field> xs;
  for (int k = 0; k < 3; ++k) xs.push_back(random_tangent_field(m, rng));
  const int n = g.dim();
  Field total(m, n, 1);
  for (int k = 0; k < 3; ++k) {
    const Field& x1 = xs[k];
    const Field& x2 = xs[(k + 1) % 3];
    const Field& x3 = xs[(k + 2) % 3];
    const Field cov = apply_connection(c, contract_omega2(m, acc.data, x2, x3, n), x1);
    const Field lie = contract_omega2(m, acc.data, lie_bracket_fields(m, x1, x2), x3, n);
    for (int ch = 0; ch < m.chart_count(); ++ch)
      for (int node = 0; node < m.chart(ch).node_count(); ++node)
        total.vec(ch, node) += cov.vec(ch, node) - lie.vec(ch, node);
  }
  double worst = 0.0;
  for (int ch = 0; ch < m.chart_count(); ++ch)
    for (int node = 0; node < m.chart(ch).node_count(); ++node)
      worst = std::max(worst, ad_of(g, total.vec(ch, node)).norm());
  return worst;
}

double one_form_gauge_residual(const Trivialization& t, const FiberOneForm& l) {
  const auto& m = t.manifold;
  const int n = t.algebra.dim();
  if (static_cast<int>(l.size()) != m.dim()) throw InputError("one-form needs one component per base axis");
  for (const auto& f : l) f.check_shape(m, n, 1, "fiber one-form");
  double worst = 0.0;
  for (int o = 0; o < static_cast<int>(m.overlaps().size()); ++o) {
    const auto& ov = m.overlap(o);
    const Mat& jac = ov.map.matrix;
    for (const auto& nd : m.overlap_nodes(o)) {
      const Mat phi = transition_at(t, o, nd);
      for (int a = 0; a < m.dim(); ++a) {
        Vec lhs = Vec::Zero(n);
        for (int i = 0; i < m.dim(); ++i)
          if (jac(i, a) != 0.0) lhs += jac(i, a) * Vec(field_at(m, l[i], ov.beta, nd.beta_node, nd.beta_point));
        worst = std::max(worst, (lhs - phi * l[a].vec(ov.alpha, nd.alpha_node)).norm());
      }
    }
  }
  return worst;
}

ConnectionForm shift_by_inner(const ConnectionForm& c, const FiberOneForm& l, const Tolerances& tol) {
  check_connection_shape(c);
  const double res = one_form_gauge_residual(c.bundle, l);
  if (res > tol.gauge) throw InputError("shift_by_inner: l does not transform as a one-form (residual " + std::to_string(res) + ")");
  ConnectionForm out = c;
  const auto& m = c.bundle.manifold;
  for (int i = 0; i < m.dim(); ++i)
    for (int ch = 0; ch < m.chart_count(); ++ch)
      for (int node = 0; node < m.chart(ch).node_count(); ++node)
        out.omega[i].mat(ch, node) += ad_of(c.bundle.algebra, l[i].vec(ch, node));
  return out;
}

FiberOneForm glue_one_form(const Trivialization& t, const PartitionOfUnity& h, const FiberOneForm& local) {
  const auto& m = t.manifold;
  const int n = t.algebra.dim();
  if (static_cast<int>(local.size()) != m.dim()) throw InputError("one-form needs one component per base axis");
  for (const auto& f : local) f.check_shape(m, n, 1, "local one-form");
  FiberOneForm out(m.dim(), Field(m, n, 1));
  for (int a = 0; a < m.chart_count(); ++a)
    for (int node = 0; node < m.chart(a).node_count(); ++node) {
      const Vec x = m.chart(a).node_point(node);
      const double own = h.sampled().scalar(a, node);
      for (int i = 0; i < m.dim(); ++i) out[i].vec(a, node) = own * local[i].vec(a, node);
      const Mat fa_inv = t.frames.mat(a, node).inverse();
      for (int o : m.overlaps_containing(a, x)) {
        const auto& ov = m.overlap(o);
        const Vec xg = ov.map.apply(x);
        const double w = h.value(ov.beta, xg);
        if (w == 0.0) continue;
        const auto st = locate(m.chart(ov.beta), xg);
        const Mat phi_ga = fa_inv * interpolate(t.frames, ov.beta, st);
        for (int i = 0; i < m.dim(); ++i) {
          Vec v = Vec::Zero(n);
          for (int j = 0; j < m.dim(); ++j)
            if (ov.map.matrix(j, i) != 0.0) v += ov.map.matrix(j, i) * Vec(interpolate(local[j], ov.beta, st));
          out[i].vec(a, node) += w * (phi_ga * v);
        }
      }
    }
  return out;
}

Mat project_onto(const std::vector<Mat>& basis, const Mat& d) {
  Mat out = Mat::Zero(d.rows(), d.cols());
  for (const auto& b : basis) out += (b.array() * d.array()).sum() * b;
  return out;
}

ConnectionForm reexpress(const ConnectionForm& c, const Trivialization& target) {
  check_connection_shape(c);
  if (!same_algebra(c.bundle.algebra, target.algebra)) throw InputError("reexpress: algebras differ");
  if (!same_base(c.bundle.manifold, target.manifold)) throw InputError("reexpress: bases differ");
  const auto& m = c.bundle.manifold;
  const int n = c.bundle.algebra.dim();
  target.frames.check_shape(m, n, n, "reexpress target frames");
  const auto der = derivations_basis(c.bundle.algebra);
  // G = F^{-1} F' maps target-local coordinates to source-local ones.
  Field gauge(m, n, n);
  for (int ch = 0; ch < m.chart_count(); ++ch)
    for (int node = 0; node < m.chart(ch).node_count(); ++node)
      gauge.mat(ch, node) = c.bundle.frames.mat(ch, node).partialPivLu().solve(Mat(target.frames.mat(ch, node)));
  ConnectionForm out{target, {}};
  for (int i = 0; i < m.dim(); ++i) {
    const Field dg = partial(m, gauge, i);
    Field w(m, n, n);
    for (int ch = 0; ch < m.chart_count(); ++ch)
      for (int node = 0; node < m.chart(ch).node_count(); ++node) {
        const Mat gm = gauge.mat(ch, node);
        const Mat ginv = gm.inverse();
        w.mat(ch, node) = project_onto(der, ginv * c.omega[i].mat(ch, node) * gm + ginv * dg.mat(ch, node));
      }
    out.omega.push_back(std::move(w));
  }
  return out;
}

CouplingEquivalence coupling_equivalent(const ConnectionForm& c, const ConnectionForm& c2, const Tolerances& tol) {
  check_connection_shape(c);
  check_connection_shape(c2);
  if (!same_algebra(c.bundle.algebra, c2.bundle.algebra)) throw InputError("coupling_equivalent: algebras differ");
  if (!same_base(c.bundle.manifold, c2.bundle.manifold)) throw InputError("coupling_equivalent: bases differ");
  const auto& m = c.bundle.manifold;
  const int n = c.bundle.algebra.dim();
  bool same_frames = true;
  for (int ch = 0; ch < m.chart_count() && same_frames; ++ch)
    same_frames = c.bundle.frames.chart_data(ch) == c2.bundle.frames.chart_data(ch);
  const ConnectionForm other = same_frames ? c2 : reexpress(c2, c.bundle);

  const InnerProjector proj(c.bundle.algebra, tol.alg);
  CouplingEquivalence out;
  out.l.assign(m.dim(), Field(m, n, 1));
  for (int i = 0; i < m.dim(); ++i)
    for (int ch = 0; ch < m.chart_count(); ++ch)
      for (int node = 0; node < m.chart(ch).node_count(); ++node) {
        const auto pr = proj.project(other.omega[i].mat(ch, node) - c.omega[i].mat(ch, node));
        out.l[i].vec(ch, node) = pr.x;
        out.max_residual = std::max(out.max_residual, pr.residual);
      }
  out.passed = out.max_residual <= tol.acc;
  return out;
}

ConnectionForm pullback_connection(const ConnectionForm& c, const SmoothMapSpec& f) {
  check_connection_shape(c);
  Trivialization t = pullback_lab(c.bundle, f);
  const auto& src = f.source;
  const int n = c.bundle.algebra.dim();
  const int td = c.bundle.manifold.dim();
  ConnectionForm out{std::move(t), {}};
  for (int i = 0; i < src.dim(); ++i) out.omega.emplace_back(src, n, n);
  for (int a = 0; a < src.chart_count(); ++a) {
    const Mat& jac = f.maps[a].matrix;
    for (int node = 0; node < src.chart(a).node_count(); ++node) {
      const Vec y = f.maps[a].apply(src.chart(a).node_point(node));
      const auto st = locate(c.bundle.manifold.chart(f.target_chart[a]), y);
      std::vector<Mat> w;
      for (int j = 0; j < td; ++j) w.push_back(interpolate(c.omega[j], f.target_chart[a], st));
      for (int i = 0; i < src.dim(); ++i) {
        Mat acc = Mat::Zero(n, n);
        for (int j = 0; j < td; ++j) acc += jac(j, i) * w[j];
        out.omega[i].mat(a, node) = acc;
      }
    }
  }
  return out;
}

}  // namespace algebroid
