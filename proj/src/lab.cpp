#include "algebroid/lab.hpp"

#include "algebroid/matfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace algebroid {

Trivialization trivial_bundle(const LieAlgebra& g, const ChartedManifold& m) {
  const int n = g.dim();
  Trivialization t{g, m, Field(m, n, n)};
  for (int c = 0; c < m.chart_count(); ++c)
    for (int node = 0; node < m.chart(c).node_count(); ++node) t.frames.mat(c, node).setIdentity();
  return t;
}

Mat frame_at(const Trivialization& t, int chart, const Vec& p) {
  return interpolate(t.frames, chart, locate(t.manifold.chart(chart), p));
}

Mat transition_at(const Trivialization& t, int overlap, const OverlapNode& node) {
  const auto& ov = t.manifold.overlap(overlap);
  const Mat fa = t.frames.mat(ov.alpha, node.alpha_node);
  const Mat fb = node.beta_node >= 0 ? Mat(t.frames.mat(ov.beta, node.beta_node)) : frame_at(t, ov.beta, node.beta_point);
  return fb.partialPivLu().solve(fa);
}

namespace {

Mat transition_at_point(const Trivialization& t, int overlap, const Vec& p_alpha) {
  const auto& ov = t.manifold.overlap(overlap);
  const Mat fa = frame_at(t, ov.alpha, p_alpha);
  const Mat fb = frame_at(t, ov.beta, ov.map.apply(p_alpha));
  return fb.partialPivLu().solve(fa);
}

void check_frames(const Trivialization& t) {
  const int n = t.algebra.dim();
  t.frames.check_shape(t.manifold, n, n, "trivialization frames");
}

InnerOptions inner_options(const Tolerances& tol) {
  InnerOptions o;
  o.alg_tol = tol.alg;
  o.inner_tol = tol.inner;
  o.aut_tol = std::max(tol.alg, tol.trans);
  return o;
}

void record(DeltaEntry& e, DeltaReport& r, const InnerVerdict& v) {
  e.max_inner_residual = std::max(e.max_inner_residual, v.residual);
  switch (v.verdict) {
    case Verdict::Inner:
      ++e.counts.inner;
      break;
    case Verdict::Outer:
      ++e.counts.outer;
      r.passed = false;
      break;
    case Verdict::Undecided:
      ++e.counts.undecided;
      r.passed = false;
      r.undecided = true;
      break;
  }
}

}  // namespace

bool same_algebra(const LieAlgebra& a, const LieAlgebra& b) {
  return a.dim() == b.dim() && a.constants() == b.constants();
}

bool same_base(const ChartedManifold& a, const ChartedManifold& b) {
  if (a.dim() != b.dim() || a.chart_count() != b.chart_count() || a.overlaps().size() != b.overlaps().size())
    return false;
  for (int c = 0; c < a.chart_count(); ++c) {
    const auto& x = a.chart(c);
    const auto& y = b.chart(c);
    if (x.resolution != y.resolution) return false;
    for (int k = 0; k < x.dim(); ++k)
      if (std::abs(x.box[k].lo - y.box[k].lo) > 1e-12 || std::abs(x.box[k].hi - y.box[k].hi) > 1e-12) return false;
  }
  return true;
}

std::vector<OverlapTransition> transitions(const Trivialization& t) {
  check_frames(t);
  std::vector<OverlapTransition> out;
  for (int o = 0; o < static_cast<int>(t.manifold.overlaps().size()); ++o) {
    OverlapTransition tr;
    tr.overlap = o;
    for (const auto& node : t.manifold.overlap_nodes(o)) tr.values.push_back(transition_at(t, o, node));
    out.push_back(std::move(tr));
  }
  return out;
}

Mat transition_log_derivative(const ChartedManifold& m, const OverlapTransition& tr, int k, int axis, LogSide side) {
  const auto& ov = m.overlap(tr.overlap);
  const auto& nodes = m.overlap_nodes(tr.overlap);
  const Chart& ch = m.chart(ov.alpha);
  const double h = ch.spacing(axis);
  const Mat& p0 = tr.values[k];
  const Mat p0inv = p0.inverse();
  const auto base = ch.multi_index(nodes[k].alpha_node);
  auto neighbor = [&](int offset) -> const Mat* {
    auto idx = base;
    idx[axis] += offset;
    if (idx[axis] < 0 || idx[axis] >= ch.resolution[axis]) return nullptr;
    const int flat = ch.flat_index(idx);
    auto it = std::lower_bound(nodes.begin(), nodes.end(), flat,
                               [](const OverlapNode& nd, int f) { return nd.alpha_node < f; });
    if (it == nodes.end() || it->alpha_node != flat) return nullptr;
    return &tr.values[it - nodes.begin()];
  };
  auto log_ratio = [&](const Mat* q) -> Mat {
    const Mat r = side == LogSide::Left ? Mat(p0inv * *q) : Mat(*q * p0inv);
    auto l = matfun::logm(r);
    return l ? *l : Mat(r - Mat::Identity(r.rows(), r.cols()));
  };
  const Mat *fp = neighbor(1), *bp = neighbor(-1);
  if (fp && bp) return (log_ratio(fp) - log_ratio(bp)) / (2 * h);
  if (fp) {
    const Mat* f2 = neighbor(2);
    return f2 ? Mat((4.0 * log_ratio(fp) - log_ratio(f2)) / (2 * h)) : Mat(log_ratio(fp) / h);
  }
  if (bp) {
    const Mat* b2 = neighbor(-2);
    return b2 ? Mat((log_ratio(b2) - 4.0 * log_ratio(bp)) / (2 * h)) : Mat(-log_ratio(bp) / h);
  }
  return Mat::Zero(p0.rows(), p0.cols());
}

ValidationReport validate_lab(const Trivialization& t, const Tolerances& tol) {
  check_frames(t);
  ValidationReport r;
  const auto& m = t.manifold;
  double worst_aut = 0.0, worst_cocycle = 0.0, min_det = std::numeric_limits<double>::infinity();

  for (int c = 0; c < m.chart_count(); ++c)
    for (int node = 0; node < m.chart(c).node_count(); ++node) {
      const double det = std::abs(t.frames.mat(c, node).determinant());
      min_det = std::min(min_det, det);
      if (!(det > tol.alg) && r.passed) {
        r.passed = false;
        r.worst = "chart " + std::to_string(c) + " node " + std::to_string(node) + ": singular frame";
      }
    }

  for (int o = 0; o < static_cast<int>(m.overlaps().size()); ++o) {
    const auto& ov = m.overlap(o);
    for (const auto& node : m.overlap_nodes(o)) {
      const Mat phi = transition_at(t, o, node);
      const double res = automorphism_residual(t.algebra, phi) / std::max(1.0, phi.squaredNorm());
      if (res > worst_aut) {
        worst_aut = res;
        if (res > tol.alg)
          r.worst = "overlap " + std::to_string(o) + " node " + std::to_string(node.alpha_node) + ": not an automorphism";
      }
      // Cocycle on triple overlaps: phi_bc(x) phi_ab(x) = phi_ac(x).
      const Vec x = m.chart(ov.alpha).node_point(node.alpha_node);
      for (int q : m.overlaps_containing(ov.beta, node.beta_point)) {
        const int gamma = m.overlap(q).beta;
        if (gamma == ov.alpha) continue;
        for (int s : m.overlaps_containing(ov.alpha, x)) {
          if (m.overlap(s).beta != gamma) continue;
          const Mat lhs = transition_at_point(t, q, node.beta_point) * phi;
          const Mat rhs = transition_at_point(t, s, x);
          const double res_c = (lhs - rhs).norm() / std::max(1.0, rhs.norm());
          if (res_c > worst_cocycle) {
            worst_cocycle = res_c;
            if (res_c > 10.0 * tol.alg) r.worst = "overlap " + std::to_string(o) + ": cocycle violated";
          }
        }
      }
    }
  }
  r.residuals["automorphism"] = worst_aut;
  r.residuals["cocycle"] = worst_cocycle;
  r.residuals["min_frame_det"] = std::isfinite(min_det) ? min_det : 0.0;
  r.passed = r.passed && worst_aut <= tol.alg && worst_cocycle <= 10.0 * tol.alg;
  return r;
}

VerdictCounts DeltaReport::totals() const {
  VerdictCounts t;
  for (const auto& e : entries) {
    t.inner += e.counts.inner;
    t.outer += e.counts.outer;
    t.undecided += e.counts.undecided;
  }
  return t;
}

DeltaReport check_delta_continuity(const Trivialization& t, const Tolerances& tol) {
  check_frames(t);
  const InnerProjector proj(t.algebra, tol.alg);
  const InnerOptions opt = inner_options(tol);
  DeltaReport r;
  for (const auto& tr : transitions(t)) {
    DeltaEntry e;
    e.id = tr.overlap;
    const Mat base_inv = tr.values.front().inverse();
    for (const auto& phi : tr.values) record(e, r, is_inner(t.algebra, proj, phi * base_inv, opt));
    r.entries.push_back(e);
  }
  return r;
}

DeltaReport trivializations_equivalent(const Trivialization& t, const Trivialization& t2, const Tolerances& tol) {
  check_frames(t);
  check_frames(t2);
  if (!same_algebra(t.algebra, t2.algebra))
    throw InputError("trivializations_equivalent: algebras differ");
  if (!same_base(t.manifold, t2.manifold)) throw InputError("trivializations_equivalent: covers differ");

  const InnerProjector proj(t.algebra, tol.alg);
  const InnerOptions opt = inner_options(tol);
  DeltaReport r;
  const auto& m = t.manifold;
  for (int c = 0; c < m.chart_count(); ++c) {
    const Chart& ch = m.chart(c);
    DeltaEntry e;
    e.id = c;
    std::vector<Mat> ratio(ch.node_count());
    std::vector<char> aut_ok(ch.node_count(), 1);
    for (int node = 0; node < ch.node_count(); ++node) {
      ratio[node] = t2.frames.mat(c, node).partialPivLu().solve(Mat(t.frames.mat(c, node)));
      const double res = automorphism_residual(t.algebra, ratio[node]) / std::max(1.0, ratio[node].squaredNorm());
      e.max_aut_residual = std::max(e.max_aut_residual, res);
      if (res > opt.aut_tol) {
        aut_ok[node] = 0;
        e.pointwise_aut = false;
        r.passed = false;
      }
    }
    for (int node = 1; node < ch.node_count(); ++node) {
      auto idx = ch.multi_index(node);
      int axis = ch.dim() - 1;
      while (idx[axis] == 0) --axis;
      --idx[axis];
      const int parent = ch.flat_index(idx);
      if (!aut_ok[node] || !aut_ok[parent]) continue;
      record(e, r, is_inner(t.algebra, proj, ratio[node] * ratio[parent].inverse(), opt));
    }
    r.entries.push_back(e);
  }
  return r;
}

Trivialization pullback_lab(const Trivialization& t, const SmoothMapSpec& f) {
  check_frames(t);
  const auto& src = f.source;
  const auto& tgt = t.manifold;
  if (static_cast<int>(f.target_chart.size()) != src.chart_count() ||
      static_cast<int>(f.maps.size()) != src.chart_count())
    throw InputError("pullback: one target chart and affine map per source chart required");
  for (int a = 0; a < src.chart_count(); ++a) {
    if (f.target_chart[a] < 0 || f.target_chart[a] >= tgt.chart_count())
      throw InputError("pullback: invalid target chart id");
    if (f.maps[a].matrix.rows() != tgt.dim() || f.maps[a].matrix.cols() != src.dim() ||
        f.maps[a].offset.size() != tgt.dim())
      throw InputError("pullback: affine map shape mismatch");
  }

  auto image = [&](int chart, const Vec& p) {
    const Vec y = f.maps[chart].apply(p);
    if (!tgt.chart(f.target_chart[chart]).contains(y))
      throw InputError("pullback: image point outside target chart " + std::to_string(f.target_chart[chart]));
    return y;
  };

  // Chart compatibility on source overlaps.
  for (int o = 0; o < static_cast<int>(src.overlaps().size()); ++o) {
    const auto& ov = src.overlap(o);
    for (const auto& node : src.overlap_nodes(o)) {
      const Vec ya = image(ov.alpha, src.chart(ov.alpha).node_point(node.alpha_node));
      const Vec yb = image(ov.beta, node.beta_point);
      const int ta = f.target_chart[ov.alpha], tb = f.target_chart[ov.beta];
      bool ok = false;
      if (ta == tb) {
        ok = (ya - yb).cwiseAbs().maxCoeff() <= 1e-9;
      } else {
        for (int q : tgt.overlaps_containing(ta, ya))
          if (tgt.overlap(q).beta == tb && (tgt.overlap(q).map.apply(ya) - yb).cwiseAbs().maxCoeff() <= 1e-9) ok = true;
      }
      if (!ok) throw InputError("pullback: map is not chart-compatible on source overlap " + std::to_string(o));
    }
  }

  const int n = t.algebra.dim();
  Trivialization out{t.algebra, src, Field(src, n, n)};
  for (int a = 0; a < src.chart_count(); ++a)
    for (int node = 0; node < src.chart(a).node_count(); ++node)
      out.frames.mat(a, node) = frame_at(t, f.target_chart[a], image(a, src.chart(a).node_point(node)));
  return out;
}

}  // namespace algebroid
