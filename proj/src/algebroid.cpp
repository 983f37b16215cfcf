#include "algebroid/algebroid.hpp"

#include <algorithm>
#include <cmath>

namespace algebroid {

namespace {

void check_section(const ChartedManifold& m, int n, const AlgebroidSection& s) {
  s.u.check_shape(m, n, 1, "section fiber part");
  s.x.check_shape(m, m.dim(), 1, "section vector field part");
}

Field bracket_fields(const LieAlgebra& g, const ChartedManifold& m, const Field& a, const Field& b) {
  Field out(m, g.dim(), 1);
  for (int c = 0; c < m.chart_count(); ++c)
    for (int node = 0; node < m.chart(c).node_count(); ++node)
      out.vec(c, node) = bracket(g, a.vec(c, node), b.vec(c, node));
  return out;
}

Field contract(const ChartedManifold& m, const CurvatureData& r, const Field& x, const Field& y, int n) {
  Field out(m, n, 1);
  for (int c = 0; c < m.chart_count(); ++c)
    for (int node = 0; node < m.chart(c).node_count(); ++node) {
      const auto xv = x.vec(c, node);
      const auto yv = y.vec(c, node);
      for (std::size_t p = 0; p < r.pairs.size(); ++p) {
        const auto [i, j] = r.pairs[p];
        const double w = xv[i] * yv[j] - xv[j] * yv[i];
        if (w != 0.0) out.vec(c, node) += w * r.omega2[p].vec(c, node);
      }
    }
  return out;
}

Field combine(const Field& a, double sa, const Field& b, double sb) {
  Field out = a;
  for (int c = 0; c < a.chart_count(); ++c) {
    auto& o = out.chart_data(c);
    const auto& bd = b.chart_data(c);
    for (std::size_t k = 0; k < o.size(); ++k) o[k] = sa * o[k] + sb * bd[k];
  }
  return out;
}

AlgebroidSection combine(const AlgebroidSection& a, double sa, const AlgebroidSection& b, double sb) {
  return {combine(a.u, sa, b.u, sb), combine(a.x, sa, b.x, sb)};
}

AlgebroidSection raw_bracket(const ConnectionForm& c, const CurvatureData& omega, const AlgebroidSection& s1,
                             const AlgebroidSection& s2) {
  const auto& m = c.bundle.manifold;
  const int n = c.bundle.algebra.dim();
  Field u = bracket_fields(c.bundle.algebra, m, s1.u, s2.u);
  const Field d12 = apply_connection(c, s2.u, s1.x);
  const Field d21 = apply_connection(c, s1.u, s2.x);
  const Field om = contract(m, omega, s1.x, s2.x, n);
  for (int ch = 0; ch < m.chart_count(); ++ch)
    for (int node = 0; node < m.chart(ch).node_count(); ++node)
      u.vec(ch, node) += d12.vec(ch, node) - d21.vec(ch, node) + om.vec(ch, node);
  return {std::move(u), lie_bracket_fields(m, s1.x, s2.x)};
}

bool interior(const Chart& ch, int node, int margin) {
  const auto idx = ch.multi_index(node);
  for (int a = 0; a < ch.dim(); ++a)
    if (idx[a] < margin || idx[a] > ch.resolution[a] - 1 - margin) return false;
  return true;
}

Field directional(const ChartedManifold& m, const Field& f, const Field& x) {
  Field out(m, f.rows(), 1);
  for (int i = 0; i < m.dim(); ++i) {
    const Field df = partial(m, f, i);
    for (int c = 0; c < m.chart_count(); ++c)
      for (int node = 0; node < m.chart(c).node_count(); ++node)
        out.vec(c, node) += x.vec(c, node)[i] * df.vec(c, node);
  }
  return out;
}

}  // namespace

AlgebroidSection algebroid_bracket(const ConnectionForm& c, const CurvatureData& omega, const AlgebroidSection& s1,
                                   const AlgebroidSection& s2) {
  check_connection_shape(c);
  const auto& m = c.bundle.manifold;
  check_section(m, c.bundle.algebra.dim(), s1);
  check_section(m, c.bundle.algebra.dim(), s2);
  if (omega.omega2.size() != omega.pairs.size()) throw InputError("algebroid_bracket: curvature data carries no Omega");
  return combine(raw_bracket(c, omega, s1, s2), 0.5, raw_bracket(c, omega, s2, s1), -0.5);
}

AlgebroidSection trivial_bracket(const LieAlgebra& g, const ChartedManifold& m, const AlgebroidSection& s1,
                                 const AlgebroidSection& s2) {
  if (m.chart_count() != 1) throw InputError("trivial_bracket: single chart required");
  check_section(m, g.dim(), s1);
  check_section(m, g.dim(), s2);
  auto one = [&](const AlgebroidSection& a, const AlgebroidSection& b) {
    Field u = bracket_fields(g, m, a.u, b.u);
    const Field xv = directional(m, b.u, a.x);
    const Field yu = directional(m, a.u, b.x);
    for (int node = 0; node < m.chart(0).node_count(); ++node) u.vec(0, node) += xv.vec(0, node) - yu.vec(0, node);
    return AlgebroidSection{std::move(u), lie_bracket_fields(m, a.x, b.x)};
  };
  return combine(one(s1, s2), 0.5, one(s2, s1), -0.5);
}

AlgebroidSection scale(const Field& f, const AlgebroidSection& s) {
  AlgebroidSection out = s;
  for (int c = 0; c < f.chart_count(); ++c)
    for (int node = 0; node < f.node_count(c); ++node) {
      out.u.vec(c, node) *= f.scalar(c, node);
      out.x.vec(c, node) *= f.scalar(c, node);
    }
  return out;
}

SmoothRandom::SmoothRandom(int components, int base_dim, std::mt19937_64& rng) : components_(components) {
  std::uniform_real_distribution<double> amp(-0.5, 0.5), freq(-1.0, 1.0), phase(0.0, 2.0 * M_PI);
  terms_.resize(components);
  for (auto& ts : terms_)
    for (int h = 0; h < 2; ++h) {
      Term t{Vec(base_dim), amp(rng), phase(rng)};
      for (int a = 0; a < base_dim; ++a) t.k[a] = freq(rng);
      ts.push_back(std::move(t));
    }
}

Vec SmoothRandom::operator()(const Vec& p) const {
  Vec v = Vec::Zero(components_);
  for (int i = 0; i < components_; ++i)
    for (const auto& t : terms_[i]) v[i] += t.a * std::cos(t.k.dot(p) + t.phase);
  return v;
}

Field SmoothRandom::sample(const ChartedManifold& m) const {
  return sample_field(m, components_, 1, [&](int, const Vec& p) { return Mat((*this)(p)); });
}

RandomSection random_section(int fiber_dim, int base_dim, std::mt19937_64& rng) {
  SmoothRandom u(fiber_dim, base_dim, rng);
  SmoothRandom x(base_dim, base_dim, rng);
  return {std::move(u), std::move(x)};
}

double max_norm(const AlgebroidSection& s, const ChartedManifold& m, int margin) {
  double worst = 0.0;
  for (int c = 0; c < m.chart_count(); ++c)
    for (int node = 0; node < m.chart(c).node_count(); ++node) {
      if (margin > 0 && !interior(m.chart(c), node, margin)) continue;
      const double v = std::sqrt(s.u.vec(c, node).squaredNorm() + s.x.vec(c, node).squaredNorm());
      worst = std::max(worst, v);
    }
  return worst;
}

AxiomReport axiom_report(const ConnectionForm& c, const AccordanceResult& acc, int trials, unsigned long long seed) {
  if (!acc.passed) throw PreconditionError("axiom_report: connection is not in accordance");
  if (trials < 1) throw InputError("axiom_report: trials must be positive");
  const auto& m = c.bundle.manifold;
  const int n = c.bundle.algebra.dim();
  std::mt19937_64 rng(seed);
  AxiomReport r;
  r.trials = trials;
  for (int t = 0; t < trials; ++t) {
    const auto s1 = random_section(n, m.dim(), rng).sample(m);
    const auto s2 = random_section(n, m.dim(), rng).sample(m);
    const auto s3 = random_section(n, m.dim(), rng).sample(m);
    const Field f = SmoothRandom(1, m.dim(), rng).sample(m);

    const auto b12 = algebroid_bracket(c, acc.data, s1, s2);
    const auto b21 = algebroid_bracket(c, acc.data, s2, s1);
    r.skew = std::max(r.skew, max_norm(combine(b12, 1.0, b21, 1.0), m));

    // {s1, f s2} - X1(f) s2 - f {s1, s2}
    const auto lhs = algebroid_bracket(c, acc.data, s1, scale(f, s2));
    const auto leib = combine(combine(lhs, 1.0, scale(directional(m, f, s1.x), s2), -1.0), 1.0, scale(f, b12), -1.0);
    r.leibniz = std::max(r.leibniz, max_norm(leib, m));

    const auto b23 = algebroid_bracket(c, acc.data, s2, s3);
    const auto b31 = algebroid_bracket(c, acc.data, s3, s1);
    const auto j1 = algebroid_bracket(c, acc.data, b12, s3);
    const auto j2 = algebroid_bracket(c, acc.data, b23, s1);
    const auto j3 = algebroid_bracket(c, acc.data, b31, s2);
    const auto jac = combine(combine(j1, 1.0, j2, 1.0), 1.0, j3, 1.0);
    r.jacobi = std::max(r.jacobi, max_norm(jac, m));
    r.jacobi_interior = std::max(r.jacobi_interior, max_norm(jac, m, 2));
  }
  return r;
}

}  // namespace algebroid
