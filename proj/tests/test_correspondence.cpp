#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "algebroid/correspondence.hpp"
#include "algebroid/fixtures.hpp"
#include "algebroid/matfun.hpp"
#include "support.hpp"

using namespace algebroid;
using testsupport::Gen;
using testsupport::max_abs;

namespace {

constexpr double kTwoPi = 6.283185307179586;

Vec pt(double x) { return Vec::Constant(1, x); }

ConnectionForm constant_line_connection(const Mat& d) {
  const auto t = trivial_bundle(fixture_algebra(d.rows() == 3 ? "so3" : "abelian2"), fixture_manifold("interval1", 17));
  return sample_connection(t, [&](int, const Vec&, int) { return d; });
}

Mat line_transport(const ConnectionForm& c, int steps) {
  return parallel_transport(c, segment_path(c.bundle.manifold, 0, pt(0.0), pt(1.0), steps)).matrix;
}

// Loop around the two-arc circle with decreasing parameter, starting and ending at t = 1/4 in chart 0.
// `per` RK4 steps per grid interval of the resolution-33 grid.
std::vector<PathLeg> circle2_loop(int per) {
  return {{0, pt(0.25), pt(1.0 / 12), 8 * per},
          {1, pt(7.0 / 12), pt(1.0 / 12), 24 * per},
          {0, pt(7.0 / 12), pt(0.25), 16 * per}};
}

Trivialization interval_frame(const Mat& gen, int res) {
  auto t = trivial_bundle(fixture_algebra("so3"), fixture_manifold("interval1", res));
  t.frames = sample_field(t.manifold, 3, 3, [&](int, const Vec& p) { return matfun::expm(p[0] * gen); });
  return t;
}

}  // namespace

TEST_CASE("transport with zero form is the identity") {
  const auto c = zero_connection(fixture_bundle("disk2d_so3_trivial", 17));
  const auto r = parallel_transport(c, ray_path(c.bundle.manifold, 0, 0, 16));
  CHECK(max_abs(r.matrix - Mat::Identity(3, 3)) == 0.0);
  CHECK(r.ode_steps == 16);
}

TEST_CASE("constant form transport against the exponential oracle") {
  Gen gen(51);
  const auto g = fixture_algebra("so3");
  for (int trial = 0; trial < 30; ++trial) {
    const Mat d = ad(g, gen.ball(3, 1.0));
    const Mat oracle = Mat(-d).exp();
    const auto r = parallel_transport(constant_line_connection(d), segment_path(fixture_manifold("interval1", 17), 0, pt(0), pt(1), 64));
    CHECK(max_abs(r.matrix - oracle) <= 1e-8);
    CHECK(r.aut_residual <= 1e-6);
  }
  // a non-normal constant form on the abelian plane
  Mat d(2, 2);
  d << 0.3, 0.8, -0.1, -0.4;
  CHECK(max_abs(line_transport(constant_line_connection(d), 64) - Mat(-d).exp()) <= 1e-8);
}

TEST_CASE("RK4 error falls sixteenfold per step halving") {
  const auto g = fixture_algebra("so3");
  const Mat d = ad(g, (Vec(3) << 0.6, -0.5, 0.6).finished());
  const auto c = constant_line_connection(d);
  const Mat oracle = Mat(-d).exp();
  const double e16 = (line_transport(c, 16) - oracle).norm();
  const double e32 = (line_transport(c, 32) - oracle).norm();
  CHECK(e16 / e32 >= 12.0);
  CHECK(e16 / e32 <= 20.0);
}

TEST_CASE("transport paths leaving the chart are rejected") {
  const auto c = zero_connection(fixture_bundle("interval1_so3_trivial", 17));
  Path p = segment_path(c.bundle.manifold, 0, pt(0.5), pt(1.0), 4);
  p.points.back()[0] = 1.2;
  CHECK_THROWS_AS(parallel_transport(c, p), InputError);
}

TEST_CASE("transport flow property along split rays") {
  Gen gen(52);
  for (const auto& name : coupling_fixture_names()) {
    const auto c = fixture_connection(name);
    const auto& m = c.bundle.manifold;
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const int chart = gen.integer(0, m.chart_count() - 1);
      const int node = gen.integer(0, m.chart(chart).node_count() - 1);
      const Vec a = m.chart(chart).center_point(), b = m.chart(chart).node_point(node);
      const Vec mid = 0.5 * (a + b);
      const Mat full = parallel_transport(c, segment_path(m, chart, a, b, 64)).matrix;
      const Mat first = parallel_transport(c, segment_path(m, chart, a, mid, 32)).matrix;
      const Mat second = parallel_transport(c, segment_path(m, chart, mid, b, 32)).matrix;
      worst = std::max(worst, max_abs(second * first - full));
    }
    CAPTURE(name);
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("loop transport on the flat twisted circle is the cocycle value") {
  const auto c = fixture_connection("circle2_so3_twisted_flat");
  const Mat a = matfun::expm(kTwistAngle * c.bundle.algebra.ad_basis(2));
  const auto loop = chain_transport(c, circle2_loop(2));
  CHECK(max_abs(loop.matrix - a) <= 1e-12);

  // reversed orientation gives the inverse
  std::vector<PathLeg> back = {{0, pt(0.25), pt(7.0 / 12), 16}, {1, pt(1.0 / 12), pt(7.0 / 12), 16}, {0, pt(1.0 / 12), pt(0.25), 16}};
  CHECK(max_abs(chain_transport(c, back).matrix - a.inverse()) <= 1e-12);

  std::vector<PathLeg> broken = {{0, pt(0.25), pt(0.3), 4}, {1, pt(0.1), pt(0.2), 4}};
  CHECK_THROWS_AS(chain_transport(c, broken), InputError);
}

TEST_CASE("f_map of the zero form on identity frames") {
  const auto c = zero_connection(fixture_bundle("circle2_so3_twisted", 17));
  const auto f = f_map(c);
  CHECK(f.theorem_holds);
  for (int ch = 0; ch < 2; ++ch)
    CHECK(f.bundle.frames.chart_data(ch) == c.bundle.frames.chart_data(ch));
  const auto id = f_map(zero_connection(fixture_bundle("disk2d_so3_trivial", 17)));
  for (int n = 0; n < id.bundle.manifold.chart(0).node_count(); ++n)
    CHECK(max_abs(id.bundle.frames.mat(0, n) - Mat::Identity(3, 3)) == 0.0);
}

TEST_CASE("f_map of a flat twisted connection has locally constant transitions") {
  const auto c = fixture_connection("circle2_so3_twisted_conn");
  const auto f = f_map(c);
  REQUIRE(f.theorem_holds);
  for (const auto& tr : transitions(f.bundle)) {
    double spread = 0.0;
    for (const auto& v : tr.values) spread = std::max(spread, max_abs(v - tr.values.front()));
    CHECK(spread <= 1e-6);
  }
}

TEST_CASE("f_map on the non-flat disk") {
  const auto f = f_map(fixture_connection("disk2d_so3_nonflat"));
  CHECK(f.theorem_holds);
  CHECK(validate_lab(f.bundle).passed);
  CHECK(transitions(f.bundle).empty());
}

TEST_CASE("f_map theorem holds on every fixture coupling") {
  for (const auto& name : coupling_fixture_names()) {
    const auto f = f_map(fixture_connection(name));
    CAPTURE(name);
    CHECK(f.theorem_holds);
    CHECK(f.automorphism.residuals.at("automorphism") <= 1e-6);
    CHECK(f.delta.totals().outer == 0);
    CHECK(f.delta.totals().undecided == 0);
  }
}

TEST_CASE("f_map rejects non-couplings") {
  CHECK_THROWS_AS(f_map(fixture_connection("abelian_nonflat")), PreconditionError);
}

TEST_CASE("f_map class does not depend on the ray origins") {
  for (const std::string name : {"disk2d_so3_nonflat", "cyl2_so3", "circle2_so3_twisted_conn"}) {
    const auto c = fixture_connection(name);
    const auto& m = c.bundle.manifold;
    FMapOptions other;
    for (int ch = 0; ch < m.chart_count(); ++ch) {
      auto idx = m.chart(ch).center;
      for (auto& i : idx) i = std::max(0, i - 5);
      other.centers.push_back(idx);
    }
    const auto f1 = f_map(c);
    const auto f2 = f_map(c, other);
    CAPTURE(name);
    CHECK(f2.theorem_holds);
    CHECK(trivializations_equivalent(f1.bundle, f2.bundle).passed);
  }
}

TEST_CASE("g_map of constant frames is flat") {
  auto t = trivial_bundle(fixture_algebra("so3"), fixture_manifold("interval1"));
  const Mat b = matfun::expm(0.4 * t.algebra.ad_basis(1));
  for (int n = 0; n < t.manifold.chart(0).node_count(); ++n) t.frames.mat(0, n) = b;
  const auto c = g_map(t, partition_of_unity(t.manifold));
  CHECK(testsupport::max_block(c.omega[0]) == 0.0);
}

TEST_CASE("g_map of a rotating frame on the interval") {
  // A single chart glues nothing: the local form vanishes and the ambient form is
  // -F' F^{-1} = -ad e3, up to the second-order frame differences.
  auto error = [](int res) {
    const auto t = interval_frame(fixture_algebra("so3").ad_basis(2), res);
    const auto c = g_map(t, partition_of_unity(t.manifold));
    CHECK(testsupport::max_block(c.omega[0]) == 0.0);
    const auto amb = ambient_form(c);
    const Mat expect = -t.algebra.ad_basis(2);
    double worst = 0.0;
    for (int n = 0; n < t.manifold.chart(0).node_count(); ++n) worst = std::max(worst, max_abs(amb[0].mat(0, n) - expect));
    return worst;
  };
  const double e33 = error(33), e65 = error(65);
  CHECK(e33 <= 1e-3);
  CHECK(e33 / e65 >= 3.5);
  CHECK(e33 / e65 <= 4.5);
}

TEST_CASE("g_map yields couplings on every delta-continuous fixture bundle") {
  for (const auto& name : bundle_fixture_names()) {
    const auto t = fixture_bundle(name);
    CAPTURE(name);
    if (!check_delta_continuity(t).passed) {
      CHECK_THROWS_AS(g_map(t, partition_of_unity(t.manifold)), PreconditionError);
      continue;
    }
    const auto c = g_map(t, partition_of_unity(t.manifold));
    CHECK(validate_connection(c).passed);
    const auto acc = accordance(c);
    CHECK(acc.passed);
    CHECK(acc.max_residual <= 1e-4);
  }
}

TEST_CASE("g_map matches the glued chart connections applied to sections") {
  // Ambient sections U(t) on the unit circle, read in each chart as F_a^{-1} U. The glued
  // connection is sum_a h_a F_b^{-1} F_a d(s_a); the weights are never differentiated.
  // g_map differentiates transitions by log stencils and the oracle differentiates sections
  // by plain differences, so the two agree up to O(h^2).
  Gen gen(53);
  for (const std::string name : {"circle2_so3_twisted", "circle2_so3_inner"}) {
    const Vec amp = gen.vec(3), ph = gen.vec(3, 3.0);
    auto ambient = [&](double s) {
      Vec u(3);
      for (int i = 0; i < 3; ++i) u[i] = amp[i] * std::cos(kTwoPi * s + ph[i]) + 0.3 * std::sin(2 * kTwoPi * s);
      return u;
    };
    auto error = [&](int res) {
      const auto t = fixture_bundle(name, res);
      const auto& m = t.manifold;
      const auto h = partition_of_unity(m);
      const auto c = g_map(t, h);
      const double shift[2] = {0.0, 0.5};
      Field s(m, 3, 1);
      for (int ch = 0; ch < 2; ++ch)
        for (int n = 0; n < m.chart(ch).node_count(); ++n)
          s.vec(ch, n) = t.frames.mat(ch, n).inverse() * ambient(m.chart(ch).node_point(n)[0] + shift[ch]);
      const auto ds = partial(m, s, 0);
      const auto ones = sample_field(m, 1, 1, [](int, const Vec&) { return Mat::Constant(1, 1, 1.0); });
      const auto got = apply_connection(c, s, ones);
      double worst = 0.0;
      for (int b = 0; b < 2; ++b)
        for (int n = 0; n < m.chart(b).node_count(); ++n) {
          Vec expect = h.sampled().scalar(b, n) * ds.vec(b, n);
          const Vec x = m.chart(b).node_point(n);
          for (int o : m.overlaps_containing(b, x)) {
            const auto& ov = m.overlap(o);
            const auto st = locate(m.chart(ov.beta), ov.map.apply(x));
            const Mat fa = interpolate(t.frames, ov.beta, st);
            expect += interpolate(h.sampled(), ov.beta, st)(0, 0) * t.frames.mat(b, n).inverse() * fa *
                      interpolate(ds, ov.beta, st) * ov.map.matrix(0, 0);
          }
          worst = std::max(worst, (got.vec(b, n) - expect).norm());
        }
      return worst;
    };
    const double e33 = error(33), e65 = error(65), e129 = error(129);
    CAPTURE(name);
    CAPTURE(e33);
    CAPTURE(e65);
    CAPTURE(e129);
    CHECK(e33 / e65 >= 3.5);
    CHECK(e33 / e65 <= 4.5);
    CHECK(e65 / e129 >= 3.5);
    CHECK(e65 / e129 <= 4.5);
  }
}

TEST_CASE("g is well defined") {
  const auto t = fixture_bundle("circle2_so3_twisted");
  const auto h = partition_of_unity(t.manifold);
  const auto same = verify_g_well_defined(t, t, h, h);
  CHECK(same.passed);
  CHECK(same.residuals.at("coupling") == 0.0);

  const auto sharp = partition_of_unity(t.manifold, {3.0});
  CHECK(verify_g_well_defined(t, t, h, sharp).passed);

  Trivialization t2 = t;
  const Mat b0 = matfun::expm(0.7 * t.algebra.ad_basis(0)), b1 = matfun::expm(-1.1 * t.algebra.ad_basis(1));
  for (int ch = 0; ch < 2; ++ch)
    for (int n = 0; n < t.manifold.chart(ch).node_count(); ++n) t2.frames.mat(ch, n) = t.frames.mat(ch, n) * (ch == 0 ? b0 : b1);
  CHECK(verify_g_well_defined(t, t2, h, sharp).passed);

  const auto h3 = fixture_bundle("circle2_heis3_outer");
  Trivialization h3b = h3;
  Mat scale = Mat::Identity(3, 3);
  scale(1, 1) = 3.0;
  scale(2, 2) = 3.0;
  for (int n = 0; n < h3.manifold.chart(0).node_count(); ++n) h3b.frames.mat(0, n) = h3.frames.mat(0, n) * scale;
  CHECK(verify_g_well_defined(h3, h3b, partition_of_unity(h3.manifold), partition_of_unity(h3.manifold)).passed);
}

TEST_CASE("round trips") {
  const auto flat = zero_connection(fixture_bundle("interval1_so3_trivial"));
  const auto r0 = verify_inverse(flat, partition_of_unity(flat.bundle.manifold));
  CHECK(r0.passed);
  CHECK(r0.couplings.residuals.at("coupling") <= 1e-10);

  for (const std::string name : {"circle2_so3_twisted_flat", "circle2_so3_twisted_conn", "interval1_so3_flat"}) {
    const auto c = fixture_connection(name);
    const auto r = verify_inverse(c, partition_of_unity(c.bundle.manifold));
    CAPTURE(name);
    CHECK(r.passed);
    CHECK_FALSE(r.inconclusive);
    CHECK(r.couplings.residuals.at("coupling") <= 1e-4);
  }
  for (const std::string name : {"circle2_so3_twisted", "circle2_so3_inner", "circle2_heis3_outer"}) {
    const auto t = fixture_bundle(name);
    const auto r = verify_inverse(t, partition_of_unity(t.manifold));
    CAPTURE(name);
    CHECK(r.passed);
    CHECK(r.trivializations.verdicts.outer == 0);
  }

  const auto ab = fixture_connection("abelian_nonflat");
  const auto bad = verify_inverse(ab, partition_of_unity(ab.bundle.manifold));
  CHECK_FALSE(bad.passed);
  CHECK_FALSE(bad.inconclusive);
  CHECK(bad.note == "not a coupling");

  const auto varying = fixture_bundle("circle2_abelian2_varying");
  const auto rv = verify_inverse(varying, partition_of_unity(varying.manifold));
  CHECK_FALSE(rv.passed);
  CHECK_FALSE(rv.inconclusive);
}

TEST_CASE("loop transport of a pulled-back connection squares the holonomy") {
  const auto c = fixture_connection("circle2_so3_twisted_conn");
  const auto pc = pullback_connection(c, degree_two_map());
  REQUIRE(validate_lab(pc.bundle).passed);
  const auto target = chain_transport(c, circle2_loop(2)).matrix;
  // once around the four-arc circle, two steps per source grid interval
  std::vector<PathLeg> legs = {{0, pt(1.0 / 8), pt(1.0 / 24), 16}};
  for (int k = 1; k < 4; ++k) legs.push_back({4 - k, pt(7.0 / 24), pt(1.0 / 24), 48});
  legs.push_back({0, pt(7.0 / 24), pt(1.0 / 8), 32});
  const auto source = chain_transport(pc, legs).matrix;
  CHECK(max_abs(source - target * target) <= 1e-5);
}
