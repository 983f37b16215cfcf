#include "algebroid/fixtures.hpp"

#include <array>
#include <cmath>
#include <functional>

#include "algebroid/matfun.hpp"

namespace algebroid {

namespace {

constexpr double kTwoPi = 6.283185307179586;

LieAlgebra from_brackets(const std::string& name, int dim, std::initializer_list<std::array<int, 3>> rules,
                         std::initializer_list<double> coeffs) {
  std::vector<double> c(static_cast<std::size_t>(dim) * dim * dim, 0.0);
  auto it = coeffs.begin();
  for (const auto& r : rules) {
    const double v = *it++;
    c[(r[0] * dim + r[1]) * dim + r[2]] += v;
    c[(r[1] * dim + r[0]) * dim + r[2]] -= v;
  }
  return LieAlgebra(name, dim, std::move(c));
}

Mat ad_vec(const LieAlgebra& g, const Vec& x) { return ad(g, x); }

Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }

/// Step over sigma in [1/6, 1/2], the gap between the two overlap components of chart 1.
double chart1_step(double sigma) { return smooth_step((sigma - 1.0 / 6.0) * 3.0); }

Mat so3_twist(const LieAlgebra& g) { return matfun::expm(kTwistAngle * g.ad_basis(2)); }

Vec loop_p(double t) { return v3(0.3 * std::cos(kTwoPi * t), 0.2 * std::sin(kTwoPi * t), 0.25); }

/// Constant along the circle so that chart-face stencils agree across the overlaps.
Vec cyl_p(int axis, double y) {
  if (axis == 0) return v3(0.3 * (1 + 0.3 * y), 0.2 * std::sin(2 * y), 0.25 * y);
  return v3(0.1 * std::cos(y), 0.2 * y * y, 0.15);
}

Vec disk_p(const Vec& p) {
  const double x = p[0], y = p[1];
  return v3(0.3 * std::sin(2 * x + y), 0.2 * std::cos(3 * y), 0.25 * x * y);
}

Vec disk_q(const Vec& p) {
  const double x = p[0], y = p[1];
  return v3(0.1 * std::cos(x - y), 0.3 * std::sin(2 * x), 0.2 * x + 0.1 * y * y);
}

/// Chart-0 fiber field p(t) carried into chart 1 through the constant transitions
/// I (first overlap) and A (second overlap), blended across the gap.
Vec twisted_chart1(const Mat& twist, const std::function<Vec(double)>& p, double sigma) {
  const double s = chart1_step(sigma);
  return (1.0 - s) * p(sigma + 0.5) + s * (twist * p(sigma - 0.5));
}

}  // namespace

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

std::vector<std::string> algebra_fixture_names() { return {"abelian2", "so3", "aff1", "heis3"}; }

LieAlgebra fixture_algebra(const std::string& name) {
  if (name == "abelian2") return LieAlgebra(name, 2, std::vector<double>(8, 0.0));
  if (name == "so3") return from_brackets(name, 3, {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}, {1.0, 1.0, 1.0});
  if (name == "aff1") return from_brackets(name, 2, {{0, 1, 1}}, {1.0});
  if (name == "heis3") return from_brackets(name, 3, {{0, 1, 2}}, {1.0});
  throw InputError("unknown algebra fixture: " + name);
}

std::vector<std::string> bundle_fixture_names() {
  return {"interval1_so3_trivial", "disk2d_so3_trivial",   "disk2d_abelian2_trivial", "circle2_so3_twisted",
          "circle2_so3_inner",     "circle2_abelian2_varying", "circle2_heis3_outer",   "cyl2_so3_twisted"};
}

Trivialization fixture_bundle(const std::string& name, int resolution) {
  if (name == "interval1_so3_trivial")
    return trivial_bundle(fixture_algebra("so3"), fixture_manifold("interval1", resolution));
  if (name == "disk2d_so3_trivial") return trivial_bundle(fixture_algebra("so3"), fixture_manifold("disk2d", resolution));
  if (name == "disk2d_abelian2_trivial")
    return trivial_bundle(fixture_algebra("abelian2"), fixture_manifold("disk2d", resolution));

  if (name == "circle2_so3_twisted" || name == "cyl2_so3_twisted") {
    // Transition I on the first overlap and exp(theta ad e3) on the second.
    const auto g = fixture_algebra("so3");
    auto t = trivial_bundle(g, fixture_manifold(name == "cyl2_so3_twisted" ? "cyl2" : "circle2", resolution));
    t.frames = sample_field(t.manifold, 3, 3, [&](int chart, const Vec& p) -> Mat {
      if (chart == 0) return Mat::Identity(3, 3);
      return matfun::expm(-chart1_step(p[0]) * kTwistAngle * g.ad_basis(2));
    });
    return t;
  }
  if (name == "circle2_so3_inner") {
    const auto g = fixture_algebra("so3");
    auto t = trivial_bundle(g, fixture_manifold("circle2", resolution));
    t.frames = sample_field(t.manifold, 3, 3, [&](int chart, const Vec& p) -> Mat {
      if (chart == 0) return Mat::Identity(3, 3);
      const double s = p[0];
      const Vec x = v3(0.5 * std::cos(kTwoPi * s), 0.0, 0.8 * std::sin(kTwoPi * s) + 0.3);
      return matfun::expm(-ad_vec(g, x));
    });
    return t;
  }
  if (name == "circle2_abelian2_varying") {
    // Transition climbs from diag(1,1) to diag(2,1) across the first overlap.
    auto t = trivial_bundle(fixture_algebra("abelian2"), fixture_manifold("circle2", resolution));
    t.frames = sample_field(t.manifold, 2, 2, [&](int chart, const Vec& p) -> Mat {
      Mat f = Mat::Identity(2, 2);
      if (chart == 1) f(0, 0) = 1.0 / (1.0 + smooth_step(p[0] * 6.0));
      return f;
    });
    return t;
  }
  if (name == "circle2_heis3_outer") {
    // Transition I on the first overlap and diag(2,1,2), an outer automorphism, on the second.
    auto t = trivial_bundle(fixture_algebra("heis3"), fixture_manifold("circle2", resolution));
    t.frames = sample_field(t.manifold, 3, 3, [&](int chart, const Vec& p) -> Mat {
      Mat f = Mat::Identity(3, 3);
      if (chart == 1) {
        const double a = std::pow(2.0, -chart1_step(p[0]));
        f(0, 0) = a;
        f(2, 2) = a;
      }
      return f;
    });
    return t;
  }
  throw InputError("unknown bundle fixture: " + name);
}

std::vector<std::string> connection_fixture_names() {
  return {"interval1_so3_flat", "circle2_so3_twisted_conn", "circle2_so3_twisted_flat", "disk2d_so3_nonflat",
          "abelian_nonflat",    "circle2_heis3_flat",       "cyl2_so3"};
}

std::vector<std::string> coupling_fixture_names() {
  return {"interval1_so3_flat", "circle2_so3_twisted_conn", "circle2_so3_twisted_flat", "disk2d_so3_nonflat",
          "circle2_heis3_flat", "cyl2_so3"};
}

ConnectionForm fixture_connection(const std::string& name, int resolution) {
  if (name == "interval1_so3_flat") {
    const auto t = fixture_bundle("interval1_so3_trivial", resolution);
    return sample_connection(t, [&](int, const Vec& p, int) {
      return ad(t.algebra, v3(0.4 * std::sin(kTwoPi * p[0]), 0.3 * p[0], 0.2));
    });
  }
  if (name == "circle2_so3_twisted_conn") {
    const auto t = fixture_bundle("circle2_so3_twisted", resolution);
    const Mat twist = so3_twist(t.algebra);
    return sample_connection(t, [&](int chart, const Vec& p, int) {
      return ad(t.algebra, chart == 0 ? loop_p(p[0]) : twisted_chart1(twist, loop_p, p[0]));
    });
  }
  if (name == "circle2_so3_twisted_flat") return zero_connection(fixture_bundle("circle2_so3_twisted", resolution));
  if (name == "circle2_heis3_flat") return zero_connection(fixture_bundle("circle2_heis3_outer", resolution));
  if (name == "disk2d_so3_nonflat") {
    const auto t = fixture_bundle("disk2d_so3_trivial", resolution);
    return sample_connection(t, [&](int, const Vec& p, int axis) { return ad(t.algebra, axis == 0 ? disk_p(p) : disk_q(p)); });
  }
  if (name == "abelian_nonflat") {
    // omega_y = x D with D nilpotent, so R_xy = D while ad vanishes identically.
    const auto t = fixture_bundle("disk2d_abelian2_trivial", resolution);
    return sample_connection(t, [&](int, const Vec& p, int axis) {
      Mat w = Mat::Zero(2, 2);
      if (axis == 1) w(0, 1) = p[0];
      return w;
    });
  }
  if (name == "cyl2_so3") {
    const auto t = fixture_bundle("cyl2_so3_twisted", resolution);
    const Mat twist = so3_twist(t.algebra);
    return sample_connection(t, [&](int chart, const Vec& p, int axis) {
      const double y = p[1];
      if (chart == 0) return ad(t.algebra, cyl_p(axis, y));
      return ad(t.algebra, twisted_chart1(twist, [&](double) { return cyl_p(axis, y); }, p[0]));
    });
  }
  throw InputError("unknown connection fixture: " + name);
}

SmoothMapSpec degree_two_map(int resolution) {
  SmoothMapSpec f{fixture_manifold("circle4", resolution), {0, 1, 0, 1}, {}};
  for (int k = 0; k < 4; ++k) {
    AffineMap a;
    a.matrix = Mat::Constant(1, 1, 2.0);
    a.offset = Vec::Zero(1);
    f.maps.push_back(a);
  }
  return f;
}

}  // namespace algebroid
