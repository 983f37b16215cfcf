#include <doctest.h>

#include "algebroid/fixtures.hpp"
#include "algebroid/liealg.hpp"
#include "algebroid/matfun.hpp"
#include "support.hpp"

using namespace algebroid;
using testsupport::Gen;
using testsupport::max_abs;

namespace {

Vec e(int n, int i) { return Vec::Unit(n, i); }

Mat random_derivation(const LieAlgebra& g, const std::vector<Mat>& basis, Gen& gen) {
  Mat d = Mat::Zero(g.dim(), g.dim());
  for (const auto& b : basis) d += gen.uniform(-1, 1) * b;
  return d;
}

}  // namespace

TEST_CASE("fixture algebras satisfy antisymmetry and Jacobi exactly") {
  for (const auto& name : algebra_fixture_names()) {
    CAPTURE(name);
    const auto r = validate_algebra(fixture_algebra(name));
    CHECK(r.passed);
    CHECK(r.antisymmetry_residual <= 1e-12);
    CHECK(r.jacobi_residual <= 1e-12);
  }
  const auto ab = validate_algebra(fixture_algebra("abelian2"));
  CHECK(ab.antisymmetry_residual == 0.0);
  CHECK(ab.jacobi_residual == 0.0);
}

TEST_CASE("broken antisymmetry is reported at its index") {
  std::vector<double> c(8, 0.0);
  c[(0 * 2 + 1) * 2 + 0] = 1.0;
  c[(1 * 2 + 0) * 2 + 0] = 1.0;
  const auto r = validate_algebra(LieAlgebra("broken", 2, c));
  CHECK_FALSE(r.passed);
  CHECK(r.worst_index == std::vector<int>{0, 1, 0});
}

TEST_CASE("malformed tensors are input errors") {
  CHECK_THROWS_AS(LieAlgebra("bad", 2, std::vector<double>(7, 0.0)), InputError);
  CHECK_THROWS_AS(LieAlgebra("bad", 0, {}), InputError);
  CHECK_THROWS_AS(LieAlgebra("bad", 17, std::vector<double>(17 * 17 * 17, 0.0)), InputError);
  const auto g = fixture_algebra("so3");
  CHECK_THROWS_AS(bracket(g, Vec::Zero(2), Vec::Zero(3)), InputError);
}

TEST_CASE("bracket examples") {
  const auto so3 = fixture_algebra("so3");
  CHECK(max_abs(bracket(so3, e(3, 0), e(3, 1)) - e(3, 2)) == 0.0);
  const auto ab = fixture_algebra("abelian2");
  Gen gen(3);
  for (int t = 0; t < 20; ++t) CHECK(bracket(ab, gen.vec(2), gen.vec(2)).norm() == 0.0);
}

TEST_CASE("bracket is bilinear, antisymmetric and matches direct summation") {
  Gen gen(4);
  for (const auto& name : algebra_fixture_names()) {
    const auto g = fixture_algebra(name);
    const int n = g.dim();
    for (int t = 0; t < 100; ++t) {
      const Vec x = gen.vec(n), y = gen.vec(n), z = gen.vec(n);
      const double a = gen.uniform(-2, 2);
      CHECK(max_abs(bracket(g, x, y) - testsupport::bracket_sum(g, x, y)) <= 1e-14);
      CHECK(max_abs(bracket(g, x, x)) <= 1e-15);
      CHECK(max_abs(bracket(g, x, y) + bracket(g, y, x)) <= 1e-15);
      CHECK(max_abs(bracket(g, a * x + z, y) - a * bracket(g, x, y) - bracket(g, z, y)) <= 1e-13);
    }
  }
}

TEST_CASE("ad examples") {
  const auto so3 = fixture_algebra("so3");
  CHECK(max_abs(ad(so3, Vec::Zero(3))) == 0.0);
  const Mat a3 = ad(so3, e(3, 2));
  CHECK(max_abs(a3 * e(3, 0) - e(3, 1)) == 0.0);
  CHECK(max_abs(a3 * e(3, 1) + e(3, 0)) == 0.0);
  CHECK(max_abs(a3 * e(3, 2)) == 0.0);
  CHECK(max_abs(ad(fixture_algebra("abelian2"), Vec::Ones(2))) == 0.0);
}

TEST_CASE("ad is a Lie homomorphism") {
  Gen gen(5);
  for (const auto& name : algebra_fixture_names()) {
    const auto g = fixture_algebra(name);
    for (int t = 0; t < 100; ++t) {
      const Vec x = gen.vec(g.dim()), y = gen.vec(g.dim());
      const Mat lhs = ad(g, bracket(g, x, y));
      const Mat rhs = ad(g, x) * ad(g, y) - ad(g, y) * ad(g, x);
      CHECK(max_abs(lhs - rhs) <= 1e-9);
      CHECK(testsupport::der_defect(g, ad(g, x)) <= 1e-12);
    }
  }
}

TEST_CASE("center against the elimination oracle") {
  CHECK(center_basis(fixture_algebra("abelian2")).size() == 2);
  CHECK(center_basis(fixture_algebra("so3")).empty());
  const auto z = center_basis(fixture_algebra("heis3"));
  REQUIRE(z.size() == 1);
  CHECK(std::abs(std::abs(z[0][2]) - 1.0) <= 1e-12);
  for (const auto& name : algebra_fixture_names()) {
    const auto g = fixture_algebra(name);
    CAPTURE(name);
    CHECK(static_cast<int>(center_basis(g).size()) == testsupport::center_dim_oracle(g));
    for (const auto& v : center_basis(g)) CHECK(max_abs(ad(g, v)) <= 1e-12);
    // dim span ad = dim - dim center
    CHECK(InnerProjector(g).rank() == g.dim() - static_cast<int>(center_basis(g).size()));
  }
}

TEST_CASE("derivation dimensions against the elimination oracle") {
  for (const auto& name : algebra_fixture_names()) {
    const auto g = fixture_algebra(name);
    CAPTURE(name);
    const auto basis = derivations_basis(g);
    CHECK(static_cast<int>(basis.size()) == testsupport::derivation_dim_oracle(g));
    for (const auto& d : basis) CHECK(testsupport::der_defect(g, d) <= 1e-12);
  }
  CHECK(derivations_basis(fixture_algebra("abelian2")).size() == 4);
  CHECK(derivations_basis(fixture_algebra("so3")).size() == 3);
  CHECK(derivations_basis(fixture_algebra("heis3")).size() == 6);
}

TEST_CASE("inner derivations lie in the derivation span") {
  for (const auto& name : algebra_fixture_names()) {
    const auto g = fixture_algebra(name);
    const auto basis = derivations_basis(g);
    for (int i = 0; i < g.dim(); ++i) {
      const Mat a = g.ad_basis(i);
      Mat proj = Mat::Zero(g.dim(), g.dim());
      for (const auto& d : basis) proj += (d.cwiseProduct(a)).sum() * d;
      CHECK(max_abs(proj - a) <= 1e-12);
    }
  }
}

TEST_CASE("exp of derivations") {
  const auto so3 = fixture_algebra("so3");
  CHECK(max_abs(exp_derivation(so3, Mat::Zero(3, 3)) - Mat::Identity(3, 3)) == 0.0);

  const double th = 0.7;
  Mat rot = Mat::Identity(3, 3);
  rot(0, 0) = std::cos(th);
  rot(1, 0) = std::sin(th);
  rot(0, 1) = -std::sin(th);
  rot(1, 1) = std::cos(th);
  CHECK(max_abs(exp_derivation(so3, th * so3.ad_basis(2)) - rot) <= 1e-14);

  const auto h3 = fixture_algebra("heis3");
  const Mat a1 = h3.ad_basis(0);
  CHECK(max_abs(a1 * a1) == 0.0);
  CHECK(max_abs(exp_derivation(h3, a1) - (Mat::Identity(3, 3) + a1)) <= 1e-15);

  Mat bad = Mat::Zero(3, 3);
  bad(0, 0) = 1.0;
  CHECK_THROWS_AS(exp_derivation(so3, bad), InputError);
}

TEST_CASE("exp of random derivations are automorphisms") {
  Gen gen(6);
  for (const auto& name : algebra_fixture_names()) {
    const auto g = fixture_algebra(name);
    const auto basis = derivations_basis(g);
    double worst = 0.0;
    for (int t = 0; t < 250; ++t) {
      const Mat a = exp_derivation(g, random_derivation(g, basis, gen));
      worst = std::max(worst, testsupport::aut_defect(g, a));
      CHECK(is_automorphism(g, a));
    }
    CAPTURE(name);
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("principal log examples") {
  const auto so3 = fixture_algebra("so3");
  const auto l0 = principal_log(Mat::Identity(3, 3));
  REQUIRE(l0.has_value());
  CHECK(max_abs(*l0) <= 1e-15);
  const auto l = principal_log(matfun::expm(0.7 * so3.ad_basis(2)));
  REQUIRE(l.has_value());
  CHECK(max_abs(*l - 0.7 * so3.ad_basis(2)) <= 1e-12);
  CHECK_FALSE(principal_log(-Mat::Identity(2, 2)).has_value());
}

TEST_CASE("principal log inverts exp on derivations of small spectral radius") {
  Gen gen(7);
  for (const auto& name : algebra_fixture_names()) {
    const auto g = fixture_algebra(name);
    const auto basis = derivations_basis(g);
    for (int t = 0; t < 100; ++t) {
      Mat d = random_derivation(g, basis, gen);
      const double radius = d.eigenvalues().cwiseAbs().maxCoeff();
      if (radius >= 3.0) d *= 3.0 / radius;
      const auto l = principal_log(exp_derivation(g, d));
      REQUIRE(l.has_value());
      CHECK(max_abs(*l - d) <= 1e-8);
    }
  }
}

TEST_CASE("is_inner examples") {
  const auto so3 = fixture_algebra("so3");
  const auto id = is_inner(so3, Mat::Identity(3, 3));
  CHECK(id.verdict == Verdict::Inner);
  CHECK(id.witness.norm() == 0.0);

  const auto v = is_inner(so3, matfun::expm(1.2 * so3.ad_basis(1)));
  CHECK(v.verdict == Verdict::Inner);
  CHECK(max_abs(v.witness - 1.2 * e(3, 1)) <= 1e-8);

  const auto ab = fixture_algebra("abelian2");
  Mat d = Mat::Identity(2, 2);
  d(0, 0) = 2.0;
  CHECK(is_inner(ab, d).verdict == Verdict::Outer);
  CHECK(is_inner(ab, -Mat::Identity(2, 2)).verdict == Verdict::Outer);
  Mat swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK(is_inner(ab, swap).verdict == Verdict::Outer);

  CHECK_THROWS_AS(is_inner(so3, Mat::Identity(2, 2)), InputError);
  Mat not_aut = Mat::Identity(3, 3);
  not_aut(0, 0) = 2.0;
  CHECK_THROWS_AS(is_inner(so3, not_aut), InputError);
}

TEST_CASE("heis3 scaling is outer") {
  const auto h3 = fixture_algebra("heis3");
  Mat a = Mat::Identity(3, 3);
  a(0, 0) = 2.0;
  a(2, 2) = 2.0;
  REQUIRE(is_automorphism(h3, a));
  CHECK(is_inner(h3, a).verdict == Verdict::Outer);
}

TEST_CASE("outer_equal examples") {
  const auto so3 = fixture_algebra("so3");
  const Mat a = matfun::expm(so3.ad_basis(0));
  const Mat b = matfun::expm(so3.ad_basis(1));
  const auto same = outer_equal(so3, a, a);
  CHECK(same.verdict == Verdict::Inner);
  CHECK(same.witness.norm() <= 1e-12);
  CHECK(outer_equal(so3, a, b).verdict == Verdict::Inner);

  const auto ab = fixture_algebra("abelian2");
  Mat d = Mat::Identity(2, 2);
  d(0, 0) = 2.0;
  CHECK(outer_equal(ab, Mat::Identity(2, 2), d).verdict == Verdict::Outer);
}

TEST_CASE("exp(ad x) is inner for random small x") {
  Gen gen(8);
  for (const auto& name : algebra_fixture_names()) {
    const auto g = fixture_algebra(name);
    const InnerProjector proj(g);
    int inner = 0, outer = 0, undecided = 0;
    for (int t = 0; t < 200; ++t) {
      const Vec x = gen.ball(g.dim(), 1.0);
      const auto v = is_inner(g, proj, matfun::expm(ad(g, x)));
      if (v.verdict == Verdict::Inner) ++inner;
      if (v.verdict == Verdict::Outer) ++outer;
      if (v.verdict == Verdict::Undecided) ++undecided;
    }
    CAPTURE(name);
    CHECK(inner == 200);
    CHECK(outer == 0);
    CHECK(undecided == 0);
  }
}

TEST_CASE("products of inner automorphisms are inner") {
  Gen gen(9);
  const auto so3 = fixture_algebra("so3");
  for (int t = 0; t < 20; ++t) {
    Mat a = Mat::Identity(3, 3);
    for (int k = 0; k < 3; ++k) a = a * matfun::expm(ad(so3, gen.vec(3, 1.5)));
    CHECK(is_inner(so3, a).verdict == Verdict::Inner);
  }
}

TEST_CASE("witness reproduces the automorphism") {
  Gen gen(10);
  const auto h3 = fixture_algebra("heis3");
  for (int t = 0; t < 50; ++t) {
    const Mat a = matfun::expm(ad(h3, gen.vec(3)));
    const auto v = is_inner(h3, a);
    REQUIRE(v.verdict == Verdict::Inner);
    CHECK(max_abs(matfun::expm(ad(h3, v.witness)) - a) <= 1e-6);
  }
}
