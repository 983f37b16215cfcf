#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "algebroid/matfun.hpp"
#include "support.hpp"

using algebroid::Mat;
namespace mf = algebroid::matfun;
using testsupport::Gen;

TEST_CASE("expm of zero and of diagonal matrices") {
  CHECK(testsupport::max_abs(mf::expm(Mat::Zero(3, 3)) - Mat::Identity(3, 3)) == 0.0);
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 1.5;
  d(1, 1) = -0.25;
  const Mat e = mf::expm(d);
  CHECK(e(0, 0) == doctest::Approx(std::exp(1.5)).epsilon(1e-14));
  CHECK(e(1, 1) == doctest::Approx(std::exp(-0.25)).epsilon(1e-14));
  CHECK(e(0, 1) == 0.0);
}

TEST_CASE("expm against the Eigen oracle on random matrices") {
  Gen gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = gen.integer(1, 6);
    const double scale = gen.uniform(0.01, 6.0);
    const Mat a = gen.mat(n, n, scale);
    const Mat ours = mf::expm(a);
    const Mat oracle = a.exp();
    CHECK((ours - oracle).norm() <= 1e-12 * std::max(1.0, oracle.norm()));
  }
}

TEST_CASE("logm against the Eigen oracle near the identity") {
  Gen gen(12);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = gen.integer(1, 5);
    const Mat a = Mat::Identity(n, n) + gen.mat(n, n, 0.15);
    const auto ours = mf::logm(a);
    REQUIRE(ours.has_value());
    const Mat oracle = a.log();
    CHECK((*ours - oracle).norm() <= 1e-10);
  }
}

TEST_CASE("logm inverts expm for spectral radius below pi") {
  Gen gen(13);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = gen.integer(2, 5);
    Mat x = gen.mat(n, n, 1.0);
    const double radius = x.eigenvalues().cwiseAbs().maxCoeff();
    if (radius > 0) x *= gen.uniform(0.1, 3.0) / radius;
    const auto l = mf::logm(mf::expm(x));
    REQUIRE(l.has_value());
    CHECK((*l - x).norm() <= 1e-8 * std::max(1.0, x.norm()));
  }
}

TEST_CASE("logm refuses spectra on the negative axis") {
  Mat a = -Mat::Identity(2, 2);
  CHECK_FALSE(mf::logm(a).has_value());
  Mat b = Mat::Identity(3, 3);
  b(2, 2) = 0.0;
  CHECK_FALSE(mf::logm(b).has_value());
  CHECK(mf::has_nonpositive_real_eigenvalue(a));
  CHECK_FALSE(mf::has_nonpositive_real_eigenvalue(Mat::Identity(2, 2)));
}

TEST_CASE("logm of a rotation by less than pi") {
  Mat r(2, 2);
  const double t = 2.5;
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  const auto l = mf::logm(r);
  REQUIRE(l.has_value());
  CHECK((*l)(1, 0) == doctest::Approx(t).epsilon(1e-10));
  CHECK(std::abs((*l)(0, 0)) <= 1e-10);
}

TEST_CASE("sqrtm squares back") {
  Gen gen(14);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = gen.integer(1, 5);
    const Mat a = Mat::Identity(n, n) + gen.mat(n, n, 0.15);
    const auto s = mf::sqrtm(a);
    REQUIRE(s.has_value());
    CHECK((*s * *s - a).norm() <= 1e-10);
    CHECK((*s - a.sqrt()).norm() <= 1e-10);
  }
}
