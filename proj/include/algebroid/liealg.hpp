// Finite-dimensional Lie algebras given by structure constants, their
// derivations and automorphisms, and the inner/outer decision procedure.
//
// Basis convention: [e_i, e_j] = sum_k c(i, j, k) e_k, indices 0-based.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "algebroid/common.hpp"

namespace algebroid {

inline constexpr int kMaxAlgebraDim = 16;

class LieAlgebra {
 public:
  LieAlgebra() = default;
  /// `constants` is the dense dim^3 tensor in (i, j, k) row-major order.
  /// Throws InputError on a shape mismatch or a dimension outside [1, 16].
  LieAlgebra(std::string name, int dim, std::vector<double> constants);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  double c(int i, int j, int k) const { return c_[(static_cast<std::size_t>(i) * dim_ + j) * dim_ + k]; }
  const std::vector<double>& constants() const { return c_; }
  /// ad(e_i) as a dim x dim matrix.
  const Mat& ad_basis(int i) const { return ad_basis_[i]; }

 private:
  std::string name_;
  int dim_ = 0;
  std::vector<double> c_;
  std::vector<Mat> ad_basis_;
};

struct AlgebraValidation {
  bool passed = false;
  double antisymmetry_residual = 0.0;
  double jacobi_residual = 0.0;
  /// Worst-offending index tuple: (i, j, k) for antisymmetry or (i, j, k, l) for Jacobi.
  std::vector<int> worst_index;
};

AlgebraValidation validate_algebra(const LieAlgebra& g, double tol = 1e-9);

Vec bracket(const LieAlgebra& g, const Vec& x, const Vec& y);
Mat ad(const LieAlgebra& g, const Vec& x);

/// Orthonormal basis of the center, i.e. the kernel of x -> ad(x).
std::vector<Vec> center_basis(const LieAlgebra& g, double tol = 1e-9);

/// Orthonormal (Frobenius) basis of Der(g).
std::vector<Mat> derivations_basis(const LieAlgebra& g, double tol = 1e-9);

/// max over basis pairs of ||D[x,y] - [Dx,y] - [x,Dy]||.
double derivation_residual(const LieAlgebra& g, const Mat& d);
/// max over basis pairs of ||A[x,y] - [Ax,Ay]||.
double automorphism_residual(const LieAlgebra& g, const Mat& a);

bool is_derivation(const LieAlgebra& g, const Mat& d, double tol = 1e-9);
bool is_automorphism(const LieAlgebra& g, const Mat& a, double tol = 1e-9);

/// exp(D) for D in Der(g). Throws InputError if D is not a derivation.
Mat exp_derivation(const LieAlgebra& g, const Mat& d, double tol = 1e-9);

/// Real principal logarithm; nullopt when the spectrum obstructs it.
std::optional<Mat> principal_log(const Mat& a, double tol = 1e-9);

/// Least-squares projection onto span{ad(e_i)} with minimum-norm coefficients.
class InnerProjector {
 public:
  InnerProjector() = default;
  explicit InnerProjector(const LieAlgebra& g, double tol = 1e-9);

  struct Projection {
    Vec x;            // minimum-norm solution of ad(x) ~ d
    double residual;  // ||d - ad(x)||_F
  };
  Projection project(const Mat& d) const;
  /// dim span{ad(e_i)}
  int rank() const { return rank_; }

 private:
  int dim_ = 0;
  int rank_ = 0;
  Mat pinv_;   // dim x dim^2
  Mat basis_;  // dim^2 x dim, columns vec(ad e_i)
};

enum class Verdict { Inner, Outer, Undecided };
std::string_view to_string(Verdict v);

struct InnerVerdict {
  Verdict verdict = Verdict::Undecided;
  /// Minimum-norm x with exp(ad x) ~ A when found through the logarithm.
  Vec witness;
  /// Factors x_1..x_k with A ~ prod exp(ad x_j) when found by factor search.
  std::vector<Vec> factors;
  double residual = 0.0;
};

struct InnerOptions {
  double alg_tol = 1e-9;
  double inner_tol = 1e-6;
  /// Automorphism check applied to the input; loose enough for transported data.
  double aut_tol = 1e-6;
  int max_factors = 4;
  int restarts = 16;
  unsigned long long seed = 0x5eedULL;
};

/// Decides whether A lies in Inn(g), the group generated by exp(ad x).
/// Throws InputError if A is not an automorphism.
InnerVerdict is_inner(const LieAlgebra& g, const Mat& a, const InnerOptions& opt = {});
InnerVerdict is_inner(const LieAlgebra& g, const InnerProjector& proj, const Mat& a, const InnerOptions& opt = {});

/// Equality of outer classes: is_inner(A B^{-1}).
InnerVerdict outer_equal(const LieAlgebra& g, const Mat& a, const Mat& b, const InnerOptions& opt = {});

}  // namespace algebroid
