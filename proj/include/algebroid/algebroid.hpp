// Brackets of the transitive Lie algebroid L + TM determined by a coupling
// (nabla, Omega), sections written as pairs (u, X), and the axiom checks.
#pragma once

#include <random>
#include <vector>

#include "algebroid/connection.hpp"

namespace algebroid {

struct AlgebroidSection {
  Field u;  // dim(g) x 1
  Field x;  // dim(M) x 1
};

/// {(u1,X1),(u2,X2)} = ([u1,u2] + nabla_X1 u2 - nabla_X2 u1 + Omega(X1,X2), [X1,X2]),
/// antisymmetrized so that swapping the arguments negates the result exactly.
AlgebroidSection algebroid_bracket(const ConnectionForm& c, const CurvatureData& omega, const AlgebroidSection& s1,
                                   const AlgebroidSection& s2);

/// ([u,v] + X(v) - Y(u), [X,Y]) on a single chart with identity frames.
AlgebroidSection trivial_bracket(const LieAlgebra& g, const ChartedManifold& m, const AlgebroidSection& s1,
                                 const AlgebroidSection& s2);

/// Nodewise f * s.
AlgebroidSection scale(const Field& f, const AlgebroidSection& s);

/// Band-limited trigonometric functions: each component is a sum of two
/// a cos(k.p + phase) terms with |a| <= 0.5 and |k_i| <= 1.
class SmoothRandom {
 public:
  SmoothRandom(int components, int base_dim, std::mt19937_64& rng);
  Field sample(const ChartedManifold& m) const;
  Vec operator()(const Vec& p) const;

 private:
  struct Term {
    Vec k;
    double a;
    double phase;
  };
  int components_;
  std::vector<std::vector<Term>> terms_;
};

struct RandomSection {
  SmoothRandom u;
  SmoothRandom x;

  AlgebroidSection sample(const ChartedManifold& m) const { return {u.sample(m), x.sample(m)}; }
};

RandomSection random_section(int fiber_dim, int base_dim, std::mt19937_64& rng);

struct AxiomReport {
  int trials = 0;
  double skew = 0.0;
  double leibniz = 0.0;
  double jacobi = 0.0;
  /// Jacobi residual away from the two outermost node layers, where nested
  /// one-sided differences lose an order.
  double jacobi_interior = 0.0;
};

/// Max residuals of the three axioms over `trials` random section triples.
/// Throws PreconditionError if accordance did not pass.
AxiomReport axiom_report(const ConnectionForm& c, const AccordanceResult& acc, int trials, unsigned long long seed);

/// Largest nodewise norm of (u, X), skipping `margin` node layers at every chart face.
double max_norm(const AlgebroidSection& s, const ChartedManifold& m, int margin = 0);

}  // namespace algebroid
