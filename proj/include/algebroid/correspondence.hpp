// The maps between couplings and Aut^delta-trivializations: f by parallel
// transport along rays from the chart centers, g by gluing the flat chart
// connections of a trivialization with a partition of unity.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "algebroid/connection.hpp"

namespace algebroid {

struct TransportResult {
  Mat matrix;
  /// Relative automorphism defect of `matrix`.
  double aut_residual = 0.0;
  int ode_steps = 0;
};

/// Solves T' = -omega(gamma')(gamma) T, T(0) = I by classical RK4 on the path's
/// uniform parameter grid. Throws InputError if the path leaves its chart.
TransportResult parallel_transport(const ConnectionForm& c, const Path& p);

/// One straight piece of a chart-hopping path.
struct PathLeg {
  int chart = 0;
  Vec from;
  Vec to;
  int steps = 64;
};

/// Transport along consecutive legs, switching local coordinates through the
/// transition at each junction. The result acts on the first leg's coordinates
/// and lands in the last leg's coordinates.
TransportResult chain_transport(const ConnectionForm& c, const std::vector<PathLeg>& legs);

struct FMapOptions {
  int steps = 64;
  /// Per-chart grid index of the ray origin; empty uses the manifold centers.
  std::vector<std::vector<int>> centers;
  Tolerances tol;
};

struct FMapResult {
  Trivialization bundle;
  /// Pointwise automorphism check of the new transitions at TRANS_TOL.
  ValidationReport automorphism;
  DeltaReport delta;
  bool theorem_holds = false;
  double accordance_residual = 0.0;
};

/// Frames F_a(x) T_a(x) with T_a the transport along the ray from the chart's
/// center to x. Throws PreconditionError unless C validates and is in accordance.
FMapResult f_map(const ConnectionForm& c, const FMapOptions& opt = {});

/// omega_b = sum_gamma h_gamma phi_bg^{-1} d(phi_bg), projected onto Der(g).
/// Throws PreconditionError unless the bundle validates and is delta-continuous.
ConnectionForm g_map(const Trivialization& t, const PartitionOfUnity& h, const Tolerances& tol = {});

struct CheckReport {
  bool passed = false;
  bool inconclusive = false;
  std::map<std::string, double> residuals;
  VerdictCounts verdicts;
  std::string note;
};

/// g(T, H) and g(T', H') must be coupling-equivalent when T and T' are equivalent.
CheckReport verify_g_well_defined(const Trivialization& t, const Trivialization& t2, const PartitionOfUnity& h,
                                  const PartitionOfUnity& h2, const Tolerances& tol = {});

struct RoundTripReport {
  std::string direction;
  bool passed = false;
  bool inconclusive = false;
  CheckReport couplings;         // g(f(C)) ~ C
  CheckReport trivializations;   // f(g(T)) ~ T
  std::string note;
};

/// Starting from a connection: g(f(C)) ~ C and f(g(f(C))) ~ f(C).
RoundTripReport verify_inverse(const ConnectionForm& c, const PartitionOfUnity& h, const Tolerances& tol = {});
/// Starting from a trivialization: f(g(T)) ~ T and g(f(g(T))) ~ g(T).
RoundTripReport verify_inverse(const Trivialization& t, const PartitionOfUnity& h, const Tolerances& tol = {});

}  // namespace algebroid
