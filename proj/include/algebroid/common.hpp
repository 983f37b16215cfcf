#pragma once

#include <Eigen/Dense>

#include <map>
#include <stdexcept>
#include <string>

namespace algebroid {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Malformed or inconsistent input data.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mathematical precondition of an operation does not hold (e.g. not a coupling).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Some node of the manifold is not covered by any bump of a partition of unity.
class CoverageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical tolerances used by every decision procedure.
///
/// `acc` applies whenever finite differences enter the compared quantity,
/// `acc_exact` when only nodal algebra does.
struct Tolerances {
  double alg = 1e-9;
  double inner = 1e-6;
  double acc = 1e-4;
  double acc_exact = 1e-6;
  double gauge = 1e-4;
  double fd = 1e-4;
  double trans = 1e-6;
};

struct ValidationReport {
  bool passed = true;
  std::map<std::string, double> residuals;
  /// Human-readable location of the worst offender, empty when none.
  std::string worst;
};

}  // namespace algebroid
