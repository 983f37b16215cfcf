// Dense matrix functions on small real matrices.
#pragma once

#include <optional>

#include "algebroid/common.hpp"

namespace algebroid::matfun {

/// Matrix exponential by scaling and squaring around a degree-13 Padé approximant.
Mat expm(const Mat& a);

/// Principal square root by the product form of the Denman–Beavers iteration.
std::optional<Mat> sqrtm(const Mat& a);

/// Real principal logarithm by inverse scaling and squaring.
///
/// Returns nullopt when a real eigenvalue lies on the closed negative axis,
/// when the square-root phase fails to converge, or when the reconstruction
/// check ||exp(log A) - A|| <= check_tol * max(1, ||A||) fails.
std::optional<Mat> logm(const Mat& a, double check_tol = 1e-7);

/// True when some eigenvalue of `a` is real (|Im| <= tol) and has real part <= tol.
bool has_nonpositive_real_eigenvalue(const Mat& a, double tol = 1e-12);

}  // namespace algebroid::matfun
