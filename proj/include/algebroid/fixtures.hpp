// Shipped example data: algebras, bundles over the fixture manifolds,
// connections on those bundles, and a degree-two circle map.
#pragma once

#include <string>
#include <vector>

#include "algebroid/connection.hpp"

namespace algebroid {

/// abelian2, so3, aff1, heis3.
LieAlgebra fixture_algebra(const std::string& name);
std::vector<std::string> algebra_fixture_names();

Trivialization fixture_bundle(const std::string& name, int resolution = 33);
std::vector<std::string> bundle_fixture_names();

ConnectionForm fixture_connection(const std::string& name, int resolution = 33);
std::vector<std::string> connection_fixture_names();
/// Connection fixtures that satisfy the accordance condition.
std::vector<std::string> coupling_fixture_names();

/// t -> 2t from the four-arc circle onto the two-arc circle. Source grids are
/// aligned with target grids when both use the same resolution.
SmoothMapSpec degree_two_map(int resolution = 33);

/// Rotation angle of the constant twist in the so3 circle bundles.
inline constexpr double kTwistAngle = 1.2;

/// C-infinity step: 0 for x <= 0, 1 for x >= 1.
double smooth_step(double x);

}  // namespace algebroid
