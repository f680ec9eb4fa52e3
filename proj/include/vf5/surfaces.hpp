// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "vf5/field.hpp"
#include "vf5/roi_lod.hpp"

namespace vf5 {

struct TriangleMesh {
    std::vector<Vec3> positions;
    std::vector<Vec3> normals;  // unit length, one per position
    std::vector<std::array<std::uint32_t, 3>> triangles;
    std::optional<double> scalar_level;

    bool empty() const { return triangles.empty(); }
};

/// Marching cubes over every cell. Corners with value > level are "above",
/// ties count as below. Crossing-edge vertices are shared between cells and
/// numbered in edge order, so the output is independent of threading. Normals
/// are the interpolated central-difference gradient, pointing toward
/// decreasing scalar; triangles wind counter-clockwise seen from that side.
TriangleMesh extract_isosurface(const ScalarField& scalar, double level);

/// Same extraction on the ROI/LOD resampled field.
TriangleMesh extract_isosurface(const LodScalarView& scalar, double level);

/// Linear map of a slider position in [0, 1] onto [scalar_min, scalar_max].
double slider_to_level(double scalar_min, double scalar_max, double slider_pos);

}  // namespace vf5
