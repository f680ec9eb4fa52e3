// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "vf5/field.hpp"
#include "vf5/slices.hpp"

namespace vf5 {

using Rgba = std::array<double, 4>;

struct ControlPoint {
    double scalar = 0.0;
    Rgba rgba{};

    friend bool operator==(const ControlPoint&, const ControlPoint&) = default;
};

/// Piecewise-linear scalar -> RGBA map, clamped to the end points.
class TransferFunction {
public:
    /// Throws InvalidParams unless there are >= 2 points with strictly
    /// increasing scalars and components in [0, 1].
    explicit TransferFunction(std::vector<ControlPoint> points);

    /// Two-point ramp from transparent black to opaque white.
    static TransferFunction ramp(double smin, double smax);

    const std::vector<ControlPoint>& points() const { return points_; }
    Rgba evaluate(double s) const;

    // Editing keeps the invariants; a failed edit leaves the function unchanged.
    std::size_t add_point(const ControlPoint& p);
    void move_point(std::size_t index, double scalar, const Rgba& rgba);
    void remove_point(std::size_t index);

    friend bool operator==(const TransferFunction&, const TransferFunction&) = default;

private:
    std::vector<ControlPoint> points_;
};

inline Rgba evaluate_tf(const TransferFunction& tf, double s) { return tf.evaluate(s); }

/// 8-bit voxel volume plus a 256-entry RGBA lookup table.
struct VolumeTexture {
    std::array<int, 3> dims{};
    std::vector<std::uint8_t> voxels;               // x-fastest
    std::array<std::array<std::uint8_t, 4>, 256> lut{};
    float smin = 0.0f;
    float smax = 0.0f;

    std::uint8_t voxel(int i, int j, int k) const {
        return voxels[static_cast<std::size_t>(i) +
                      static_cast<std::size_t>(dims[0]) * (static_cast<std::size_t>(j) +
                                                           static_cast<std::size_t>(dims[1]) * k)];
    }
    friend bool operator==(const VolumeTexture&, const VolumeTexture&) = default;
};

VolumeTexture build_volume_texture(const ScalarField& scalar, const TransferFunction& tf);

/// "VF5T" | u32 nx ny nz | voxels | 1024 LUT bytes | f32 smin smax, little-endian.
std::vector<std::uint8_t> encode_volume_texture(const VolumeTexture& tex);
/// Throws CorruptFrame on size mismatch, BadMagic on a wrong header.
VolumeTexture decode_volume_texture(std::span<const std::uint8_t> bytes);

/// Reference opacity thickness used to scale per-layer alpha by k / dims[axis].
inline constexpr double kReferenceThickness = 32.0;

/// Axis-aligned layers composited back to front (layer 0 is farthest) with the
/// over operator, starting from the background. Image axes follow orthoslice.
SliceImage composite_preview(const ScalarField& scalar, const TransferFunction& tf, Axis axis,
                             const Rgb8& background);
/// Same, from a prebuilt texture.
SliceImage composite_preview(const VolumeTexture& tex, Axis axis, const Rgb8& background);

}  // namespace vf5
