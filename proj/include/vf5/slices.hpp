// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vf5/field.hpp"
#include "vf5/roi_lod.hpp"

namespace vf5 {

/// Rectangle in world space. Pixel (a, b) of a w x h image sampled on the
/// plane sits at origin + ((a+0.5)/w * width) u + ((b+0.5)/h * height) v.
struct SlicePlane {
    Vec3 origin;  // corner of the rectangle
    Vec3 u_axis{1, 0, 0};
    Vec3 v_axis{0, 1, 0};
    Vec3 normal{0, 0, 1};
    double width = 1.0;
    double height = 1.0;

    Vec3 center() const { return origin + (0.5 * width) * u_axis + (0.5 * height) * v_axis; }
};

/// RGBA8, row-major, row b = 0 first.
struct SliceImage {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<std::uint8_t> pixels;

    SliceImage() = default;
    SliceImage(std::uint32_t w, std::uint32_t h) : width(w), height(h), pixels(4ull * w * h, 0) {}

    std::uint8_t* at(std::uint32_t a, std::uint32_t b) { return &pixels[4ull * (b * width + a)]; }
    const std::uint8_t* at(std::uint32_t a, std::uint32_t b) const {
        return &pixels[4ull * (b * width + a)];
    }
    friend bool operator==(const SliceImage&, const SliceImage&) = default;
};

using Rgb8 = std::array<std::uint8_t, 3>;

/// 256-entry table mapped linearly over [smin, smax]. A degenerate range maps
/// every value to the middle entry.
struct Colormap {
    std::string name;
    std::array<Rgb8, 256> table{};
    double smin = 0.0;
    double smax = 1.0;

    std::size_t index(double s) const;
    Rgb8 operator()(double s) const { return table[index(s)]; }

    static Colormap grayscale(double smin, double smax);
    /// Blue - cyan - green - yellow - red.
    static Colormap rainbow(double smin, double smax);
    /// Throws InvalidParams for an unknown name.
    static Colormap by_name(const std::string& name, double smin, double smax);
};

/// Node values of the plane `index` across `axis`. Image axes are the two
/// remaining grid axes in increasing order (X: (j,k), Y: (i,k), Z: (i,j)).
SliceImage orthoslice(const ScalarField& scalar, Axis axis, int index, const Colormap& cmap);
SliceImage orthoslice(const LodScalarView& scalar, Axis axis, int index, const Colormap& cmap);

/// World-space rectangle matching the node plane of orthoslice(axis, index),
/// with pixel centers on the grid nodes when sampled at the grid resolution.
SlicePlane grid_plane(const GridSpec& grid, Axis axis, int index);

enum class SliceMode { WandPerp, FieldPerp };

/// Frame centered at `center`. The normal is wand_dir (WandPerp) or the unit
/// field vector at the center (FieldPerp); u = normal x up (z), falling back
/// to normal x x-axis, and v = normal x u.
template <class Source>
SlicePlane orient_local_slice(SliceMode mode, const Vec3& wand_dir, const Source* field,
                              const Vec3& center, double width, double height);
/// WandPerp convenience.
SlicePlane orient_local_slice(const Vec3& wand_dir, const GridSpec& grid, const Vec3& center,
                              double width, double height);

/// Trilinear samples at pixel centers; NaN outside the domain.
template <class Source>
std::vector<double> sample_slice_values(const Source& scalar, const SlicePlane& plane,
                                        std::uint32_t res_w, std::uint32_t res_h);

/// Colormapped version; out-of-domain pixels are fully transparent.
template <class Source>
SliceImage sample_slice_scalar(const Source& scalar, const SlicePlane& plane, std::uint32_t res_w,
                               std::uint32_t res_h, const Colormap& cmap);

/// White noise bytes, one per pixel, generated from the seed in row-major order.
std::vector<std::uint8_t> lic_noise(std::uint32_t res_w, std::uint32_t res_h, std::uint64_t noise_seed);

inline constexpr int kDefaultLicHalfLength = 20;

/// Grayscale LIC of the in-plane projection of a vector field. Each pixel
/// averages the noise along a streamline of the projected field stepped one
/// pixel at a time, up to kernel_half_len samples each way. Pixels where the
/// projection vanishes keep their own noise; pixels off the domain are
/// transparent.
template <class Source>
SliceImage lic_slice(const Source& field, const SlicePlane& plane, std::uint32_t res_w,
                     std::uint32_t res_h, int kernel_half_len, std::uint64_t noise_seed);

}  // namespace vf5
