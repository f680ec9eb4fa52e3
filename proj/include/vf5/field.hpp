// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vf5/error.hpp"
#include "vf5/vec3.hpp"

namespace vf5 {

enum class Axis : int { X = 0, Y = 1, Z = 2 };

/// Uniform rectilinear grid. Nodes are ordered x-fastest, then y, then z.
struct GridSpec {
    std::array<int, 3> dims{2, 2, 2};
    Vec3 origin{};
    Vec3 spacing{1.0, 1.0, 1.0};

    /// Throws InvalidArgument unless every dim >= 2 and every spacing > 0.
    void validate() const;

    std::size_t node_count() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }
    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(dims[0]) *
                   (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims[1]) * k);
    }
    Vec3 node_position(int i, int j, int k) const {
        return {origin.x + i * spacing.x, origin.y + j * spacing.y, origin.z + k * spacing.z};
    }
    Vec3 lower() const { return origin; }
    Vec3 upper() const { return node_position(dims[0] - 1, dims[1] - 1, dims[2] - 1); }
    double min_spacing() const;
    double diagonal() const { return norm(upper() - lower()); }

    /// Closed-bounds membership, with a 1e-10 cell tolerance absorbing the
    /// rounding of node coordinates.
    bool contains(const Vec3& p) const;
    Vec3 clamp(const Vec3& p) const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

namespace detail {

// Weights of exactly 0 or 1 return an endpoint untouched (node exactness).
inline double lerp(double a, double b, double t) {
    if (t == 0.0) return a;
    if (t == 1.0) return b;
    return a + t * (b - a);
}
inline Vec3 lerp(const Vec3& a, const Vec3& b, double t) {
    if (t == 0.0) return a;
    if (t == 1.0) return b;
    return a + t * (b - a);
}

struct CellLocation {
    std::array<int, 3> base;
    std::array<double, 3> frac;
};

/// Returns nullopt outside the (tolerant) closed bounds.
std::optional<CellLocation> locate(const GridSpec& grid, const Vec3& p);

}  // namespace detail

/// Node-sampled field on a GridSpec; T is double (scalar) or Vec3 (vector).
/// Immutable after construction.
template <class T>
class GridField {
public:
    using value_type = T;

    GridField() = default;
    GridField(GridSpec grid, std::vector<T> values);

    const GridSpec& grid() const { return grid_; }
    std::span<const T> values() const { return values_; }
    const T& at(int i, int j, int k) const { return values_[grid_.index(i, j, k)]; }

    /// Trilinear interpolation of the enclosing cell; exact node values when
    /// p is a node. Throws OutOfDomain outside the closed bounds.
    T sample(const Vec3& p) const;
    std::optional<T> try_sample(const Vec3& p) const;
    /// Samples at the nearest in-domain point.
    T sample_clamped(const Vec3& p) const { return *try_sample(grid_.clamp(p)); }

private:
    T interpolate(const detail::CellLocation& loc) const;

    GridSpec grid_;
    std::vector<T> values_;
};

using ScalarField = GridField<double>;
using VectorField = GridField<Vec3>;

/// Root-mean-square of |v| over all nodes.
double rms_magnitude(const VectorField& field);
std::pair<double, double> value_range(const ScalarField& field);

/// A uniform grid carrying named scalar and vector fields over N time steps.
struct FieldSet {
    GridSpec grid;
    int steps = 1;
    std::map<std::string, std::vector<ScalarField>> scalars;
    std::map<std::string, std::vector<VectorField>> vectors;

    bool has_scalar(const std::string& name) const { return scalars.contains(name); }
    bool has_vector(const std::string& name) const { return vectors.contains(name); }
    /// Throws UnknownField / BadStep.
    const ScalarField& scalar(const std::string& name, int step) const;
    const VectorField& vector(const std::string& name, int step) const;

    /// Throws InvalidArgument when list lengths, grids or names are inconsistent.
    void validate() const;
};

/// Reads `manifest.vf5` (or the manifest inside a directory) and its raw
/// little-endian float32 files.
FieldSet load_dataset(const std::filesystem::path& manifest_path);

/// Writes a dataset in the layout load_dataset reads. Raw file names are
/// `<name>_<step>.raw`.
void write_dataset(const FieldSet& fields, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------

template <class T>
GridField<T>::GridField(GridSpec grid, std::vector<T> values)
    : grid_(grid), values_(std::move(values)) {
    grid_.validate();
    if (values_.size() != grid_.node_count()) {
        throw Error(ErrorCode::InvalidArgument,
                    "field has " + std::to_string(values_.size()) + " values, grid needs " +
                        std::to_string(grid_.node_count()));
    }
}

template <class T>
T GridField<T>::interpolate(const detail::CellLocation& loc) const {
    const auto [i, j, k] = loc.base;
    const auto [fx, fy, fz] = loc.frac;
    const std::size_t sx = 1;
    const std::size_t sy = static_cast<std::size_t>(grid_.dims[0]);
    const std::size_t sz = sy * static_cast<std::size_t>(grid_.dims[1]);
    const std::size_t n = grid_.index(i, j, k);

    auto row = [&](std::size_t base) { return detail::lerp(values_[base], values_[base + sx], fx); };
    auto plane = [&](std::size_t base) { return detail::lerp(row(base), row(base + sy), fy); };
    return detail::lerp(plane(n), plane(n + sz), fz);
}

template <class T>
std::optional<T> GridField<T>::try_sample(const Vec3& p) const {
    const auto loc = detail::locate(grid_, p);
    if (!loc) return std::nullopt;
    return interpolate(*loc);
}

template <class T>
T GridField<T>::sample(const Vec3& p) const {
    const auto loc = detail::locate(grid_, p);
    if (!loc) {
        throw Error(ErrorCode::OutOfDomain, "point (" + std::to_string(p.x) + ", " +
                                                std::to_string(p.y) + ", " +
                                                std::to_string(p.z) + ") is outside the grid");
    }
    return interpolate(*loc);
}

}  // namespace vf5
