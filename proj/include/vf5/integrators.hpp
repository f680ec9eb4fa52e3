// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vf5/field.hpp"
#include "vf5/roi_lod.hpp"

namespace vf5 {

enum class Termination {
    OutOfDomain,
    MaxSteps,
    Stagnation,
    TimeLimit,  // reached TraceOptions::max_time
    None,       // not produced by a trace (decoded or glyph polylines)
};

/// Integral curve. `params` holds integration time for streamlines and signed
/// arc length for field lines.
struct Polyline {
    std::vector<Vec3> vertices;
    std::vector<double> params;
    Termination termination = Termination::None;
};

struct TraceOptions {
    double step_factor = 0.2;      // spatial step as a fraction of the smallest grid spacing
    int max_steps = 10000;
    double stagnation_eps = 1e-7;  // relative to the RMS of |v| over the field
    std::optional<double> max_time;  // streamlines only; last step lands exactly on it

    void validate() const;
};

struct Ensemble {
    std::vector<Vec3> positions;
    std::vector<double> ages;
    std::uint64_t rng_seed = 0;
    /// Number of advection calls consumed from the seed's stream.
    std::uint64_t generation = 0;

    friend bool operator==(const Ensemble&, const Ensemble&) = default;
};

struct ArrowSet {
    Vec3 center;
    double radius = 0.0;
    std::vector<Vec3> offsets;
    /// Empty where center + offset lies outside the domain.
    std::vector<std::optional<Vec3>> vectors;

    Vec3 position(std::size_t i) const { return center + offsets[i]; }
};

// The kernels below are instantiated for VectorField and LodVectorView.

/// Forward streamline of dx/dt = v(x) with a 7-stage 6th-order explicit
/// Runge-Kutta scheme. Each step uses dt = step_factor * min_spacing / |v(x)|,
/// so params (time) advance slowly where the field is strong.
template <class Source>
Polyline trace_streamline(const Source& field, const Vec3& seed, const TraceOptions& opts = {});

/// Field line of the unit direction field v/|v|, traced both ways from the seed
/// with a fixed arc-length step. The backward branch comes first (reversed),
/// the seed appears once, params are signed arc length.
template <class Source>
Polyline trace_field_line(const Source& field, const Vec3& seed, const TraceOptions& opts = {});

/// One explicit Euler step for every particle. Particles that leave the domain
/// are re-seeded uniformly inside it from the ensemble's RNG stream and their
/// age restarts at 0.
template <class Source>
Ensemble advect_ensemble_euler(const Source& field, const Ensemble& ens, double dt);

/// Uniform scatter over the whole domain, ages 0.
Ensemble scatter_ensemble(const GridSpec& grid, std::size_t count, std::uint64_t rng_seed);

/// Points uniformly distributed in a solid cone (apex, axis dir, half angle,
/// axial length), rejecting those outside the domain.
std::vector<Vec3> seed_cone(const GridSpec& grid, const Vec3& apex, const Vec3& dir,
                            double half_angle, double length, std::size_t count,
                            std::uint64_t rng_seed);

/// Probe of `count` arrows at rigid random offsets inside a sphere.
template <class Source>
ArrowSet local_arrows(const Source& field, const Vec3& center, double radius, std::size_t count,
                      std::uint64_t rng_seed);

/// Moves the probe keeping offsets, re-sampling every arrow.
template <class Source>
ArrowSet move_arrows(const Source& field, const ArrowSet& arrows, const Vec3& new_center);

inline constexpr std::size_t kDefaultArrowCount = 20;
inline constexpr std::size_t kDefaultSnowflakeCount = 300;
inline constexpr std::size_t kDefaultHotaruCount = 2000;
inline constexpr double kDefaultArrowRadiusFraction = 0.05;  // of the domain diagonal

namespace rk6 {

/// Butcher's 7-stage, 6th-order explicit tableau.
inline constexpr int kStages = 7;
inline constexpr double c[kStages] = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0, 0.5, 0.5, 1.0};
inline constexpr double a[kStages][kStages - 1] = {
    {},
    {1.0 / 3.0},
    {0.0, 2.0 / 3.0},
    {1.0 / 12.0, 1.0 / 3.0, -1.0 / 12.0},
    {-1.0 / 16.0, 9.0 / 8.0, -3.0 / 16.0, -3.0 / 8.0},
    {0.0, 9.0 / 8.0, -3.0 / 8.0, -3.0 / 4.0, 1.0 / 2.0},
    {9.0 / 44.0, -9.0 / 11.0, 63.0 / 44.0, 18.0 / 11.0, 0.0, -16.0 / 11.0},
};
inline constexpr double b[kStages] = {11.0 / 120.0, 0.0,          27.0 / 40.0, 27.0 / 40.0,
                                      -4.0 / 15.0,  -4.0 / 15.0, 11.0 / 120.0};

/// One step of the autonomous system x' = f(x).
template <class F>
Vec3 step(F&& f, const Vec3& x, double h) {
    Vec3 k[kStages];
    for (int s = 0; s < kStages; ++s) {
        Vec3 xs = x;
        for (int r = 0; r < s; ++r) xs += (h * a[s][r]) * k[r];
        k[s] = f(xs);
    }
    Vec3 out = x;
    for (int s = 0; s < kStages; ++s) out += (h * b[s]) * k[s];
    return out;
}

}  // namespace rk6

}  // namespace vf5
