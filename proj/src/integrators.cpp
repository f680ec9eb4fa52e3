// SPDX-License-Identifier: Apache-2.0
#include "vf5/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "random.hpp"

namespace vf5 {

namespace {

// Largest s in [0, 1] keeping from + s * (to - from) inside the grid box.
double exit_fraction(const GridSpec& grid, const Vec3& from, const Vec3& to) {
    const Vec3 lo = grid.lower();
    const Vec3 hi = grid.upper();
    const Vec3 d = to - from;
    double s = 1.0;
    for (int a = 0; a < 3; ++a) {
        if (d[a] > 0.0 && to[a] > hi[a]) s = std::min(s, (hi[a] - from[a]) / d[a]);
        if (d[a] < 0.0 && to[a] < lo[a]) s = std::min(s, (lo[a] - from[a]) / d[a]);
    }
    return std::clamp(s, 0.0, 1.0);
}

template <class Source>
double stagnation_threshold(const Source& field, const TraceOptions& opts) {
    return opts.stagnation_eps * rms_magnitude(field);
}

bool stagnant(double speed, double threshold) { return speed == 0.0 || speed < threshold; }

struct Branch {
    std::vector<Vec3> vertices;  // excludes the seed
    std::vector<double> params;
    Termination termination = Termination::MaxSteps;
};

// Fixed arc-length integration of sign * v/|v| from the seed.
template <class Source>
Branch field_line_branch(const Source& field, const Vec3& seed, double sign, double ds,
                         double threshold, int max_steps) {
    const GridSpec& grid = field.grid();
    auto direction = [&](const Vec3& p) {
        const Vec3 v = field.sample_clamped(p);
        const double m = norm(v);
        return m == 0.0 ? Vec3{} : v * (sign / m);
    };

    Branch br;
    Vec3 x = seed;
    double s = 0.0;
    for (int n = 0; n < max_steps; ++n) {
        if (stagnant(norm(field.sample_clamped(x)), threshold)) {
            br.termination = Termination::Stagnation;
            return br;
        }
        const Vec3 next = rk6::step(direction, x, ds);
        if (!grid.contains(next)) {
            const double frac = exit_fraction(grid, x, next);
            if (frac > 0.0) {
                br.vertices.push_back(grid.clamp(x + frac * (next - x)));
                br.params.push_back(s + frac * ds);
            }
            br.termination = Termination::OutOfDomain;
            return br;
        }
        x = next;
        s += ds;
        br.vertices.push_back(x);
        br.params.push_back(s);
    }
    br.termination = Termination::MaxSteps;
    return br;
}

}  // namespace

void TraceOptions::validate() const {
    if (!(step_factor > 0.0)) throw Error(ErrorCode::InvalidArgument, "step_factor must be > 0");
    if (max_steps < 1) throw Error(ErrorCode::InvalidArgument, "max_steps must be >= 1");
    if (!(stagnation_eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "stagnation_eps must be > 0");
    if (max_time && !(*max_time >= 0.0)) throw Error(ErrorCode::InvalidArgument, "max_time must be >= 0");
}

template <class Source>
Polyline trace_streamline(const Source& field, const Vec3& seed, const TraceOptions& opts) {
    opts.validate();
    const GridSpec& grid = field.grid();
    if (!grid.contains(seed)) throw Error(ErrorCode::OutOfDomain, "streamline seed outside the domain");

    const double step_len = opts.step_factor * grid.min_spacing();
    const double threshold = stagnation_threshold(field, opts);
    auto velocity = [&](const Vec3& p) { return field.sample_clamped(p); };

    Polyline line;
    line.vertices.push_back(seed);
    line.params.push_back(0.0);
    line.termination = Termination::MaxSteps;

    Vec3 x = seed;
    double t = 0.0;
    for (int n = 0; n < opts.max_steps; ++n) {
        if (opts.max_time && t >= *opts.max_time) {
            line.termination = Termination::TimeLimit;
            break;
        }
        const double speed = norm(velocity(x));
        if (stagnant(speed, threshold)) {
            line.termination = Termination::Stagnation;
            break;
        }
        double dt = step_len / speed;
        bool last = false;
        if (opts.max_time && t + dt >= *opts.max_time) {
            dt = *opts.max_time - t;
            last = true;
        }
        const Vec3 next = rk6::step(velocity, x, dt);
        if (!grid.contains(next)) {
            const double frac = exit_fraction(grid, x, next);
            if (frac > 0.0) {
                line.vertices.push_back(grid.clamp(x + frac * (next - x)));
                line.params.push_back(t + frac * dt);
            }
            line.termination = Termination::OutOfDomain;
            break;
        }
        x = next;
        t = last ? *opts.max_time : t + dt;
        line.vertices.push_back(x);
        line.params.push_back(t);
        if (last) {
            line.termination = Termination::TimeLimit;
            break;
        }
    }
    return line;
}

template <class Source>
Polyline trace_field_line(const Source& field, const Vec3& seed, const TraceOptions& opts) {
    opts.validate();
    const GridSpec& grid = field.grid();
    if (!grid.contains(seed)) throw Error(ErrorCode::OutOfDomain, "field-line seed outside the domain");
    const double threshold = stagnation_threshold(field, opts);
    if (stagnant(norm(field.sample(seed)), threshold)) {
        throw Error(ErrorCode::DegenerateSeed, "field magnitude at the seed is below the stagnation threshold");
    }
    const double ds = opts.step_factor * grid.min_spacing();

    const Branch forward = field_line_branch(field, seed, +1.0, ds, threshold, opts.max_steps);
    const Branch backward = field_line_branch(field, seed, -1.0, ds, threshold, opts.max_steps);

    Polyline line;
    line.vertices.reserve(forward.vertices.size() + backward.vertices.size() + 1);
    line.params.reserve(line.vertices.capacity());
    for (std::size_t n = backward.vertices.size(); n-- > 0;) {
        line.vertices.push_back(backward.vertices[n]);
        line.params.push_back(-backward.params[n]);
    }
    line.vertices.push_back(seed);
    line.params.push_back(0.0);
    line.vertices.insert(line.vertices.end(), forward.vertices.begin(), forward.vertices.end());
    line.params.insert(line.params.end(), forward.params.begin(), forward.params.end());
    line.termination = forward.termination;
    return line;
}

template <class Source>
Ensemble advect_ensemble_euler(const Source& field, const Ensemble& ens, double dt) {
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be > 0");
    if (ens.ages.size() != ens.positions.size()) {
        throw Error(ErrorCode::InvalidArgument, "ensemble positions and ages differ in length");
    }
    const GridSpec& grid = field.grid();
    const long n = static_cast<long>(ens.positions.size());

    Ensemble out = ens;
    out.generation = ens.generation + 1;
    std::vector<char> escaped(static_cast<std::size_t>(n), 0);

#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        const Vec3& p = ens.positions[static_cast<std::size_t>(i)];
        const Vec3 moved = p + dt * field.sample_clamped(p);
        if (grid.contains(moved)) {
            out.positions[static_cast<std::size_t>(i)] = moved;
            out.ages[static_cast<std::size_t>(i)] += dt;
        } else {
            escaped[static_cast<std::size_t>(i)] = 1;
        }
    }

    // Re-seeding draws in particle order so the stream is independent of threading.
    auto rng = detail::make_rng(ens.rng_seed, detail::kStreamHotaru, ens.generation);
    for (long i = 0; i < n; ++i) {
        if (!escaped[static_cast<std::size_t>(i)]) continue;
        out.positions[static_cast<std::size_t>(i)] = detail::uniform_in_box(rng, grid.lower(), grid.upper());
        out.ages[static_cast<std::size_t>(i)] = 0.0;
    }
    return out;
}

Ensemble scatter_ensemble(const GridSpec& grid, std::size_t count, std::uint64_t rng_seed) {
    Ensemble ens;
    ens.rng_seed = rng_seed;
    auto rng = detail::make_rng(rng_seed, detail::kStreamScatter, 0);
    ens.positions.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        ens.positions.push_back(detail::uniform_in_box(rng, grid.lower(), grid.upper()));
    }
    ens.ages.assign(count, 0.0);
    return ens;
}

std::vector<Vec3> seed_cone(const GridSpec& grid, const Vec3& apex, const Vec3& dir,
                            double half_angle, double length, std::size_t count,
                            std::uint64_t rng_seed) {
    if (!(half_angle > 0.0 && half_angle < std::numbers::pi / 2)) {
        throw Error(ErrorCode::InvalidArgument, "cone half angle must be in (0, pi/2)");
    }
    if (!(length > 0.0)) throw Error(ErrorCode::InvalidArgument, "cone length must be > 0");
    if (!(norm(dir) > 0.0)) throw Error(ErrorCode::InvalidArgument, "cone direction must be non-zero");

    const Vec3 axis = normalized(dir);
    const Vec3 helper = std::abs(axis.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    const Vec3 u = normalized(cross(axis, helper));
    const Vec3 v = cross(axis, u);
    const double tan_half = std::tan(half_angle);

    auto rng = detail::make_rng(rng_seed, detail::kStreamCone, 0);
    std::vector<Vec3> points;
    points.reserve(count);
    const std::size_t max_rejections = 1000 * count;
    std::size_t rejections = 0;
    while (points.size() < count) {
        const double a = length * std::cbrt(detail::uniform01(rng));
        const double r = a * tan_half * std::sqrt(detail::uniform01(rng));
        const double phi = 2.0 * std::numbers::pi * detail::uniform01(rng);
        const Vec3 p = apex + a * axis + r * (std::cos(phi) * u + std::sin(phi) * v);
        if (grid.contains(p)) {
            points.push_back(p);
            rejections = 0;
        } else if (++rejections >= max_rejections) {
            throw Error(ErrorCode::ConeOutsideDomain,
                        "cone seeding rejected " + std::to_string(rejections) + " consecutive draws");
        }
    }
    return points;
}

template <class Source>
ArrowSet local_arrows(const Source& field, const Vec3& center, double radius, std::size_t count,
                      std::uint64_t rng_seed) {
    if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "arrow probe radius must be > 0");
    if (!field.grid().contains(center)) throw Error(ErrorCode::OutOfDomain, "arrow probe center outside the domain");

    ArrowSet arrows;
    arrows.center = center;
    arrows.radius = radius;
    auto rng = detail::make_rng(rng_seed, detail::kStreamArrows, 0);
    arrows.offsets.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double r = radius * std::cbrt(detail::uniform01(rng));
        const double z = 2.0 * detail::uniform01(rng) - 1.0;
        const double phi = 2.0 * std::numbers::pi * detail::uniform01(rng);
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        arrows.offsets.push_back(r * Vec3{rho * std::cos(phi), rho * std::sin(phi), z});
    }
    return move_arrows(field, arrows, center);
}

template <class Source>
ArrowSet move_arrows(const Source& field, const ArrowSet& arrows, const Vec3& new_center) {
    if (!field.grid().contains(new_center)) throw Error(ErrorCode::OutOfDomain, "arrow probe center outside the domain");
    ArrowSet out;
    out.center = new_center;
    out.radius = arrows.radius;
    out.offsets = arrows.offsets;
    out.vectors.reserve(out.offsets.size());
    for (std::size_t i = 0; i < out.offsets.size(); ++i) out.vectors.push_back(field.try_sample(out.position(i)));
    return out;
}

template Polyline trace_streamline(const VectorField&, const Vec3&, const TraceOptions&);
template Polyline trace_streamline(const LodVectorView&, const Vec3&, const TraceOptions&);
template Polyline trace_field_line(const VectorField&, const Vec3&, const TraceOptions&);
template Polyline trace_field_line(const LodVectorView&, const Vec3&, const TraceOptions&);
template Ensemble advect_ensemble_euler(const VectorField&, const Ensemble&, double);
template Ensemble advect_ensemble_euler(const LodVectorView&, const Ensemble&, double);
template ArrowSet local_arrows(const VectorField&, const Vec3&, double, std::size_t, std::uint64_t);
template ArrowSet local_arrows(const LodVectorView&, const Vec3&, double, std::size_t, std::uint64_t);
template ArrowSet move_arrows(const VectorField&, const ArrowSet&, const Vec3&);
template ArrowSet move_arrows(const LodVectorView&, const ArrowSet&, const Vec3&);

}  // namespace vf5
