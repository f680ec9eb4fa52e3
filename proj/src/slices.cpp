// SPDX-License-Identifier: Apache-2.0
#include "vf5/slices.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "random.hpp"

namespace vf5 {

namespace {

constexpr Vec3 kWorldUp{0.0, 0.0, 1.0};
constexpr Vec3 kWorldX{1.0, 0.0, 0.0};

// The two in-plane grid axes for a slice across `axis`.
std::pair<int, int> in_plane_axes(Axis axis) {
    switch (axis) {
        case Axis::X: return {1, 2};
        case Axis::Y: return {0, 2};
        case Axis::Z: return {0, 1};
    }
    return {0, 1};
}

Colormap make_colormap(std::string name, double smin, double smax, Rgb8 (*ramp)(double)) {
    Colormap c;
    c.name = std::move(name);
    c.smin = smin;
    c.smax = smax;
    for (int i = 0; i < 256; ++i) c.table[static_cast<std::size_t>(i)] = ramp(i / 255.0);
    return c;
}

std::uint8_t to_byte(double x) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0));
}

Rgb8 gray_ramp(double t) { return {to_byte(t), to_byte(t), to_byte(t)}; }

Rgb8 rainbow_ramp(double t) {
    // Piecewise-linear through blue, cyan, green, yellow, red.
    const double s = 4.0 * t;
    double r = 0, g = 0, b = 0;
    if (s < 1.0) {
        g = s;
        b = 1.0;
    } else if (s < 2.0) {
        g = 1.0;
        b = 2.0 - s;
    } else if (s < 3.0) {
        r = s - 2.0;
        g = 1.0;
    } else {
        r = 1.0;
        g = 4.0 - s;
    }
    return {to_byte(r), to_byte(g), to_byte(b)};
}

SliceImage orthoslice_impl(const ScalarField& scalar, Axis axis, int index, const Colormap& cmap) {
    const GridSpec& g = scalar.grid();
    const int ax = static_cast<int>(axis);
    if (index < 0 || index >= g.dims[ax]) {
        throw Error(ErrorCode::IndexOutOfRange, "slice index " + std::to_string(index) +
                                                    " outside [0, " + std::to_string(g.dims[ax]) + ")");
    }
    const auto [ua, va] = in_plane_axes(axis);
    SliceImage img(static_cast<std::uint32_t>(g.dims[ua]), static_cast<std::uint32_t>(g.dims[va]));
    for (std::uint32_t b = 0; b < img.height; ++b) {
        for (std::uint32_t a = 0; a < img.width; ++a) {
            int ijk[3];
            ijk[ax] = index;
            ijk[ua] = static_cast<int>(a);
            ijk[va] = static_cast<int>(b);
            const Rgb8 c = cmap(scalar.at(ijk[0], ijk[1], ijk[2]));
            std::uint8_t* px = img.at(a, b);
            px[0] = c[0];
            px[1] = c[1];
            px[2] = c[2];
            px[3] = 255;
        }
    }
    return img;
}

SlicePlane frame_from_normal(const Vec3& normal_in, const Vec3& center, double width, double height) {
    if (!(width > 0.0 && height > 0.0)) throw Error(ErrorCode::InvalidArgument, "slice size must be positive");
    const double len = norm(normal_in);
    if (!(len > 0.0) || !std::isfinite(len)) throw Error(ErrorCode::DegenerateNormal, "slice normal is zero");
    SlicePlane plane;
    plane.normal = normal_in / len;
    Vec3 u = cross(plane.normal, kWorldUp);
    if (norm(u) < 1e-6) u = cross(plane.normal, kWorldX);
    plane.u_axis = normalized(u);
    plane.v_axis = cross(plane.normal, plane.u_axis);
    plane.width = width;
    plane.height = height;
    plane.origin = center - (0.5 * width) * plane.u_axis - (0.5 * height) * plane.v_axis;
    return plane;
}

Vec3 pixel_position(const SlicePlane& plane, double a, double b, std::uint32_t w, std::uint32_t h) {
    return plane.origin + (a / w * plane.width) * plane.u_axis + (b / h * plane.height) * plane.v_axis;
}

}  // namespace

std::size_t Colormap::index(double s) const {
    if (!(smin < smax)) return 128;
    const double t = std::clamp((s - smin) / (smax - smin), 0.0, 1.0);
    return static_cast<std::size_t>(std::lround(t * 255.0));
}

Colormap Colormap::grayscale(double smin, double smax) { return make_colormap("gray", smin, smax, gray_ramp); }
Colormap Colormap::rainbow(double smin, double smax) { return make_colormap("rainbow", smin, smax, rainbow_ramp); }

Colormap Colormap::by_name(const std::string& name, double smin, double smax) {
    if (name == "gray") return grayscale(smin, smax);
    if (name == "rainbow") return rainbow(smin, smax);
    throw Error(ErrorCode::InvalidParams, "unknown colormap '" + name + "'");
}

SliceImage orthoslice(const ScalarField& scalar, Axis axis, int index, const Colormap& cmap) {
    return orthoslice_impl(scalar, axis, index, cmap);
}

SliceImage orthoslice(const LodScalarView& scalar, Axis axis, int index, const Colormap& cmap) {
    return orthoslice_impl(resample_with_lod(scalar), axis, index, cmap);
}

SlicePlane grid_plane(const GridSpec& grid, Axis axis, int index) {
    const int ax = static_cast<int>(axis);
    if (index < 0 || index >= grid.dims[ax]) throw Error(ErrorCode::IndexOutOfRange, "slice index out of range");
    const auto [ua, va] = in_plane_axes(axis);
    SlicePlane plane;
    Vec3 u{}, v{};
    u[ua] = 1.0;
    v[va] = 1.0;
    plane.u_axis = u;
    plane.v_axis = v;
    plane.normal = cross(u, v);
    plane.width = grid.dims[ua] * grid.spacing[ua];
    plane.height = grid.dims[va] * grid.spacing[va];
    Vec3 origin = grid.origin;
    origin[ax] += index * grid.spacing[ax];
    origin[ua] -= 0.5 * grid.spacing[ua];
    origin[va] -= 0.5 * grid.spacing[va];
    plane.origin = origin;
    return plane;
}

template <class Source>
SlicePlane orient_local_slice(SliceMode mode, const Vec3& wand_dir, const Source* field,
                              const Vec3& center, double width, double height) {
    if (mode == SliceMode::WandPerp) return frame_from_normal(wand_dir, center, width, height);
    if (field == nullptr) throw Error(ErrorCode::InvalidArgument, "field-perpendicular slicing needs a vector field");
    if (!field->grid().contains(center)) throw Error(ErrorCode::OutOfDomain, "local slice center outside the domain");
    const Vec3 v = field->sample(center);
    const double m = norm(v);
    if (m == 0.0 || m < 1e-12 * rms_magnitude(*field)) {
        throw Error(ErrorCode::DegenerateNormal, "field vanishes at the local slice center");
    }
    return frame_from_normal(v, center, width, height);
}

SlicePlane orient_local_slice(const Vec3& wand_dir, const GridSpec& grid, const Vec3& center,
                              double width, double height) {
    if (!grid.contains(center)) throw Error(ErrorCode::OutOfDomain, "local slice center outside the domain");
    return frame_from_normal(wand_dir, center, width, height);
}

template <class Source>
std::vector<double> sample_slice_values(const Source& scalar, const SlicePlane& plane,
                                        std::uint32_t res_w, std::uint32_t res_h) {
    if (res_w < 1 || res_h < 1) throw Error(ErrorCode::InvalidArgument, "slice resolution must be at least 1x1");
    std::vector<double> out(static_cast<std::size_t>(res_w) * res_h);
    const long rows = res_h;
#pragma omp parallel for schedule(static)
    for (long b = 0; b < rows; ++b) {
        for (std::uint32_t a = 0; a < res_w; ++a) {
            const Vec3 p = pixel_position(plane, a + 0.5, b + 0.5, res_w, res_h);
            const auto s = scalar.try_sample(p);
            out[static_cast<std::size_t>(b) * res_w + a] = s ? *s : std::numeric_limits<double>::quiet_NaN();
        }
    }
    return out;
}

template <class Source>
SliceImage sample_slice_scalar(const Source& scalar, const SlicePlane& plane, std::uint32_t res_w,
                               std::uint32_t res_h, const Colormap& cmap) {
    const auto values = sample_slice_values(scalar, plane, res_w, res_h);
    SliceImage img(res_w, res_h);
    for (std::uint32_t b = 0; b < res_h; ++b) {
        for (std::uint32_t a = 0; a < res_w; ++a) {
            const double s = values[static_cast<std::size_t>(b) * res_w + a];
            if (std::isnan(s)) continue;
            const Rgb8 c = cmap(s);
            std::uint8_t* px = img.at(a, b);
            px[0] = c[0];
            px[1] = c[1];
            px[2] = c[2];
            px[3] = 255;
        }
    }
    return img;
}

std::vector<std::uint8_t> lic_noise(std::uint32_t res_w, std::uint32_t res_h, std::uint64_t noise_seed) {
    auto rng = detail::make_rng(noise_seed, detail::kStreamNoise, 0);
    std::vector<std::uint8_t> noise(static_cast<std::size_t>(res_w) * res_h);
    for (auto& n : noise) n = static_cast<std::uint8_t>(rng() >> 56);
    return noise;
}

template <class Source>
SliceImage lic_slice(const Source& field, const SlicePlane& plane, std::uint32_t res_w,
                     std::uint32_t res_h, int kernel_half_len, std::uint64_t noise_seed) {
    if (kernel_half_len < 0) throw Error(ErrorCode::InvalidArgument, "LIC kernel half length must be >= 0");
    if (res_w < 1 || res_h < 1) throw Error(ErrorCode::InvalidArgument, "LIC resolution must be at least 1x1");
    const auto noise = lic_noise(res_w, res_h, noise_seed);
    const double threshold = 1e-12 * rms_magnitude(field);
    // World units per pixel along u and v.
    const double du = plane.width / res_w;
    const double dv = plane.height / res_h;

    // Unit pixel-space direction of the projected field, or nullopt where it
    // vanishes or leaves the domain.
    auto direction = [&](double qa, double qb) -> std::optional<std::pair<double, double>> {
        const auto v = field.try_sample(pixel_position(plane, qa, qb, res_w, res_h));
        if (!v) return std::nullopt;
        const double pa = dot(*v, plane.u_axis) / du;
        const double pb = dot(*v, plane.v_axis) / dv;
        const double world = std::hypot(pa * du, pb * dv);
        if (world == 0.0 || world < threshold) return std::nullopt;
        const double len = std::hypot(pa, pb);
        return std::pair{pa / len, pb / len};
    };

    SliceImage img(res_w, res_h);
    const long rows = res_h;
#pragma omp parallel for schedule(dynamic)
    for (long b = 0; b < rows; ++b) {
        for (std::uint32_t a = 0; a < res_w; ++a) {
            const double ca = a + 0.5;
            const double cb = b + 0.5;
            std::uint8_t* px = img.at(a, static_cast<std::uint32_t>(b));
            const std::uint8_t own = noise[static_cast<std::size_t>(b) * res_w + a];
            if (!field.grid().contains(pixel_position(plane, ca, cb, res_w, res_h))) continue;

            std::uint64_t sum = own;
            std::uint64_t count = 1;
            if (direction(ca, cb)) {
                for (const double sign : {1.0, -1.0}) {
                    double qa = ca;
                    double qb = cb;
                    for (int s = 0; s < kernel_half_len; ++s) {
                        const auto d = direction(qa, qb);
                        if (!d) break;
                        qa += sign * d->first;
                        qb += sign * d->second;
                        if (qa < 0.0 || qb < 0.0 || qa >= res_w || qb >= res_h) break;
                        if (!field.grid().contains(pixel_position(plane, qa, qb, res_w, res_h))) break;
                        sum += noise[static_cast<std::size_t>(qb) * res_w + static_cast<std::size_t>(qa)];
                        ++count;
                    }
                }
            }
            const auto gray = static_cast<std::uint8_t>((sum + count / 2) / count);
            px[0] = gray;
            px[1] = gray;
            px[2] = gray;
            px[3] = 255;
        }
    }
    return img;
}

template SlicePlane orient_local_slice(SliceMode, const Vec3&, const VectorField*, const Vec3&, double, double);
template SlicePlane orient_local_slice(SliceMode, const Vec3&, const LodVectorView*, const Vec3&, double, double);
template std::vector<double> sample_slice_values(const ScalarField&, const SlicePlane&, std::uint32_t, std::uint32_t);
template std::vector<double> sample_slice_values(const LodScalarView&, const SlicePlane&, std::uint32_t, std::uint32_t);
template SliceImage sample_slice_scalar(const ScalarField&, const SlicePlane&, std::uint32_t, std::uint32_t, const Colormap&);
template SliceImage sample_slice_scalar(const LodScalarView&, const SlicePlane&, std::uint32_t, std::uint32_t, const Colormap&);
template SliceImage lic_slice(const VectorField&, const SlicePlane&, std::uint32_t, std::uint32_t, int, std::uint64_t);
template SliceImage lic_slice(const LodVectorView&, const SlicePlane&, std::uint32_t, std::uint32_t, int, std::uint64_t);

}  // namespace vf5
