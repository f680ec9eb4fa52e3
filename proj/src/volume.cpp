// SPDX-License-Identifier: Apache-2.0
#include "vf5/volume.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "bytes.hpp"

namespace vf5 {

namespace {

void check_points(const std::vector<ControlPoint>& points) {
    if (points.size() < 2) throw Error(ErrorCode::InvalidParams, "a transfer function needs at least 2 points");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i].scalar)) throw Error(ErrorCode::InvalidParams, "control point scalar must be finite");
        if (i > 0 && !(points[i - 1].scalar < points[i].scalar)) {
            throw Error(ErrorCode::InvalidParams, "control point scalars must strictly increase");
        }
        for (double c : points[i].rgba) {
            if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorCode::InvalidParams, "RGBA components must be in [0, 1]");
        }
    }
}

std::uint8_t quantize(double c) { return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0)); }

constexpr std::uint8_t kTextureMagic[4] = {'V', 'F', '5', 'T'};

}  // namespace

TransferFunction::TransferFunction(std::vector<ControlPoint> points) : points_(std::move(points)) {
    check_points(points_);
}

TransferFunction TransferFunction::ramp(double smin, double smax) {
    if (!(smin < smax)) smax = smin + 1.0;
    return TransferFunction({{smin, {0, 0, 0, 0}}, {smax, {1, 1, 1, 1}}});
}

Rgba TransferFunction::evaluate(double s) const {
    if (s <= points_.front().scalar) return points_.front().rgba;
    if (s >= points_.back().scalar) return points_.back().rgba;
    const auto hi = std::upper_bound(points_.begin(), points_.end(), s,
                                     [](double v, const ControlPoint& p) { return v < p.scalar; });
    const auto lo = hi - 1;
    if (s == lo->scalar) return lo->rgba;
    const double t = (s - lo->scalar) / (hi->scalar - lo->scalar);
    Rgba out;
    for (int c = 0; c < 4; ++c) out[c] = lo->rgba[c] + t * (hi->rgba[c] - lo->rgba[c]);
    return out;
}

std::size_t TransferFunction::add_point(const ControlPoint& p) {
    auto next = points_;
    const auto it = std::lower_bound(next.begin(), next.end(), p.scalar,
                                     [](const ControlPoint& q, double v) { return q.scalar < v; });
    const auto index = static_cast<std::size_t>(it - next.begin());
    next.insert(it, p);
    check_points(next);
    points_ = std::move(next);
    return index;
}

void TransferFunction::move_point(std::size_t index, double scalar, const Rgba& rgba) {
    if (index >= points_.size()) throw Error(ErrorCode::InvalidParams, "no control point " + std::to_string(index));
    auto next = points_;
    next[index] = {scalar, rgba};
    check_points(next);
    points_ = std::move(next);
}

void TransferFunction::remove_point(std::size_t index) {
    if (index >= points_.size()) throw Error(ErrorCode::InvalidParams, "no control point " + std::to_string(index));
    auto next = points_;
    next.erase(next.begin() + static_cast<std::ptrdiff_t>(index));
    check_points(next);
    points_ = std::move(next);
}

VolumeTexture build_volume_texture(const ScalarField& scalar, const TransferFunction& tf) {
    VolumeTexture tex;
    tex.dims = scalar.grid().dims;
    const auto [smin, smax] = value_range(scalar);
    tex.smin = static_cast<float>(smin);
    tex.smax = static_cast<float>(smax);
    const double range = smax - smin;

    const auto values = scalar.values();
    tex.voxels.resize(values.size());
    const long n = static_cast<long>(values.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        const double v = values[static_cast<std::size_t>(i)];
        tex.voxels[static_cast<std::size_t>(i)] =
            range > 0.0 ? static_cast<std::uint8_t>(std::lround(std::clamp(255.0 * (v - smin) / range, 0.0, 255.0)))
                        : std::uint8_t{0};
    }
    for (int i = 0; i < 256; ++i) {
        const Rgba c = tf.evaluate(smin + (i / 255.0) * range);
        for (int ch = 0; ch < 4; ++ch) tex.lut[static_cast<std::size_t>(i)][static_cast<std::size_t>(ch)] = quantize(c[ch]);
    }
    return tex;
}

std::vector<std::uint8_t> encode_volume_texture(const VolumeTexture& tex) {
    detail::ByteWriter w;
    w.bytes(kTextureMagic, 4);
    for (int a = 0; a < 3; ++a) w.u32(static_cast<std::uint32_t>(tex.dims[a]));
    w.bytes(tex.voxels.data(), tex.voxels.size());
    for (const auto& e : tex.lut) w.bytes(e.data(), 4);
    w.f32(tex.smin);
    w.f32(tex.smax);
    return std::move(w).take();
}

VolumeTexture decode_volume_texture(std::span<const std::uint8_t> bytes) {
    detail::ByteReader r(bytes);
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kTextureMagic, 4) != 0) {
        throw Error(ErrorCode::BadMagic, "volume texture does not start with VF5T");
    }
    r.skip(4);
    VolumeTexture tex;
    std::uint64_t count = 1;
    for (int a = 0; a < 3; ++a) {
        const std::uint32_t d = r.u32();
        tex.dims[a] = static_cast<int>(d);
        count *= d;
    }
    if (r.remaining() != count + 1024 + 8) {
        throw Error(ErrorCode::CorruptFrame, "volume texture length does not match its dims");
    }
    tex.voxels.resize(static_cast<std::size_t>(count));
    r.bytes(tex.voxels.data(), tex.voxels.size());
    for (auto& e : tex.lut) r.bytes(e.data(), 4);
    tex.smin = r.f32();
    tex.smax = r.f32();
    return tex;
}

SliceImage composite_preview(const VolumeTexture& tex, Axis axis, const Rgb8& background) {
    const int ax = static_cast<int>(axis);
    const int ua = ax == 0 ? 1 : 0;
    const int va = ax == 2 ? 1 : 2;
    const int layers = tex.dims[ax];
    const double alpha_scale = kReferenceThickness / layers;

    SliceImage img(static_cast<std::uint32_t>(tex.dims[ua]), static_cast<std::uint32_t>(tex.dims[va]));
    const long rows = img.height;
#pragma omp parallel for schedule(static)
    for (long b = 0; b < rows; ++b) {
        for (std::uint32_t a = 0; a < img.width; ++a) {
            double color[3] = {background[0] / 255.0, background[1] / 255.0, background[2] / 255.0};
            for (int layer = 0; layer < layers; ++layer) {
                int ijk[3];
                ijk[ax] = layer;
                ijk[ua] = static_cast<int>(a);
                ijk[va] = static_cast<int>(b);
                const auto& e = tex.lut[tex.voxel(ijk[0], ijk[1], ijk[2])];
                const double alpha = std::clamp(e[3] / 255.0 * alpha_scale, 0.0, 1.0);
                if (alpha == 0.0) continue;
                for (int c = 0; c < 3; ++c) color[c] = alpha * (e[c] / 255.0) + (1.0 - alpha) * color[c];
            }
            std::uint8_t* px = img.at(a, static_cast<std::uint32_t>(b));
            for (int c = 0; c < 3; ++c) px[c] = quantize(color[c]);
            px[3] = 255;
        }
    }
    return img;
}

SliceImage composite_preview(const ScalarField& scalar, const TransferFunction& tf, Axis axis,
                             const Rgb8& background) {
    return composite_preview(build_volume_texture(scalar, tf), axis, background);
}

}  // namespace vf5
