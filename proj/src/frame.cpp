// SPDX-License-Identifier: Apache-2.0
#include "vf5/frame.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

#include "bytes.hpp"

namespace vf5 {

namespace {

constexpr std::uint8_t kFrameMagic[4] = {'V', 'F', '5', 'A'};

void put_vec(detail::ByteWriter& w, const Vec3& v) {
    w.f32(static_cast<float>(v.x));
    w.f32(static_cast<float>(v.y));
    w.f32(static_cast<float>(v.z));
}

Vec3 get_vec(detail::ByteReader& r) {
    const double x = r.f32();
    const double y = r.f32();
    const double z = r.f32();
    return {x, y, z};
}

std::vector<std::uint8_t> payload(const TriangleMesh& mesh) {
    detail::ByteWriter w;
    w.u32(static_cast<std::uint32_t>(mesh.positions.size()));
    w.u32(static_cast<std::uint32_t>(3 * mesh.triangles.size()));
    for (const auto& p : mesh.positions) put_vec(w, p);
    for (const auto& n : mesh.normals) put_vec(w, n);
    for (const auto& t : mesh.triangles)
        for (auto i : t) w.u32(i);
    return std::move(w).take();
}

std::vector<std::uint8_t> payload(const Polyline& line) {
    detail::ByteWriter w;
    w.u32(static_cast<std::uint32_t>(line.vertices.size()));
    for (const auto& p : line.vertices) put_vec(w, p);
    for (double t : line.params) w.f32(static_cast<float>(t));
    return std::move(w).take();
}

std::vector<std::uint8_t> payload(const SliceImage& img) {
    detail::ByteWriter w;
    w.u32(img.width);
    w.u32(img.height);
    w.bytes(img.pixels);
    return std::move(w).take();
}

std::vector<std::uint8_t> payload(const VolumeTexture& tex) { return encode_volume_texture(tex); }

void expect_exact(const detail::ByteReader& r, std::uint64_t needed, const char* what) {
    if (r.remaining() != needed) {
        throw Error(ErrorCode::CorruptFrame, std::string(what) + " payload length does not match its counts");
    }
}

TriangleMesh decode_mesh(std::span<const std::uint8_t> bytes) {
    detail::ByteReader r(bytes);
    const std::uint64_t nv = r.u32();
    const std::uint64_t ni = r.u32();
    expect_exact(r, 24 * nv + 4 * ni, "mesh");
    if (ni % 3 != 0) throw Error(ErrorCode::CorruptFrame, "mesh index count is not a multiple of 3");
    TriangleMesh mesh;
    mesh.positions.reserve(nv);
    mesh.normals.reserve(nv);
    for (std::uint64_t i = 0; i < nv; ++i) mesh.positions.push_back(get_vec(r));
    for (std::uint64_t i = 0; i < nv; ++i) mesh.normals.push_back(get_vec(r));
    mesh.triangles.resize(ni / 3);
    for (auto& t : mesh.triangles) {
        for (auto& i : t) {
            i = r.u32();
            if (i >= nv) throw Error(ErrorCode::CorruptFrame, "mesh index out of range");
        }
    }
    return mesh;
}

Polyline decode_polyline(std::span<const std::uint8_t> bytes) {
    detail::ByteReader r(bytes);
    const std::uint64_t n = r.u32();
    expect_exact(r, 16 * n, "polyline");
    Polyline line;
    line.vertices.reserve(n);
    line.params.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) line.vertices.push_back(get_vec(r));
    for (std::uint64_t i = 0; i < n; ++i) line.params.push_back(r.f32());
    return line;
}

SliceImage decode_image(std::span<const std::uint8_t> bytes) {
    detail::ByteReader r(bytes);
    const std::uint32_t w = r.u32();
    const std::uint32_t h = r.u32();
    expect_exact(r, 4ull * w * h, "image");
    SliceImage img(w, h);
    r.bytes(img.pixels.data(), img.pixels.size());
    return img;
}

}  // namespace

ObjectTag tag_of(const FrameObject& object) {
    return std::visit(
        [](const auto& o) {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, TriangleMesh>) return ObjectTag::Mesh;
            else if constexpr (std::is_same_v<T, Polyline>) return ObjectTag::Polyline;
            else if constexpr (std::is_same_v<T, SliceImage>) return ObjectTag::Image;
            else return ObjectTag::Volume;
        },
        object);
}

void append_object(std::vector<std::uint8_t>& out, const FrameObject& object) {
    const auto body = std::visit([](const auto& o) { return payload(o); }, object);
    detail::ByteWriter w;
    w.u8(static_cast<std::uint8_t>(tag_of(object)));
    w.u64(body.size());
    auto head = std::move(w).take();
    out.insert(out.end(), head.begin(), head.end());
    out.insert(out.end(), body.begin(), body.end());
}

std::vector<std::uint8_t> encode_frame(const BakedFrame& frame) {
    detail::ByteWriter w;
    w.bytes(kFrameMagic, 4);
    w.u32(frame.step);
    w.u32(static_cast<std::uint32_t>(frame.objects.size()));
    auto out = std::move(w).take();
    for (const auto& o : frame.objects) append_object(out, o);
    return out;
}

BakedFrame decode_frame(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kFrameMagic, 4) != 0) {
        throw Error(ErrorCode::BadMagic, "frame does not start with VF5A");
    }
    detail::ByteReader r(bytes);
    r.skip(4);
    BakedFrame frame;
    frame.step = r.u32();
    const std::uint32_t count = r.u32();
    for (std::uint32_t n = 0; n < count; ++n) {
        const std::uint8_t tag = r.u8();
        const std::uint64_t len = r.u64();
        if (len > r.remaining()) throw Error(ErrorCode::CorruptFrame, "object payload runs past the end of the frame");
        const auto body = r.take(static_cast<std::size_t>(len));
        switch (static_cast<ObjectTag>(tag)) {
            case ObjectTag::Mesh: frame.objects.emplace_back(decode_mesh(body)); break;
            case ObjectTag::Polyline: frame.objects.emplace_back(decode_polyline(body)); break;
            case ObjectTag::Image: frame.objects.emplace_back(decode_image(body)); break;
            case ObjectTag::Volume:
                try {
                    frame.objects.emplace_back(decode_volume_texture(body));
                } catch (const Error& e) {
                    throw Error(ErrorCode::CorruptFrame, e.what());
                }
                break;
            default: throw Error(ErrorCode::CorruptFrame, "unknown object tag " + std::to_string(tag));
        }
    }
    if (r.remaining() != 0) throw Error(ErrorCode::CorruptFrame, "trailing bytes after the last object");
    return frame;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

BakedFrame load_baked_frame(const std::filesystem::path& path) { return decode_frame(read_bytes(path)); }

}  // namespace vf5
