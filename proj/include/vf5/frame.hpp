// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "vf5/integrators.hpp"
#include "vf5/slices.hpp"
#include "vf5/surfaces.hpp"
#include "vf5/volume.hpp"

namespace vf5 {

// Baked frame layout (little-endian):
//   "VF5A" | u32 step | u32 object count | objects...
//   object = u8 tag | u64 payload length | payload
//   mesh (1):     u32 vertex count | u32 index count | f32 xyz * V | f32 normal * V | u32 * I
//   polyline (2): u32 count | f32 xyz * count | f32 param * count
//   image (3):    u32 width | u32 height | RGBA8 * w * h
//   volume (4):   encode_volume_texture bytes
// Decoded objects hold the float32 values widened to double, so re-encoding
// reproduces the input bytes. Mesh levels and polyline terminations are not
// stored.

enum class ObjectTag : std::uint8_t { Mesh = 1, Polyline = 2, Image = 3, Volume = 4 };

using FrameObject = std::variant<TriangleMesh, Polyline, SliceImage, VolumeTexture>;

struct BakedFrame {
    std::uint32_t step = 0;
    std::vector<FrameObject> objects;
};

ObjectTag tag_of(const FrameObject& object);

/// Tag, length and payload of one object.
void append_object(std::vector<std::uint8_t>& out, const FrameObject& object);
std::vector<std::uint8_t> encode_frame(const BakedFrame& frame);

/// Throws BadMagic or CorruptFrame (length mismatch, unknown tag, bad indices).
BakedFrame decode_frame(std::span<const std::uint8_t> bytes);

BakedFrame load_baked_frame(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);

}  // namespace vf5
