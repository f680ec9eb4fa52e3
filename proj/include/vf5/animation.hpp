// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vf5/execute.hpp"
#include "vf5/field.hpp"
#include "vf5/recipe.hpp"
#include "vf5/slices.hpp"

namespace vf5 {

/// `frame_0007.vfa` and friends.
std::string frame_file_name(std::uint32_t step);
std::string snapshot_file_name(std::uint32_t sequence);

/// Executes every recipe item at each step in turn and writes one frame file
/// per step into `out_dir` (created if needed). Returns the number of frames.
/// Throws RecipeInvalid before anything is written, IoError on write failure.
std::size_t bake_animation(const FieldSet& fields, const VisRecipe& recipe, const std::filesystem::path& out_dir,
                           const std::optional<RoiContext>& roi = std::nullopt, PyramidCache* cache = nullptr);

/// Packed 8-bit RGB, row-major, top row first.
struct RgbImage {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<std::uint8_t> rgb;

    friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

/// Binary PPM (P6, maxval 255). Alpha is dropped.
std::vector<std::uint8_t> encode_ppm(const RgbImage& img);
std::vector<std::uint8_t> encode_ppm(const SliceImage& img);
RgbImage decode_ppm(std::span<const std::uint8_t> bytes);

/// Writes `dir/snap_%04d.ppm` and returns its path. Throws IoError.
std::filesystem::path snapshot_image(const SliceImage& img, const std::filesystem::path& dir, std::uint32_t sequence);
std::filesystem::path snapshot_image(const RgbImage& img, const std::filesystem::path& dir, std::uint32_t sequence);

/// Hands out sequence numbers 0, 1, 2, ... for successive snapshots.
class SnapshotSequence {
public:
    explicit SnapshotSequence(std::filesystem::path dir, std::uint32_t first = 0)
        : dir_(std::move(dir)), next_(first) {}

    template <class Image>
    std::filesystem::path write(const Image& img) {
        auto path = snapshot_image(img, dir_, next_);
        ++next_;
        return path;
    }

    const std::filesystem::path& dir() const { return dir_; }
    std::uint32_t next() const { return next_; }

private:
    std::filesystem::path dir_;
    std::uint32_t next_;
};

}  // namespace vf5
