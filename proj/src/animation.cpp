// SPDX-License-Identifier: Apache-2.0
#include "vf5/animation.hpp"

#include <cctype>
#include <cstdio>
#include <string>
#include <system_error>

#include "vf5/frame.hpp"

namespace vf5 {

namespace {

std::string numbered(const char* pattern, std::uint32_t n) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, static_cast<unsigned>(n));
    return buf;
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw Error(ErrorCode::IoError, "cannot create directory " + dir.string());
    }
}

std::vector<std::uint8_t> ppm_header(std::uint32_t w, std::uint32_t h) {
    const std::string head = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    return {head.begin(), head.end()};
}

}  // namespace

std::string frame_file_name(std::uint32_t step) { return numbered("frame_%04u.vfa", step); }
std::string snapshot_file_name(std::uint32_t sequence) { return numbered("snap_%04u.ppm", sequence); }

std::size_t bake_animation(const FieldSet& fields, const VisRecipe& recipe, const std::filesystem::path& out_dir,
                           const std::optional<RoiContext>& roi, PyramidCache* cache) {
    validate_recipe(recipe, fields);
    if (roi) validate_roi(fields.grid, *roi);
    ensure_dir(out_dir);
    PyramidCache local;
    for (int t = 0; t < fields.steps; ++t) {
        Executor exec(fields, t, roi, cache ? cache : &local);
        write_bytes(out_dir / frame_file_name(static_cast<std::uint32_t>(t)), encode_frame(exec.run(recipe)));
    }
    return static_cast<std::size_t>(fields.steps);
}

std::vector<std::uint8_t> encode_ppm(const RgbImage& img) {
    if (img.rgb.size() != 3ull * img.width * img.height) {
        throw Error(ErrorCode::InvalidArgument, "RGB buffer size does not match its dimensions");
    }
    auto out = ppm_header(img.width, img.height);
    out.insert(out.end(), img.rgb.begin(), img.rgb.end());
    return out;
}

std::vector<std::uint8_t> encode_ppm(const SliceImage& img) {
    auto out = ppm_header(img.width, img.height);
    out.reserve(out.size() + 3ull * img.width * img.height);
    for (std::size_t p = 0; p < img.pixels.size(); p += 4) {
        out.insert(out.end(), img.pixels.begin() + p, img.pixels.begin() + p + 3);
    }
    return out;
}

RgbImage decode_ppm(std::span<const std::uint8_t> bytes) {
    std::size_t pos = 0;
    auto token = [&]() {
        while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
        std::string t;
        while (pos < bytes.size() && !std::isspace(bytes[pos])) t.push_back(static_cast<char>(bytes[pos++]));
        return t;
    };
    if (token() != "P6") throw Error(ErrorCode::BadMagic, "not a binary PPM");
    RgbImage img;
    try {
        img.width = static_cast<std::uint32_t>(std::stoul(token()));
        img.height = static_cast<std::uint32_t>(std::stoul(token()));
        if (token() != "255") throw Error(ErrorCode::CorruptFrame, "unsupported PPM maxval");
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::CorruptFrame, "malformed PPM header");
    }
    ++pos;
    const std::size_t n = 3ull * img.width * img.height;
    if (bytes.size() < pos || bytes.size() - pos != n) throw Error(ErrorCode::CorruptFrame, "PPM pixel data size mismatch");
    img.rgb.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
    return img;
}

std::filesystem::path snapshot_image(const SliceImage& img, const std::filesystem::path& dir, std::uint32_t sequence) {
    ensure_dir(dir);
    auto path = dir / snapshot_file_name(sequence);
    write_bytes(path, encode_ppm(img));
    return path;
}

std::filesystem::path snapshot_image(const RgbImage& img, const std::filesystem::path& dir, std::uint32_t sequence) {
    ensure_dir(dir);
    auto path = dir / snapshot_file_name(sequence);
    write_bytes(path, encode_ppm(img));
    return path;
}

}  // namespace vf5
