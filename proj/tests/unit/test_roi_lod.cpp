// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "../support/fixtures.hpp"
#include "vf5/execute.hpp"
#include "vf5/roi_lod.hpp"

using namespace vf5;
using namespace vf5::test;

namespace {

// Plain-loop 2x box average over a grid whose dims are even.
std::vector<double> block_mean(const ScalarField& f, std::array<int, 3>& cdims) {
    const auto d = f.grid().dims;
    for (int a = 0; a < 3; ++a) cdims[a] = d[a] / 2;
    std::vector<double> out;
    for (int k = 0; k < cdims[2]; ++k)
        for (int j = 0; j < cdims[1]; ++j)
            for (int i = 0; i < cdims[0]; ++i) {
                double s = 0;
                for (int c = 0; c < 8; ++c) s += f.at(2 * i + (c & 1), 2 * j + ((c >> 1) & 1), 2 * k + (c >> 2));
                out.push_back(s / 8);
            }
    return out;
}

// Trilinear interpolation written out from the node values.
double trilinear(const std::vector<double>& v, std::array<int, 3> dims, Vec3 origin, Vec3 h, Vec3 p) {
    int base[3];
    double t[3];
    for (int a = 0; a < 3; ++a) {
        double u = (p[a] - origin[a]) / h[a];
        u = std::clamp(u, 0.0, double(dims[a] - 1));
        base[a] = std::min(int(std::floor(u)), dims[a] - 2);
        t[a] = u - base[a];
    }
    auto at = [&](int i, int j, int k) { return v[(std::size_t(k) * dims[1] + j) * dims[0] + i]; };
    double r = 0;
    for (int c = 0; c < 8; ++c) {
        const int di = c & 1, dj = (c >> 1) & 1, dk = c >> 2;
        const double w = (di ? t[0] : 1 - t[0]) * (dj ? t[1] : 1 - t[1]) * (dk ? t[2] : 1 - t[2]);
        r += w * at(base[0] + di, base[1] + dj, base[2] + dk);
    }
    return r;
}

ErrorCode roi_error(const GridSpec& g, const RoiContext& ctx) {
    try {
        validate_roi(g, ctx);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("validate_roi did not throw");
    return ErrorCode::ManifestParse;
}

}  // namespace

TEST_CASE("level 1 of a 4^3 ramp averages eight children") {
    const GridSpec g = make_grid({4, 4, 4}, {}, {1, 1, 1});
    std::vector<double> v(64);
    for (int i = 0; i < 64; ++i) v[i] = i;
    const ScalarField f(g, v);
    const ScalarPyramid pyr = build_lod_pyramid(f, 3);
    REQUIRE(pyr.levels.size() == 3);
    // Children of coarse (0,0,0): indices 0,1,4,5,16,17,20,21.
    CHECK(std::abs(pyr.levels[1].at(0, 0, 0) - 10.5) <= 1e-12);
    CHECK(pyr.levels[1].grid().dims == std::array<int, 3>{2, 2, 2});
    CHECK(pyr.levels[1].grid().spacing == Vec3{2, 2, 2});
    CHECK(pyr.levels[1].grid().origin == g.origin);
    const auto l0 = pyr.levels[0].values();
    CHECK(std::equal(l0.begin(), l0.end(), v.begin(), v.end()));
}

TEST_CASE("downsampling preserves the mean on power-of-two dims") {
    const ScalarField f = random_scalar(make_grid({16, 8, 4}, {}, {0.5, 0.5, 0.5}), 17, -2, 3);
    auto mean = [](std::span<const double> v) {
        double s = 0;
        for (double x : v) s += x;
        return s / double(v.size());
    };
    const ScalarField c = downsample(f);
    CHECK(c.grid().dims == std::array<int, 3>{8, 4, 2});
    CHECK(std::abs(mean(c.values()) - mean(f.values())) <= 1e-12);
    std::array<int, 3> cd{};
    const auto oracle = block_mean(f, cd);
    const auto got = c.values();
    REQUIRE(got.size() == oracle.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - oracle[i]) <= 1e-12);
}

TEST_CASE("constant fields stay constant at every level") {
    const ScalarField f = scalar_from(make_grid({9, 6, 5}, {}, {1, 1, 1}), [](const Vec3&) { return 3.25; });
    const ScalarPyramid pyr = build_lod_pyramid(f, 5);
    for (const auto& level : pyr.levels) {
        for (int a = 0; a < 3; ++a) CHECK(level.grid().dims[a] >= 2);
        for (double x : level.values()) CHECK(x == 3.25);
    }
    const VectorField v = vector_from(cube_grid(7, 0, 1), [](const Vec3&) { return Vec3{1, -2, 0.5}; });
    for (const auto& level : build_lod_pyramid(v, 4).levels)
        for (const auto& x : level.values()) CHECK(x == Vec3{1, -2, 0.5});
}

TEST_CASE("sampling inside the ROI is the plain level-0 sample") {
    const ScalarField f = random_scalar(cube_grid(16, 0, 1), 3);
    const ScalarPyramid pyr = build_lod_pyramid(f, 3);
    const RoiContext ctx{{{0.2, 0.3, 0.1}, {0.6, 0.7, 0.5}}, 2};
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0, 1);
    for (int n = 0; n < 500; ++n) {
        const Vec3 p{0.2 + 0.4 * u(rng), 0.3 + 0.4 * u(rng), 0.1 + 0.4 * u(rng)};
        CHECK(sample_with_lod(pyr, ctx, p) == f.sample(p));
    }
}

TEST_CASE("sampling outside the ROI matches an independent coarse oracle") {
    const GridSpec g = make_grid({8, 8, 8}, {-1, 0, 2}, {0.25, 0.25, 0.25});
    const ScalarField f = random_scalar(g, 44, -1, 1);
    const ScalarPyramid pyr = build_lod_pyramid(f, 2);
    std::array<int, 3> cd{};
    const auto coarse = block_mean(f, cd);
    const RoiContext ctx{{{-1, 0, 2}, {-0.5, 0.5, 2.5}}, 1};
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    int outside = 0;
    for (int n = 0; n < 1000; ++n) {
        const Vec3 p{-1 + 1.75 * u(rng), 1.75 * u(rng), 2 + 1.75 * u(rng)};
        if (ctx.roi.contains(p)) continue;
        ++outside;
        const double want = trilinear(coarse, cd, g.origin, {0.5, 0.5, 0.5}, p);
        CHECK(std::abs(sample_with_lod(pyr, ctx, p) - want) <= 1e-12);
    }
    CHECK(outside > 500);
}

TEST_CASE("growing the ROI toward the domain converges to plain sampling") {
    const ScalarField f = scalar_from(cube_grid(17, 0, 1), [](const Vec3& p) {
        return std::sin(6 * p.x) * std::cos(5 * p.y) + p.z * p.z;
    });
    const ScalarPyramid pyr = build_lod_pyramid(f, 3);
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<Vec3> pts(400);
    for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
    double prev = 1e300;
    for (double r : {0.0, 0.15, 0.3, 0.45, 0.5}) {
        const RoiContext ctx{{{0.5 - r, 0.5 - r, 0.5 - r}, {0.5 + r, 0.5 + r, 0.5 + r}}, 2};
        double err = 0;
        for (const auto& p : pts) err += std::abs(sample_with_lod(pyr, ctx, p) - f.sample(p));
        CHECK(err <= prev + 1e-12);
        prev = err;
    }
    CHECK(prev == 0.0);
}

TEST_CASE("sampling outside the level-0 domain throws") {
    const ScalarPyramid pyr = build_lod_pyramid(random_scalar(cube_grid(4, 0, 1), 1), 2);
    const RoiContext ctx{{{0, 0, 0}, {0.5, 0.5, 0.5}}, 1};
    try {
        sample_with_lod(pyr, ctx, {1.5, 0.5, 0.5});
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OutOfDomain);
    }
    const LodScalarView view(pyr, ctx);
    CHECK_FALSE(view.try_sample({-0.1, 0, 0}).has_value());
}

TEST_CASE("resampling keeps nodes inside the ROI bit-for-bit") {
    const ScalarField f = random_scalar(cube_grid(10, 0, 1), 8);
    const ScalarPyramid pyr = build_lod_pyramid(f, 2);
    const RoiContext ctx{{{0.2, 0.2, 0.2}, {0.7, 0.7, 0.7}}, 1};
    const ScalarField r = resample_with_lod(LodScalarView(pyr, ctx));
    const GridSpec& g = f.grid();
    for (int k = 0; k < 10; ++k)
        for (int j = 0; j < 10; ++j)
            for (int i = 0; i < 10; ++i) {
                const Vec3 p = g.node_position(i, j, k);
                if (ctx.roi.contains(p)) CHECK(r.at(i, j, k) == f.at(i, j, k));
                else CHECK(r.at(i, j, k) == sample_with_lod(pyr, ctx, p));
            }
}

TEST_CASE("whole-domain ROI output is byte-identical to no ROI") {
    const FieldSet fs = small_fieldset(16);
    const RoiContext whole{{fs.grid.lower(), fs.grid.upper()}, 2};
    const VisRecipe recipe{{
        {Method::Isosurface, "temperature", {{"level", 0.5}}},
        {Method::Orthoslice, "temperature", {{"axis", "Y"}, {"index", 7}}},
        {Method::Tracer, "velocity", {{"seeds", {{0.5, 0, 0}, {0.2, 0.3, -0.4}}}, {"max_steps", 200}}},
        {Method::FieldLine, "velocity", {{"seeds", {{0.4, 0.1, 0}}}}},
        {Method::LIC, "velocity", {{"center", {0, 0, 0}}, {"normal", {0, 0, 1}}, {"resolution", {48, 40}}}},
        {Method::Volume, "temperature", nlohmann::json::object()},
    }};
    Executor plain(fs, 0);
    Executor lod(fs, 0, whole);
    CHECK(encode_frame(plain.run(recipe)) == encode_frame(lod.run(recipe)));
}

TEST_CASE("a partial ROI changes output only through the coarse samples") {
    const FieldSet fs = small_fieldset(16);
    const RoiContext part{{{-1, -1, -1}, {0, 1, 1}}, 1};
    const RecipeItem slice{Method::Orthoslice, "temperature", {{"axis", "Z"}, {"index", 5}}};
    const SliceImage a = Executor(fs, 0).run_image(slice);
    const SliceImage b = Executor(fs, 0, part).run_image(slice);
    REQUIRE(a.width == b.width);
    CHECK_FALSE(a == b);
}

TEST_CASE("ROI validation") {
    const GridSpec g = cube_grid(5, 0, 1);
    CHECK_NOTHROW(validate_roi(g, {{{0.2, 0.2, 0.2}, {0.4, 0.4, 0.4}}, 1}));
    CHECK_NOTHROW(validate_roi(g, {{{-5, -5, -5}, {0, 0, 0}}, 0}));
    CHECK(roi_error(g, {{{0.5, 0, 0}, {0.4, 1, 1}}, 1}) == ErrorCode::InvalidArgument);
    CHECK(roi_error(g, {{{2, 2, 2}, {3, 3, 3}}, 1}) == ErrorCode::InvalidArgument);
    CHECK(roi_error(g, {{{0, 0, 0}, {1, 1, 1}}, -1}) == ErrorCode::InvalidArgument);
    CHECK(roi_error(g, {{{0, 0, 0}, {1, 1, 1}}, kMaxLodLevel + 1}) == ErrorCode::InvalidArgument);
    const ScalarPyramid pyr = build_lod_pyramid(random_scalar(g, 2), 2);
    CHECK_NOTHROW(validate_roi(pyr, RoiContext{{{0, 0, 0}, {1, 1, 1}}, 1}));
    CHECK_THROWS_AS(validate_roi(pyr, RoiContext{{{0, 0, 0}, {1, 1, 1}}, 2}), Error);
    CHECK_THROWS_AS(Executor(small_fieldset(4), 0, RoiContext{{{5, 5, 5}, {6, 6, 6}}, 1}), Error);
}
