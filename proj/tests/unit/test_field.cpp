// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>

#include <json.hpp>

#include "../support/fixtures.hpp"
#include "vf5/field.hpp"

using namespace vf5;
using namespace vf5::test;
using nlohmann::json;

namespace {

void write_raw(const std::filesystem::path& path, const std::vector<float>& values) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * 4));
}

void write_manifest(const std::filesystem::path& dir, const json& j) {
    std::ofstream(dir / "manifest.vf5") << j.dump();
}

json manifest_2x2x2(const std::string& scalar_file) {
    return {{"dims", {2, 2, 2}},
            {"origin", {0, 0, 0}},
            {"spacing", {1, 1, 1}},
            {"steps", 1},
            {"scalars", {{{"name", "t"}, {"files", {scalar_file}}}}},
            {"vectors", json::array()}};
}

ErrorCode load_error(const std::filesystem::path& p) {
    try {
        load_dataset(p);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("load_dataset did not throw");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("grid validation rejects thin dims and non-positive spacing") {
    CHECK_THROWS_AS(make_grid({1, 2, 2}, {}, {1, 1, 1}).validate(), Error);
    CHECK_THROWS_AS(make_grid({2, 2, 2}, {}, {1, 0, 1}).validate(), Error);
    CHECK_THROWS_AS(make_grid({2, 2, 2}, {}, {1, 1, -1}).validate(), Error);
    CHECK_NOTHROW(make_grid({2, 3, 4}, {}, {0.5, 1, 2}).validate());
}

TEST_CASE("domain bounds are closed") {
    const GridSpec g = make_grid({3, 4, 5}, {1, 2, 3}, {0.5, 0.25, 2});
    CHECK(g.upper() == Vec3{2.0, 2.75, 11.0});
    CHECK(g.contains(g.lower()));
    CHECK(g.contains(g.upper()));
    CHECK_FALSE(g.contains({2.0001, 2.5, 4}));
    CHECK_FALSE(g.contains({0.999, 2.5, 4}));
}

TEST_CASE("constant fields sample to the constant") {
    const GridSpec g = cube_grid(5, 0, 1);
    const ScalarField s = scalar_from(g, [](const Vec3&) { return 5.0; });
    const VectorField v = vector_from(g, [](const Vec3&) { return Vec3{1, 2, 3}; });
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(0, 1);
    for (int n = 0; n < 100; ++n) {
        const Vec3 p{d(rng), d(rng), d(rng)};
        CHECK(s.sample(p) == doctest::Approx(5.0).epsilon(1e-15));
        const Vec3 q = v.sample(p);
        CHECK(q.x == doctest::Approx(1.0));
        CHECK(q.y == doctest::Approx(2.0));
        CHECK(q.z == doctest::Approx(3.0));
    }
}

TEST_CASE("single cell x ramp gives 0.5 at the cell center") {
    const GridSpec g = make_grid({2, 2, 2}, {}, {1, 1, 1});
    const ScalarField s = scalar_from(g, [](const Vec3& p) { return p.x; });
    CHECK(s.sample({0.5, 0.5, 0.5}) == 0.5);
}

TEST_CASE("node samples are bit-exact") {
    const GridSpec g = make_grid({4, 3, 5}, {-0.3, 0.7, 1.1}, {0.1, 0.3, 0.7});
    const ScalarField s = random_scalar(g, 11, -5, 5);
    std::mt19937_64 rng(3);
    std::vector<Vec3> vv(g.node_count());
    std::uniform_real_distribution<double> d(-1, 1);
    for (auto& x : vv) x = {d(rng), d(rng), -0.0};
    const VectorField v(g, vv);
    for (int k = 0; k < 5; ++k)
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 4; ++i) {
                const Vec3 p = g.node_position(i, j, k);
                const double a = s.sample(p);
                const double b = s.at(i, j, k);
                CHECK(std::memcmp(&a, &b, sizeof a) == 0);
                const Vec3 q = v.sample(p);
                CHECK(std::memcmp(&q, &v.at(i, j, k), sizeof q) == 0);
            }
}

TEST_CASE("trilinear sampling reproduces affine functions") {
    const GridSpec g = make_grid({6, 7, 5}, {-1, 0.5, 2}, {0.3, 0.2, 0.45});
    auto f = [](const Vec3& p) { return 1.5 + 2.0 * p.x - 0.75 * p.y + 3.25 * p.z; };
    const ScalarField s = scalar_from(g, f);
    std::mt19937_64 rng(42);
    const Vec3 lo = g.lower();
    const Vec3 hi = g.upper();
    for (int n = 0; n < 2000; ++n) {
        Vec3 p;
        for (int a = 0; a < 3; ++a) p[a] = std::uniform_real_distribution<double>(lo[a], hi[a])(rng);
        const double exact = f(p);
        CHECK(std::abs(s.sample(p) - exact) <= 1e-12 * std::max(1.0, std::abs(exact)));
    }
}

TEST_CASE("sampling outside the domain throws OutOfDomain") {
    const GridSpec g = cube_grid(3, 0, 1);
    const VectorField v = vector_from(g, [](const Vec3&) { return Vec3{1, 0, 0}; });
    try {
        v.sample({1.5, 0.5, 0.5});
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OutOfDomain);
    }
    CHECK_FALSE(v.try_sample({-0.1, 0.5, 0.5}).has_value());
    CHECK(v.sample_clamped({5, 5, 5}) == Vec3{1, 0, 0});
}

TEST_CASE("sampling is repeatable") {
    const ScalarField s = random_scalar(cube_grid(9, 0, 1), 5);
    const Vec3 p{0.123, 0.456, 0.789};
    const double a = s.sample(p);
    for (int n = 0; n < 10; ++n) CHECK(s.sample(p) == a);
}

TEST_CASE("value range and rms") {
    const GridSpec g = make_grid({2, 2, 2}, {}, {1, 1, 1});
    const ScalarField s = scalar_from(g, [](const Vec3& p) { return p.x - 2.0 * p.z; });
    const auto [lo, hi] = value_range(s);
    CHECK(lo == -2.0);
    CHECK(hi == 1.0);
    const VectorField v = vector_from(g, [](const Vec3& p) { return Vec3{3.0 * p.x, 4.0 * p.x, 0}; });
    CHECK(rms_magnitude(v) == doctest::Approx(std::sqrt(12.5)));
}

TEST_CASE("load a 2x2x2 scalar dataset") {
    TempDir dir;
    write_raw(dir / "t.raw", {0, 1, 2, 3, 4, 5, 6, 7});
    write_manifest(dir.path(), manifest_2x2x2("t.raw"));
    const FieldSet fs = load_dataset(dir.path());
    CHECK(fs.steps == 1);
    CHECK(fs.scalars.size() == 1);
    CHECK(fs.vectors.empty());
    CHECK(fs.scalar("t", 0).at(1, 1, 1) == 7.0);
    CHECK(fs.scalar("t", 0).at(1, 0, 1) == 5.0);
    // The manifest path itself is also accepted.
    CHECK(load_dataset(dir / "manifest.vf5").grid == fs.grid);
}

TEST_CASE("short raw file reports expected and actual bytes") {
    TempDir dir;
    write_raw(dir / "t.raw", {0, 1, 2, 3, 4, 5, 6});
    write_manifest(dir.path(), manifest_2x2x2("t.raw"));
    try {
        load_dataset(dir.path());
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TruncatedData);
        const std::string msg = e.what();
        CHECK(msg.find("32") != std::string::npos);
        CHECK(msg.find("28") != std::string::npos);
    }
}

TEST_CASE("4x4x4 vector file of 768 bytes is accepted") {
    TempDir dir;
    std::vector<float> v(4 * 4 * 4 * 3);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<float>(i);
    write_raw(dir / "v.raw", v);
    CHECK(std::filesystem::file_size(dir / "v.raw") == 768);
    json m = {{"dims", {4, 4, 4}},
              {"origin", {0, 0, 0}},
              {"spacing", {1, 1, 1}},
              {"steps", 1},
              {"scalars", json::array()},
              {"vectors", {{{"name", "u"}, {"files", {"v.raw"}}}}}};
    write_manifest(dir.path(), m);
    const FieldSet fs = load_dataset(dir.path());
    CHECK(fs.vector("u", 0).at(1, 0, 0) == Vec3{3, 4, 5});
}

TEST_CASE("load errors") {
    SUBCASE("missing manifest") {
        TempDir dir;
        CHECK(load_error(dir.path()) == ErrorCode::MissingFile);
    }
    SUBCASE("malformed manifest") {
        TempDir dir;
        std::ofstream(dir / "manifest.vf5") << "{ not json";
        CHECK(load_error(dir.path()) == ErrorCode::ManifestParse);
    }
    SUBCASE("missing keys") {
        TempDir dir;
        write_manifest(dir.path(), {{"dims", {2, 2, 2}}});
        CHECK(load_error(dir.path()) == ErrorCode::ManifestParse);
    }
    SUBCASE("missing raw file") {
        TempDir dir;
        write_manifest(dir.path(), manifest_2x2x2("absent.raw"));
        CHECK(load_error(dir.path()) == ErrorCode::MissingFile);
    }
    SUBCASE("NaN voxel") {
        TempDir dir;
        write_raw(dir / "t.raw", {0, 1, 2, std::numeric_limits<float>::quiet_NaN(), 4, 5, 6, 7});
        write_manifest(dir.path(), manifest_2x2x2("t.raw"));
        CHECK(load_error(dir.path()) == ErrorCode::NonFinite);
    }
    SUBCASE("Inf voxel") {
        TempDir dir;
        write_raw(dir / "t.raw", {0, 1, 2, 3, 4, 5, 6, std::numeric_limits<float>::infinity()});
        write_manifest(dir.path(), manifest_2x2x2("t.raw"));
        CHECK(load_error(dir.path()) == ErrorCode::NonFinite);
    }
    SUBCASE("file list shorter than steps") {
        TempDir dir;
        write_raw(dir / "t.raw", {0, 1, 2, 3, 4, 5, 6, 7});
        json m = manifest_2x2x2("t.raw");
        m["steps"] = 2;
        write_manifest(dir.path(), m);
        CHECK(load_error(dir.path()) == ErrorCode::ManifestParse);
    }
}

TEST_CASE("write then load round-trips float32 data") {
    TempDir dir;
    const FieldSet fs = small_fieldset(6, 3, true);
    write_dataset(fs, dir.path());
    const FieldSet back = load_dataset(dir.path());
    CHECK(back.grid == fs.grid);
    CHECK(back.steps == 3);
    for (int t = 0; t < 3; ++t) {
        const auto a = fs.scalar("temperature", t).values();
        const auto b = back.scalar("temperature", t).values();
        CHECK(std::equal(a.begin(), a.end(), b.begin(), b.end()));
        const auto va = fs.vector("velocity", t).values();
        const auto vb = back.vector("velocity", t).values();
        CHECK(std::equal(va.begin(), va.end(), vb.begin(), vb.end()));
    }
}

TEST_CASE("field lookups report unknown names and bad steps") {
    const FieldSet fs = small_fieldset(4, 2);
    try {
        fs.scalar("pressure", 0);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownField);
    }
    try {
        fs.vector("velocity", 2);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadStep);
    }
}
