// SPDX-License-Identifier: Apache-2.0
// Shared builders for synthetic fields and scratch directories.
#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <functional>
#include <random>
#include <string>
#include <unistd.h>

#include "vf5/field.hpp"

namespace vf5::test {

inline GridSpec make_grid(std::array<int, 3> dims, Vec3 origin, Vec3 spacing) {
    GridSpec g;
    g.dims = dims;
    g.origin = origin;
    g.spacing = spacing;
    return g;
}

/// Grid with n nodes per axis spanning [lo, hi]^3.
inline GridSpec cube_grid(int n, double lo, double hi) {
    const double h = (hi - lo) / (n - 1);
    return make_grid({n, n, n}, {lo, lo, lo}, {h, h, h});
}

inline ScalarField scalar_from(const GridSpec& g, const std::function<double(const Vec3&)>& f) {
    std::vector<double> v(g.node_count());
    for (int k = 0; k < g.dims[2]; ++k)
        for (int j = 0; j < g.dims[1]; ++j)
            for (int i = 0; i < g.dims[0]; ++i) v[g.index(i, j, k)] = f(g.node_position(i, j, k));
    return ScalarField(g, std::move(v));
}

inline VectorField vector_from(const GridSpec& g, const std::function<Vec3(const Vec3&)>& f) {
    std::vector<Vec3> v(g.node_count());
    for (int k = 0; k < g.dims[2]; ++k)
        for (int j = 0; j < g.dims[1]; ++j)
            for (int i = 0; i < g.dims[0]; ++i) v[g.index(i, j, k)] = f(g.node_position(i, j, k));
    return VectorField(g, std::move(v));
}

/// Values rounded through float32, matching what a dataset on disk holds.
inline ScalarField random_scalar(const GridSpec& g, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(g.node_count());
    for (auto& x : v) x = static_cast<float>(d(rng));
    return ScalarField(g, std::move(v));
}

inline Vec3 swirl(const Vec3& p) { return {-p.y, p.x, 0.0}; }

/// FieldSet with scalar "temperature" and vector "velocity", identical at
/// every step when `varying` is false.
inline FieldSet small_fieldset(int n = 12, int steps = 1, bool varying = false) {
    FieldSet fs;
    fs.grid = cube_grid(n, -1.0, 1.0);
    fs.steps = steps;
    for (int t = 0; t < steps; ++t) {
        const double shift = varying ? 0.1 * t : 0.0;
        fs.scalars["temperature"].push_back(scalar_from(fs.grid, [&](const Vec3& p) {
            return static_cast<float>(dot(p, p) + shift * p.x);
        }));
        fs.vectors["velocity"].push_back(vector_from(fs.grid, [&](const Vec3& p) {
            return Vec3{static_cast<float>(-p.y), static_cast<float>(p.x), static_cast<float>(0.2 + shift)};
        }));
    }
    return fs;
}

inline std::string read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("vf5_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace vf5::test
