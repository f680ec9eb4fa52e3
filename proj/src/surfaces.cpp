// SPDX-License-Identifier: Apache-2.0
#include "vf5/surfaces.hpp"

#include <algorithm>
#include <cstddef>

#include "mc_tables.hpp"

namespace vf5 {

namespace {

constexpr double kMinTriangleArea = 1e-12;

// Global edge id: node index * 3 + direction (0 = +x, 1 = +y, 2 = +z).
struct EdgeRef {
    int di, dj, dk, dir;
};

// Table edge -> (start corner offset, direction).
constexpr EdgeRef kEdgeRefs[12] = {
    {0, 0, 0, 0}, {1, 0, 0, 1}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}, {1, 0, 1, 1},
    {0, 1, 1, 0}, {0, 0, 1, 1}, {0, 0, 0, 2}, {1, 0, 0, 2}, {1, 1, 0, 2}, {0, 1, 0, 2},
};

constexpr int kStep[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

Vec3 node_gradient(const ScalarField& f, int i, int j, int k) {
    const GridSpec& g = f.grid();
    const int idx[3] = {i, j, k};
    Vec3 grad;
    for (int a = 0; a < 3; ++a) {
        int lo[3] = {i, j, k};
        int hi[3] = {i, j, k};
        if (idx[a] > 0) --lo[a];
        if (idx[a] < g.dims[a] - 1) ++hi[a];
        const double span = (hi[a] - lo[a]) * g.spacing[a];
        grad[a] = (f.at(hi[0], hi[1], hi[2]) - f.at(lo[0], lo[1], lo[2])) / span;
    }
    return grad;
}

}  // namespace

TriangleMesh extract_isosurface(const ScalarField& scalar, double level) {
    if (!std::isfinite(level)) throw Error(ErrorCode::InvalidArgument, "isosurface level must be finite");
    const GridSpec& g = scalar.grid();
    const int nx = g.dims[0];
    const int ny = g.dims[1];
    const int nz = g.dims[2];
    const auto values = scalar.values();
    auto above = [&](std::size_t n) { return values[n] > level; };

    // Vertex numbering in global edge order.
    std::vector<std::int32_t> edge_vertex(3 * g.node_count(), -1);
    std::vector<std::size_t> crossing_edges;
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const std::size_t n = g.index(i, j, k);
                const int idx[3] = {i, j, k};
                for (int dir = 0; dir < 3; ++dir) {
                    if (idx[dir] + 1 >= g.dims[dir]) continue;
                    const std::size_t m =
                        g.index(i + kStep[dir][0], j + kStep[dir][1], k + kStep[dir][2]);
                    if (above(n) != above(m)) {
                        edge_vertex[3 * n + dir] = static_cast<std::int32_t>(crossing_edges.size());
                        crossing_edges.push_back(3 * n + dir);
                    }
                }
            }
        }
    }

    TriangleMesh mesh;
    mesh.scalar_level = level;
    mesh.positions.resize(crossing_edges.size());
    mesh.normals.resize(crossing_edges.size());

    const long nverts = static_cast<long>(crossing_edges.size());
#pragma omp parallel for schedule(static)
    for (long v = 0; v < nverts; ++v) {
        const std::size_t e = crossing_edges[static_cast<std::size_t>(v)];
        const int dir = static_cast<int>(e % 3);
        const std::size_t n = e / 3;
        const int i = static_cast<int>(n % nx);
        const int j = static_cast<int>((n / nx) % ny);
        const int k = static_cast<int>(n / (static_cast<std::size_t>(nx) * ny));
        const int i2 = i + kStep[dir][0];
        const int j2 = j + kStep[dir][1];
        const int k2 = k + kStep[dir][2];
        const double fa = scalar.at(i, j, k);
        const double fb = scalar.at(i2, j2, k2);
        const double t = (level - fa) / (fb - fa);
        const Vec3 pa = g.node_position(i, j, k);
        const Vec3 pb = g.node_position(i2, j2, k2);
        mesh.positions[static_cast<std::size_t>(v)] = pa + t * (pb - pa);

        const Vec3 ga = node_gradient(scalar, i, j, k);
        const Vec3 gb = node_gradient(scalar, i2, j2, k2);
        const Vec3 grad = ga + t * (gb - ga);
        const double len = norm(grad);
        Vec3 normal;
        if (len > 0.0 && std::isfinite(len)) {
            normal = grad * (-1.0 / len);
        } else {
            // Flat gradient: point from the above corner toward the other one.
            normal = normalized(fa > level ? pb - pa : pa - pb);
        }
        mesh.normals[static_cast<std::size_t>(v)] = normal;
    }

    // Triangles per z-layer of cells, concatenated in layer order.
    const int layers = nz - 1;
    std::vector<std::vector<std::array<std::uint32_t, 3>>> per_layer(static_cast<std::size_t>(layers));
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < layers; ++k) {
        auto& out = per_layer[static_cast<std::size_t>(k)];
        for (int j = 0; j < ny - 1; ++j) {
            for (int i = 0; i < nx - 1; ++i) {
                int cube = 0;
                for (int c = 0; c < 8; ++c) {
                    const auto& o = detail::kMcCorner[c];
                    if (!above(g.index(i + o[0], j + o[1], k + o[2]))) cube |= 1 << c;
                }
                if (cube == 0 || cube == 255) continue;
                const auto& row = detail::kMcTriangles[cube];
                for (int t = 0; row[t] >= 0; t += 3) {
                    std::array<std::uint32_t, 3> tri{};
                    for (int s = 0; s < 3; ++s) {
                        const EdgeRef& r = kEdgeRefs[row[t + s]];
                        const std::size_t n = g.index(i + r.di, j + r.dj, k + r.dk);
                        tri[static_cast<std::size_t>(s)] =
                            static_cast<std::uint32_t>(edge_vertex[3 * n + r.dir]);
                    }
                    // Table order already winds counter-clockwise seen from the low side.
                    const Vec3& p0 = mesh.positions[tri[0]];
                    const Vec3 area2 = cross(mesh.positions[tri[1]] - p0, mesh.positions[tri[2]] - p0);
                    if (0.5 * norm(area2) <= kMinTriangleArea) continue;
                    out.push_back(tri);
                }
            }
        }
    }
    for (auto& layer : per_layer) mesh.triangles.insert(mesh.triangles.end(), layer.begin(), layer.end());
    return mesh;
}

TriangleMesh extract_isosurface(const LodScalarView& scalar, double level) {
    return extract_isosurface(resample_with_lod(scalar), level);
}

double slider_to_level(double scalar_min, double scalar_max, double slider_pos) {
    if (!(scalar_min <= scalar_max)) throw Error(ErrorCode::InvalidArgument, "slider range min must not exceed max");
    if (slider_pos == 1.0) return scalar_max;
    return scalar_min + slider_pos * (scalar_max - scalar_min);
}

}  // namespace vf5
