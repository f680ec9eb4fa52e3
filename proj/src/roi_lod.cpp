// SPDX-License-Identifier: Apache-2.0
#include "vf5/roi_lod.hpp"

#include <algorithm>

namespace vf5 {

template <class T>
GridField<T> downsample(const GridField<T>& fine) {
    const GridSpec& fg = fine.grid();
    GridSpec cg = fg;
    for (int a = 0; a < 3; ++a) {
        cg.dims[a] = std::max(2, (fg.dims[a] + 1) / 2);
        cg.spacing[a] = 2.0 * fg.spacing[a];
    }

    std::vector<T> values(cg.node_count());
    const int cnx = cg.dims[0];
    const int cny = cg.dims[1];
    const int cnz = cg.dims[2];

#pragma omp parallel for schedule(static)
    for (int k = 0; k < cnz; ++k) {
        for (int j = 0; j < cny; ++j) {
            for (int i = 0; i < cnx; ++i) {
                T sum{};
                int count = 0;
                // At the clamped boundary (coarse dims forced up to 2) a coarse
                // node may have no children of its own; it then reuses the last
                // fine plane.
                auto range = [&](int c, int axis) {
                    const int last = fg.dims[axis] - 1;
                    int lo = std::min(2 * c, last);
                    int hi = std::min(2 * c + 1, last);
                    return std::pair{lo, hi};
                };
                const auto [i0, i1] = range(i, 0);
                const auto [j0, j1] = range(j, 1);
                const auto [k0, k1] = range(k, 2);
                for (int kk = k0; kk <= k1; ++kk)
                    for (int jj = j0; jj <= j1; ++jj)
                        for (int ii = i0; ii <= i1; ++ii) {
                            sum += fine.at(ii, jj, kk);
                            ++count;
                        }
                values[cg.index(i, j, k)] = sum * (1.0 / count);
            }
        }
    }
    return GridField<T>(cg, std::move(values));
}

template <class T>
LodPyramid<T> build_lod_pyramid(const GridField<T>& field, int max_levels) {
    if (max_levels < 1) throw Error(ErrorCode::InvalidArgument, "max_levels must be >= 1");
    LodPyramid<T> pyr;
    pyr.levels.reserve(static_cast<std::size_t>(max_levels));
    pyr.levels.push_back(field);
    for (int k = 1; k < max_levels; ++k) pyr.levels.push_back(downsample(pyr.levels.back()));
    return pyr;
}

void validate_roi(const GridSpec& grid, const RoiContext& ctx) {
    if (ctx.outside_level < 0 || ctx.outside_level > kMaxLodLevel) {
        throw Error(ErrorCode::InvalidArgument, "outside_level " + std::to_string(ctx.outside_level) +
                                                    " not in [0, " + std::to_string(kMaxLodLevel) + "]");
    }
    const Vec3 lo = grid.lower();
    const Vec3 hi = grid.upper();
    for (int a = 0; a < 3; ++a) {
        if (!(ctx.roi.min[a] <= ctx.roi.max[a])) {
            throw Error(ErrorCode::InvalidArgument, "ROI min must not exceed max");
        }
        if (ctx.roi.max[a] < lo[a] || ctx.roi.min[a] > hi[a]) {
            throw Error(ErrorCode::InvalidArgument, "ROI does not intersect the domain");
        }
    }
}

template <class T>
void validate_roi(const LodPyramid<T>& pyramid, const RoiContext& ctx) {
    if (pyramid.levels.empty()) throw Error(ErrorCode::InvalidArgument, "empty pyramid");
    if (ctx.outside_level >= static_cast<int>(pyramid.levels.size())) {
        throw Error(ErrorCode::InvalidArgument,
                    "outside_level " + std::to_string(ctx.outside_level) + " not in pyramid of " +
                        std::to_string(pyramid.levels.size()) + " levels");
    }
    validate_roi(pyramid.levels.front().grid(), ctx);
}

template <class T>
T sample_with_lod(const LodPyramid<T>& pyramid, const RoiContext& ctx, const Vec3& p) {
    const GridField<T>& base = pyramid.levels.front();
    if (!base.grid().contains(p)) {
        throw Error(ErrorCode::OutOfDomain, "point outside the domain");
    }
    if (ctx.roi.contains(p) || ctx.outside_level == 0) return base.sample(p);
    const GridField<T>& coarse = pyramid.levels[static_cast<std::size_t>(ctx.outside_level)];
    return coarse.sample_clamped(p);
}

template <class T>
LodView<T>::LodView(const LodPyramid<T>& pyramid, RoiContext ctx) : pyramid_(&pyramid), ctx_(ctx) {
    validate_roi(pyramid, ctx_);
}

template <class T>
std::optional<T> LodView<T>::try_sample(const Vec3& p) const {
    if (!grid().contains(p)) return std::nullopt;
    return sample_with_lod(*pyramid_, ctx_, p);
}

template <class T>
GridField<T> resample_with_lod(const LodView<T>& view) {
    const GridSpec& g = view.grid();
    const GridField<T>& base = view.base();
    std::vector<T> values(g.node_count());
    const int nz = g.dims[2];
#pragma omp parallel for schedule(static)
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < g.dims[1]; ++j) {
            for (int i = 0; i < g.dims[0]; ++i) {
                const Vec3 p = g.node_position(i, j, k);
                values[g.index(i, j, k)] =
                    view.context().roi.contains(p) ? base.at(i, j, k) : view.sample(p);
            }
        }
    }
    return GridField<T>(g, std::move(values));
}

double rms_magnitude(const LodVectorView& view) { return rms_magnitude(view.base()); }

template GridField<double> downsample(const GridField<double>&);
template GridField<Vec3> downsample(const GridField<Vec3>&);
template LodPyramid<double> build_lod_pyramid(const GridField<double>&, int);
template LodPyramid<Vec3> build_lod_pyramid(const GridField<Vec3>&, int);
template void validate_roi(const LodPyramid<double>&, const RoiContext&);
template void validate_roi(const LodPyramid<Vec3>&, const RoiContext&);
template double sample_with_lod(const LodPyramid<double>&, const RoiContext&, const Vec3&);
template Vec3 sample_with_lod(const LodPyramid<Vec3>&, const RoiContext&, const Vec3&);
template class LodView<double>;
template class LodView<Vec3>;
template GridField<double> resample_with_lod(const LodView<double>&);
template GridField<Vec3> resample_with_lod(const LodView<Vec3>&);

}  // namespace vf5
