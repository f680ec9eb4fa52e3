// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "vf5/field.hpp"

namespace vf5 {

struct Box {
    Vec3 min;
    Vec3 max;

    bool contains(const Vec3& p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
               p.z <= max.z;
    }
    friend bool operator==(const Box&, const Box&) = default;
};

/// Factor-2 box-average pyramid. Level 0 is the input field; level k has
/// ceil(dims / 2^k) nodes per axis (at least 2), doubled spacing and the same
/// origin.
template <class T>
struct LodPyramid {
    std::vector<GridField<T>> levels;
};

using ScalarPyramid = LodPyramid<double>;
using VectorPyramid = LodPyramid<Vec3>;

/// Region kept at full resolution; everything else is read from
/// `outside_level` of the pyramid.
struct RoiContext {
    Box roi;
    int outside_level = 1;

    friend bool operator==(const RoiContext&, const RoiContext&) = default;
};

/// Coarse node n averages the fine nodes {2n, 2n+1} per axis that exist.
template <class T>
GridField<T> downsample(const GridField<T>& fine);

template <class T>
LodPyramid<T> build_lod_pyramid(const GridField<T>& field, int max_levels);

inline constexpr int kMaxLodLevel = 16;

/// Throws InvalidArgument when the ROI misses the domain, min exceeds max, or
/// the level is negative, above kMaxLodLevel or missing from the pyramid.
void validate_roi(const GridSpec& grid, const RoiContext& ctx);
template <class T>
void validate_roi(const LodPyramid<T>& pyramid, const RoiContext& ctx);

/// Level-0 trilinear sample inside the ROI; outside, a trilinear sample of the
/// coarse level at p clamped to that level's (possibly smaller) bounds.
/// Throws OutOfDomain when p is outside the level-0 domain.
template <class T>
T sample_with_lod(const LodPyramid<T>& pyramid, const RoiContext& ctx, const Vec3& p);

/// Sampling view with the same interface as GridField, for kernels that take
/// either a plain field or an ROI/LOD combination.
template <class T>
class LodView {
public:
    using value_type = T;

    LodView(const LodPyramid<T>& pyramid, RoiContext ctx);

    const GridSpec& grid() const { return pyramid_->levels.front().grid(); }
    const GridField<T>& base() const { return pyramid_->levels.front(); }
    const RoiContext& context() const { return ctx_; }

    T sample(const Vec3& p) const { return sample_with_lod(*pyramid_, ctx_, p); }
    std::optional<T> try_sample(const Vec3& p) const;
    T sample_clamped(const Vec3& p) const { return *try_sample(grid().clamp(p)); }

private:
    const LodPyramid<T>* pyramid_;
    RoiContext ctx_;
};

using LodScalarView = LodView<double>;
using LodVectorView = LodView<Vec3>;

/// Level-0 resolution field whose node values are sample_with_lod at each
/// node. Nodes inside the ROI keep their stored values bit-for-bit.
template <class T>
GridField<T> resample_with_lod(const LodView<T>& view);

double rms_magnitude(const LodVectorView& view);

}  // namespace vf5
