// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "vf5/field.hpp"
#include "vf5/frame.hpp"
#include "vf5/recipe.hpp"
#include "vf5/roi_lod.hpp"

namespace vf5 {

/// Caches LOD pyramids per (field, step, depth) so repeated executions under
/// one ROI do not rebuild them.
class PyramidCache {
public:
    const ScalarPyramid& scalar(const FieldSet& fields, const std::string& name, int step, int levels);
    const VectorPyramid& vector(const FieldSet& fields, const std::string& name, int step, int levels);

private:
    using Key = std::tuple<std::string, int, int>;
    std::map<Key, std::unique_ptr<ScalarPyramid>> scalars_;
    std::map<Key, std::unique_ptr<VectorPyramid>> vectors_;
};

/// Runs recipe items against one time step. Output objects per method:
///   Tracer, FieldLine   one Polyline per seed
///   LocalArrows         one 2-vertex Polyline (base, base + vector) per in-domain arrow
///   Snowflakes, Hotaru  one 1-vertex Polyline per particle, param = age
///   Isosurface          TriangleMesh
///   Orthoslice, LocalSlice, LIC  SliceImage
///   Volume              VolumeTexture
class Executor {
public:
    Executor(const FieldSet& fields, int step, std::optional<RoiContext> roi = std::nullopt,
             PyramidCache* cache = nullptr);

    std::vector<FrameObject> run(const RecipeItem& item);
    /// All items in order, concatenated.
    BakedFrame run(const VisRecipe& recipe);

    /// Image produced by an image-like item; Volume items yield the back-to-front
    /// preview along `axis` (param, default "Z") over black.
    SliceImage run_image(const RecipeItem& item);

private:
    template <class F>
    auto with_scalar(const std::string& name, F&& f);
    template <class F>
    auto with_vector(const std::string& name, F&& f);

    const FieldSet& fields_;
    int step_;
    std::optional<RoiContext> roi_;
    PyramidCache own_cache_;
    PyramidCache* cache_;
};

}  // namespace vf5
