// SPDX-License-Identifier: Apache-2.0
#include "vf5/execute.hpp"

#include "vf5/integrators.hpp"
#include "vf5/slices.hpp"
#include "vf5/surfaces.hpp"
#include "vf5/volume.hpp"

namespace vf5 {

namespace {

using nlohmann::json;

Vec3 vec(const json& v) { return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()}; }

Axis axis_of(const json& v) { return v == "X" ? Axis::X : (v == "Y" ? Axis::Y : Axis::Z); }

TraceOptions trace_options(const json& p) {
    TraceOptions o;
    o.step_factor = p.value("step_factor", o.step_factor);
    o.max_steps = p.value("max_steps", o.max_steps);
    o.stagnation_eps = p.value("stagnation_eps", o.stagnation_eps);
    if (p.contains("max_time")) o.max_time = p["max_time"].get<double>();
    return o;
}

Colormap colormap(const json& p, const ScalarField& field) {
    auto [lo, hi] = value_range(field);
    if (p.contains("range")) {
        lo = p["range"][0].get<double>();
        hi = p["range"][1].get<double>();
    }
    return Colormap::by_name(p.value("colormap", std::string("rainbow")), lo, hi);
}

TransferFunction transfer_function(const json& p, const ScalarField& field) {
    if (!p.contains("tf")) {
        const auto [lo, hi] = value_range(field);
        return TransferFunction::ramp(lo, hi);
    }
    std::vector<ControlPoint> points;
    for (const auto& e : p["tf"]) {
        points.push_back({e[0].get<double>(),
                          {e[1].get<double>(), e[2].get<double>(), e[3].get<double>(), e[4].get<double>()}});
    }
    return TransferFunction(std::move(points));
}

std::pair<std::uint32_t, std::uint32_t> resolution(const json& p, std::uint32_t w, std::uint32_t h) {
    if (!p.contains("resolution")) return {w, h};
    return {p["resolution"][0].get<std::uint32_t>(), p["resolution"][1].get<std::uint32_t>()};
}

std::pair<double, double> plane_size(const json& p, double fallback) {
    if (!p.contains("size")) return {fallback, fallback};
    return {p["size"][0].get<double>(), p["size"][1].get<double>()};
}

template <class Source>
double default_dt(const Source& field) {
    const double rms = rms_magnitude(field);
    return rms > 0.0 ? 0.2 * field.grid().min_spacing() / rms : 1.0;
}

template <class Source>
Ensemble advect(const Source& field, Ensemble ens, const json& p) {
    const auto steps = p.value("advect_steps", std::int64_t{0});
    const double dt = p.value("dt", default_dt(field));
    for (std::int64_t s = 0; s < steps; ++s) ens = advect_ensemble_euler(field, ens, dt);
    return ens;
}

void append_particles(std::vector<FrameObject>& out, const Ensemble& ens) {
    for (std::size_t i = 0; i < ens.positions.size(); ++i) {
        Polyline dot;
        dot.vertices = {ens.positions[i]};
        dot.params = {ens.ages[i]};
        out.emplace_back(std::move(dot));
    }
}

}  // namespace

const ScalarPyramid& PyramidCache::scalar(const FieldSet& fields, const std::string& name, int step, int levels) {
    auto& slot = scalars_[{name, step, levels}];
    if (!slot) slot = std::make_unique<ScalarPyramid>(build_lod_pyramid(fields.scalar(name, step), levels));
    return *slot;
}

const VectorPyramid& PyramidCache::vector(const FieldSet& fields, const std::string& name, int step, int levels) {
    auto& slot = vectors_[{name, step, levels}];
    if (!slot) slot = std::make_unique<VectorPyramid>(build_lod_pyramid(fields.vector(name, step), levels));
    return *slot;
}

Executor::Executor(const FieldSet& fields, int step, std::optional<RoiContext> roi, PyramidCache* cache)
    : fields_(fields), step_(step), roi_(roi), cache_(cache ? cache : &own_cache_) {
    if (step < 0 || step >= fields.steps) throw Error(ErrorCode::BadStep, "step " + std::to_string(step) + " out of range");
    if (roi_) validate_roi(fields.grid, *roi_);
}

template <class F>
auto Executor::with_scalar(const std::string& name, F&& f) {
    const ScalarField& plain = fields_.scalar(name, step_);
    if (!roi_) return f(plain, plain);
    const auto& pyr = cache_->scalar(fields_, name, step_, roi_->outside_level + 1);
    return f(LodScalarView(pyr, *roi_), plain);
}

template <class F>
auto Executor::with_vector(const std::string& name, F&& f) {
    const VectorField& plain = fields_.vector(name, step_);
    if (!roi_) return f(plain);
    const auto& pyr = cache_->vector(fields_, name, step_, roi_->outside_level + 1);
    return f(LodVectorView(pyr, *roi_));
}

std::vector<FrameObject> Executor::run(const RecipeItem& item) {
    const json& p = item.params;
    const GridSpec& grid = fields_.grid;
    std::vector<FrameObject> out;

    switch (item.method) {
        case Method::Tracer:
        case Method::FieldLine: {
            const TraceOptions opts = trace_options(p);
            with_vector(item.field_name, [&](const auto& field) {
                for (const auto& s : p["seeds"]) {
                    out.emplace_back(item.method == Method::Tracer ? trace_streamline(field, vec(s), opts)
                                                                   : trace_field_line(field, vec(s), opts));
                }
                return 0;
            });
            break;
        }
        case Method::LocalArrows: {
            with_vector(item.field_name, [&](const auto& field) {
                const auto arrows = local_arrows(field, vec(p["center"]),
                                                 p.value("radius", kDefaultArrowRadiusFraction * grid.diagonal()),
                                                 p.value("count", kDefaultArrowCount),
                                                 p.value("rng_seed", std::uint64_t{0}));
                for (std::size_t i = 0; i < arrows.offsets.size(); ++i) {
                    if (!arrows.vectors[i]) continue;
                    Polyline glyph;
                    glyph.vertices = {arrows.position(i), arrows.position(i) + *arrows.vectors[i]};
                    glyph.params = {0.0, 1.0};
                    out.emplace_back(std::move(glyph));
                }
                return 0;
            });
            break;
        }
        case Method::Snowflakes: {
            with_vector(item.field_name, [&](const auto& field) {
                Ensemble ens;
                ens.rng_seed = p.value("rng_seed", std::uint64_t{0});
                ens.positions = seed_cone(grid, vec(p["apex"]), vec(p["direction"]), p.value("half_angle", 0.2),
                                          p.value("length", 0.25 * grid.diagonal()),
                                          p.value("count", kDefaultSnowflakeCount), ens.rng_seed);
                ens.ages.assign(ens.positions.size(), 0.0);
                append_particles(out, advect(field, std::move(ens), p));
                return 0;
            });
            break;
        }
        case Method::Hotaru: {
            with_vector(item.field_name, [&](const auto& field) {
                auto ens = scatter_ensemble(grid, p.value("count", kDefaultHotaruCount),
                                            p.value("rng_seed", std::uint64_t{0}));
                append_particles(out, advect(field, std::move(ens), p));
                return 0;
            });
            break;
        }
        case Method::Isosurface: {
            const double level = p["level"].get<double>();
            out.emplace_back(with_scalar(item.field_name, [&](const auto& field, const ScalarField&) {
                return extract_isosurface(field, level);
            }));
            break;
        }
        case Method::Orthoslice:
        case Method::LocalSlice:
        case Method::LIC: out.emplace_back(run_image(item)); break;
        case Method::Volume: {
            out.emplace_back(with_scalar(item.field_name, [&](const auto& field, const ScalarField& plain) {
                const auto tf = transfer_function(p, plain);
                if constexpr (std::is_same_v<std::decay_t<decltype(field)>, ScalarField>) {
                    return build_volume_texture(field, tf);
                } else {
                    return build_volume_texture(resample_with_lod(field), tf);
                }
            }));
            break;
        }
    }
    return out;
}

SliceImage Executor::run_image(const RecipeItem& item) {
    const json& p = item.params;
    const GridSpec& grid = fields_.grid;
    switch (item.method) {
        case Method::Orthoslice:
            return with_scalar(item.field_name, [&](const auto& field, const ScalarField& plain) {
                return orthoslice(field, axis_of(p["axis"]), p["index"].get<int>(), colormap(p, plain));
            });
        case Method::LocalSlice:
            return with_scalar(item.field_name, [&](const auto& field, const ScalarField& plain) {
                const auto [w, h] = plane_size(p, 0.2 * grid.diagonal());
                const auto [rw, rh] = resolution(p, 64, 64);
                const Vec3 center = vec(p["center"]);
                SlicePlane plane;
                if (p.value("mode", std::string("WandPerp")) == "FieldPerp") {
                    plane = with_vector(p["vector_field"].get<std::string>(), [&](const auto& vfield) {
                        return orient_local_slice(SliceMode::FieldPerp, Vec3{}, &vfield, center, w, h);
                    });
                } else {
                    plane = orient_local_slice(vec(p["wand_dir"]), grid, center, w, h);
                }
                return sample_slice_scalar(field, plane, rw, rh, colormap(p, plain));
            });
        case Method::LIC:
            return with_vector(item.field_name, [&](const auto& field) {
                const auto [w, h] = plane_size(p, 0.5 * grid.diagonal());
                const auto [rw, rh] = resolution(p, 256, 256);
                const SlicePlane plane = orient_local_slice(vec(p["normal"]), grid, vec(p["center"]), w, h);
                return lic_slice(field, plane, rw, rh, p.value("kernel_half_len", kDefaultLicHalfLength),
                                 p.value("noise_seed", std::uint64_t{0}));
            });
        case Method::Volume: {
            const auto objects = run(item);
            return composite_preview(std::get<VolumeTexture>(objects.front()), axis_of(p.value("axis", "Z")),
                                     Rgb8{0, 0, 0});
        }
        default:
            throw Error(ErrorCode::InvalidParams,
                        std::string(to_string(item.method)) + " does not produce an image");
    }
}

BakedFrame Executor::run(const VisRecipe& recipe) {
    BakedFrame frame;
    frame.step = static_cast<std::uint32_t>(step_);
    for (const auto& item : recipe.items) {
        auto objects = run(item);
        for (auto& o : objects) frame.objects.push_back(std::move(o));
    }
    return frame;
}

}  // namespace vf5
