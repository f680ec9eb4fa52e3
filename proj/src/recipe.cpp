// SPDX-License-Identifier: Apache-2.0
#include "vf5/recipe.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "vf5/slices.hpp"
#include "vf5/volume.hpp"

namespace vf5 {

namespace {

using nlohmann::json;

constexpr std::pair<Method, std::string_view> kMethodNames[] = {
    {Method::Tracer, "Tracer"},         {Method::FieldLine, "FieldLine"},
    {Method::LocalArrows, "LocalArrows"}, {Method::Snowflakes, "Snowflakes"},
    {Method::Hotaru, "Hotaru"},         {Method::Isosurface, "Isosurface"},
    {Method::Orthoslice, "Orthoslice"}, {Method::LocalSlice, "LocalSlice"},
    {Method::LIC, "LIC"},               {Method::Volume, "Volume"},
};

constexpr std::int64_t kMaxResolution = 8192;

enum class Kind {
    Number,
    PositiveNumber,
    NonNegativeNumber,
    Count,
    PositiveCount,
    Seed,
    Vec3,
    NonZeroVec3,
    Vec3List,
    Size2,
    Res2,
    Range2,
    AxisName,
    ModeName,
    ColormapName,
    VectorFieldName,
    TfPoints,
    HalfAngle,
};

struct ParamSpec {
    std::string_view key;
    Kind kind;
    bool required;
};

std::vector<ParamSpec> schema(Method m) {
    switch (m) {
        case Method::Tracer:
            return {{"seeds", Kind::Vec3List, true},       {"step_factor", Kind::PositiveNumber, false},
                    {"max_steps", Kind::PositiveCount, false}, {"stagnation_eps", Kind::PositiveNumber, false},
                    {"max_time", Kind::NonNegativeNumber, false}};
        case Method::FieldLine:
            return {{"seeds", Kind::Vec3List, true},
                    {"step_factor", Kind::PositiveNumber, false},
                    {"max_steps", Kind::PositiveCount, false},
                    {"stagnation_eps", Kind::PositiveNumber, false}};
        case Method::LocalArrows:
            return {{"center", Kind::Vec3, true},
                    {"radius", Kind::PositiveNumber, false},
                    {"count", Kind::Count, false},
                    {"rng_seed", Kind::Seed, false}};
        case Method::Snowflakes:
            return {{"apex", Kind::Vec3, true},          {"direction", Kind::NonZeroVec3, true},
                    {"half_angle", Kind::HalfAngle, false}, {"length", Kind::PositiveNumber, false},
                    {"count", Kind::Count, false},        {"rng_seed", Kind::Seed, false},
                    {"dt", Kind::PositiveNumber, false},  {"advect_steps", Kind::Count, false}};
        case Method::Hotaru:
            return {{"count", Kind::Count, false},
                    {"rng_seed", Kind::Seed, false},
                    {"dt", Kind::PositiveNumber, false},
                    {"advect_steps", Kind::Count, false}};
        case Method::Isosurface: return {{"level", Kind::Number, true}};
        case Method::Orthoslice:
            return {{"axis", Kind::AxisName, true},
                    {"index", Kind::Count, true},
                    {"colormap", Kind::ColormapName, false},
                    {"range", Kind::Range2, false}};
        case Method::LocalSlice:
            return {{"center", Kind::Vec3, true},           {"mode", Kind::ModeName, false},
                    {"wand_dir", Kind::NonZeroVec3, false},  {"vector_field", Kind::VectorFieldName, false},
                    {"size", Kind::Size2, false},           {"resolution", Kind::Res2, false},
                    {"colormap", Kind::ColormapName, false}, {"range", Kind::Range2, false}};
        case Method::LIC:
            return {{"center", Kind::Vec3, true},      {"normal", Kind::NonZeroVec3, true},
                    {"size", Kind::Size2, false},      {"resolution", Kind::Res2, false},
                    {"kernel_half_len", Kind::Count, false}, {"noise_seed", Kind::Seed, false}};
        case Method::Volume: return {{"tf", Kind::TfPoints, false}, {"axis", Kind::AxisName, false}};
    }
    return {};
}

[[noreturn]] void bad(const RecipeItem& item, std::string_view key, const std::string& why) {
    throw Error(ErrorCode::InvalidParams,
                std::string(to_string(item.method)) + " param '" + std::string(key) + "' " + why);
}

bool is_finite_number(const json& v) { return v.is_number() && std::isfinite(v.get<double>()); }

bool is_vec3(const json& v) {
    if (!v.is_array() || v.size() != 3) return false;
    for (const auto& c : v)
        if (!is_finite_number(c)) return false;
    return true;
}

void check_value(const RecipeItem& item, const FieldSet& fields, const ParamSpec& spec, const json& v) {
    const auto key = spec.key;
    switch (spec.kind) {
        case Kind::Number:
            if (!is_finite_number(v)) bad(item, key, "must be a finite number");
            break;
        case Kind::PositiveNumber:
            if (!is_finite_number(v) || !(v.get<double>() > 0.0)) bad(item, key, "must be a positive number");
            break;
        case Kind::NonNegativeNumber:
            if (!is_finite_number(v) || !(v.get<double>() >= 0.0)) bad(item, key, "must be a non-negative number");
            break;
        case Kind::Count:
            if (!v.is_number_integer() || v.get<std::int64_t>() < 0 || v.get<std::int64_t>() > 100'000'000) {
                bad(item, key, "must be a non-negative integer");
            }
            break;
        case Kind::PositiveCount:
            if (!v.is_number_integer() || v.get<std::int64_t>() < 1 || v.get<std::int64_t>() > 100'000'000) {
                bad(item, key, "must be a positive integer");
            }
            break;
        case Kind::Seed:
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
                bad(item, key, "must be a non-negative integer");
            }
            break;
        case Kind::Vec3:
            if (!is_vec3(v)) bad(item, key, "must be an array of 3 finite numbers");
            break;
        case Kind::NonZeroVec3:
            if (!is_vec3(v)) bad(item, key, "must be an array of 3 finite numbers");
            if (v[0].get<double>() == 0.0 && v[1].get<double>() == 0.0 && v[2].get<double>() == 0.0) {
                bad(item, key, "must be non-zero");
            }
            break;
        case Kind::Vec3List:
            if (!v.is_array() || v.empty()) bad(item, key, "must be a non-empty array of points");
            for (const auto& p : v)
                if (!is_vec3(p)) bad(item, key, "must hold arrays of 3 finite numbers");
            break;
        case Kind::Size2:
            if (!v.is_array() || v.size() != 2 || !is_finite_number(v[0]) || !is_finite_number(v[1]) ||
                !(v[0].get<double>() > 0.0) || !(v[1].get<double>() > 0.0)) {
                bad(item, key, "must be [width, height] with positive numbers");
            }
            break;
        case Kind::Res2:
            if (!v.is_array() || v.size() != 2) bad(item, key, "must be [width, height] in pixels");
            for (const auto& c : v) {
                if (!c.is_number_integer() || c.get<std::int64_t>() < 1 || c.get<std::int64_t>() > kMaxResolution) {
                    bad(item, key, "must hold integers in [1, " + std::to_string(kMaxResolution) + "]");
                }
            }
            break;
        case Kind::Range2:
            if (!v.is_array() || v.size() != 2 || !is_finite_number(v[0]) || !is_finite_number(v[1]) ||
                !(v[0].get<double>() <= v[1].get<double>())) {
                bad(item, key, "must be [min, max] with min <= max");
            }
            break;
        case Kind::AxisName:
            if (!v.is_string() || (v != "X" && v != "Y" && v != "Z")) bad(item, key, "must be \"X\", \"Y\" or \"Z\"");
            break;
        case Kind::ModeName:
            if (!v.is_string() || (v != "WandPerp" && v != "FieldPerp")) {
                bad(item, key, "must be \"WandPerp\" or \"FieldPerp\"");
            }
            break;
        case Kind::ColormapName:
            if (!v.is_string() || (v != "rainbow" && v != "gray")) bad(item, key, "must be \"rainbow\" or \"gray\"");
            break;
        case Kind::VectorFieldName:
            if (!v.is_string()) bad(item, key, "must be a field name");
            if (!fields.has_vector(v.get<std::string>())) {
                throw Error(ErrorCode::UnknownField, "no vector field '" + v.get<std::string>() + "'");
            }
            break;
        case Kind::TfPoints: {
            if (!v.is_array()) bad(item, key, "must be an array of [s, r, g, b, a]");
            std::vector<ControlPoint> points;
            for (const auto& p : v) {
                if (!p.is_array() || p.size() != 5) bad(item, key, "entries must be [s, r, g, b, a]");
                for (const auto& c : p)
                    if (!is_finite_number(c)) bad(item, key, "entries must hold finite numbers");
                points.push_back({p[0].get<double>(),
                                  {p[1].get<double>(), p[2].get<double>(), p[3].get<double>(), p[4].get<double>()}});
            }
            try {
                TransferFunction tf(points);
            } catch (const Error& e) {
                bad(item, key, e.what());
            }
            break;
        }
        case Kind::HalfAngle:
            if (!is_finite_number(v) || !(v.get<double>() > 0.0 && v.get<double>() < std::numbers::pi / 2)) {
                bad(item, key, "must be in (0, pi/2)");
            }
            break;
    }
}

std::array<double, 3> to_triple(const json& v) { return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()}; }

}  // namespace

std::string_view to_string(Method method) {
    for (const auto& [m, name] : kMethodNames)
        if (m == method) return name;
    return "Unknown";
}

std::optional<Method> method_from_string(std::string_view name) {
    for (const auto& [m, n] : kMethodNames)
        if (n == name) return m;
    return std::nullopt;
}

bool uses_vector_field(Method method) {
    switch (method) {
        case Method::Tracer:
        case Method::FieldLine:
        case Method::LocalArrows:
        case Method::Snowflakes:
        case Method::Hotaru:
        case Method::LIC: return true;
        default: return false;
    }
}

void validate_item(const RecipeItem& item, const FieldSet& fields) {
    if (uses_vector_field(item.method) ? !fields.has_vector(item.field_name) : !fields.has_scalar(item.field_name)) {
        throw Error(ErrorCode::UnknownField, std::string(to_string(item.method)) + " needs a " +
                                                 (uses_vector_field(item.method) ? "vector" : "scalar") +
                                                 " field; '" + item.field_name + "' is not one");
    }
    if (!item.params.is_object()) throw Error(ErrorCode::InvalidParams, "params must be a JSON object");

    const auto specs = schema(item.method);
    for (const auto& [key, value] : item.params.items()) {
        const auto it = std::find_if(specs.begin(), specs.end(), [&](const ParamSpec& s) { return s.key == key; });
        if (it == specs.end()) bad(item, key, "is not accepted");
        check_value(item, fields, *it, value);
    }
    for (const auto& s : specs) {
        if (s.required && !item.params.contains(s.key)) bad(item, s.key, "is required");
    }

    const auto& p = item.params;
    if (item.method == Method::Orthoslice) {
        const int axis = p["axis"] == "X" ? 0 : (p["axis"] == "Y" ? 1 : 2);
        if (p["index"].get<std::int64_t>() >= fields.grid.dims[axis]) bad(item, "index", "is beyond the grid");
    }
    if (item.method == Method::LocalSlice) {
        const std::string mode = p.value("mode", "WandPerp");
        if (mode == "WandPerp" && !p.contains("wand_dir")) bad(item, "wand_dir", "is required in WandPerp mode");
        if (mode == "FieldPerp" && !p.contains("vector_field")) {
            bad(item, "vector_field", "is required in FieldPerp mode");
        }
    }
}

void validate_recipe(const VisRecipe& recipe, const FieldSet& fields) {
    for (std::size_t i = 0; i < recipe.items.size(); ++i) {
        try {
            validate_item(recipe.items[i], fields);
        } catch (const Error& e) {
            throw Error(ErrorCode::RecipeInvalid,
                        "item " + std::to_string(i) + ": " + std::string(to_string(e.code())) + ": " + e.what());
        }
    }
}

RecipeItem item_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::ParamParse, "recipe item must be an object");
    if (!j.contains("method") || !j["method"].is_string()) throw Error(ErrorCode::ParamParse, "recipe item needs a 'method' string");
    const auto name = j["method"].get<std::string>();
    const auto method = method_from_string(name);
    if (!method) throw Error(ErrorCode::UnknownMethod, "unknown visualization method '" + name + "'");
    if (!j.contains("field") || !j["field"].is_string()) throw Error(ErrorCode::ParamParse, "recipe item needs a 'field' string");
    RecipeItem item;
    item.method = *method;
    item.field_name = j["field"].get<std::string>();
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw Error(ErrorCode::ParamParse, "'params' must be an object");
        item.params = j["params"];
    }
    for (const auto& [key, value] : j.items()) {
        if (key != "method" && key != "field" && key != "params") {
            throw Error(ErrorCode::ParamParse, "unexpected recipe item key '" + key + "'");
        }
    }
    return item;
}

json item_to_json(const RecipeItem& item) {
    return json{{"method", std::string(to_string(item.method))}, {"field", item.field_name}, {"params", item.params}};
}

json roi_to_json(const RoiContext& roi) {
    return json{{"min", {roi.roi.min.x, roi.roi.min.y, roi.roi.min.z}},
                {"max", {roi.roi.max.x, roi.roi.max.y, roi.roi.max.z}},
                {"outside_level", roi.outside_level}};
}

RoiContext roi_from_json(const json& j) {
    if (!j.is_object() || !j.contains("min") || !j.contains("max") || !is_vec3(j["min"]) || !is_vec3(j["max"])) {
        throw Error(ErrorCode::ParamParse, "roi needs 'min' and 'max' points");
    }
    RoiContext roi;
    const auto lo = to_triple(j["min"]);
    const auto hi = to_triple(j["max"]);
    roi.roi = {{lo[0], lo[1], lo[2]}, {hi[0], hi[1], hi[2]}};
    if (j.contains("outside_level")) {
        if (!j["outside_level"].is_number_integer() || j["outside_level"].get<int>() < 0) {
            throw Error(ErrorCode::ParamParse, "roi 'outside_level' must be a non-negative integer");
        }
        roi.outside_level = j["outside_level"].get<int>();
    }
    return roi;
}

json params_to_json(const VisRecipe& recipe, const std::optional<RoiContext>& roi) {
    json j;
    j["items"] = json::array();
    for (const auto& item : recipe.items) j["items"].push_back(item_to_json(item));
    if (roi) j["roi"] = roi_to_json(*roi);
    return j;
}

ParamsFile params_from_json(const json& j) {
    ParamsFile out;
    if (j.is_null()) return out;
    if (!j.is_object()) throw Error(ErrorCode::ParamParse, "parameter file must hold a JSON object");
    if (j.contains("items")) {
        if (!j["items"].is_array()) throw Error(ErrorCode::ParamParse, "'items' must be an array");
        for (const auto& item : j["items"]) out.recipe.items.push_back(item_from_json(item));
    }
    if (j.contains("roi") && !j["roi"].is_null()) out.roi = roi_from_json(j["roi"]);
    return out;
}

void save_params(const VisRecipe& recipe, const std::optional<RoiContext>& roi, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write parameter file " + path.string());
    out << params_to_json(recipe, roi).dump(2) << '\n';
    if (!out) throw Error(ErrorCode::IoError, "failed writing parameter file " + path.string());
}

ParamsFile load_params(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot open parameter file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return {};
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParamParse, path.string() + ": " + e.what());
    }
    return params_from_json(j);
}

}  // namespace vf5
