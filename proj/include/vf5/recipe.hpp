// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vf5/field.hpp"
#include "vf5/roi_lod.hpp"

namespace vf5 {

enum class Method {
    Tracer,
    FieldLine,
    LocalArrows,
    Snowflakes,
    Hotaru,
    Isosurface,
    Orthoslice,
    LocalSlice,
    LIC,
    Volume,
};

inline constexpr Method kAllMethods[] = {Method::Tracer,     Method::FieldLine,  Method::LocalArrows,
                                         Method::Snowflakes, Method::Hotaru,     Method::Isosurface,
                                         Method::Orthoslice, Method::LocalSlice, Method::LIC,
                                         Method::Volume};

std::string_view to_string(Method method);
std::optional<Method> method_from_string(std::string_view name);
/// True for methods whose `field_name` names a vector field.
bool uses_vector_field(Method method);

/// One visualization method applied to a named field. `params` is a JSON
/// object; see docs/recipe.md for the keys each method accepts. Defaults are
/// applied at execution time, so params round-trip exactly as given.
struct RecipeItem {
    Method method = Method::Isosurface;
    std::string field_name;
    nlohmann::json params = nlohmann::json::object();

    friend bool operator==(const RecipeItem&, const RecipeItem&) = default;
};

struct VisRecipe {
    std::vector<RecipeItem> items;

    friend bool operator==(const VisRecipe&, const VisRecipe&) = default;
};

/// Throws UnknownField when the field is missing or of the wrong kind, and
/// InvalidParams for unknown keys, missing required keys or bad values.
void validate_item(const RecipeItem& item, const FieldSet& fields);
/// Wraps the first item failure as RecipeInvalid.
void validate_recipe(const VisRecipe& recipe, const FieldSet& fields);

RecipeItem item_from_json(const nlohmann::json& j);
nlohmann::json item_to_json(const RecipeItem& item);

nlohmann::json roi_to_json(const RoiContext& roi);
RoiContext roi_from_json(const nlohmann::json& j);

struct ParamsFile {
    VisRecipe recipe;
    std::optional<RoiContext> roi;

    friend bool operator==(const ParamsFile&, const ParamsFile&) = default;
};

nlohmann::json params_to_json(const VisRecipe& recipe, const std::optional<RoiContext>& roi);
/// Throws UnknownMethod for an unrecognized method name, ParamParse otherwise.
ParamsFile params_from_json(const nlohmann::json& j);

/// Human-editable JSON parameter file.
void save_params(const VisRecipe& recipe, const std::optional<RoiContext>& roi,
                 const std::filesystem::path& path);
/// An empty file yields an empty recipe. Missing files raise MissingFile.
ParamsFile load_params(const std::filesystem::path& path);

}  // namespace vf5
