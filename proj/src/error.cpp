// SPDX-License-Identifier: Apache-2.0
#include "vf5/error.hpp"

#include <array>
#include <utility>

namespace vf5 {

namespace {

constexpr std::array<std::pair<ErrorCode, std::string_view>, 19> kNames{{
    {ErrorCode::ManifestParse, "ManifestParse"},
    {ErrorCode::MissingFile, "MissingFile"},
    {ErrorCode::TruncatedData, "TruncatedData"},
    {ErrorCode::NonFinite, "NonFinite"},
    {ErrorCode::OutOfDomain, "OutOfDomain"},
    {ErrorCode::DegenerateSeed, "DegenerateSeed"},
    {ErrorCode::ConeOutsideDomain, "ConeOutsideDomain"},
    {ErrorCode::IndexOutOfRange, "IndexOutOfRange"},
    {ErrorCode::DegenerateNormal, "DegenerateNormal"},
    {ErrorCode::RecipeInvalid, "RecipeInvalid"},
    {ErrorCode::IoError, "IoError"},
    {ErrorCode::BadMagic, "BadMagic"},
    {ErrorCode::CorruptFrame, "CorruptFrame"},
    {ErrorCode::UnknownMethod, "UnknownMethod"},
    {ErrorCode::ParamParse, "ParamParse"},
    {ErrorCode::UnknownField, "UnknownField"},
    {ErrorCode::InvalidParams, "InvalidParams"},
    {ErrorCode::BadStep, "BadStep"},
    {ErrorCode::InvalidArgument, "InvalidArgument"},
}};

}  // namespace

std::string_view to_string(ErrorCode code) {
    for (const auto& [c, name] : kNames) {
        if (c == code) return name;
    }
    return "Unknown";
}

std::optional<ErrorCode> error_code_from_string(std::string_view name) {
    for (const auto& [c, n] : kNames) {
        if (n == name) return c;
    }
    return std::nullopt;
}

}  // namespace vf5
