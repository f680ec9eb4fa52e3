// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vf5 {

/// Failure categories shared by every module. The numeric values are stable:
/// the CLI maps them onto process exit codes.
enum class ErrorCode : int {
    ManifestParse = 1,
    MissingFile,
    TruncatedData,
    NonFinite,
    OutOfDomain,
    DegenerateSeed,
    ConeOutsideDomain,
    IndexOutOfRange,
    DegenerateNormal,
    RecipeInvalid,
    IoError,
    BadMagic,
    CorruptFrame,
    UnknownMethod,
    ParamParse,
    UnknownField,
    InvalidParams,
    BadStep,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code);
std::optional<ErrorCode> error_code_from_string(std::string_view name);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace vf5
