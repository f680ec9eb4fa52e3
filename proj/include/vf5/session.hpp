// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "vf5/error.hpp"
#include "vf5/execute.hpp"
#include "vf5/field.hpp"
#include "vf5/recipe.hpp"
#include "vf5/roi_lod.hpp"

namespace vf5 {

enum class CommandKind {
    ListFields,
    SelectStep,
    AddItem,
    UpdateItem,
    RemoveItem,
    SetRoi,
    Execute,
    Bake,
    SaveParams,
    LoadParams,
    Snapshot,
};

std::string_view to_string(CommandKind kind);
std::optional<CommandKind> command_from_string(std::string_view name);

/// Arguments stay as JSON; docs/protocol.md lists them per command.
struct Command {
    std::uint64_t id = 0;
    CommandKind kind = CommandKind::ListFields;
    nlohmann::json args = nlohmann::json::object();
};

/// A `.vfa` frame produced by the command `id`.
struct GeometryEvent {
    std::uint64_t id = 0;
    std::vector<std::uint8_t> frame;
};

struct AckEvent {
    std::uint64_t id = 0;
    nlohmann::json result = nlohmann::json::object();
};

struct ErrorEvent {
    std::uint64_t id = 0;
    ErrorCode code = ErrorCode::InvalidParams;
    std::string message;
};

using Event = std::variant<GeometryEvent, AckEvent, ErrorEvent>;

/// Observable state. Every command either replaces it whole or leaves it alone.
struct SessionState {
    int current_step = 0;
    VisRecipe recipe;
    std::optional<RoiContext> roi;

    friend bool operator==(const SessionState&, const SessionState&) = default;
};

/// Wire message: text frames carry JSON, binary frames carry
/// u64 LE command id followed by a `.vfa` frame.
struct WireMessage {
    bool binary = false;
    std::string text;
    std::vector<std::uint8_t> bytes;
};

struct SessionOptions {
    /// Relative paths in Bake, SaveParams, LoadParams and Snapshot resolve here.
    std::filesystem::path work_dir = ".";
};

/// One client's view of a loaded dataset. Not thread-safe; the server runs
/// one command at a time per session.
class Session {
public:
    explicit Session(std::shared_ptr<const FieldSet> fields, SessionOptions options = {});

    const std::string& id() const { return id_; }
    const SessionState& state() const { return state_; }
    const FieldSet& fields() const { return *fields_; }

    /// Zero or more GeometryEvents followed by exactly one AckEvent or ErrorEvent.
    std::vector<Event> handle(const Command& cmd);

    /// Parses a `{id, cmd, args}` text frame and encodes the resulting events.
    std::vector<WireMessage> handle_json(std::string_view text);

private:
    nlohmann::json dispatch(const Command& cmd, SessionState& next, std::vector<Event>& geometry);
    std::filesystem::path resolve(const nlohmann::json& args, const char* key) const;

    std::shared_ptr<const FieldSet> fields_;
    SessionOptions options_;
    std::string id_;
    SessionState state_;
    std::uint32_t next_snapshot_ = 0;
    PyramidCache cache_;
};

/// Encoders shared by the server and tests.
std::string encode_event_json(const AckEvent& ack);
std::string encode_event_json(const ErrorEvent& err);
std::vector<std::uint8_t> encode_geometry_message(const GeometryEvent& geo);
WireMessage to_wire(const Event& event);

}  // namespace vf5
