// SPDX-License-Identifier: Apache-2.0
#include "vf5/session.hpp"

#include <array>
#include <atomic>
#include <cstdio>
#include <random>

#include "vf5/animation.hpp"
#include "vf5/frame.hpp"
#include "vf5/volume.hpp"
#include "bytes.hpp"

namespace vf5 {

namespace {

using nlohmann::json;

constexpr std::array<std::pair<CommandKind, std::string_view>, 11> kCommandNames = {{
    {CommandKind::ListFields, "ListFields"},
    {CommandKind::SelectStep, "SelectStep"},
    {CommandKind::AddItem, "AddItem"},
    {CommandKind::UpdateItem, "UpdateItem"},
    {CommandKind::RemoveItem, "RemoveItem"},
    {CommandKind::SetRoi, "SetRoi"},
    {CommandKind::Execute, "Execute"},
    {CommandKind::Bake, "Bake"},
    {CommandKind::SaveParams, "SaveParams"},
    {CommandKind::LoadParams, "LoadParams"},
    {CommandKind::Snapshot, "Snapshot"},
}};

[[noreturn]] void invalid(const std::string& message) { throw Error(ErrorCode::InvalidParams, message); }

std::string make_session_id() {
    static std::atomic<std::uint64_t> counter{0};
    std::random_device rd;
    const std::uint64_t bits = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    char buf[40];
    std::snprintf(buf, sizeof buf, "s%llu-%016llx", static_cast<unsigned long long>(++counter),
                  static_cast<unsigned long long>(bits));
    return buf;
}

const json& require(const json& args, const char* key) {
    if (!args.contains(key)) invalid(std::string("missing argument '") + key + "'");
    return args[key];
}

std::size_t item_index(const json& args, const VisRecipe& recipe) {
    const json& v = require(args, "index");
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0 ||
        v.get<std::uint64_t>() >= recipe.items.size()) {
        invalid("item index " + v.dump() + " out of range for recipe of " + std::to_string(recipe.items.size()) +
                " items");
    }
    return v.get<std::size_t>();
}

RecipeItem parse_item(const json& args) {
    json j = json::object();
    j["method"] = require(args, "method");
    j["field"] = require(args, "field");
    j["params"] = args.value("params", json::object());
    try {
        return item_from_json(j);
    } catch (const Error& e) {
        invalid(e.what());
    }
}

ControlPoint control_point(const json& v) {
    if (!v.is_array() || v.size() != 5) invalid("tf_edit 'point' must be [s, r, g, b, a]");
    for (const auto& c : v)
        if (!c.is_number()) invalid("tf_edit 'point' must hold numbers");
    return {v[0].get<double>(), {v[1].get<double>(), v[2].get<double>(), v[3].get<double>(), v[4].get<double>()}};
}

json tf_to_json(const TransferFunction& tf) {
    json out = json::array();
    for (const auto& p : tf.points()) out.push_back({p.scalar, p.rgba[0], p.rgba[1], p.rgba[2], p.rgba[3]});
    return out;
}

// Applies one control-point edit to a Volume item's transfer function. Items
// without an explicit tf start from the default ramp over the field range.
void apply_tf_edit(RecipeItem& item, const json& edit, const ScalarField& field) {
    if (item.method != Method::Volume) invalid("tf_edit applies to Volume items only");
    std::vector<ControlPoint> points;
    if (item.params.contains("tf")) {
        for (const auto& p : item.params["tf"]) points.push_back(control_point(p));
    } else {
        const auto [lo, hi] = value_range(field);
        points = TransferFunction::ramp(lo, hi).points();
    }
    TransferFunction tf(points);
    const std::string op = edit.value("op", std::string());
    auto index = [&]() {
        const json& v = require(edit, "index");
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0) invalid("tf_edit 'index' must be non-negative");
        return v.get<std::size_t>();
    };
    try {
        if (op == "add") {
            tf.add_point(control_point(require(edit, "point")));
        } else if (op == "move") {
            const ControlPoint p = control_point(require(edit, "point"));
            tf.move_point(index(), p.scalar, p.rgba);
        } else if (op == "remove") {
            tf.remove_point(index());
        } else {
            invalid("tf_edit 'op' must be add, move or remove");
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidParams) throw;
        invalid(e.what());
    }
    item.params["tf"] = tf_to_json(tf);
}

}  // namespace

std::string_view to_string(CommandKind kind) {
    for (const auto& [k, name] : kCommandNames)
        if (k == kind) return name;
    return "?";
}

std::optional<CommandKind> command_from_string(std::string_view name) {
    for (const auto& [k, n] : kCommandNames)
        if (n == name) return k;
    return std::nullopt;
}

Session::Session(std::shared_ptr<const FieldSet> fields, SessionOptions options)
    : fields_(std::move(fields)), options_(std::move(options)), id_(make_session_id()) {
    if (!fields_) throw Error(ErrorCode::InvalidArgument, "session needs a dataset");
}

std::filesystem::path Session::resolve(const json& args, const char* key) const {
    const json& v = require(args, key);
    if (!v.is_string() || v.get<std::string>().empty()) invalid(std::string("'") + key + "' must be a path string");
    const std::filesystem::path p = v.get<std::string>();
    return p.is_absolute() ? p : options_.work_dir / p;
}

std::vector<Event> Session::handle(const Command& cmd) {
    std::vector<Event> events;
    SessionState next = state_;
    try {
        if (!cmd.args.is_object()) invalid("'args' must be an object");
        json result = dispatch(cmd, next, events);
        state_ = std::move(next);
        events.emplace_back(AckEvent{cmd.id, std::move(result)});
    } catch (const Error& e) {
        events.clear();
        events.emplace_back(ErrorEvent{cmd.id, e.code(), e.what()});
    } catch (const json::exception& e) {
        events.clear();
        events.emplace_back(ErrorEvent{cmd.id, ErrorCode::InvalidParams, e.what()});
    }
    return events;
}

json Session::dispatch(const Command& cmd, SessionState& next, std::vector<Event>& geometry) {
    const FieldSet& fs = *fields_;
    const json& args = cmd.args;
    switch (cmd.kind) {
        case CommandKind::ListFields: {
            json scalars = json::array();
            json vectors = json::array();
            for (const auto& [name, _] : fs.scalars) scalars.push_back(name);
            for (const auto& [name, _] : fs.vectors) vectors.push_back(name);
            const GridSpec& g = fs.grid;
            return {{"session", id_},
                    {"scalars", scalars},
                    {"vectors", vectors},
                    {"steps", fs.steps},
                    {"dims", {g.dims[0], g.dims[1], g.dims[2]}},
                    {"origin", {g.origin.x, g.origin.y, g.origin.z}},
                    {"spacing", {g.spacing.x, g.spacing.y, g.spacing.z}},
                    {"current_step", state_.current_step}};
        }
        case CommandKind::SelectStep: {
            const json& v = require(args, "step");
            if (!v.is_number_integer()) invalid("'step' must be an integer");
            const auto step = v.get<std::int64_t>();
            if (step < 0 || step >= fs.steps) {
                throw Error(ErrorCode::BadStep,
                            "step " + std::to_string(step) + " not in [0, " + std::to_string(fs.steps) + ")");
            }
            next.current_step = static_cast<int>(step);
            return {{"step", next.current_step}};
        }
        case CommandKind::AddItem: {
            RecipeItem item = parse_item(args);
            validate_item(item, fs);
            next.recipe.items.push_back(std::move(item));
            return {{"index", next.recipe.items.size() - 1}, {"count", next.recipe.items.size()}};
        }
        case CommandKind::UpdateItem: {
            const std::size_t index = item_index(args, next.recipe);
            RecipeItem& item = next.recipe.items[index];
            if (args.contains("field")) {
                if (!args["field"].is_string()) invalid("'field' must be a string");
                item.field_name = args["field"].get<std::string>();
            }
            if (args.contains("params")) {
                if (!args["params"].is_object()) invalid("'params' must be an object");
                item.params.merge_patch(args["params"]);
            }
            if (args.contains("tf_edit")) {
                if (!fs.has_scalar(item.field_name)) throw Error(ErrorCode::UnknownField, "no scalar field '" + item.field_name + "'");
                apply_tf_edit(item, args["tf_edit"], fs.scalar(item.field_name, next.current_step));
            }
            validate_item(item, fs);
            return {{"index", index}, {"item", item_to_json(item)}};
        }
        case CommandKind::RemoveItem: {
            const std::size_t index = item_index(args, next.recipe);
            next.recipe.items.erase(next.recipe.items.begin() + static_cast<std::ptrdiff_t>(index));
            return {{"count", next.recipe.items.size()}};
        }
        case CommandKind::SetRoi: {
            const json& v = require(args, "roi");
            if (v.is_null()) {
                next.roi.reset();
                return {{"roi", nullptr}};
            }
            RoiContext roi;
            try {
                roi = roi_from_json(v);
                validate_roi(fs.grid, roi);
            } catch (const Error& e) {
                invalid(e.what());
            }
            next.roi = roi;
            return {{"roi", roi_to_json(roi)}};
        }
        case CommandKind::Execute: {
            Executor exec(fs, next.current_step, next.roi, &cache_);
            BakedFrame frame;
            if (args.contains("index")) {
                const std::size_t index = item_index(args, next.recipe);
                frame.step = static_cast<std::uint32_t>(next.current_step);
                frame.objects = exec.run(next.recipe.items[index]);
            } else {
                frame = exec.run(next.recipe);
            }
            GeometryEvent geo{cmd.id, encode_frame(frame)};
            json result = {{"step", frame.step}, {"objects", frame.objects.size()}, {"bytes", geo.frame.size()}};
            geometry.emplace_back(std::move(geo));
            return result;
        }
        case CommandKind::Bake: {
            const auto dir = resolve(args, "dir");
            const std::size_t n = bake_animation(fs, next.recipe, dir, next.roi, &cache_);
            return {{"frames", n}, {"dir", dir.string()}};
        }
        case CommandKind::SaveParams: {
            const auto path = resolve(args, "path");
            save_params(next.recipe, next.roi, path);
            return {{"path", path.string()}};
        }
        case CommandKind::LoadParams: {
            const auto path = resolve(args, "path");
            ParamsFile loaded = load_params(path);
            validate_recipe(loaded.recipe, fs);
            if (loaded.roi) validate_roi(fs.grid, *loaded.roi);
            next.recipe = std::move(loaded.recipe);
            next.roi = loaded.roi;
            return {{"count", next.recipe.items.size()}, {"roi", next.roi ? roi_to_json(*next.roi) : json(nullptr)}};
        }
        case CommandKind::Snapshot: {
            const std::size_t index = item_index(args, next.recipe);
            const auto dir = resolve(args, "dir");
            Executor exec(fs, next.current_step, next.roi, &cache_);
            const SliceImage img = exec.run_image(next.recipe.items[index]);
            const auto path = snapshot_image(img, dir, next_snapshot_);
            ++next_snapshot_;
            return {{"path", path.string()}, {"width", img.width}, {"height", img.height}};
        }
    }
    invalid("unhandled command");
}

std::vector<WireMessage> Session::handle_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        return {to_wire(ErrorEvent{0, ErrorCode::ParamParse, std::string("malformed control frame: ") + e.what()})};
    }
    Command cmd;
    const bool has_id = j.is_object() && j.contains("id") && j["id"].is_number_unsigned();
    if (has_id) cmd.id = j["id"].get<std::uint64_t>();
    auto reject = [&](const std::string& why) {
        WireMessage m = to_wire(ErrorEvent{cmd.id, ErrorCode::InvalidParams, why});
        if (!has_id) {
            json e = json::parse(m.text);
            e["id"] = nullptr;
            m.text = e.dump();
        }
        return std::vector<WireMessage>{std::move(m)};
    };
    if (!has_id) return reject("control frame needs a non-negative integer 'id'");
    if (!j.contains("cmd") || !j["cmd"].is_string()) return reject("control frame needs a string 'cmd'");
    const auto kind = command_from_string(j["cmd"].get<std::string>());
    if (!kind) return reject("unknown command '" + j["cmd"].get<std::string>() + "'");
    cmd.kind = *kind;
    cmd.args = j.value("args", json::object());

    std::vector<WireMessage> out;
    for (const auto& ev : handle(cmd)) out.push_back(to_wire(ev));
    return out;
}

std::string encode_event_json(const AckEvent& ack) { return json{{"id", ack.id}, {"ok", ack.result}}.dump(); }

std::string encode_event_json(const ErrorEvent& err) {
    return json{{"id", err.id}, {"err", {{"code", to_string(err.code)}, {"message", err.message}}}}.dump();
}

std::vector<std::uint8_t> encode_geometry_message(const GeometryEvent& geo) {
    detail::ByteWriter w;
    w.u64(geo.id);
    w.bytes(geo.frame);
    return std::move(w).take();
}

WireMessage to_wire(const Event& event) {
    WireMessage m;
    std::visit(
        [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, GeometryEvent>) {
                m.binary = true;
                m.bytes = encode_geometry_message(e);
            } else {
                m.text = encode_event_json(e);
            }
        },
        event);
    return m;
}

}  // namespace vf5
