// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <fstream>

#include "../support/fixtures.hpp"
#include "vf5/animation.hpp"
#include "vf5/session.hpp"

using namespace vf5;
using namespace vf5::test;
using nlohmann::json;

namespace {

std::shared_ptr<const FieldSet> shared_fields(int n = 10, int steps = 3) {
    return std::make_shared<const FieldSet>(small_fieldset(n, steps, true));
}

std::uint64_t next_id = 1;

std::vector<Event> run(Session& s, CommandKind kind, json args = json::object()) {
    return s.handle({next_id++, kind, std::move(args)});
}

const AckEvent& ack(const std::vector<Event>& ev) {
    REQUIRE(!ev.empty());
    REQUIRE(std::holds_alternative<AckEvent>(ev.back()));
    return std::get<AckEvent>(ev.back());
}

// Runs a command expected to fail and checks the state did not move.
ErrorCode fails(Session& s, CommandKind kind, json args) {
    const SessionState before = s.state();
    const auto ev = run(s, kind, std::move(args));
    CHECK(s.state() == before);
    REQUIRE(ev.size() == 1);
    REQUIRE(std::holds_alternative<ErrorEvent>(ev[0]));
    return std::get<ErrorEvent>(ev[0]).code;
}

json iso_item(double level = 0.5) {
    return {{"method", "Isosurface"}, {"field", "temperature"}, {"params", {{"level", level}}}};
}

}  // namespace

TEST_CASE("ListFields reports names, steps and geometry") {
    Session s(shared_fields(10, 3));
    const json r = ack(run(s, CommandKind::ListFields)).result;
    CHECK(r["scalars"] == json::array({"temperature"}));
    CHECK(r["vectors"] == json::array({"velocity"}));
    CHECK(r["steps"] == 3);
    CHECK(r["dims"] == json::array({10, 10, 10}));
    CHECK(r["session"] == s.id());
    CHECK(r["current_step"] == 0);
}

TEST_CASE("session ids are distinct") {
    Session a(shared_fields(4, 1)), b(shared_fields(4, 1));
    CHECK(a.id() != b.id());
}

TEST_CASE("Execute matches the direct engine call") {
    auto fs = shared_fields(12, 2);
    Session s(fs);
    ack(run(s, CommandKind::AddItem, iso_item(0.5)));
    ack(run(s, CommandKind::SelectStep, {{"step", 1}}));
    const auto ev = run(s, CommandKind::Execute, {{"index", 0}});
    REQUIRE(ev.size() == 2);
    const auto& geo = std::get<GeometryEvent>(ev[0]);
    const auto direct = encode_frame({1, {extract_isosurface(fs->scalar("temperature", 1), 0.5)}});
    CHECK(geo.frame == direct);
    CHECK(geo.id == ack(ev).id);
    CHECK(ack(ev).result["bytes"] == direct.size());
    CHECK(ack(ev).result["objects"] == 1);
    CHECK(ack(ev).result["step"] == 1);
}

TEST_CASE("Execute of the whole recipe matches the executor") {
    auto fs = shared_fields(10, 1);
    Session s(fs);
    ack(run(s, CommandKind::AddItem, iso_item(0.3)));
    ack(run(s, CommandKind::AddItem,
            {{"method", "Tracer"}, {"field", "velocity"}, {"params", {{"seeds", {{0.5, 0, 0}}}}}}));
    ack(run(s, CommandKind::SetRoi, {{"roi", {{"min", {-0.5, -0.5, -0.5}}, {"max", {0.5, 0.5, 0.5}}}}}));
    const auto ev = run(s, CommandKind::Execute);
    CHECK(std::get<GeometryEvent>(ev[0]).frame == encode_frame(Executor(*fs, 0, s.state().roi).run(s.state().recipe)));
}

TEST_CASE("failing commands leave the state unchanged") {
    TempDir dir;
    Session s(shared_fields(8, 2), {dir.path()});
    ack(run(s, CommandKind::AddItem, iso_item()));
    ack(run(s, CommandKind::AddItem,
            {{"method", "Volume"}, {"field", "temperature"}, {"params", json::object()}}));
    ack(run(s, CommandKind::SelectStep, {{"step", 1}}));
    std::ofstream(dir / "plain") << "x";
    std::ofstream(dir / "broken.json") << "{";

    CHECK(fails(s, CommandKind::AddItem, {{"method", "Foo"}, {"field", "temperature"}}) == ErrorCode::InvalidParams);
    CHECK(fails(s, CommandKind::AddItem, {{"field", "temperature"}}) == ErrorCode::InvalidParams);
    CHECK(fails(s, CommandKind::AddItem, {{"method", "Isosurface"}, {"field", "velocity"}, {"params", {{"level", 1}}}}) ==
          ErrorCode::UnknownField);
    CHECK(fails(s, CommandKind::AddItem, {{"method", "Isosurface"}, {"field", "temperature"}}) ==
          ErrorCode::InvalidParams);
    CHECK(fails(s, CommandKind::SelectStep, {{"step", 2}}) == ErrorCode::BadStep);
    CHECK(fails(s, CommandKind::SelectStep, {{"step", -1}}) == ErrorCode::BadStep);
    CHECK(fails(s, CommandKind::SelectStep, {{"step", "one"}}) == ErrorCode::InvalidParams);
    CHECK(fails(s, CommandKind::UpdateItem, {{"index", 5}, {"params", {{"level", 1}}}}) == ErrorCode::InvalidParams);
    CHECK(fails(s, CommandKind::UpdateItem, {{"index", 0}, {"params", {{"level", nullptr}}}}) ==
          ErrorCode::InvalidParams);
    CHECK(fails(s, CommandKind::UpdateItem, {{"index", 0}, {"params", {{"level", 2}}}, {"field", "velocity"}}) ==
          ErrorCode::UnknownField);
    CHECK(fails(s, CommandKind::UpdateItem, {{"index", 0}, {"tf_edit", {{"op", "add"}, {"point", {0, 0, 0, 0, 0}}}}}) ==
          ErrorCode::InvalidParams);
    CHECK(fails(s, CommandKind::UpdateItem, {{"index", 1}, {"tf_edit", {{"op", "remove"}, {"index", 0}}}}) ==
          ErrorCode::InvalidParams);
    CHECK(fails(s, CommandKind::RemoveItem, {{"index", 2}}) == ErrorCode::InvalidParams);
    CHECK(fails(s, CommandKind::SetRoi, {{"roi", {{"min", {5, 5, 5}}, {"max", {6, 6, 6}}}}}) ==
          ErrorCode::InvalidParams);
    CHECK(fails(s, CommandKind::SetRoi, {{"roi", 3}}) == ErrorCode::InvalidParams);
    CHECK(fails(s, CommandKind::SetRoi, json::object()) == ErrorCode::InvalidParams);
    CHECK(fails(s, CommandKind::Execute, {{"index", 9}}) == ErrorCode::InvalidParams);
    CHECK(fails(s, CommandKind::Bake, {{"dir", "plain/sub"}}) == ErrorCode::IoError);
    CHECK(fails(s, CommandKind::SaveParams, {{"path", "plain/sub/p.json"}}) == ErrorCode::IoError);
    CHECK(fails(s, CommandKind::LoadParams, {{"path", "absent.json"}}) == ErrorCode::MissingFile);
    CHECK(fails(s, CommandKind::LoadParams, {{"path", "broken.json"}}) == ErrorCode::ParamParse);
    CHECK(fails(s, CommandKind::Snapshot, {{"index", 0}, {"dir", "snaps"}}) == ErrorCode::InvalidParams);
    CHECK(fails(s, CommandKind::Snapshot, {{"index", 1}, {"dir", "plain/sub"}}) == ErrorCode::IoError);
    CHECK(s.state().recipe.items.size() == 2);
    CHECK(s.state().current_step == 1);
}

TEST_CASE("LoadParams rejects recipes that do not fit the dataset") {
    TempDir dir;
    Session s(shared_fields(8, 1), {dir.path()});
    ack(run(s, CommandKind::AddItem, iso_item()));
    save_params({{{Method::Isosurface, "pressure", {{"level", 1}}}}}, std::nullopt, dir / "other.json");
    CHECK(fails(s, CommandKind::LoadParams, {{"path", "other.json"}}) == ErrorCode::RecipeInvalid);
    save_params({}, RoiContext{{{7, 7, 7}, {8, 8, 8}}, 1}, dir / "roi.json");
    CHECK(fails(s, CommandKind::LoadParams, {{"path", "roi.json"}}) == ErrorCode::InvalidArgument);
}

TEST_CASE("UpdateItem merges params and edits transfer functions") {
    Session s(shared_fields(8, 1));
    ack(run(s, CommandKind::AddItem,
            {{"method", "LIC"}, {"field", "velocity"}, {"params", {{"center", {0, 0, 0}}, {"normal", {0, 0, 1}}}}}));
    ack(run(s, CommandKind::UpdateItem, {{"index", 0}, {"params", {{"kernel_half_len", 4}}}}));
    CHECK(s.state().recipe.items[0].params ==
          json({{"center", {0, 0, 0}}, {"normal", {0, 0, 1}}, {"kernel_half_len", 4}}));
    ack(run(s, CommandKind::UpdateItem, {{"index", 0}, {"params", {{"kernel_half_len", nullptr}}}}));
    CHECK_FALSE(s.state().recipe.items[0].params.contains("kernel_half_len"));

    ack(run(s, CommandKind::AddItem, {{"method", "Volume"}, {"field", "temperature"}}));
    const auto [lo, hi] = value_range(s.fields().scalar("temperature", 0));
    const double mid = 0.5 * (lo + hi);
    const json r = ack(run(s, CommandKind::UpdateItem,
                           {{"index", 1}, {"tf_edit", {{"op", "add"}, {"point", {mid, 1, 0, 0, 0.5}}}}}))
                       .result;
    const json tf = s.state().recipe.items[1].params["tf"];
    REQUIRE(tf.size() == 3);
    CHECK(tf[1] == json({mid, 1, 0, 0, 0.5}));
    CHECK(r["item"]["params"]["tf"] == tf);
    ack(run(s, CommandKind::UpdateItem,
            {{"index", 1}, {"tf_edit", {{"op", "move"}, {"index", 1}, {"point", {mid + 0.1, 0, 1, 0, 0.25}}}}}));
    CHECK(s.state().recipe.items[1].params["tf"][1] == json({mid + 0.1, 0, 1, 0, 0.25}));
    ack(run(s, CommandKind::UpdateItem, {{"index", 1}, {"tf_edit", {{"op", "remove"}, {"index", 1}}}}));
    CHECK(s.state().recipe.items[1].params["tf"].size() == 2);
    ack(run(s, CommandKind::RemoveItem, {{"index", 0}}));
    CHECK(s.state().recipe.items.size() == 1);
    CHECK(s.state().recipe.items[0].method == Method::Volume);
}

TEST_CASE("SetRoi sets and clears") {
    Session s(shared_fields(8, 1));
    const json r = ack(run(s, CommandKind::SetRoi,
                           {{"roi", {{"min", {0, 0, 0}}, {"max", {1, 1, 1}}, {"outside_level", 2}}}}))
                       .result;
    REQUIRE(s.state().roi.has_value());
    CHECK(s.state().roi->outside_level == 2);
    CHECK(r["roi"]["max"] == json({1, 1, 1}));
    ack(run(s, CommandKind::SetRoi, {{"roi", nullptr}}));
    CHECK_FALSE(s.state().roi.has_value());
}

TEST_CASE("SaveParams then LoadParams restores the recipe and ROI") {
    TempDir dir;
    auto fs = shared_fields(8, 1);
    Session a(fs, {dir.path()});
    ack(run(a, CommandKind::AddItem, iso_item(0.25)));
    ack(run(a, CommandKind::AddItem,
            {{"method", "Orthoslice"}, {"field", "temperature"}, {"params", {{"axis", "Y"}, {"index", 2}}}}));
    ack(run(a, CommandKind::SetRoi, {{"roi", {{"min", {-1, -1, -1}}, {"max", {0, 0, 0}}}}}));
    ack(run(a, CommandKind::SaveParams, {{"path", "p.json"}}));
    CHECK(std::filesystem::exists(dir / "p.json"));
    Session b(fs, {dir.path()});
    const json r = ack(run(b, CommandKind::LoadParams, {{"path", (dir / "p.json").string()}})).result;
    CHECK(r["count"] == 2);
    CHECK(b.state() == a.state());
}

TEST_CASE("Bake writes one frame per step") {
    TempDir dir;
    auto fs = shared_fields(8, 3);
    Session s(fs, {dir.path()});
    ack(run(s, CommandKind::AddItem, iso_item()));
    const json r = ack(run(s, CommandKind::Bake, {{"dir", "anim"}})).result;
    CHECK(r["frames"] == 3);
    for (int t = 0; t < 3; ++t)
        CHECK(read_bytes(dir / "anim" / frame_file_name(t)) == encode_frame(Executor(*fs, t).run(s.state().recipe)));
}

TEST_CASE("Snapshot numbers its images and matches the slice") {
    TempDir dir;
    auto fs = shared_fields(8, 1);
    Session s(fs, {dir.path()});
    ack(run(s, CommandKind::AddItem,
            {{"method", "Orthoslice"}, {"field", "temperature"}, {"params", {{"axis", "Z"}, {"index", 3}}}}));
    const json r0 = ack(run(s, CommandKind::Snapshot, {{"index", 0}, {"dir", "snaps"}})).result;
    const json r1 = ack(run(s, CommandKind::Snapshot, {{"index", 0}, {"dir", "snaps"}})).result;
    CHECK(std::filesystem::path(r0["path"].get<std::string>()).filename() == "snap_0000.ppm");
    CHECK(std::filesystem::path(r1["path"].get<std::string>()).filename() == "snap_0001.ppm");
    CHECK(r0["width"] == 8);
    const SliceImage img = Executor(*fs, 0).run_image(s.state().recipe.items[0]);
    const auto want = encode_ppm(img);
    CHECK(read_bytes(dir / "snaps" / "snap_0000.ppm") == want);
}

TEST_CASE("text protocol framing") {
    Session s(shared_fields(8, 1));
    SUBCASE("ack shape") {
        const auto out = s.handle_json(R"({"id": 4, "cmd": "SelectStep", "args": {"step": 0}})");
        REQUIRE(out.size() == 1);
        CHECK_FALSE(out[0].binary);
        CHECK(json::parse(out[0].text) == json({{"id", 4}, {"ok", {{"step", 0}}}}));
    }
    SUBCASE("error shape") {
        const auto out = s.handle_json(R"({"id": 5, "cmd": "SelectStep", "args": {"step": 3}})");
        REQUIRE(out.size() == 1);
        const json j = json::parse(out[0].text);
        CHECK(j["id"] == 5);
        CHECK(j["err"]["code"] == "BadStep");
        CHECK(j["err"]["message"].is_string());
    }
    SUBCASE("malformed json") {
        const json j = json::parse(s.handle_json("{nope")[0].text);
        CHECK(j["err"]["code"] == "ParamParse");
    }
    SUBCASE("missing id") {
        const json j = json::parse(s.handle_json(R"({"cmd": "ListFields"})")[0].text);
        CHECK(j["id"].is_null());
        CHECK(j["err"]["code"] == "InvalidParams");
    }
    SUBCASE("unknown command") {
        const json j = json::parse(s.handle_json(R"({"id": 1, "cmd": "Explode"})")[0].text);
        CHECK(j["id"] == 1);
        CHECK(j["err"]["code"] == "InvalidParams");
    }
    SUBCASE("args omitted") {
        const json j = json::parse(s.handle_json(R"({"id": 2, "cmd": "ListFields"})")[0].text);
        CHECK(j["ok"]["steps"] == 1);
    }
}

TEST_CASE("geometry arrives as a binary frame before the ack") {
    Session s(shared_fields(8, 1));
    s.handle_json(R"({"id": 1, "cmd": "AddItem", "args": {"method": "Isosurface", "field": "temperature",
                     "params": {"level": 0.5}}})");
    const auto out = s.handle_json(R"({"id": 258, "cmd": "Execute", "args": {}})");
    REQUIRE(out.size() == 2);
    REQUIRE(out[0].binary);
    const auto& b = out[0].bytes;
    REQUIRE(b.size() > 8);
    CHECK(b[0] == 2);
    CHECK(b[1] == 1);
    for (int i = 2; i < 8; ++i) CHECK(b[i] == 0);
    const std::vector<std::uint8_t> frame(b.begin() + 8, b.end());
    CHECK(frame == encode_frame(Executor(s.fields(), 0).run(s.state().recipe)));
    CHECK_FALSE(out[1].binary);
    const json j = json::parse(out[1].text);
    CHECK(j["id"] == 258);
    CHECK(j["ok"]["bytes"] == frame.size());
}
