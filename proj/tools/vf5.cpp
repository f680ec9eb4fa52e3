// SPDX-License-Identifier: Apache-2.0
// vf5 command-line front end.

#include <cmath>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vf5/animation.hpp"
#include "vf5/error.hpp"
#include "vf5/execute.hpp"
#include "vf5/field.hpp"
#include "vf5/frame.hpp"
#include "vf5/recipe.hpp"
#include "vf5/server.hpp"

namespace {

using namespace vf5;
using nlohmann::json;

// Module errors exit with 10 + ErrorCode; anything else exits with 2.
constexpr int kErrorBase = 10;

std::vector<double> parse_list(const std::string& text, std::size_t n, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::InvalidArgument, std::string(what) + " '" + text + "' is not a number list");
        }
    }
    if (out.size() != n) {
        throw Error(ErrorCode::InvalidArgument,
                    std::string(what) + " '" + text + "' needs " + std::to_string(n) + " comma-separated values");
    }
    return out;
}

json vec_json(const std::string& text, const char* what) {
    const auto v = parse_list(text, 3, what);
    return json::array({v[0], v[1], v[2]});
}

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::OutOfDomain: return "out-of-domain";
        case Termination::MaxSteps: return "max-steps";
        case Termination::Stagnation: return "stagnation";
        case Termination::TimeLimit: return "time-limit";
        case Termination::None: return "none";
    }
    return "?";
}

void write_frame(const BakedFrame& frame, const std::string& out) {
    write_bytes(out, encode_frame(frame));
}

BakedFrame run_item(const FieldSet& fs, int step, RecipeItem item) {
    validate_item(item, fs);
    Executor exec(fs, step);
    BakedFrame frame;
    frame.step = static_cast<std::uint32_t>(step);
    frame.objects = exec.run(item);
    return frame;
}

void print_info(const FieldSet& fs) {
    const GridSpec& g = fs.grid;
    std::cout << "dims " << g.dims[0] << ' ' << g.dims[1] << ' ' << g.dims[2] << '\n';
    std::cout << "origin " << g.origin.x << ' ' << g.origin.y << ' ' << g.origin.z << '\n';
    std::cout << "spacing " << g.spacing.x << ' ' << g.spacing.y << ' ' << g.spacing.z << '\n';
    std::cout << "steps " << fs.steps << '\n';
    std::cout << "scalars";
    for (const auto& [name, _] : fs.scalars) std::cout << ' ' << name;
    std::cout << "\nvectors";
    for (const auto& [name, _] : fs.vectors) std::cout << ' ' << name;
    std::cout << '\n';
}

// Small time-varying demo: a sphere distance scalar and a tilted swirl.
FieldSet demo_dataset(int n, int steps) {
    FieldSet fs;
    fs.grid.dims = {n, n, n};
    fs.grid.origin = {-1.0, -1.0, -1.0};
    const double h = 2.0 / (n - 1);
    fs.grid.spacing = {h, h, h};
    fs.steps = steps;
    for (int t = 0; t < steps; ++t) {
        const double phase = 0.25 * t;
        std::vector<double> s(fs.grid.node_count());
        std::vector<Vec3> v(fs.grid.node_count());
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    const Vec3 p = fs.grid.node_position(i, j, k);
                    const std::size_t idx = fs.grid.index(i, j, k);
                    s[idx] = dot(p, p) + 0.1 * std::sin(3.0 * p.x + phase);
                    v[idx] = {-p.y, p.x, 0.3 * std::cos(phase) * p.z};
                }
        fs.scalars["radius2"].emplace_back(fs.grid, std::move(s));
        fs.vectors["swirl"].emplace_back(fs.grid, std::move(v));
    }
    return fs;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vf5: headless field visualization engine"};
    app.require_subcommand(1);

    std::string data;
    std::string field;
    std::string out;
    int step = 0;

    auto* info = app.add_subcommand("info", "Print grid, step count and field names");
    std::string manifest;
    info->add_option("manifest", manifest, "Dataset manifest or directory")->required();

    auto* iso = app.add_subcommand("isosurface", "Extract an isosurface into a frame file");
    double level = 0.0;
    iso->add_option("--data", data, "Dataset manifest or directory")->required();
    iso->add_option("--field", field, "Scalar field")->required();
    iso->add_option("--level", level, "Iso level")->required();
    iso->add_option("--out", out, "Output .vfa file")->required();
    iso->add_option("--step", step, "Time step");

    auto* trace = app.add_subcommand("trace", "Trace streamlines or field lines from seeds");
    std::vector<std::string> seeds;
    double step_factor = 0.2;
    int max_steps = 10000;
    bool field_line = false;
    trace->add_option("--data", data, "Dataset manifest or directory")->required();
    trace->add_option("--field", field, "Vector field")->required();
    trace->add_option("--seed", seeds, "Seed point x,y,z (repeatable)")->required();
    trace->add_option("--step-factor", step_factor, "Step as a fraction of the grid spacing");
    trace->add_option("--max-steps", max_steps, "Step limit per branch");
    trace->add_flag("--field-line", field_line, "Trace normalized field lines both ways");
    trace->add_option("--out", out, "Output .vfa file");
    trace->add_option("--step", step, "Time step");

    auto* lic = app.add_subcommand("lic", "Render a line integral convolution slice");
    std::string center;
    std::string normal = "0,0,1";
    std::string size;
    std::string resolution = "256,256";
    int kernel = 20;
    std::uint64_t noise_seed = 0;
    lic->add_option("--data", data, "Dataset manifest or directory")->required();
    lic->add_option("--field", field, "Vector field")->required();
    lic->add_option("--center", center, "Plane center x,y,z (default: domain center)");
    lic->add_option("--normal", normal, "Plane normal x,y,z");
    lic->add_option("--size", size, "Plane extent w,h in world units");
    lic->add_option("--resolution", resolution, "Image size w,h in pixels");
    lic->add_option("--kernel", kernel, "Kernel half length in pixels");
    lic->add_option("--noise-seed", noise_seed, "Noise texture seed");
    lic->add_option("--out", out, "Output .ppm or .vfa file")->required();
    lic->add_option("--step", step, "Time step");

    auto* bake = app.add_subcommand("bake", "Bake a recipe into one frame file per time step");
    std::string recipe_path;
    bake->add_option("--data", data, "Dataset manifest or directory")->required();
    bake->add_option("--recipe", recipe_path, "Parameter file")->required();
    bake->add_option("--out", out, "Output directory")->required();

    auto* serve = app.add_subcommand("serve", "Run the websocket session service");
    ServerOptions server_opts;
    server_opts.port = default_port();
    server_opts.handle_signals = true;
    std::string work_dir = ".";
    serve->add_option("--data", data, "Dataset manifest or directory")->required();
    serve->add_option("--port", server_opts.port, "Listen port (default: VF5_PORT or 8765)");
    serve->add_option("--address", server_opts.address, "Listen address");
    serve->add_option("--threads", server_opts.threads, "Worker threads");
    serve->add_option("--work-dir", work_dir, "Base directory for relative paths in commands");

    auto* demo = app.add_subcommand("demo", "Write a small synthetic dataset");
    std::string demo_dir;
    int demo_n = 32;
    int demo_steps = 4;
    demo->add_option("dir", demo_dir, "Output directory")->required();
    demo->add_option("--size", demo_n, "Nodes per axis")->check(CLI::Range(2, 512));
    demo->add_option("--steps", demo_steps, "Time steps")->check(CLI::Range(1, 1000));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*info) {
            print_info(load_dataset(manifest));
        } else if (*iso) {
            const FieldSet fs = load_dataset(data);
            const BakedFrame frame = run_item(fs, step, {Method::Isosurface, field, json{{"level", level}}});
            write_frame(frame, out);
            const auto& mesh = std::get<TriangleMesh>(frame.objects.front());
            std::cout << "vertices " << mesh.positions.size() << " triangles " << mesh.triangles.size() << '\n';
        } else if (*trace) {
            const FieldSet fs = load_dataset(data);
            json s = json::array();
            for (const auto& text : seeds) s.push_back(vec_json(text, "seed"));
            const RecipeItem item{field_line ? Method::FieldLine : Method::Tracer, field,
                                  json{{"seeds", s}, {"step_factor", step_factor}, {"max_steps", max_steps}}};
            const BakedFrame frame = run_item(fs, step, item);
            for (const auto& o : frame.objects) {
                const auto& line = std::get<Polyline>(o);
                std::cout << "vertices " << line.vertices.size() << " termination "
                          << termination_name(line.termination) << '\n';
            }
            if (!out.empty()) write_frame(frame, out);
        } else if (*lic) {
            const FieldSet fs = load_dataset(data);
            const Vec3 mid = 0.5 * (fs.grid.lower() + fs.grid.upper());
            json p{{"center", center.empty() ? json::array({mid.x, mid.y, mid.z}) : vec_json(center, "center")},
                   {"normal", vec_json(normal, "normal")},
                   {"kernel_half_len", kernel},
                   {"noise_seed", noise_seed}};
            const auto res = parse_list(resolution, 2, "resolution");
            p["resolution"] = json::array({static_cast<int>(res[0]), static_cast<int>(res[1])});
            if (!size.empty()) {
                const auto wh = parse_list(size, 2, "size");
                p["size"] = json::array({wh[0], wh[1]});
            }
            const BakedFrame frame = run_item(fs, step, {Method::LIC, field, p});
            if (std::filesystem::path(out).extension() == ".ppm") {
                write_bytes(out, encode_ppm(std::get<SliceImage>(frame.objects.front())));
            } else {
                write_frame(frame, out);
            }
        } else if (*bake) {
            const ParamsFile params = load_params(recipe_path);
            const FieldSet fs = load_dataset(data);
            const std::size_t n = bake_animation(fs, params.recipe, out, params.roi);
            std::cout << "frames " << n << '\n';
        } else if (*serve) {
            server_opts.work_dir = work_dir;
            auto fs = std::make_shared<const FieldSet>(load_dataset(data));
            Server server(fs, server_opts);
            server.start();
            std::cout << "listening on ws://" << server_opts.address << ':' << server.port() << std::endl;
            server.wait();
        } else if (*demo) {
            write_dataset(demo_dataset(demo_n, demo_steps), demo_dir);
            std::cout << "wrote " << demo_dir << '\n';
        }
    } catch (const Error& e) {
        std::cerr << "vf5: " << to_string(e.code()) << ": " << e.what() << '\n';
        return kErrorBase + static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "vf5: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
