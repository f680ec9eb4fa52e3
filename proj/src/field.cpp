// SPDX-License-Identifier: Apache-2.0
#include "vf5/field.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace vf5 {

namespace {

constexpr double kCellTolerance = 1e-10;

static_assert(std::endian::native == std::endian::little,
              "raw dataset I/O assumes a little-endian host");

std::vector<char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
    return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::vector<float> read_raw(const std::filesystem::path& path, std::size_t expected_floats) {
    if (!std::filesystem::exists(path)) {
        throw Error(ErrorCode::MissingFile, "missing raw file " + path.string());
    }
    const auto bytes = read_file(path);
    const std::size_t expected = expected_floats * sizeof(float);
    if (bytes.size() != expected) {
        throw Error(ErrorCode::TruncatedData, path.filename().string() + ": expected " +
                                                  std::to_string(expected) + " bytes, got " +
                                                  std::to_string(bytes.size()));
    }
    std::vector<float> out(expected_floats);
    std::memcpy(out.data(), bytes.data(), expected);
    for (std::size_t n = 0; n < out.size(); ++n) {
        if (!std::isfinite(out[n])) {
            throw Error(ErrorCode::NonFinite, path.filename().string() +
                                                  ": non-finite value at float index " +
                                                  std::to_string(n));
        }
    }
    return out;
}

void write_raw(const std::filesystem::path& path, const std::vector<float>& data) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(float)));
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

template <class T>
std::array<T, 3> triple(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array() || j[key].size() != 3) {
        throw Error(ErrorCode::ManifestParse, std::string("manifest key '") + key +
                                                  "' must be an array of 3 numbers");
    }
    std::array<T, 3> out{};
    for (int a = 0; a < 3; ++a) {
        if (!j[key][a].is_number()) {
            throw Error(ErrorCode::ManifestParse,
                        std::string("manifest key '") + key + "' must hold numbers");
        }
        out[a] = j[key][a].get<T>();
    }
    return out;
}

struct ManifestEntry {
    std::string name;
    std::vector<std::string> files;
};

std::vector<ManifestEntry> entries(const nlohmann::json& j, const char* key, int steps) {
    std::vector<ManifestEntry> out;
    if (!j.contains(key)) return out;
    if (!j[key].is_array()) {
        throw Error(ErrorCode::ManifestParse, std::string("'") + key + "' must be an array");
    }
    for (const auto& e : j[key]) {
        if (!e.is_object() || !e.contains("name") || !e["name"].is_string() ||
            !e.contains("files") || !e["files"].is_array()) {
            throw Error(ErrorCode::ManifestParse,
                        std::string("each '") + key + "' entry needs 'name' and 'files'");
        }
        ManifestEntry m{e["name"].get<std::string>(), {}};
        for (const auto& f : e["files"]) {
            if (!f.is_string()) throw Error(ErrorCode::ManifestParse, "file names must be strings");
            m.files.push_back(f.get<std::string>());
        }
        if (static_cast<int>(m.files.size()) != steps) {
            throw Error(ErrorCode::ManifestParse, "field '" + m.name + "' lists " +
                                                      std::to_string(m.files.size()) +
                                                      " files for " + std::to_string(steps) +
                                                      " steps");
        }
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace

void GridSpec::validate() const {
    for (int a = 0; a < 3; ++a) {
        if (dims[a] < 2) throw Error(ErrorCode::InvalidArgument, "grid dims must be >= 2");
        if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a])) {
            throw Error(ErrorCode::InvalidArgument, "grid spacing must be positive");
        }
        if (!std::isfinite(origin[a])) throw Error(ErrorCode::InvalidArgument, "grid origin must be finite");
    }
}

double GridSpec::min_spacing() const { return std::min({spacing.x, spacing.y, spacing.z}); }

bool GridSpec::contains(const Vec3& p) const { return detail::locate(*this, p).has_value(); }

Vec3 GridSpec::clamp(const Vec3& p) const {
    const Vec3 lo = lower();
    const Vec3 hi = upper();
    return {std::clamp(p.x, lo.x, hi.x), std::clamp(p.y, lo.y, hi.y), std::clamp(p.z, lo.z, hi.z)};
}

namespace detail {

std::optional<CellLocation> locate(const GridSpec& grid, const Vec3& p) {
    CellLocation loc{};
    for (int a = 0; a < 3; ++a) {
        double u = (p[a] - grid.origin[a]) / grid.spacing[a];
        const double last = grid.dims[a] - 1;
        if (!(u >= -kCellTolerance && u <= last + kCellTolerance)) return std::nullopt;
        const double nearest = std::round(u);
        if (std::abs(u - nearest) <= kCellTolerance) u = nearest;
        u = std::clamp(u, 0.0, last);
        const int base = std::min(static_cast<int>(u), grid.dims[a] - 2);
        loc.base[a] = base;
        loc.frac[a] = u - base;
    }
    return loc;
}

}  // namespace detail

double rms_magnitude(const VectorField& field) {
    double sum = 0.0;
    for (const auto& v : field.values()) sum += dot(v, v);
    const auto n = field.values().size();
    return n == 0 ? 0.0 : std::sqrt(sum / static_cast<double>(n));
}

std::pair<double, double> value_range(const ScalarField& field) {
    const auto [lo, hi] = std::minmax_element(field.values().begin(), field.values().end());
    return {*lo, *hi};
}

const ScalarField& FieldSet::scalar(const std::string& name, int step) const {
    const auto it = scalars.find(name);
    if (it == scalars.end()) throw Error(ErrorCode::UnknownField, "no scalar field '" + name + "'");
    if (step < 0 || step >= steps) throw Error(ErrorCode::BadStep, "step " + std::to_string(step) + " out of range");
    return it->second[static_cast<std::size_t>(step)];
}

const VectorField& FieldSet::vector(const std::string& name, int step) const {
    const auto it = vectors.find(name);
    if (it == vectors.end()) throw Error(ErrorCode::UnknownField, "no vector field '" + name + "'");
    if (step < 0 || step >= steps) throw Error(ErrorCode::BadStep, "step " + std::to_string(step) + " out of range");
    return it->second[static_cast<std::size_t>(step)];
}

void FieldSet::validate() const {
    grid.validate();
    if (steps < 1) throw Error(ErrorCode::InvalidArgument, "a dataset needs at least one step");
    auto check = [&](const auto& lists) {
        for (const auto& [name, list] : lists) {
            if (static_cast<int>(list.size()) != steps) {
                throw Error(ErrorCode::InvalidArgument, "field '" + name + "' has the wrong step count");
            }
            for (const auto& f : list) {
                if (!(f.grid() == grid)) {
                    throw Error(ErrorCode::InvalidArgument, "field '" + name + "' is on a different grid");
                }
            }
        }
    };
    check(scalars);
    check(vectors);
    for (const auto& [name, list] : scalars) {
        if (vectors.contains(name)) {
            throw Error(ErrorCode::InvalidArgument, "field name '" + name + "' is used twice");
        }
    }
}

FieldSet load_dataset(const std::filesystem::path& manifest_path) {
    auto manifest = manifest_path;
    if (std::filesystem::is_directory(manifest)) manifest /= "manifest.vf5";
    const auto dir = manifest.parent_path();
    const auto text = read_file(manifest);

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ManifestParse, manifest.string() + ": " + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::ManifestParse, "manifest must be a JSON object");

    FieldSet fs;
    const auto dims = triple<int>(j, "dims");
    const auto origin = triple<double>(j, "origin");
    const auto spacing = triple<double>(j, "spacing");
    fs.grid.dims = dims;
    fs.grid.origin = {origin[0], origin[1], origin[2]};
    fs.grid.spacing = {spacing[0], spacing[1], spacing[2]};
    try {
        fs.grid.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::ManifestParse, e.what());
    }
    if (!j.contains("steps") || !j["steps"].is_number_integer() || j["steps"].get<int>() < 1) {
        throw Error(ErrorCode::ManifestParse, "manifest 'steps' must be a positive integer");
    }
    fs.steps = j["steps"].get<int>();

    const auto scalar_entries = entries(j, "scalars", fs.steps);
    const auto vector_entries = entries(j, "vectors", fs.steps);
    std::set<std::string> names;
    for (const auto* list : {&scalar_entries, &vector_entries}) {
        for (const auto& e : *list) {
            if (!names.insert(e.name).second) {
                throw Error(ErrorCode::ManifestParse, "duplicate field name '" + e.name + "'");
            }
        }
    }

    const std::size_t n = fs.grid.node_count();
    for (const auto& e : scalar_entries) {
        auto& list = fs.scalars[e.name];
        for (const auto& file : e.files) {
            const auto raw = read_raw(dir / file, n);
            list.emplace_back(fs.grid, std::vector<double>(raw.begin(), raw.end()));
        }
    }
    for (const auto& e : vector_entries) {
        auto& list = fs.vectors[e.name];
        for (const auto& file : e.files) {
            const auto raw = read_raw(dir / file, 3 * n);
            std::vector<Vec3> values(n);
            for (std::size_t i = 0; i < n; ++i) values[i] = {raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]};
            list.emplace_back(fs.grid, std::move(values));
        }
    }
    return fs;
}

void write_dataset(const FieldSet& fields, const std::filesystem::path& dir) {
    fields.validate();
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

    nlohmann::json j;
    const auto& g = fields.grid;
    j["dims"] = g.dims;
    j["origin"] = {g.origin.x, g.origin.y, g.origin.z};
    j["spacing"] = {g.spacing.x, g.spacing.y, g.spacing.z};
    j["steps"] = fields.steps;
    j["scalars"] = nlohmann::json::array();
    j["vectors"] = nlohmann::json::array();

    for (const auto& [name, list] : fields.scalars) {
        nlohmann::json entry{{"name", name}, {"files", nlohmann::json::array()}};
        for (int t = 0; t < fields.steps; ++t) {
            const std::string file = name + "_" + std::to_string(t) + ".raw";
            const auto values = list[static_cast<std::size_t>(t)].values();
            write_raw(dir / file, std::vector<float>(values.begin(), values.end()));
            entry["files"].push_back(file);
        }
        j["scalars"].push_back(entry);
    }
    for (const auto& [name, list] : fields.vectors) {
        nlohmann::json entry{{"name", name}, {"files", nlohmann::json::array()}};
        for (int t = 0; t < fields.steps; ++t) {
            const std::string file = name + "_" + std::to_string(t) + ".raw";
            std::vector<float> raw;
            raw.reserve(3 * g.node_count());
            for (const auto& v : list[static_cast<std::size_t>(t)].values()) {
                raw.push_back(static_cast<float>(v.x));
                raw.push_back(static_cast<float>(v.y));
                raw.push_back(static_cast<float>(v.z));
            }
            write_raw(dir / file, raw);
            entry["files"].push_back(file);
        }
        j["vectors"].push_back(entry);
    }

    std::ofstream out(dir / "manifest.vf5");
    out << j.dump(2) << '\n';
    if (!out) throw Error(ErrorCode::IoError, "cannot write manifest in " + dir.string());
}

}  // namespace vf5
