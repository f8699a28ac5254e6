#include "tactag/io.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tactag/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace tactag {
namespace {

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream f(path, mode);
    if (!f) throw IoError("cannot write " + path);
    return f;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream f(path, mode);
    if (!f) throw IoError("cannot read " + path);
    return f;
}

// Netpbm header tokenizer: skips whitespace and '#' comments, remembering any
// "# pitch_mm <v>" comment it crosses.
struct PnmHeader {
    std::string magic;
    int width = 0, height = 0, maxval = 1;
    double pitch_mm = 0.0;  // 0 when absent
    std::streampos data_start;
};

std::string next_token(std::istream& in, double* pitch) {
    for (;;) {
        int c = in.peek();
        if (c == EOF) throw DataError("truncated image header");
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        if (c == '#') {
            std::string line;
            std::getline(in, line);
            std::istringstream ls(line.substr(1));
            std::string key;
            double v;
            if (ls >> key >> v && key == "pitch_mm" && pitch) *pitch = v;
            continue;
        }
        std::string tok;
        while ((c = in.peek()) != EOF && !std::isspace(c)) tok.push_back(static_cast<char>(in.get()));
        return tok;
    }
}

int next_int(std::istream& in, double* pitch) {
    const std::string tok = next_token(in, pitch);
    try {
        size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw DataError("bad integer in image header: " + tok);
    }
}

PnmHeader read_pnm_header(std::istream& in) {
    PnmHeader h;
    h.magic = next_token(in, &h.pitch_mm);
    if (h.magic != "P1" && h.magic != "P2" && h.magic != "P4" && h.magic != "P5")
        throw DataError("unsupported image format: " + h.magic);
    h.width = next_int(in, &h.pitch_mm);
    h.height = next_int(in, &h.pitch_mm);
    if (h.magic == "P2" || h.magic == "P5") {
        h.maxval = next_int(in, &h.pitch_mm);
        if (h.maxval < 1 || h.maxval > 255) throw DataError("unsupported maxval");
    }
    if (h.width < 1 || h.height < 1) throw DataError("bad image dimensions");
    if (h.magic == "P4" || h.magic == "P5") in.get();  // single separator before raster
    h.data_start = in.tellg();
    return h;
}

void put_float(std::ostream& out, float v) { out.write(reinterpret_cast<const char*>(&v), 4); }

float take_float(std::istream& in) {
    float v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
}

std::string entry_stem(int index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "p%04d", index);
    return buf;
}

}  // namespace

void write_pgm(const Mask& mask, const std::string& path) {
    if (mask.width < 1 || mask.height < 1) throw std::invalid_argument("empty mask raster");
    std::ofstream f = open_out(path, std::ios::binary);
    f << "P5\n# pitch_mm " << mask.pitch_mm << "\n" << mask.width << " " << mask.height
      << "\n255\n";
    std::vector<char> row(mask.width);
    for (int y = mask.height - 1; y >= 0; --y) {
        for (int x = 0; x < mask.width; ++x) row[x] = mask.get(x, y) ? '\xff' : '\0';
        f.write(row.data(), row.size());
    }
    if (!f) throw IoError("cannot write " + path);
}

Mask read_mask(const std::string& path, double fallback_pitch_mm) {
    std::ifstream f = open_in(path, std::ios::binary);
    const PnmHeader h = read_pnm_header(f);
    const double pitch = h.pitch_mm > 0.0 ? h.pitch_mm : fallback_pitch_mm;
    if (pitch <= 0.0) throw DataError("no pixel pitch in " + path + " and no fallback");
    Mask mask = make_mask(h.width, h.height, pitch);

    auto store = [&](int file_row, int x, bool v) { mask.set(x, h.height - 1 - file_row, v); };
    if (h.magic == "P5") {
        std::vector<char> row(h.width);
        for (int r = 0; r < h.height; ++r) {
            f.read(row.data(), row.size());
            if (!f) throw DataError("truncated raster in " + path);
            for (int x = 0; x < h.width; ++x)
                store(r, x, static_cast<unsigned char>(row[x]) >= 128);
        }
    } else if (h.magic == "P2") {
        for (int r = 0; r < h.height; ++r)
            for (int x = 0; x < h.width; ++x) {
                const int v = next_int(f, nullptr);
                if (v < 0 || v > h.maxval) throw DataError("sample out of range in " + path);
                store(r, x, v >= 128);
            }
    } else if (h.magic == "P4") {
        const int stride = (h.width + 7) / 8;
        std::vector<char> row(stride);
        for (int r = 0; r < h.height; ++r) {
            f.read(row.data(), row.size());
            if (!f) throw DataError("truncated raster in " + path);
            for (int x = 0; x < h.width; ++x)
                store(r, x, (row[x / 8] >> (7 - x % 8)) & 1);  // 1 = ink
        }
    } else {  // P1
        for (int r = 0; r < h.height; ++r)
            for (int x = 0; x < h.width; ++x) {
                int c = f.get();
                while (c != EOF && (std::isspace(c) || c == '#')) {
                    if (c == '#') {
                        std::string line;
                        std::getline(f, line);
                    }
                    c = f.get();
                }
                if (c != '0' && c != '1') throw DataError("bad bitmap digit in " + path);
                store(r, x, c == '1');
            }
    }
    return mask;
}

void write_ply(const PointCloud& cloud, const std::string& path) {
    std::ofstream f = open_out(path);
    f << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
      << "\nproperty float x\nproperty float y\nproperty float z\nend_header\n";
    char line[64];
    for (const Vec3& p : cloud.points) {
        std::snprintf(line, sizeof line, "%.9g %.9g %.9g\n", static_cast<float>(p.x),
                      static_cast<float>(p.y), static_cast<float>(p.z));
        f << line;
    }
    if (!f) throw IoError("cannot write " + path);
}

PointCloud read_ply(const std::string& path) {
    std::ifstream f = open_in(path);
    std::string line;
    if (!std::getline(f, line) || line != "ply") throw DataError(path + " is not a PLY file");
    long count = -1;
    std::vector<std::string> props;
    bool ascii = false;
    while (std::getline(f, line)) {
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word == "end_header") break;
        if (word == "comment" || word.empty()) continue;
        if (word == "format") {
            std::string fmt;
            ls >> fmt;
            ascii = fmt == "ascii";
        } else if (word == "element") {
            std::string name;
            long n;
            if (ls >> name >> n && name == "vertex") count = n;
            else throw DataError("unsupported PLY element in " + path);
        } else if (word == "property") {
            std::string type, name;
            ls >> type >> name;
            props.push_back(name);
        } else {
            throw DataError("unsupported PLY header line in " + path + ": " + line);
        }
    }
    if (!ascii) throw DataError(path + ": only ascii PLY is supported");
    if (count < 0) throw DataError(path + ": missing vertex element");
    if (props != std::vector<std::string>{"x", "y", "z"})
        throw DataError(path + ": expected exactly float x y z properties");

    PointCloud cloud;
    cloud.points.reserve(count);
    for (long i = 0; i < count; ++i) {
        Vec3 p;
        if (!(f >> p.x >> p.y >> p.z)) throw DataError("truncated vertex list in " + path);
        cloud.points.push_back(p);
    }
    return cloud;
}

void write_stl(const TriMesh& mesh, const std::string& path) {
    if (mesh.faces.empty()) throw std::invalid_argument("empty mesh");
    if (!is_watertight(mesh)) throw std::invalid_argument("mesh is not watertight");
    std::ofstream f = open_out(path, std::ios::binary);
    char header[80] = "tactag tactile pattern mesh";
    f.write(header, sizeof header);
    const std::uint32_t n = static_cast<std::uint32_t>(mesh.faces.size());
    f.write(reinterpret_cast<const char*>(&n), 4);
    for (const auto& face : mesh.faces) {
        const Vec3 a = mesh.vertices[face[0]], b = mesh.vertices[face[1]],
                   c = mesh.vertices[face[2]];
        Vec3 nrm = cross(b - a, c - a);
        const double len = norm(nrm);
        nrm = len > 0.0 ? (1.0 / len) * nrm : Vec3{0, 0, 0};
        for (const Vec3& v : {nrm, a, b, c}) {
            put_float(f, static_cast<float>(v.x));
            put_float(f, static_cast<float>(v.y));
            put_float(f, static_cast<float>(v.z));
        }
        const std::uint16_t attr = 0;
        f.write(reinterpret_cast<const char*>(&attr), 2);
    }
    if (!f) throw IoError("cannot write " + path);
}

TriMesh read_stl(const std::string& path) {
    std::ifstream f = open_in(path, std::ios::binary);
    f.seekg(0, std::ios::end);
    const std::streamoff size = f.tellg();
    f.seekg(0);
    if (size < 84) throw DataError(path + " is too short for binary STL");
    char header[80];
    f.read(header, 80);
    std::uint32_t n = 0;
    f.read(reinterpret_cast<char*>(&n), 4);
    if (size != 84 + static_cast<std::streamoff>(n) * 50)
        throw DataError(path + ": size does not match facet count (binary STL expected)");

    TriMesh mesh;
    std::map<std::array<float, 3>, int> seen;
    auto vid = [&](const std::array<float, 3>& v) {
        auto [it, inserted] = seen.try_emplace(v, static_cast<int>(mesh.vertices.size()));
        if (inserted) mesh.vertices.push_back({v[0], v[1], v[2]});
        return it->second;
    };
    for (std::uint32_t i = 0; i < n; ++i) {
        for (int k = 0; k < 3; ++k) take_float(f);  // stored normal is ignored
        std::array<int, 3> face{};
        for (int k = 0; k < 3; ++k)
            face[k] = vid({take_float(f), take_float(f), take_float(f)});
        char attr[2];
        f.read(attr, 2);
        if (!f) throw DataError("truncated facet in " + path);
        mesh.faces.push_back(face);
    }
    return mesh;
}

namespace {

json config_to_json(const LibraryConfig& c) {
    return json{{"divisions", c.divisions},
                {"extent", c.extent},
                {"n_min", c.n_min},
                {"n_max", c.n_max},
                {"alpha", c.alpha},
                {"scale_mm", c.scale_mm},
                {"pitch_mm", c.pitch_mm},
                {"dilate_radius_px", c.dilate_radius_px},
                {"depth_mm", c.depth_mm},
                {"subdivide_max_edge", c.subdivide_max_edge},
                {"voxel_mm", c.voxel_mm},
                {"seed", c.seed},
                {"schedule",
                 json{{"t0", c.schedule.t0},
                      {"beta", c.schedule.beta},
                      {"max_iters", c.schedule.max_iters}}}};
}

LibraryConfig config_from_json(const json& j) {
    LibraryConfig c;
    c.divisions = j.at("divisions").get<int>();
    c.extent = j.at("extent").get<double>();
    c.n_min = j.at("n_min").get<int>();
    c.n_max = j.at("n_max").get<int>();
    c.alpha = j.at("alpha").get<double>();
    c.scale_mm = j.at("scale_mm").get<double>();
    c.pitch_mm = j.at("pitch_mm").get<double>();
    c.dilate_radius_px = j.at("dilate_radius_px").get<int>();
    c.depth_mm = j.at("depth_mm").get<double>();
    c.subdivide_max_edge = j.at("subdivide_max_edge").get<double>();
    c.voxel_mm = j.at("voxel_mm").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    const json& s = j.at("schedule");
    c.schedule.t0 = s.at("t0").get<double>();
    c.schedule.beta = s.at("beta").get<double>();
    c.schedule.max_iters = s.at("max_iters").get<int>();
    return c;
}

}  // namespace

void save_library(const PatternLibrary& library, const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir + ": " + ec.message());

    json entries = json::array();
    for (int i = 0; i < library.size(); ++i) {
        const LibraryEntry& e = library.entries[i];
        const std::string stem = entry_stem(i);
        write_pgm(e.mask, dir + "/" + stem + "_mask.pgm");
        write_ply(e.cloud, dir + "/" + stem + "_cloud.ply");
        write_stl(pattern_to_mesh(e.pattern, library.grid, library.config.scale_mm,
                                  library.config.depth_mm),
                  dir + "/" + stem + "_mesh.stl");
        entries.push_back(json{{"label", e.label},
                               {"triangles", e.pattern.triangle_ids},
                               {"hu", e.hu.h},
                               {"mask", stem + "_mask.pgm"},
                               {"cloud", stem + "_cloud.ply"},
                               {"mesh", stem + "_mesh.stl"}});
    }
    const json manifest{{"version", kManifestVersion},
                        {"grid_id", library.grid.id()},
                        {"config", config_to_json(library.config)},
                        {"entries", entries}};
    std::ofstream f = open_out(dir + "/manifest.json");
    f << manifest.dump(2) << "\n";
    if (!f) throw IoError("cannot write " + dir + "/manifest.json");
}

PatternLibrary load_library(const std::string& dir, bool strict) {
    const std::string manifest_path = dir + "/manifest.json";
    std::ifstream f(manifest_path);
    if (!f) throw DataError("missing manifest: " + manifest_path);
    json manifest;
    try {
        f >> manifest;
    } catch (const json::exception& e) {
        throw DataError("corrupt manifest " + manifest_path + ": " + e.what());
    }

    PatternLibrary library;
    try {
        const std::string version = manifest.at("version").get<std::string>();
        if (version != kManifestVersion)
            throw DataError("unsupported library version: " + version);
        library.config = config_from_json(manifest.at("config"));
        library.grid = build_staggered_grid(library.config.divisions, library.config.extent);
        if (manifest.at("grid_id").get<std::string>() != library.grid.id())
            throw DataError("manifest grid does not match its config");

        for (const json& je : manifest.at("entries")) {
            LibraryEntry e;
            e.label = je.at("label").get<std::string>();
            if (library.find(e.label) >= 0) throw DataError("duplicate label: " + e.label);
            e.pattern.triangle_ids = je.at("triangles").get<std::vector<int>>();
            e.pattern.grid_id = library.grid.id();
            try {
                validate_pattern(e.pattern, library.grid);
            } catch (const std::invalid_argument& ex) {
                throw DataError("corrupt pattern for " + e.label + ": " + ex.what());
            }
            e.mask = read_mask(dir + "/" + je.at("mask").get<std::string>(),
                               library.config.pitch_mm);
            e.cloud = read_ply(dir + "/" + je.at("cloud").get<std::string>());
            e.hu = hu_signature(e.mask);
            if (strict) {
                const auto stored = je.at("hu").get<std::array<double, 7>>();
                for (int m = 0; m < 7; ++m)
                    if (std::abs(stored[m] - e.hu.h[m]) > 1e-9)
                        throw DataError("stored hu signature for " + e.label +
                                        " does not match its mask");
            }
            refresh_entry_cache(library, e);
            library.entries.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw DataError("corrupt manifest " + manifest_path + ": " + e.what());
    } catch (const IoError& e) {
        throw DataError(std::string("missing or unreadable entry file: ") + e.what());
    }
    if (strict && library.size() >= 2 && library.dispersion() <= library.config.alpha)
        throw DataError("library violates its own dispersion threshold");
    return library;
}

}  // namespace tactag
