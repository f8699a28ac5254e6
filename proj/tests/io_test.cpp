#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include <tactag/error.hpp>
#include <tactag/io.hpp>
#include <tactag/library.hpp>
#include <tactag/mesh.hpp>
#include <tactag/rng.hpp>

using namespace tactag;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("tactag_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    f << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

const PatternLibrary& io_library() {
    static PatternLibrary lib = [] {
        LibraryConfig cfg;
        cfg.seed = 3;
        return generate_library(cfg, 6);
    }();
    return lib;
}

}  // namespace

TEST_CASE("pgm files round-trip with their pitch") {
    const fs::path dir = fresh_dir("pgm");
    Rng rng(1);
    Mask mask = make_mask(37, 23, 0.05);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (rng.uniform01() < 0.3) mask.set(x, y, true);

    const std::string path = (dir / "m.pgm").string();
    write_pgm(mask, path);
    const Mask back = read_mask(path, 9.0);  // comment pitch wins over fallback
    CHECK(back == mask);
}

TEST_CASE("pgm raster is written bottom row last") {
    const fs::path dir = fresh_dir("pgm_rows");
    Mask mask = make_mask(2, 2, 0.1);
    mask.set(0, 1, true);
    const std::string path = (dir / "m.pgm").string();
    write_pgm(mask, path);

    const std::string raw = read_file(path);
    const std::string header = "P5\n# pitch_mm 0.1\n2 2\n255\n";
    REQUIRE(raw.size() == header.size() + 4);
    CHECK(raw.substr(0, header.size()) == header);
    // Mask row y=1 is the first (top) image row.
    CHECK(static_cast<unsigned char>(raw[header.size() + 0]) == 255);
    CHECK(static_cast<unsigned char>(raw[header.size() + 1]) == 0);
    CHECK(static_cast<unsigned char>(raw[header.size() + 2]) == 0);
    CHECK(static_cast<unsigned char>(raw[header.size() + 3]) == 0);
}

TEST_CASE("the mask reader accepts ascii and packed netpbm variants") {
    const fs::path dir = fresh_dir("netpbm");

    write_file(dir / "a.pgm", "P2\n2 2\n255\n0 200\n10 255\n");
    const Mask p2 = read_mask((dir / "a.pgm").string(), 0.1);
    CHECK(p2.pitch_mm == 0.1);  // no comment, fallback used
    CHECK_FALSE(p2.get(0, 1));
    CHECK(p2.get(1, 1));
    CHECK_FALSE(p2.get(0, 0));
    CHECK(p2.get(1, 0));

    write_file(dir / "b.pbm", "P1\n2 2\n10\n01\n");
    const Mask p1 = read_mask((dir / "b.pbm").string(), 0.1);
    CHECK(p1.get(0, 1));
    CHECK_FALSE(p1.get(1, 1));
    CHECK_FALSE(p1.get(0, 0));
    CHECK(p1.get(1, 0));

    const std::string p4 = std::string("P4\n2 2\n") + '\x80' + '\x40';
    write_file(dir / "c.pbm", p4);
    const Mask packed = read_mask((dir / "c.pbm").string(), 0.1);
    CHECK(packed.get(0, 1));
    CHECK_FALSE(packed.get(1, 1));
    CHECK_FALSE(packed.get(0, 0));
    CHECK(packed.get(1, 0));

    CHECK_THROWS_AS(read_mask((dir / "a.pgm").string(), 0.0), DataError);
    write_file(dir / "bad.pgm", "P6\n2 2\n255\n");
    CHECK_THROWS_AS(read_mask((dir / "bad.pgm").string(), 0.1), DataError);
    write_file(dir / "short.pgm", "P5\n2 2\n255\n\xff");
    CHECK_THROWS_AS(read_mask((dir / "short.pgm").string(), 0.1), DataError);
    CHECK_THROWS_AS(read_mask((dir / "absent.pgm").string(), 0.1), IoError);
}

TEST_CASE("ply files round-trip at float precision") {
    const fs::path dir = fresh_dir("ply");
    Rng rng(2);
    PointCloud cloud;
    for (int i = 0; i < 200; ++i)
        cloud.points.push_back(
            {rng.uniform(-6.0, 6.0), rng.uniform(-6.0, 6.0), rng.uniform(0.0, 1.0)});

    const std::string path = (dir / "c.ply").string();
    write_ply(cloud, path);
    const PointCloud back = read_ply(path);
    REQUIRE(back.size() == cloud.size());
    for (int i = 0; i < cloud.size(); ++i) {
        CHECK(std::abs(back.points[i].x - cloud.points[i].x) <= 1e-6);
        CHECK(std::abs(back.points[i].y - cloud.points[i].y) <= 1e-6);
        CHECK(std::abs(back.points[i].z - cloud.points[i].z) <= 1e-6);
    }

    write_file(dir / "trunc.ply",
               "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\n"
               "property float z\nend_header\n1 2 3\n4 5\n");
    CHECK_THROWS_AS(read_ply((dir / "trunc.ply").string()), DataError);
    write_file(dir / "notply.ply", "solid nope\n");
    CHECK_THROWS_AS(read_ply((dir / "notply.ply").string()), DataError);
    CHECK_THROWS_AS(read_ply((dir / "absent.ply").string()), IoError);
}

TEST_CASE("stl files hold one 50-byte record per facet and round-trip") {
    const fs::path dir = fresh_dir("stl");
    const PatternLibrary& lib = io_library();
    const TriMesh mesh =
        pattern_to_mesh(lib.entries[0].pattern, lib.grid, lib.config.scale_mm,
                        lib.config.depth_mm);

    const std::string path = (dir / "m.stl").string();
    write_stl(mesh, path);
    CHECK(fs::file_size(path) == 84 + 50 * static_cast<std::uintmax_t>(mesh.face_count()));

    const TriMesh back = read_stl(path);
    REQUIRE(back.face_count() == mesh.face_count());
    for (int f = 0; f < mesh.face_count(); ++f) {
        for (int k = 0; k < 3; ++k) {
            const Vec3 a = mesh.vertices[mesh.faces[f][k]];
            const Vec3 b = back.vertices[back.faces[f][k]];
            CHECK(std::abs(a.x - b.x) <= 1e-6);
            CHECK(std::abs(a.y - b.y) <= 1e-6);
            CHECK(std::abs(a.z - b.z) <= 1e-6);
        }
    }
    CHECK(is_watertight(back));
    CHECK(mesh_volume(back) == doctest::Approx(mesh_volume(mesh)).epsilon(1e-5));

    CHECK_THROWS_AS(write_stl(TriMesh{}, (dir / "e.stl").string()), std::invalid_argument);
    TriMesh holed = mesh;
    holed.faces.pop_back();
    CHECK_THROWS_AS(write_stl(holed, (dir / "h.stl").string()), std::invalid_argument);

    std::string raw = read_file(path);
    raw.resize(raw.size() - 10);
    write_file(dir / "trunc.stl", raw);
    CHECK_THROWS_AS(read_stl((dir / "trunc.stl").string()), DataError);
    write_file(dir / "tiny.stl", "STL?");
    CHECK_THROWS_AS(read_stl((dir / "tiny.stl").string()), DataError);
}

TEST_CASE("saving and loading preserves the library structurally") {
    const fs::path dir = fresh_dir("roundtrip");
    const PatternLibrary& lib = io_library();
    save_library(lib, dir.string());

    const PatternLibrary back = load_library(dir.string());
    REQUIRE(back.size() == lib.size());
    CHECK(back.grid.id() == lib.grid.id());
    CHECK(back.config.divisions == lib.config.divisions);
    CHECK(back.config.alpha == lib.config.alpha);
    CHECK(back.config.pitch_mm == lib.config.pitch_mm);
    CHECK(back.config.voxel_mm == lib.config.voxel_mm);
    CHECK(back.config.seed == lib.config.seed);
    CHECK(back.config.schedule.max_iters == lib.config.schedule.max_iters);

    for (int i = 0; i < lib.size(); ++i) {
        const LibraryEntry& a = lib.entries[i];
        const LibraryEntry& b = back.entries[i];
        CHECK(b.label == a.label);
        CHECK(b.pattern.triangle_ids == a.pattern.triangle_ids);
        CHECK(b.mask == a.mask);
        for (int m = 0; m < 7; ++m) CHECK(b.hu.h[m] == a.hu.h[m]);
        REQUIRE(b.cloud.size() == a.cloud.size());
        for (int p = 0; p < a.cloud.size(); ++p) {
            CHECK(std::abs(b.cloud.points[p].x - a.cloud.points[p].x) <= 1e-6);
            CHECK(std::abs(b.cloud.points[p].y - a.cloud.points[p].y) <= 1e-6);
            CHECK(std::abs(b.cloud.points[p].z - a.cloud.points[p].z) <= 1e-6);
        }
        CHECK(b.dilated_mask == a.dilated_mask);
    }
    CHECK(back.dispersion() > back.config.alpha);

    // The manifest lists exactly one record per entry.
    nlohmann::json manifest;
    std::ifstream mf(dir / "manifest.json");
    mf >> manifest;
    CHECK(manifest.at("version").get<std::string>() == kManifestVersion);
    CHECK(manifest.at("entries").size() == static_cast<size_t>(lib.size()));
    for (const auto& je : manifest.at("entries"))
        CHECK(fs::exists(dir / je.at("mask").get<std::string>()));
}

TEST_CASE("strict loading rejects inconsistent manifests") {
    const PatternLibrary& lib = io_library();

    auto tampered = [&](const std::string& name, auto&& edit) {
        const fs::path dir = fresh_dir(name);
        save_library(lib, dir.string());
        nlohmann::json manifest;
        {
            std::ifstream f(dir / "manifest.json");
            f >> manifest;
        }
        edit(manifest);
        write_file(dir / "manifest.json", manifest.dump(2));
        return dir;
    };

    const fs::path dup = tampered("dup_label", [](nlohmann::json& m) {
        m["entries"][1]["label"] = m["entries"][0]["label"];
    });
    try {
        load_library(dup.string());
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("duplicate label") != std::string::npos);
    }

    const fs::path huedit = tampered("hu_edit", [](nlohmann::json& m) {
        m["entries"][0]["hu"][0] = m["entries"][0]["hu"][0].get<double>() + 1e-3;
    });
    CHECK_THROWS_AS(load_library(huedit.string()), DataError);
    // Lenient mode recomputes the signature instead of trusting the file.
    const PatternLibrary lenient = load_library(huedit.string(), false);
    CHECK(lenient.size() == lib.size());
    for (int m = 0; m < 7; ++m) CHECK(lenient.entries[0].hu.h[m] == lib.entries[0].hu.h[m]);

    const fs::path ver = tampered("version", [](nlohmann::json& m) {
        m["version"] = "tactag-library/9";
    });
    try {
        load_library(ver.string());
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("version") != std::string::npos);
    }

    const fs::path gridmix = tampered("grid_id", [](nlohmann::json& m) {
        m["grid_id"] = "stag9@1";
    });
    CHECK_THROWS_AS(load_library(gridmix.string()), DataError);

    // Two manifest rows pointing at the same pattern collapse the dispersion.
    const fs::path close = tampered("dispersion", [](nlohmann::json& m) {
        nlohmann::json copy = m["entries"][0];
        copy["label"] = "copycat";
        m["entries"].push_back(copy);
    });
    CHECK_THROWS_AS(load_library(close.string()), DataError);
    CHECK(load_library(close.string(), false).size() == lib.size() + 1);
}

TEST_CASE("loading reports missing pieces distinctly") {
    const PatternLibrary& lib = io_library();

    CHECK_THROWS_AS(load_library((fs::temp_directory_path() / "tactag_io_nowhere").string()),
                    DataError);

    const fs::path corrupt = fresh_dir("corrupt");
    write_file(corrupt / "manifest.json", "{ not json");
    CHECK_THROWS_AS(load_library(corrupt.string()), DataError);

    const fs::path missing = fresh_dir("missing_file");
    save_library(lib, missing.string());
    fs::remove(missing / "p0002_cloud.ply");
    try {
        load_library(missing.string());
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("missing or unreadable") != std::string::npos);
    }
}

TEST_CASE("write failures name the offending path") {
    const fs::path dir = fresh_dir("write_fail");
    write_file(dir / "blocker", "not a directory");
    CHECK_THROWS_AS(save_library(io_library(), (dir / "blocker" / "sub").string()), IoError);

    Mask m = make_mask(2, 2, 0.1);
    CHECK_THROWS_AS(write_pgm(m, (dir / "no_such_dir" / "m.pgm").string()), IoError);
    CHECK_THROWS_AS(write_ply(PointCloud{}, (dir / "no_such_dir" / "c.ply").string()), IoError);
}
