#ifndef TACTAG_IO_HPP
#define TACTAG_IO_HPP

#include <string>

#include "tactag/library.hpp"
#include "tactag/mask.hpp"
#include "tactag/mesh.hpp"

namespace tactag {

inline constexpr const char* kManifestVersion = "tactag-library/1";

// 8-bit binary PGM (P5), set pixels white. A "# pitch_mm <v>" comment records
// the physical pitch. Row 0 of the mask is the bottom image row.
void write_pgm(const Mask& mask, const std::string& path);

// PGM (P2/P5) thresholded at 128, or PBM (P1/P4). Pitch comes from the
// pitch_mm comment when present, else fallback_pitch_mm.
Mask read_mask(const std::string& path, double fallback_pitch_mm);

// ASCII PLY 1.0, float x y z in mm.
void write_ply(const PointCloud& cloud, const std::string& path);
PointCloud read_ply(const std::string& path);

// Binary STL: 80-byte header, uint32 count, 50-byte facet records, normals
// from winding order. Requires a watertight, nonempty mesh.
void write_stl(const TriMesh& mesh, const std::string& path);
TriMesh read_stl(const std::string& path);

// Manifest (JSON) plus per-entry p{index:04} mask/cloud/STL files.
void save_library(const PatternLibrary& library, const std::string& dir);

// Rebuilds the library from a saved directory. Strict mode recomputes Hu
// signatures (1e-9 agreement required) and re-verifies the dispersion
// invariant; DataError categories distinguish missing files, version
// mismatch, duplicate labels, corrupt values, and dispersion violations.
PatternLibrary load_library(const std::string& dir, bool strict = true);

}  // namespace tactag

#endif
