#pragma once

#include "subpix/geometry.hpp"
#include "subpix/heatmap.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace subpix {

struct ManifestRecord {
    std::string id;
    LandmarkSet landmarks; // input-image coordinates
    std::optional<BBox> bbox;
    std::optional<std::pair<int, int>> ic_indices;
};

/// Ground-truth annotations: unique ids, identical K across records.
struct DatasetManifest {
    std::vector<ManifestRecord> records;
};

void validate_manifest(const DatasetManifest& m);

/// 300W-style annotation text:
///   version: 1
///   n_points: K
///   {
///   <x y> (K lines)
///   }
/// Tolerates CRLF line endings and trailing whitespace. All points visible.
LandmarkSet parse_pts(const std::string& text);

/// JSON array of {id, points: [[x,y],...], visibility?: [bool,...],
/// bbox?: [x,y,w,h], ic_indices?: [i,j]}.
DatasetManifest load_manifest(const std::string& path);
void save_manifest(const DatasetManifest& m, const std::string& path);

/// Loads every .pts file under `dir` (sorted by filename; ids are the
/// filenames without extension).
DatasetManifest load_pts_dir(const std::string& dir);

/// n records of K landmarks uniformly distributed over the interior of the
/// input image, keeping a margin of 3*sigma_max*scale_s from every border so
/// encoded Gaussians up to sigma_max stay clear of the heatmap edges.
/// Coordinates are continuous sub-pixel values; records carry the sampling
/// rectangle as their bbox. Fully deterministic per seed.
DatasetManifest gen_synthetic(std::uint64_t seed, int n, int k, const GridSpec& grid,
                              double sigma_max = 3.0);

} // namespace subpix
