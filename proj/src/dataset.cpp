#include "subpix/dataset.hpp"

#include "subpix/encoder.hpp"
#include "subpix/errors.hpp"
#include "subpix/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace subpix {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> nonempty_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (!line.empty()) {
            lines.push_back(line);
        }
    }
    return lines;
}

} // namespace

void validate_manifest(const DatasetManifest& m) {
    std::unordered_set<std::string> ids;
    std::size_t k = 0;
    for (const auto& rec : m.records) {
        if (rec.id.empty()) {
            throw ValidationError("manifest: record with empty id");
        }
        if (!ids.insert(rec.id).second) {
            throw ValidationError("manifest: duplicate id '" + rec.id + "'");
        }
        validate_landmarks(rec.landmarks);
        if (k == 0) {
            k = rec.landmarks.size();
        } else if (rec.landmarks.size() != k) {
            throw ValidationError("manifest: record '" + rec.id + "' has " +
                                  std::to_string(rec.landmarks.size()) + " points, expected " +
                                  std::to_string(k));
        }
    }
}

LandmarkSet parse_pts(const std::string& text) {
    const auto lines = nonempty_lines(text);
    std::size_t i = 0;
    if (i >= lines.size() || lines[i].rfind("version:", 0) != 0) {
        throw ValidationError("pts: malformed header: expected 'version:' line");
    }
    ++i;
    if (i >= lines.size() || lines[i].rfind("n_points:", 0) != 0) {
        throw ValidationError("pts: malformed header: expected 'n_points:' line");
    }
    const std::string count_str = trim(lines[i].substr(std::string("n_points:").size()));
    int n_points = 0;
    const auto [ptr, ec] =
        std::from_chars(count_str.data(), count_str.data() + count_str.size(), n_points);
    if (ec != std::errc{} || ptr != count_str.data() + count_str.size() || n_points < 1) {
        throw ValidationError("pts: malformed header: invalid n_points value '" + count_str + "'");
    }
    ++i;
    if (i >= lines.size() || lines[i] != "{") {
        throw ValidationError("pts: malformed header: expected '{'");
    }
    ++i;

    std::vector<Point2> pts;
    pts.reserve(n_points);
    for (; i < lines.size() && lines[i] != "}"; ++i) {
        std::istringstream ls(lines[i]);
        double x = 0.0, y = 0.0;
        if (!(ls >> x >> y)) {
            throw ValidationError("pts: non-numeric point data: '" + lines[i] + "'");
        }
        std::string extra;
        if (ls >> extra) {
            throw ValidationError("pts: non-numeric point data: '" + lines[i] + "'");
        }
        pts.push_back({x, y});
    }
    if (i >= lines.size()) {
        throw ValidationError("pts: missing closing '}'");
    }
    if (static_cast<int>(pts.size()) != n_points) {
        throw ValidationError("pts: point count mismatch: expected " + std::to_string(n_points) +
                              ", found " + std::to_string(pts.size()));
    }
    return LandmarkSet::all_visible(std::move(pts));
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open manifest '" + path + "'");
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("manifest: parse error in '" + path + "': " + e.what());
    }
    if (!doc.is_array()) {
        throw ValidationError("manifest: top-level value must be an array");
    }

    DatasetManifest m;
    m.records.reserve(doc.size());
    for (std::size_t r = 0; r < doc.size(); ++r) {
        const auto& j = doc[r];
        const std::string where = "manifest: record " + std::to_string(r);
        if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
            throw ValidationError(where + ": missing string field 'id'");
        }
        ManifestRecord rec;
        rec.id = j["id"].get<std::string>();
        if (!j.contains("points") || !j["points"].is_array() || j["points"].empty()) {
            throw ValidationError(where + " ('" + rec.id + "'): missing 'points' array");
        }
        for (const auto& p : j["points"]) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
                throw ValidationError(where + " ('" + rec.id + "'): points must be [x, y] pairs");
            }
            rec.landmarks.points.push_back({p[0].get<double>(), p[1].get<double>()});
        }
        if (j.contains("visibility")) {
            if (!j["visibility"].is_array() || j["visibility"].size() != rec.landmarks.points.size()) {
                throw ValidationError(where + " ('" + rec.id + "'): visibility length mismatch");
            }
            for (const auto& v : j["visibility"]) {
                if (!v.is_boolean()) {
                    throw ValidationError(where + " ('" + rec.id + "'): visibility must be booleans");
                }
                rec.landmarks.visibility.push_back(v.get<bool>() ? 1 : 0);
            }
        } else {
            rec.landmarks.visibility.assign(rec.landmarks.points.size(), 1);
        }
        if (j.contains("bbox")) {
            const auto& b = j["bbox"];
            if (!b.is_array() || b.size() != 4) {
                throw ValidationError(where + " ('" + rec.id + "'): bbox must be [x, y, w, h]");
            }
            rec.bbox = BBox{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                            b[3].get<double>()};
        }
        if (j.contains("ic_indices")) {
            const auto& ic = j["ic_indices"];
            if (!ic.is_array() || ic.size() != 2) {
                throw ValidationError(where + " ('" + rec.id + "'): ic_indices must be [i, j]");
            }
            rec.ic_indices = std::make_pair(ic[0].get<int>(), ic[1].get<int>());
        }
        m.records.push_back(std::move(rec));
    }
    validate_manifest(m);
    return m;
}

void save_manifest(const DatasetManifest& m, const std::string& path) {
    validate_manifest(m);
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& rec : m.records) {
        nlohmann::json j;
        j["id"] = rec.id;
        auto pts = nlohmann::json::array();
        for (const auto& p : rec.landmarks.points) {
            pts.push_back({p.x, p.y});
        }
        j["points"] = std::move(pts);
        const bool all_visible = std::all_of(rec.landmarks.visibility.begin(),
                                             rec.landmarks.visibility.end(),
                                             [](std::uint8_t v) { return v != 0; });
        if (!all_visible) {
            auto vis = nlohmann::json::array();
            for (auto v : rec.landmarks.visibility) {
                vis.push_back(v != 0);
            }
            j["visibility"] = std::move(vis);
        }
        if (rec.bbox) {
            j["bbox"] = {rec.bbox->x_min, rec.bbox->y_min, rec.bbox->width, rec.bbox->height};
        }
        if (rec.ic_indices) {
            j["ic_indices"] = {rec.ic_indices->first, rec.ic_indices->second};
        }
        doc.push_back(std::move(j));
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write manifest '" + path + "'");
    }
    out << doc.dump(2) << '\n';
    if (!out) {
        throw IoError("write failed for manifest '" + path + "'");
    }
}

DatasetManifest load_pts_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) {
        throw IoError("'" + dir + "' is not a directory");
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pts") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw ValidationError("no .pts files under '" + dir + "'");
    }
    DatasetManifest m;
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) {
            throw IoError("cannot open '" + f.string() + "'");
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        ManifestRecord rec;
        rec.id = f.stem().string();
        try {
            rec.landmarks = parse_pts(buf.str());
        } catch (const ValidationError& e) {
            throw ValidationError(f.string() + ": " + e.what());
        }
        m.records.push_back(std::move(rec));
    }
    validate_manifest(m);
    return m;
}

DatasetManifest gen_synthetic(std::uint64_t seed, int n, int k, const GridSpec& grid,
                              double sigma_max) {
    validate_grid(grid);
    if (n < 1 || k < 1) {
        throw ValidationError("synthetic: need n >= 1 and k >= 1");
    }
    if (!(sigma_max > 0.0)) {
        throw ValidationError("synthetic: sigma_max must be positive");
    }
    const double margin = 3.0 * sigma_max * grid.scale_s;
    const double w_in = grid.width_hm * grid.scale_s;
    const double h_in = grid.height_hm * grid.scale_s;
    if (margin * 2.0 >= w_in || margin * 2.0 >= h_in) {
        throw ValidationError("synthetic: margin leaves no interior region");
    }
    const BBox region{margin, margin, w_in - 2.0 * margin, h_in - 2.0 * margin};

    DatasetManifest m;
    m.records.reserve(n);
    char id[32];
    for (int i = 0; i < n; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        ManifestRecord rec;
        std::snprintf(id, sizeof id, "synth-%06d", i);
        rec.id = id;
        rec.landmarks.points.reserve(k);
        for (int j = 0; j < k; ++j) {
            const double x = rng.next_range(region.x_min, region.x_min + region.width);
            const double y = rng.next_range(region.y_min, region.y_min + region.height);
            rec.landmarks.points.push_back({x, y});
        }
        rec.landmarks.visibility.assign(k, 1);
        rec.bbox = region;
        m.records.push_back(std::move(rec));
    }
    return m;
}

} // namespace subpix
