#include "subpix/dataset.hpp"

#include "subpix/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <unistd.h>

using namespace subpix;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("subpix-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

} // namespace

TEST_CASE("parse_pts minimal file") {
    const auto l = parse_pts("version: 1\nn_points: 2\n{\n1.5 2.5\n3 4\n}\n");
    REQUIRE(l.size() == 2);
    CHECK(l.points[0].x == 1.5);
    CHECK(l.points[0].y == 2.5);
    CHECK(l.points[1].x == 3.0);
    CHECK(l.visible(0));
    CHECK(l.visible(1));
}

TEST_CASE("parse_pts tolerates CRLF") {
    const auto lf = parse_pts("version: 1\nn_points: 2\n{\n1.5 2.5\n3 4\n}\n");
    const auto crlf = parse_pts("version: 1\r\nn_points: 2\r\n{\r\n1.5 2.5\r\n3 4\r\n}\r\n");
    CHECK(lf.points[0].x == crlf.points[0].x);
    CHECK(lf.points[1].y == crlf.points[1].y);
}

TEST_CASE("parse_pts diagnostics") {
    using doctest::Contains;
    CHECK_THROWS_WITH_AS(parse_pts("n_points: 2\n{\n1 2\n3 4\n}\n"), Contains("version"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(parse_pts("version: 1\n{\n1 2\n}\n"), Contains("n_points"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(parse_pts("version: 1\nn_points: zero\n{\n}\n"), Contains("n_points"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(parse_pts("version: 1\nn_points: 2\n1 2\n3 4\n}\n"), Contains("'{'"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(parse_pts("version: 1\nn_points: 2\n{\n1 2\n}\n"), Contains("mismatch"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(parse_pts("version: 1\nn_points: 1\n{\n1 abc\n}\n"),
                         Contains("non-numeric"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_pts("version: 1\nn_points: 1\n{\n1 2\n"), Contains("'}'"),
                         ValidationError);
}

TEST_CASE("manifest load and validation") {
    TempDir tmp;
    const auto path = tmp.file("m.json");

    write_file(path, "[]");
    CHECK(load_manifest(path).records.empty());

    write_file(path, R"([{"id":"a","points":[[1.5,2.5],[3,4]]},
                        {"id":"b","points":[[5,6],[7,8]],"bbox":[0,0,10,12],
                         "visibility":[true,false],"ic_indices":[0,1]}])");
    const auto m = load_manifest(path);
    REQUIRE(m.records.size() == 2);
    CHECK(m.records[0].id == "a");
    CHECK(m.records[0].landmarks.points[0].x == 1.5);
    CHECK(m.records[1].landmarks.visibility[1] == 0);
    REQUIRE(m.records[1].bbox.has_value());
    CHECK(m.records[1].bbox->width == 10.0);
    REQUIRE(m.records[1].ic_indices.has_value());
    CHECK(m.records[1].ic_indices->second == 1);

    using doctest::Contains;
    write_file(path, R"([{"id":"dup","points":[[1,2]]},{"id":"dup","points":[[3,4]]}])");
    CHECK_THROWS_WITH_AS(load_manifest(path), Contains("dup"), ValidationError);

    write_file(path, R"([{"id":"a","points":[[1,2]]},{"id":"b","points":[[1,2],[3,4]]}])");
    CHECK_THROWS_AS(load_manifest(path), ValidationError);

    write_file(path, "{not json");
    CHECK_THROWS_AS(load_manifest(path), ValidationError);

    CHECK_THROWS_AS(load_manifest(tmp.file("missing.json")), IoError);
}

TEST_CASE("manifest save/load roundtrip") {
    TempDir tmp;
    DatasetManifest m;
    ManifestRecord rec;
    rec.id = "r0";
    rec.landmarks = LandmarkSet::all_visible({{1.25, 2.5}, {3.0625, 4.75}});
    rec.bbox = BBox{0.5, 1.5, 20.25, 30.75};
    rec.ic_indices = {0, 1};
    m.records.push_back(rec);
    rec.id = "r1";
    rec.landmarks.visibility[1] = 0;
    rec.bbox.reset();
    rec.ic_indices.reset();
    m.records.push_back(rec);

    const auto path = tmp.file("saved.json");
    save_manifest(m, path);
    const auto back = load_manifest(path);
    REQUIRE(back.records.size() == 2);
    CHECK(back.records[0].landmarks.points[1].x == 3.0625);
    CHECK(back.records[0].bbox->height == 30.75);
    CHECK(back.records[1].landmarks.visibility[1] == 0);
    CHECK_FALSE(back.records[1].bbox.has_value());
}

TEST_CASE("pts directory loading") {
    TempDir tmp;
    write_file(tmp.file("b.pts"), "version: 1\nn_points: 1\n{\n10 20\n}\n");
    write_file(tmp.file("a.pts"), "version: 1\nn_points: 1\n{\n1 2\n}\n");
    write_file(tmp.file("ignored.txt"), "not a pts file");
    const auto m = load_pts_dir(tmp.path.string());
    REQUIRE(m.records.size() == 2);
    CHECK(m.records[0].id == "a");
    CHECK(m.records[1].id == "b");
    CHECK(m.records[1].landmarks.points[0].x == 10.0);

    CHECK_THROWS_AS(load_pts_dir(tmp.file("nope")), IoError);
    TempDir empty;
    CHECK_THROWS_AS(load_pts_dir(empty.path.string()), ValidationError);
}

TEST_CASE("synthetic generation is deterministic") {
    const GridSpec grid{64, 64, 4.0};
    const auto a = gen_synthetic(123, 50, 3, grid);
    const auto b = gen_synthetic(123, 50, 3, grid);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].id == b.records[i].id);
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(a.records[i].landmarks.points[k].x == b.records[i].landmarks.points[k].x);
            CHECK(a.records[i].landmarks.points[k].y == b.records[i].landmarks.points[k].y);
        }
    }
    const auto c = gen_synthetic(124, 50, 3, grid);
    CHECK(a.records[0].landmarks.points[0].x != c.records[0].landmarks.points[0].x);
}

TEST_CASE("synthetic landmarks respect the border margin") {
    const GridSpec grid{64, 64, 4.0};
    const auto m = gen_synthetic(7, 1000, 68, grid, 3.0);
    REQUIRE(m.records.size() == 1000);
    const double margin = 3.0 * 3.0 * 4.0;
    for (const auto& rec : m.records) {
        REQUIRE(rec.landmarks.size() == 68);
        REQUIRE(rec.bbox.has_value());
        CHECK(rec.bbox->x_min == margin);
        for (const auto& p : rec.landmarks.points) {
            CHECK(p.x >= margin);
            CHECK(p.x <= 256.0 - margin);
            CHECK(p.y >= margin);
            CHECK(p.y <= 256.0 - margin);
        }
    }
    validate_manifest(m);
}

TEST_CASE("synthetic fractional parts are uniform (KS test)") {
    const GridSpec grid{64, 64, 4.0};
    const int n = 10000;
    const auto m = gen_synthetic(20240811, n, 1, grid, 3.0);
    for (int axis = 0; axis < 2; ++axis) {
        std::vector<double> fracs(n);
        for (int i = 0; i < n; ++i) {
            const auto& p = m.records[i].landmarks.points[0];
            const double v = axis == 0 ? p.x : p.y;
            fracs[i] = v - std::floor(v);
        }
        std::sort(fracs.begin(), fracs.end());
        double d = 0.0;
        for (int i = 0; i < n; ++i) {
            d = std::max(d, std::abs((i + 1.0) / n - fracs[i]));
            d = std::max(d, std::abs(fracs[i] - static_cast<double>(i) / n));
        }
        // critical value at alpha = 0.01: 1.6276 / sqrt(n)
        CHECK(d < 1.6276 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("synthetic rejects impossible configurations") {
    const GridSpec grid{64, 64, 4.0};
    CHECK_THROWS_AS(gen_synthetic(1, 0, 1, grid), ValidationError);
    CHECK_THROWS_AS(gen_synthetic(1, 1, 0, grid), ValidationError);
    CHECK_THROWS_AS(gen_synthetic(1, 1, 1, grid, 20.0), ValidationError); // margin too wide
}
