#include "cce/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace cce;

namespace {

std::string temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "cce_test_io";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

ResultFile sample_file() {
    const ModelParams p = make_params(1, {1.1, 1.05, 0.95, 1});
    SolveOptions o;
    o.mesh_size = 60;
    return {make_manifest(p, o, 4), p, o, 4, continuation_solve(boundary_data(p), 4, p, o).final_result()};
}

} // namespace

TEST(Io, DoubleRoundTrip) {
    for (double v : {0.1, 1.0 / 3, -2.5e-300, 6.02214076e23, std::numeric_limits<double>::denorm_min(), 0.0, -0.0}) {
        const double back = parse_double(format_double(v));
        EXPECT_EQ(std::memcmp(&v, &back, sizeof v), 0) << format_double(v);
    }
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_THROW(parse_double("1.5x"), Error);
    EXPECT_THROW(parse_double(""), Error);
}

TEST(Io, ParamsAndOptionsRoundTrip) {
    const ModelParams p = make_params(2, {0.95, 1.1, 0.95, 1});
    const ModelParams q = params_from_json(to_json(p));
    EXPECT_EQ(q.k, 2);
    EXPECT_EQ(q.n, 11);
    EXPECT_EQ(q.symmetry, p.symmetry);
    EXPECT_EQ(q.perm, p.perm);
    EXPECT_EQ(q.lambda, p.lambda);
    SolveOptions o;
    o.tol = 3e-11;
    o.mesh_size = 123;
    o.grading = 1.5;
    const SolveOptions r = options_from_json(to_json(o));
    EXPECT_EQ(r.tol, o.tol);
    EXPECT_EQ(r.mesh_size, 123);
    EXPECT_EQ(r.grading, 1.5);
}

TEST(Io, ManifestHashTracksConfig) {
    const ModelParams p = make_params(1, {1.1, 1.05, 0.95, 1});
    SolveOptions o;
    const std::string h = config_hash(p, o, 4);
    EXPECT_EQ(h.size(), 16u);
    EXPECT_EQ(h, config_hash(p, o, 4));
    EXPECT_NE(h, config_hash(p, o, 5));
    o.mesh_size = 401;
    EXPECT_NE(h, config_hash(p, o, 4));
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Io, JsonRoundTripIsBitwise) {
    const ResultFile f = sample_file();
    const std::string path = temp_path("r.json");
    write_json(path, f);
    const ResultFile g = read_json(path);
    EXPECT_TRUE(bitwise_equal(f.result, g.result));
    EXPECT_TRUE(manifest_matches(g));
    EXPECT_EQ(g.steps, 4);
    // second generation writes identical bytes
    const std::string path2 = temp_path("r2.json");
    write_json(path2, g);
    std::ifstream a(path), b(path2);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    EXPECT_EQ(sa.str(), sb.str());
}

TEST(Io, ManifestMismatchDetected) {
    ResultFile f = sample_file();
    f.options.tol = 1e-9;
    EXPECT_FALSE(manifest_matches(f));
    ResultFile g = sample_file();
    g.manifest.schema = 99;
    EXPECT_FALSE(manifest_matches(g));
}

TEST(Io, ReadErrors) {
    EXPECT_THROW(read_json(temp_path("does_not_exist.json")), Error);
    const std::string bad = temp_path("bad.json");
    std::ofstream(bad) << "{ not json";
    try {
        read_json(bad);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
    const std::string missing = temp_path("missing.json");
    std::ofstream(missing) << "{\"manifest\": {}}";
    EXPECT_THROW(read_json(missing), Error);
}

TEST(Io, CsvColumnsStable) {
    const std::vector<std::string> expect{"x",  "y1",  "y2",  "y3",  "y4",  "dy1", "dy2",          "dy3",
                                          "dy4", "K",  "t1",  "t2",  "t3",  "I1",  "I2",           "I3",
                                          "I4", "res_extra_28", "res_extra_212"};
    EXPECT_EQ(csv_columns(), expect);
    const ResultFile f = sample_file();
    std::ostringstream os;
    write_csv(os, f.result);
    std::istringstream is(os.str());
    std::string header, line;
    std::getline(is, header);
    std::string joined;
    for (std::size_t i = 0; i < expect.size(); ++i) joined += (i ? "," : "") + expect[i];
    EXPECT_EQ(header, joined);
    int rows = 0;
    while (std::getline(is, line))
        if (!line.empty()) {
            ++rows;
            EXPECT_EQ(std::count(line.begin(), line.end(), ','), int(expect.size()) - 1);
        }
    EXPECT_EQ(rows, f.result.grid.intervals() + 1);
}

TEST(Io, CsvLiftsReducedClass) {
    const ModelParams p = make_params(1, {0.95, 0.95, 0.95, 1});
    SolveOptions o;
    o.mesh_size = 40;
    const SolveResult r = continuation_solve(boundary_data(p), 2, p, o).final_result();
    std::ostringstream os;
    write_csv(os, r);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    std::getline(is, line);
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    ASSERT_EQ(cells.size(), 19u);
    EXPECT_EQ(cells[2], cells[3]);
    EXPECT_EQ(cells[3], cells[4]);
}
