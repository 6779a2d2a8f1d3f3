#pragma once

// Result files. Floating-point values are written as shortest round-trip
// decimal strings (std::to_chars), so a reload reproduces every bit. Each file
// carries a manifest: code version, a hash of params and options, and the
// class/dimension, which cmd_verify checks before trusting the contents.

#include "bvp_solver.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "model.hpp"
#include "ode_system.hpp"

#include <json.hpp>

#include <array>
#include <charconv>
#include <cstring>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace cce {

inline constexpr const char* kCodeVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

using json = nlohmann::json;

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0;
    const char* b = s.data();
    const char* e = b + s.size();
    // from_chars rejects a leading '+' and spells infinities as "inf"
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e) throw Error(ErrorKind::Io, "malformed number '" + s + "'");
    return v;
}

namespace io {

inline json num(double v) { return format_double(v); }

inline double num(const json& j) {
    if (!j.is_string()) throw Error(ErrorKind::Io, "expected a decimal string");
    return parse_double(j.get<std::string>());
}

inline json nums(const std::vector<double>& v) {
    json a = json::array();
    for (double d : v) a.push_back(num(d));
    return a;
}

inline std::vector<double> nums(const json& j) {
    if (!j.is_array()) throw Error(ErrorKind::Io, "expected an array");
    std::vector<double> v;
    v.reserve(j.size());
    for (const auto& e : j) v.push_back(num(e));
    return v;
}

inline json rows(const Eigen::MatrixXd& M) {
    json a = json::array();
    for (int r = 0; r < M.rows(); ++r) {
        std::vector<double> row(M.cols());
        for (int c = 0; c < M.cols(); ++c) row[c] = M(r, c);
        a.push_back(nums(row));
    }
    return a;
}

inline Eigen::MatrixXd rows(const json& j, int expect_rows, int expect_cols) {
    if (!j.is_array() || int(j.size()) != expect_rows) throw Error(ErrorKind::Io, "matrix has the wrong row count");
    Eigen::MatrixXd M(expect_rows, expect_cols);
    for (int r = 0; r < expect_rows; ++r) {
        const std::vector<double> row = nums(j[r]);
        if (int(row.size()) != expect_cols) throw Error(ErrorKind::Io, "matrix has the wrong column count");
        for (int c = 0; c < expect_cols; ++c) M(r, c) = row[c];
    }
    return M;
}

template <class T>
T field(const json& j, const char* key) {
    if (!j.contains(key)) throw Error(ErrorKind::Io, std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, std::string("bad field '") + key + "': " + e.what());
    }
}

inline const json& sub(const json& j, const char* key) {
    if (!j.contains(key)) throw Error(ErrorKind::Io, std::string("missing field '") + key + "'");
    return j.at(key);
}

} // namespace io

// ------------------------------------------------------------------ params

inline json to_json(const ModelParams& p) {
    json j;
    j["k"] = p.k;
    j["n"] = p.n;
    j["lambda"] = io::nums(std::vector<double>(p.lambda.begin(), p.lambda.end()));
    j["class"] = to_string(p.symmetry);
    j["perm"] = {p.perm[0], p.perm[1], p.perm[2]};
    return j;
}

inline ModelParams params_from_json(const json& j) {
    ModelParams p;
    p.k = io::field<int>(j, "k");
    p.n = io::field<int>(j, "n");
    const auto l = io::nums(io::sub(j, "lambda"));
    if (l.size() != 4) throw Error(ErrorKind::Io, "lambda needs four entries");
    for (int i = 0; i < 4; ++i) p.lambda[i] = l[i];
    p.symmetry = symmetry_from_string(io::field<std::string>(j, "class"));
    const auto perm = io::field<std::vector<int>>(j, "perm");
    if (perm.size() != 3) throw Error(ErrorKind::Io, "perm needs three entries");
    for (int i = 0; i < 3; ++i) p.perm[i] = perm[i];
    if (p.n != dimension_from_k(p.k)) throw Error(ErrorKind::Io, "n does not match k");
    return p;
}

inline json to_json(const SolveOptions& o) {
    json j;
    j["tol"] = io::num(o.tol);
    j["max_iter"] = o.max_iter;
    j["armijo"] = io::num(o.armijo);
    j["max_halvings"] = o.max_halvings;
    j["mesh_size"] = o.mesh_size;
    j["grading"] = io::num(o.grading);
    j["stages"] = o.stages;
    j["series_trust"] = io::num(o.series_trust);
    j["polish"] = o.polish;
    return j;
}

inline SolveOptions options_from_json(const json& j) {
    SolveOptions o;
    o.tol = io::num(io::sub(j, "tol"));
    o.max_iter = io::field<int>(j, "max_iter");
    o.armijo = io::num(io::sub(j, "armijo"));
    o.max_halvings = io::field<int>(j, "max_halvings");
    o.mesh_size = io::field<int>(j, "mesh_size");
    o.grading = io::num(io::sub(j, "grading"));
    o.stages = io::field<int>(j, "stages");
    o.series_trust = io::num(io::sub(j, "series_trust"));
    o.polish = io::field<bool>(j, "polish");
    return o;
}

// ---------------------------------------------------------------- manifest

struct Manifest {
    std::string code_version = kCodeVersion;
    int schema = kSchemaVersion;
    std::string config_hash;
    std::string symmetry;
    int n = 0;
};

inline std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

// Hash of everything that determines the solve: params, options and the
// continuation step count.
inline std::string config_hash(const ModelParams& p, const SolveOptions& o, int steps) {
    json j;
    j["params"] = to_json(p);
    j["options"] = to_json(o);
    j["steps"] = steps;
    return fnv1a_hex(j.dump());
}

inline Manifest make_manifest(const ModelParams& p, const SolveOptions& o, int steps) {
    Manifest m;
    m.config_hash = config_hash(p, o, steps);
    m.symmetry = to_string(p.symmetry);
    m.n = p.n;
    return m;
}

inline json to_json(const Manifest& m) {
    return {{"code_version", m.code_version}, {"schema", m.schema}, {"config_hash", m.config_hash},
            {"class", m.symmetry}, {"n", m.n}};
}

inline Manifest manifest_from_json(const json& j) {
    Manifest m;
    m.code_version = io::field<std::string>(j, "code_version");
    m.schema = io::field<int>(j, "schema");
    m.config_hash = io::field<std::string>(j, "config_hash");
    m.symmetry = io::field<std::string>(j, "class");
    m.n = io::field<int>(j, "n");
    return m;
}

// ------------------------------------------------------------------ result

struct ResultFile {
    Manifest manifest;
    ModelParams params;
    SolveOptions options;
    int steps = 1;
    SolveResult result;
};

inline json to_json(const SolveResult& r) {
    const SolutionGrid& g = r.grid;
    json j;
    j["class"] = to_string(g.cls);
    j["n"] = g.n;
    j["stages"] = g.stages;
    j["nodes"] = io::nums(g.x);
    j["y"] = io::rows(g.y);
    j["dy"] = io::rows(g.dy);
    j["acc"] = io::rows(g.acc);
    // derived per-node fields, informational (recomputed on load)
    std::vector<double> K, t[3], I[4];
    for (const auto& f : g.fields) {
        K.push_back(f.K);
        for (int q = 0; q < 3; ++q) t[q].push_back(f.t[q]);
        for (int q = 0; q < 4; ++q) I[q].push_back(f.I[q]);
    }
    j["K"] = io::nums(K);
    j["t"] = {io::nums(t[0]), io::nums(t[1]), io::nums(t[2])};
    j["I"] = {io::nums(I[0]), io::nums(I[1]), io::nums(I[2]), io::nums(I[3])};
    j["K0"] = io::num(r.K0);
    j["residual_solved"] = io::num(r.residual_solved);
    j["residual_extra"] = io::nums(std::vector<double>{r.residual_extra[0], r.residual_extra[1]});
    j["endpoint_slope"] = io::nums(std::vector<double>{r.endpoint_slope[0], r.endpoint_slope[1]});
    j["iterations"] = r.iterations;
    j["history"] = io::nums(r.history);
    return j;
}

inline SolveResult result_from_json(const json& j) {
    SolveResult r;
    SolutionGrid& g = r.grid;
    g.cls = symmetry_from_string(io::field<std::string>(j, "class"));
    g.n = io::field<int>(j, "n");
    g.stages = io::field<int>(j, "stages");
    g.x = io::nums(io::sub(j, "nodes"));
    const int N = int(g.x.size()) - 1;
    if (N < 1) throw Error(ErrorKind::Io, "result needs at least two nodes");
    for (int i = 0; i < N; ++i)
        if (!(g.x[i] < g.x[i + 1])) throw Error(ErrorKind::Io, "nodes must increase");
    const int m = g.m();
    g.y = io::rows(io::sub(j, "y"), m, N + 1);
    g.dy = io::rows(io::sub(j, "dy"), m, N + 1);
    const json& acc = io::sub(j, "acc");
    const int acols = acc.empty() || acc[0].empty() ? 0 : N * g.stages;
    g.acc = acols ? io::rows(acc, m, acols) : Eigen::MatrixXd(m, 0);
    g.refresh_fields();
    r.K0 = io::num(io::sub(j, "K0"));
    r.residual_solved = io::num(io::sub(j, "residual_solved"));
    const auto re = io::nums(io::sub(j, "residual_extra"));
    const auto es = io::nums(io::sub(j, "endpoint_slope"));
    if (re.size() != 2 || es.size() != 2) throw Error(ErrorKind::Io, "residual pairs need two entries");
    r.residual_extra = {re[0], re[1]};
    r.endpoint_slope = {es[0], es[1]};
    r.iterations = io::field<int>(j, "iterations");
    r.history = io::nums(io::sub(j, "history"));
    return r;
}

inline json to_json(const ResultFile& f) {
    json j;
    j["manifest"] = to_json(f.manifest);
    j["params"] = to_json(f.params);
    j["options"] = to_json(f.options);
    j["steps"] = f.steps;
    j["result"] = to_json(f.result);
    return j;
}

inline ResultFile result_file_from_json(const json& j) {
    ResultFile f;
    f.manifest = manifest_from_json(io::sub(j, "manifest"));
    f.params = params_from_json(io::sub(j, "params"));
    f.options = options_from_json(io::sub(j, "options"));
    f.steps = io::field<int>(j, "steps");
    f.result = result_from_json(io::sub(j, "result"));
    if (f.result.grid.cls != f.params.symmetry || f.result.grid.n != f.params.n)
        throw Error(ErrorKind::Io, "result does not match its params");
    return f;
}

// Manifest consistent with the stored params and options.
inline bool manifest_matches(const ResultFile& f) {
    return f.manifest.schema == kSchemaVersion && f.manifest.code_version == kCodeVersion &&
           f.manifest.config_hash == config_hash(f.params, f.options, f.steps) &&
           f.manifest.symmetry == to_string(f.params.symmetry) && f.manifest.n == f.params.n;
}

inline void write_json(const std::string& path, const ResultFile& f) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
    os << to_json(f).dump(1) << '\n';
    if (!os) throw Error(ErrorKind::Io, "write failed for " + path);
}

inline ResultFile read_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorKind::Io, "cannot open " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, path + ": " + e.what());
    }
    return result_file_from_json(j);
}

// Bitwise equality of everything a result file stores.
inline bool bitwise_equal(const SolveResult& a, const SolveResult& b) {
    auto same = [](double u, double v) { return std::memcmp(&u, &v, sizeof u) == 0; };
    auto same_m = [&](const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
        if (A.rows() != B.rows() || A.cols() != B.cols()) return false;
        for (Eigen::Index i = 0; i < A.size(); ++i)
            if (!same(A.data()[i], B.data()[i])) return false;
        return true;
    };
    auto same_v = [&](const std::vector<double>& u, const std::vector<double>& v) {
        if (u.size() != v.size()) return false;
        for (std::size_t i = 0; i < u.size(); ++i)
            if (!same(u[i], v[i])) return false;
        return true;
    };
    const SolutionGrid &ga = a.grid, &gb = b.grid;
    if (ga.cls != gb.cls || ga.n != gb.n || ga.stages != gb.stages) return false;
    if (!same_v(ga.x, gb.x) || !same_m(ga.y, gb.y) || !same_m(ga.dy, gb.dy) || !same_m(ga.acc, gb.acc)) return false;
    if (ga.fields.size() != gb.fields.size()) return false;
    for (std::size_t i = 0; i < ga.fields.size(); ++i) {
        const DerivedFields &p = ga.fields[i], &q = gb.fields[i];
        if (!same(p.K, q.K) || !same(p.psi, q.psi) || !same(p.upsilon, q.upsilon)) return false;
        for (int c = 0; c < 3; ++c)
            if (!same(p.t[c], q.t[c])) return false;
        for (int c = 0; c < 4; ++c)
            if (!same(p.I[c], q.I[c])) return false;
    }
    return same(a.K0, b.K0) && same(a.residual_solved, b.residual_solved) &&
           same(a.residual_extra[0], b.residual_extra[0]) && same(a.residual_extra[1], b.residual_extra[1]) &&
           same(a.endpoint_slope[0], b.endpoint_slope[0]) && same(a.endpoint_slope[1], b.endpoint_slope[1]) &&
           a.iterations == b.iterations && same_v(a.history, b.history);
}

// --------------------------------------------------------------------- CSV

inline const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols{"x",   "y1",  "y2",  "y3",  "y4", "dy1", "dy2",
                                               "dy3", "dy4", "K",   "t1",  "t2", "t3",  "I1",
                                               "I2",  "I3",  "I4",  "res_extra_28", "res_extra_212"};
    return cols;
}

// Unused-equation residuals at node i (zero at the two endpoints, where the
// printed equations are singular).
inline std::array<double, 2> node_extra_residuals(const SolutionGrid& g, int i) {
    if (i <= 0 || i >= g.intervals()) return {0.0, 0.0};
    Vec4<double> y{}, dy{}, ddy{}, r{};
    for (int j = 0; j < g.m(); ++j) {
        y[j] = g.y(j, i);
        dy[j] = g.dy(j, i);
    }
    const Weights<double> W = printed_weights(g.x[i]);
    solved_residuals(g.cls, g.n, W, y, dy, ddy, r);
    for (int j = 0; j < g.m(); ++j) ddy[j] = -r[j];
    std::array<double, 2> e{};
    extra_residuals(g.cls, g.n, W, y, dy, ddy, e);
    return e;
}

inline void write_csv(std::ostream& os, const SolveResult& r) {
    const SolutionGrid& g = r.grid;
    const auto& cols = csv_columns();
    for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
    os << '\n';
    for (int i = 0; i <= g.intervals(); ++i) {
        Vec4<double> y{}, dy{};
        for (int j = 0; j < g.m(); ++j) {
            y[j] = g.y(j, i);
            dy[j] = g.dy(j, i);
        }
        y = expand_state(g.cls, y);
        dy = expand_state(g.cls, dy);
        const DerivedFields& f = g.fields[i];
        const auto e = node_extra_residuals(g, i);
        std::vector<double> row{g.x[i]};
        row.insert(row.end(), y.begin(), y.end());
        row.insert(row.end(), dy.begin(), dy.end());
        row.push_back(f.K);
        row.insert(row.end(), f.t.begin(), f.t.end());
        row.insert(row.end(), f.I.begin(), f.I.end());
        row.push_back(e[0]);
        row.push_back(e[1]);
        for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_double(row[c]);
        os << '\n';
    }
}

inline void write_csv(const std::string& path, const SolveResult& r) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
    write_csv(os, r);
    if (!os) throw Error(ErrorKind::Io, "write failed for " + path);
}

} // namespace cce
