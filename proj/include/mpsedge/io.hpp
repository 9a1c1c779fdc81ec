#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "canonical.hpp"
#include "cpmap.hpp"
#include "spinchain.hpp"

namespace mpsedge::io {

using json = nlohmann::json;

// ---------------------------------------------------------------- reading

namespace detail {

[[noreturn]] inline void schema(const std::string& ptr, const std::string& what)
{
    fail(ErrorKind::SchemaError, (ptr.empty() ? std::string("/") : ptr) + ": " + what);
}

inline const json& field(const json& j, const std::string& ptr, const char* key)
{
    if (!j.is_object()) schema(ptr, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) schema(ptr + "/" + key, "missing field");
    return *it;
}

inline int get_int(const json& j, const std::string& ptr, int lo = 0)
{
    if (!j.is_number_integer()) schema(ptr, "expected an integer");
    long long v = j.get<long long>();
    if (v < lo || v > (1LL << 30)) schema(ptr, "integer out of range");
    return static_cast<int>(v);
}

inline const json& get_array(const json& j, const std::string& ptr)
{
    if (!j.is_array()) schema(ptr, "expected an array");
    return j;
}

} // namespace detail

inline cplx parse_complex(const json& j, const std::string& ptr)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) detail::schema(ptr, "expected [re, im]");
    cplx z(j[0].get<double>(), j[1].get<double>());
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) detail::schema(ptr, "non-finite number");
    return z;
}

// rows and cols < 0 mean "any"
inline Mat parse_matrix(const json& j, const std::string& ptr, Eigen::Index rows = -1, Eigen::Index cols = -1)
{
    detail::get_array(j, ptr);
    if (j.empty()) detail::schema(ptr, "empty matrix");
    if (rows >= 0 && static_cast<Eigen::Index>(j.size()) != rows) detail::schema(ptr, "expected " + std::to_string(rows) + " rows");
    const json& first = detail::get_array(j[0], ptr + "/0");
    const Eigen::Index c = static_cast<Eigen::Index>(first.size());
    if (c == 0) detail::schema(ptr + "/0", "empty row");
    if (cols >= 0 && c != cols) detail::schema(ptr + "/0", "expected " + std::to_string(cols) + " columns");
    Mat m(static_cast<Eigen::Index>(j.size()), c);
    for (size_t i = 0; i < j.size(); ++i) {
        const std::string rp = ptr + "/" + std::to_string(i);
        const json& row = detail::get_array(j[i], rp);
        if (static_cast<Eigen::Index>(row.size()) != c) detail::schema(rp, "row length " + std::to_string(row.size()) + " differs from " + std::to_string(c));
        for (size_t k = 0; k < row.size(); ++k)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = parse_complex(row[k], rp + "/" + std::to_string(k));
    }
    return m;
}

inline MpsTuple parse_tuple(const json& j, const std::string& ptr = "")
{
    const int n = detail::get_int(detail::field(j, ptr, "n"), ptr + "/n", 2);
    const int d = detail::get_int(detail::field(j, ptr, "D"), ptr + "/D", 1);
    const std::string mp = ptr + "/matrices";
    const json& ms = detail::get_array(detail::field(j, ptr, "matrices"), mp);
    if (static_cast<int>(ms.size()) != n) detail::schema(mp, "expected " + std::to_string(n) + " matrices");
    std::vector<Mat> out;
    for (size_t i = 0; i < ms.size(); ++i) out.push_back(parse_matrix(ms[i], mp + "/" + std::to_string(i), d, d));
    return MpsTuple(std::move(out));
}

namespace detail {

inline std::vector<Mat> parse_matrix_list(const json& j, const std::string& ptr, size_t count, Eigen::Index dim)
{
    get_array(j, ptr);
    if (j.size() != count) schema(ptr, "expected " + std::to_string(count) + " entries");
    std::vector<Mat> out;
    for (size_t i = 0; i < j.size(); ++i) out.push_back(parse_matrix(j[i], ptr + "/" + std::to_string(i), dim, dim));
    return out;
}

} // namespace detail

// parsed data is checked and assembled, so λ or structure violations surface as library errors
inline ClassAData parse_classa(const json& j, const std::string& ptr = "")
{
    ClassAData d;
    d.n = detail::get_int(detail::field(j, ptr, "n"), ptr + "/n", 2);
    d.n0 = detail::get_int(detail::field(j, ptr, "n0"), ptr + "/n0", 1);
    d.kR = detail::get_int(detail::field(j, ptr, "kR"), ptr + "/kR", 0);
    d.kL = detail::get_int(detail::field(j, ptr, "kL"), ptr + "/kL", 0);
    const int K = d.K();
    const json& lam = detail::get_array(detail::field(j, ptr, "lambda"), ptr + "/lambda");
    if (static_cast<int>(lam.size()) != K) detail::schema(ptr + "/lambda", "expected " + std::to_string(K) + " values");
    for (size_t i = 0; i < lam.size(); ++i) d.lambda.push_back(parse_complex(lam[i], ptr + "/lambda/" + std::to_string(i)));
    d.D = detail::parse_matrix_list(detail::field(j, ptr, "D"), ptr + "/D", static_cast<size_t>(d.kR), K);
    d.G = detail::parse_matrix_list(detail::field(j, ptr, "G"), ptr + "/G", static_cast<size_t>(d.kL), K);
    d.Y = parse_matrix(detail::field(j, ptr, "Y"), ptr + "/Y", K, K);
    d.omega = parse_tuple(detail::field(j, ptr, "omega"), ptr + "/omega");
    if (d.omega.n() != d.n || d.omega.D() != d.n0) detail::schema(ptr + "/omega", "omega must have n matrices of size n0");
    for (const char* key : {"xR", "xL"}) {
        const std::string xp = ptr + "/" + key;
        const json& x = detail::get_array(detail::field(j, ptr, key), xp);
        if (static_cast<int>(x.size()) != d.n) detail::schema(xp, "expected one entry per physical index");
        std::vector<std::vector<Mat>> out;
        const size_t cnt = static_cast<size_t>(key[1] == 'R' ? d.kR : d.kL);
        for (size_t mu = 0; mu < x.size(); ++mu) out.push_back(detail::parse_matrix_list(x[mu], xp + "/" + std::to_string(mu), cnt, d.n0));
        (key[1] == 'R' ? d.xR : d.xL) = std::move(out);
    }
    if (j.contains("l0")) d.l0 = detail::get_int(j["l0"], ptr + "/l0", 0);
    return assemble_classa(d);
}

inline Interaction parse_interaction(const json& j, const std::string& ptr = "")
{
    Interaction h;
    h.n = detail::get_int(detail::field(j, ptr, "n"), ptr + "/n", 2);
    h.m = detail::get_int(detail::field(j, ptr, "m"), ptr + "/m", 1);
    const long long dim = checked_pow(h.n, h.m, max_chain_dim);
    h.h = parse_matrix(detail::field(j, ptr, "h"), ptr + "/h", dim, dim);
    check_interaction(h);
    return h;
}

inline json read_json(const std::string& path)
{
    std::ifstream in(path);
    require(in.good(), ErrorKind::IoError, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::SchemaError, path + ": " + e.what());
    }
}

inline MpsTuple load_tuple(const std::string& path) { return parse_tuple(read_json(path)); }
inline ClassAData load_classa(const std::string& path) { return parse_classa(read_json(path)); }
inline Interaction load_interaction(const std::string& path) { return parse_interaction(read_json(path)); }

// ---------------------------------------------------------------- writing

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const Mat& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json to_json(const MpsTuple& v)
{
    json ms = json::array();
    for (int mu = 0; mu < v.n(); ++mu) ms.push_back(to_json(v[mu]));
    return {{"n", v.n()}, {"D", v.D()}, {"matrices", ms}};
}

inline json to_json(const ClassAData& d)
{
    json lam = json::array(), dd = json::array(), gg = json::array(), xr = json::array(), xl = json::array();
    for (cplx z : d.lambda) lam.push_back(to_json(z));
    for (const auto& m : d.D) dd.push_back(to_json(m));
    for (const auto& m : d.G) gg.push_back(to_json(m));
    for (const auto& per : d.xR) {
        json a = json::array();
        for (const auto& m : per) a.push_back(to_json(m));
        xr.push_back(std::move(a));
    }
    for (const auto& per : d.xL) {
        json a = json::array();
        for (const auto& m : per) a.push_back(to_json(m));
        xl.push_back(std::move(a));
    }
    return {{"n", d.n}, {"n0", d.n0}, {"kR", d.kR}, {"kL", d.kL}, {"lambda", lam}, {"D", dd}, {"G", gg},
            {"Y", to_json(d.Y)}, {"omega", to_json(d.omega)}, {"xR", xr}, {"xL", xl}, {"l0", d.l0}};
}

inline json to_json(const Interaction& h) { return {{"n", h.n}, {"m", h.m}, {"h", to_json(h.h)}}; }

inline json to_json(const TransferSpectrum& s)
{
    json per = json::array(), ev = json::array();
    for (Eigen::Index i = 0; i < s.peripheral.size(); ++i) per.push_back(to_json(s.peripheral(i)));
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) ev.push_back(to_json(s.eigenvalues(i)));
    return {{"radius", s.radius},
            {"peripheral", per},
            {"period", s.period},
            {"eigenvalues", ev},
            {"support_rank", s.support_rank},
            {"flags", {{"reducible", s.reducible}, {"irreducible", s.irreducible}, {"primitive", s.primitive}}}};
}

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorKind::IoError, "cannot write " + path);
    out << text;
    require(out.good(), ErrorKind::IoError, "write failed for " + path);
}

inline void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// 17 significant digits, enough to round-trip a double
inline std::string fmt17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row)
    {
        require(row.size() == header.size(), ErrorKind::DimensionMismatch, "CSV row width");
        rows.push_back(std::move(row));
    }

    std::string str() const
    {
        std::ostringstream os;
        for (size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
        os << "\n";
        for (const auto& r : rows) {
            for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
            os << "\n";
        }
        return os.str();
    }

    json to_json() const
    {
        json arr = json::array();
        for (const auto& r : rows) {
            json o = json::object();
            for (size_t i = 0; i < r.size(); ++i) o[header[i]] = r[i];
            arr.push_back(std::move(o));
        }
        return arr;
    }
};

inline CsvTable ltqo_table(const LtqoScan& s)
{
    CsvTable t{{"N", "observable_id", "value", "error", "fit_C1", "fit_s1"}, {}};
    for (const auto& r : s.rows)
        t.add({std::to_string(r.N), std::to_string(r.observable), fmt17(r.value), fmt17(r.error), fmt17(s.C1), fmt17(s.s1)});
    return t;
}

inline CsvTable interp_table(const InterpolationReport& rep)
{
    CsvTable t{{"t", "N", "kernel_dim", "lambda_min_nonzero", "lambda_max"}, {}};
    for (const auto& c : rep.cells)
        t.add({fmt17(c.t), std::to_string(c.N), std::to_string(c.kernel_dim), fmt17(c.lambda_min_nonzero), fmt17(c.lambda_max)});
    return t;
}

inline CsvTable spectrum_table(const std::vector<ChainSpectrum>& specs)
{
    CsvTable t{{"N", "index", "eigenvalue"}, {}};
    for (const auto& s : specs)
        for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) t.add({std::to_string(s.N), std::to_string(i), fmt17(s.eigenvalues(i))});
    return t;
}

} // namespace mpsedge::io
