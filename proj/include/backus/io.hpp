#pragma once
// File formats:
//  - coefficient JSON: {"kind":"axisym","L":L,"coeffs":[...]} with L+1 real
//    entries; {"kind":"general","L":L,"coeffs":[[re,im],...]} with (L+1)^2
//    entries ordered by l ascending, m from -l to l; {"kind":"equator",
//    "M":M,"coeffs":[[re,im],...]} with 2M+1 entries, m from -M to M.
//  - sample CSV: header "theta,value", one sample per line, 17 significant
//    digits on output.
//  - field CSV: header "r,theta,u,u_r,u_theta,intensity".
// All readers validate structure and throw input_error on malformed data.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/interpolators/barycentric_rational.hpp>

#include "json.hpp"

#include "backus/coeffs.hpp"

namespace backus::io {

using nlohmann::json;

inline std::string format_g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw input_error("invalid JSON in " + path + ": " + e.what());
    }
}

inline void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

// ---- coefficient JSON ----

inline json to_json(const AxisymCoeffs& c) {
    json j;
    j["kind"] = "axisym";
    j["L"] = c.degree();
    j["coeffs"] = c.c;
    return j;
}

inline json to_json(const SphCoeffs& c) {
    json j;
    j["kind"] = "general";
    j["L"] = c.degree();
    json arr = json::array();
    for (int l = 0; l <= c.degree(); ++l)
        for (int m = -l; m <= l; ++m) {
            const auto v = c.at(l, m);
            arr.push_back(json::array({v.real(), v.imag()}));
        }
    j["coeffs"] = std::move(arr);
    return j;
}

inline json to_json(const EquatorCoeffs& h) {
    json j;
    j["kind"] = "equator";
    j["M"] = h.order();
    json arr = json::array();
    for (int m = -h.order(); m <= h.order(); ++m) {
        const auto v = h.at(m);
        arr.push_back(json::array({v.real(), v.imag()}));
    }
    j["coeffs"] = std::move(arr);
    return j;
}

namespace detail {

inline double json_number(const json& v, const char* what) {
    if (!v.is_number()) throw input_error(std::string("expected a number for ") + what);
    return v.get<double>();
}

inline std::complex<double> json_complex(const json& v, const char* what) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw input_error(std::string("expected [re, im] for ") + what);
}

inline int json_degree(const json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_number_integer())
        throw input_error(std::string("coefficient JSON: missing integer field ") + field);
    const int L = j[field].get<int>();
    if (L < 0 || L > 100000) throw input_error("coefficient JSON: degree out of range");
    return L;
}

}  // namespace detail

inline std::string json_kind(const json& j) {
    if (!j.contains("kind") || !j["kind"].is_string())
        throw input_error("coefficient JSON: missing string field kind");
    return j["kind"].get<std::string>();
}

inline AxisymCoeffs axisym_from_json(const json& j) {
    if (json_kind(j) != "axisym") throw input_error("coefficient JSON: kind is not axisym");
    const int L = detail::json_degree(j, "L");
    if (!j.contains("coeffs") || !j["coeffs"].is_array())
        throw input_error("coefficient JSON: missing coeffs array");
    const auto& arr = j["coeffs"];
    if (static_cast<int>(arr.size()) != L + 1)
        throw input_error("coefficient JSON: coeffs length must be L+1");
    AxisymCoeffs c(L);
    for (int l = 0; l <= L; ++l) c[l] = detail::json_number(arr[static_cast<std::size_t>(l)], "coeffs entry");
    if (!c.finite()) throw input_error("coefficient JSON: non-finite coefficient");
    return c;
}

inline SphCoeffs general_from_json(const json& j) {
    if (json_kind(j) != "general") throw input_error("coefficient JSON: kind is not general");
    const int L = detail::json_degree(j, "L");
    if (!j.contains("coeffs") || !j["coeffs"].is_array())
        throw input_error("coefficient JSON: missing coeffs array");
    const auto& arr = j["coeffs"];
    const std::size_t want = static_cast<std::size_t>(L + 1) * (L + 1);
    if (arr.size() != want) throw input_error("coefficient JSON: coeffs length must be (L+1)^2");
    SphCoeffs c(L);
    std::size_t idx = 0;
    for (int l = 0; l <= L; ++l)
        for (int m = -l; m <= l; ++m)
            c.ref(l, m) = detail::json_complex(arr[idx++], "coeffs entry");
    return c;
}

inline EquatorCoeffs equator_from_json(const json& j) {
    if (json_kind(j) != "equator") throw input_error("coefficient JSON: kind is not equator");
    const int M = detail::json_degree(j, "M");
    if (!j.contains("coeffs") || !j["coeffs"].is_array())
        throw input_error("coefficient JSON: missing coeffs array");
    const auto& arr = j["coeffs"];
    if (static_cast<int>(arr.size()) != 2 * M + 1)
        throw input_error("coefficient JSON: coeffs length must be 2M+1");
    EquatorCoeffs h(M);
    std::size_t idx = 0;
    for (int m = -M; m <= M; ++m) h.ref(m) = detail::json_complex(arr[idx++], "coeffs entry");
    return h;
}

// ---- sample CSV ----

struct Samples {
    std::vector<double> theta;
    std::vector<double> value;
};

inline Samples read_samples_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open file: " + path);
    Samples s;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (first) {
            first = false;
            // Tolerate a header line.
            char* end = nullptr;
            errno = 0;
            std::strtod(cells.empty() ? "" : cells[0].c_str(), &end);
            if (end == cells[0].c_str()) continue;
        }
        if (cells.size() != 2) throw input_error("sample CSV: expected two columns in " + path);
        char* e1 = nullptr;
        char* e2 = nullptr;
        errno = 0;
        const double th = std::strtod(cells[0].c_str(), &e1);
        const double v = std::strtod(cells[1].c_str(), &e2);
        if (e1 == cells[0].c_str() || e2 == cells[1].c_str() || !std::isfinite(th) ||
            !std::isfinite(v))
            throw input_error("sample CSV: malformed numeric row in " + path);
        s.theta.push_back(th);
        s.value.push_back(v);
    }
    if (s.theta.empty()) throw input_error("sample CSV: no data rows in " + path);
    return s;
}

inline void write_samples_csv(const std::string& path, const std::vector<double>& theta,
                              const std::vector<double>& value) {
    if (theta.size() != value.size())
        throw input_error("sample CSV: theta/value size mismatch");
    std::ofstream out(path);
    if (!out) throw input_error("cannot write file: " + path);
    out << "theta,value\n";
    for (std::size_t i = 0; i < theta.size(); ++i)
        out << format_g17(theta[i]) << "," << format_g17(value[i]) << "\n";
}

struct FieldRow {
    double r = 0.0, theta = 0.0, u = 0.0, u_r = 0.0, u_theta = 0.0, intensity = 0.0;
};

inline void write_field_csv(const std::string& path, const std::vector<FieldRow>& rows) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write file: " + path);
    out << "r,theta,u,u_r,u_theta,intensity\n";
    for (const auto& row : rows)
        out << format_g17(row.r) << "," << format_g17(row.theta) << "," << format_g17(row.u)
            << "," << format_g17(row.u_r) << "," << format_g17(row.u_theta) << ","
            << format_g17(row.intensity) << "\n";
}

// ---- resampling ----

// Barycentric rational interpolation (Floater-Hormann) of (xs, ys) evaluated
// at xq.  Unlike global polynomial interpolation, this is stable on
// arbitrary node sets -- uniform grids included -- which is what ingested
// sample files typically carry.
inline std::vector<double> barycentric_resample(std::vector<double> xs, std::vector<double> ys,
                                                const std::vector<double>& xq) {
    const std::size_t n = xs.size();
    if (n == 0 || ys.size() != n) throw input_error("barycentric_resample: bad node data");

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = xs[order[i]];
        y[i] = ys[order[i]];
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw input_error("barycentric_resample: non-finite sample");
        if (i > 0 && x[i] == x[i - 1])
            throw input_error("barycentric_resample: duplicate sample abscissae");
    }

    const std::size_t d = std::min<std::size_t>(5, n - 1);
    boost::math::barycentric_rational<double> interp(x.data(), y.data(), n, d);
    std::vector<double> out(xq.size());
    for (std::size_t q = 0; q < xq.size(); ++q) out[q] = interp(xq[q]);
    return out;
}

}  // namespace backus::io
