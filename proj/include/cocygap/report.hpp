#pragma once

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "problem.hpp"

namespace cocygap {

inline constexpr int kReportSchemaVersion = 1;

// Fixed field order, two-space indent, floats at 17 significant digits, non-finite as null.
inline void dump_report(const Json& j, std::ostream& os, int indent = 0) {
    auto pad = [&](int n) { os << std::string(static_cast<std::size_t>(n), ' '); };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            std::size_t k = 0;
            for (const auto& [key, v] : j.items()) {
                pad(indent + 2);
                os << Json(key).dump() << ": ";
                dump_report(v, os, indent + 2);
                os << (++k < j.size() ? ",\n" : "\n");
            }
            pad(indent);
            os << "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            bool flat = std::all_of(j.begin(), j.end(), [](const Json& x) { return x.is_primitive(); });
            if (flat) {
                os << "[";
                for (std::size_t k = 0; k < j.size(); ++k) {
                    if (k) os << ", ";
                    dump_report(j[k], os, indent);
                }
                os << "]";
                return;
            }
            os << "[\n";
            for (std::size_t k = 0; k < j.size(); ++k) {
                pad(indent + 2);
                dump_report(j[k], os, indent + 2);
                os << (k + 1 < j.size() ? ",\n" : "\n");
            }
            pad(indent);
            os << "]";
            return;
        }
        case Json::value_t::number_float: {
            double v = j.get<double>();
            if (!std::isfinite(v)) {
                os << "null";
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            os << buf;
            return;
        }
        default:
            os << j.dump();
    }
}

inline std::string dump_report(const Json& j) {
    std::ostringstream os;
    dump_report(j, os);
    os << "\n";
    return os.str();
}

inline std::string word_string(const Word& w) {
    bool small = std::all_of(w.begin(), w.end(), [](int s) { return s < 10; });
    std::string out;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (!small && k) out += ' ';
        out += std::to_string(w[k]);
    }
    return out;
}

inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(); }

// --------------------------------------------------------------------- CSV

using CsvRow = std::tuple<int, double, std::string>;

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

inline std::string render_csv(const std::vector<CsvRow>& rows) {
    std::string out = "n,min_gap,witness\n";
    for (const auto& [n, g, w] : rows) out += std::to_string(n) + "," + shortest(g) + "," + csv_field(w) + "\n";
    return out;
}

// ------------------------------------------------------------ report parts

inline Json report_header(const std::string& command, const ProblemFile& p) {
    Json problem = problem_to_json(p);
    problem["analysis"].erase("threads");  // reports must not depend on the thread count
    return Json{{"schema_version", kReportSchemaVersion}, {"command", command}, {"kind", p.kind}, {"problem", problem}};
}

inline Json affine_json(const AffineBound& b) {
    return Json{{"C", b.slope}, {"C_prime", b.intercept}, {"anchor", b.anchor}};
}

inline Json profile_json(const GapProfile& g) {
    Json a = Json::array();
    for (std::size_t k = 0; k < g.lengths.size(); ++k)
        a.push_back(Json{{"n", g.lengths[k]}, {"min_gap", g.min_gap[k]}, {"witness", word_string(g.argmin_word[k])}});
    return a;
}

inline std::vector<CsvRow> profile_csv(const GapProfile& g) {
    std::vector<CsvRow> rows;
    for (std::size_t k = 0; k < g.lengths.size(); ++k)
        rows.emplace_back(g.lengths[k], g.min_gap[k], word_string(g.argmin_word[k]));
    return rows;
}

inline Json periodic_json(const PeriodicGapScan& s) {
    Json per = Json::array();
    for (const auto& m : s.per_period)
        per.push_back(Json{{"period", m.period}, {"min_gap", m.min_gap}, {"argmin", word_string(m.argmin.necklace)}});
    return Json{{"index", s.index},
                {"p_max", s.p_max},
                {"min_gap", number_or_null(s.min_gap)},
                {"argmin", word_string(s.argmin.necklace)},
                {"orbit_count", s.orbit_count},
                {"per_period", per}};
}

inline Json verdict_json(const DominationVerdict& v) {
    return Json{{"kind", verdict_name(v.kind)},
                {"slope_estimate", v.slope_estimate},
                {"certificate", v.certificate ? affine_json(*v.certificate) : Json()},
                {"witness", v.witness ? Json(word_string(v.witness->necklace)) : Json()},
                {"fit", affine_json(v.fit)}};
}

inline Json ecs_json(const EcsCauchyScan& s) {
    return Json{{"index", s.index},
                {"n", s.n},
                {"max_cauchy_gap", s.max_cauchy_gap},
                {"argmax", word_string(s.argmax)},
                {"words", s.words},
                {"undefined", s.undefined}};
}

inline Json rep_scan_json(const RepGapScan& s, const SemigroupPresentation& p) {
    Json sv = Json::array(), ev = Json::array();
    for (const auto& m : s.sv_profile)
        sv.push_back(Json{{"length", m.length}, {"min_gap", m.min_gap}, {"witness", p.format(m.witness)}, {"count", m.count}});
    for (const auto& b : s.ev_profile)
        ev.push_back(Json{{"stable_length", b.stable_length},
                          {"min_gap", b.min_gap},
                          {"witness", p.format(b.witness)},
                          {"count", b.count}});
    return Json{{"index", s.index},
                {"length_bound", s.length_bound},
                {"sv_profile", sv},
                {"sv_fit", affine_json(s.sv_fit)},
                {"ev_profile", ev},
                {"ev_fit", affine_json(s.ev_fit)}};
}

inline std::vector<CsvRow> rep_scan_csv(const RepGapScan& s, const SemigroupPresentation& p) {
    std::vector<CsvRow> rows;
    for (const auto& m : s.sv_profile) rows.emplace_back(m.length, m.min_gap, p.format(m.witness));
    return rows;
}

inline Json properties_json(const PropertyConstants& pc, const SemigroupPresentation& p) {
    Json s = Json::array();
    for (const auto& e : pc.U.s_prime) s.push_back(p.format(e));
    Json D{{"status", status_name(pc.D.status)}, {"note", pc.D.note}};
    if (pc.D.status == PropertyStatus::Holds) {
        D["kappa"] = pc.D.kappa;
        D["kappa_prime"] = pc.D.kappa_prime;
        D["N"] = pc.D.N;
    }
    Json U{{"status", status_name(pc.U.status)}, {"note", pc.U.note}};
    if (pc.U.status == PropertyStatus::Holds) {
        U["s_prime"] = s;
        U["c"] = pc.U.c;
        U["c_prime"] = pc.U.c_prime;
    }
    return Json{{"D", D}, {"U", U}};
}

inline Json boundary_json(const BoundaryProbe& b) {
    Json lines = Json::array();
    for (std::size_t k = 0; k < b.values.size(); ++k) {
        Json basis = Json::array();
        for (Eigen::Index r = 0; r < b.values[k].basis.rows(); ++r) {
            Json row = Json::array();
            for (Eigen::Index c = 0; c < b.values[k].basis.cols(); ++c) row.push_back(b.values[k].basis(r, c));
            basis.push_back(row);
        }
        lines.push_back(Json{{"ray", word_string(b.rays[k])}, {"basis", basis}, {"cauchy", b.cauchy[k]}});
    }
    Json fixed = Json::array(), inv = Json::array();
    for (double a : b.fixed_point_angle) fixed.push_back(number_or_null(a));
    for (double a : b.invariance_angle) inv.push_back(a);
    return Json{{"index", b.index},
                {"depth", b.depth},
                {"max_pairwise_angle", b.max_pairwise_angle},
                {"fixed_point_angle", fixed},
                {"invariance_angle", inv},
                {"dynamics_ok", b.dynamics_ok},
                {"rays", lines}};
}

}  // namespace cocygap
