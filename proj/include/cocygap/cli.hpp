#pragma once

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include "examples.hpp"
#include "report.hpp"

namespace cocygap {

inline constexpr const char* kBudgetEnv = "COCYCLE_GAP_BUDGET";

enum ExitCode : int {
    kExitOk = 0,
    kExitInput = 1,  // parse / validation / usage errors
    kExitRefuted = 2,
    kExitBudget = 3,
    kExitNumeric = 4,  // any other module error
};

struct CliFlags {
    std::optional<int> index, n_max, p_max, length_bound, threads;
    std::optional<std::uint64_t> budget;
    std::optional<double> slope_threshold, zero_tol;
    std::string out;  // report path; empty = stream
    std::string csv;  // CSV path; empty = none
};

struct RunResult {
    int exit_code = kExitOk;
    Json report;
    std::vector<CsvRow> csv;
};

inline std::optional<std::uint64_t> budget_from_env() {
    const char* s = std::getenv(kBudgetEnv);
    if (!s || !*s) return std::nullopt;
    std::string v(s);
    std::uint64_t out = 0;
    auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size() || out == 0)
        throw ValidationError(std::string(kBudgetEnv) + " must be a positive integer, got '" + v + "'");
    return out;
}

// problem file < environment < explicit flag
inline AnalysisParams resolve_params(AnalysisParams a, const CliFlags& f) {
    if (auto b = budget_from_env()) a.budget = *b;
    if (f.index) a.index = *f.index;
    if (f.n_max) a.n_max = *f.n_max;
    if (f.p_max) a.p_max = *f.p_max;
    if (f.length_bound) a.length_bound = *f.length_bound;
    if (f.budget) a.budget = *f.budget;
    if (f.slope_threshold) a.slope_threshold = *f.slope_threshold;
    if (f.zero_tol) a.zero_tol = *f.zero_tol;
    if (f.threads) a.threads = *f.threads;
    if (a.n_max < 1 || a.p_max < 1 || a.length_bound < 1) throw ValidationError("n_max, p_max and L must be >= 1");
    if (a.stable_n_max < 1 || a.stable_r_max < 1) throw ValidationError("stable_n_max and stable_r_max must be >= 1");
    if (a.threads < 0) throw ValidationError("threads must be >= 0");
    if (a.budget == 0) throw ValidationError("budget must be positive");
    return a;
}

inline ScanOptions scan_options(const AnalysisParams& a) {
    return {a.budget, resolve_threads(a.threads), a.zero_tol, a.slope_threshold};
}

inline RepScanOptions rep_options(const AnalysisParams& a) {
    RepScanOptions o;
    o.budget = a.budget;
    o.threads = resolve_threads(a.threads);
    o.stable_n_max = a.stable_n_max;
    o.stable_r_max = a.stable_r_max;
    return o;
}

inline RunResult budget_result(Json report, const BudgetExceeded& e) {
    report["status"] = "budget_exceeded";
    report["error"] = e.what();
    return {kExitBudget, report, {}};
}

inline RunResult analyze_cocycle(const ProblemFile& p, const std::string& command) {
    auto c = build_cocycle(p);
    const auto& a = p.analysis;
    Json report = report_header(command, p);
    DominationVerdict v;
    try {
        v = certify_domination(c, a.index, a.n_max, a.p_max, scan_options(a));
    } catch (const BudgetExceeded& e) {
        return budget_result(report, e);
    }
    report["status"] = "completed";
    report["periodic"] = periodic_json(v.periodic);
    report["profile"] = v.profile ? profile_json(*v.profile) : Json::array();
    report["verdict"] = verdict_json(v);
    RunResult r{v.kind == VerdictKind::Refuted ? kExitRefuted : kExitOk, report, {}};
    if (v.profile) r.csv = profile_csv(*v.profile);
    return r;
}

inline bool boundary_applies(const SemigroupPresentation& p) {
    return p.variant() == "FreeSemigroup" || p.variant() == "FreeGroupSymmetric";
}

inline RunResult analyze_representation(const ProblemFile& p, const std::string& command) {
    auto rep = build_representation(p);
    const auto& a = p.analysis;
    const auto& pres = *rep.presentation;
    Json report = report_header(command, p);
    RepGapScan scan;
    try {
        scan = rep_gap_scan(rep, a.index, a.length_bound, rep_options(a));
    } catch (const BudgetExceeded& e) {
        return budget_result(report, e);
    }
    bool sv_gap = scan.sv_fit.slope >= a.slope_threshold;
    report["status"] = "completed";
    report["scan"] = rep_scan_json(scan, pres);
    report["evidence"] = Json{{"uniform_sv_gap", sv_gap}, {"weak_eigen_gap", scan.ev_fit.slope >= a.slope_threshold}};
    report["properties"] = properties_json(property_constants(rep.presentation), pres);
    Json boundary;
    if (sv_gap && boundary_applies(pres)) {
        try {
            boundary = boundary_json(boundary_probe(rep, a.index, 8, 3 * a.length_bound));
        } catch (const Error& e) {
            boundary = Json{{"error", e.what()}};
        }
    }
    report["boundary"] = boundary;
    return {kExitOk, report, rep_scan_csv(scan, pres)};
}

inline RunResult analyze(const ProblemFile& p, const std::string& command) {
    if (p.kind == "cocycle") return analyze_cocycle(p, command);
    return analyze_representation(p, command);
}

// ------------------------------------------------------ example extras

inline Json nonuniform_extras(const ProblemFile& p) {
    auto c = build_cocycle(p);
    Json family = Json::array();
    for (int k = 1; k <= 8; ++k) {
        Word w(static_cast<std::size_t>(2 * k), 0);
        w.push_back(1);
        auto o = orbit_of(c.sft(), w);
        family.push_back(Json{{"k", k},
                              {"necklace", word_string(o.necklace)},
                              {"gap", periodic_gap(c, o, 2)},
                              {"expected", 1.0 / (2 * k + 1)}});
    }
    auto scan17 = periodic_gap_scan(c, 2, 17, scan_options(p.analysis));
    return Json{{"gap_family", family}, {"periodic_scan_17", periodic_json(scan17)}};
}

inline Json positive_pair_extras(const ProblemFile& p) {
    auto c = build_cocycle(p);
    return Json{{"ecs", ecs_json(ecs_cauchy_scan(c, p.analysis.index, p.analysis.n_max, scan_options(p.analysis)))}};
}

inline Json bs12_extras(const ProblemFile& p) {
    auto rep = build_representation(p);
    auto study = bs12_case_study(rep, 6, 32, 6, 1, rep_options(p.analysis));
    Json conj = Json::array();
    for (const auto& c : study.conjugate_lengths)
        conj.push_back(Json{{"N", c.N}, {"upper", c.upper}, {"best_conjugator", c.best_conjugator}});
    Json powers = Json::array();
    WordLengthOracle oracle(rep.presentation);
    for (int k = 2; k <= 4; ++k) {
        auto g = BS12::normal_form(0, std::int64_t{1} << k, 0);
        powers.push_back(Json{{"k", k}, {"length", oracle.length(g, 4 * k)}});
    }
    return Json{{"normal_forms", study.normal_forms},
                {"max_identity_error", study.max_identity_error},
                {"a_power_lengths", powers},
                {"conjugate_lengths", conj},
                {"conjugate_fit", affine_json(study.conjugate_fit)}};
}

inline Json constant_boundary_extras(const ProblemFile& p) {
    auto rep = build_representation(p);
    return Json{{"boundary_probe", boundary_json(boundary_probe(rep, p.analysis.index, 16, 40))}};
}

inline Json rees_extras(const ProblemFile& p) {
    auto rep = build_representation(p);
    auto rees = std::const_pointer_cast<Rees>(std::dynamic_pointer_cast<const Rees>(rep.presentation));
    auto b = rees_length_bounds_check(rees, 4);
    auto t = rees_gap_transfer(rep, 3);
    return Json{{"length_bounds",
                 {{"r", b.r},
                  {"samples", b.samples},
                  {"part1", b.part1},
                  {"part2", b.part2},
                  {"part3", b.part3},
                  {"part4", b.part4},
                  {"min_ratio", b.min_ratio},
                  {"max_ratio", b.max_ratio},
                  {"max_part3", b.max_part3},
                  {"max_part4", b.max_part4}}},
                {"gap_transfer",
                 {{"i0", t.i0}, {"j0", t.j0}, {"m", t.m}, {"max_difference", t.max_difference}, {"samples", t.samples}, {"holds", t.holds()}}}};
}

inline RunResult reproduce_example(const std::string& name, const CliFlags& flags) {
    auto entry = find_example(name);
    entry.problem.analysis = resolve_params(entry.problem.analysis, flags);
    auto r = analyze(entry.problem, "reproduce-example");
    if (r.exit_code == kExitBudget) return r;
    r.report["example"] = name;
    try {
        if (name == "nonuniform-gap") r.report["extras"] = nonuniform_extras(entry.problem);
        else if (name == "positive-pair") r.report["extras"] = positive_pair_extras(entry.problem);
        else if (name == "bs12") r.report["extras"] = bs12_extras(entry.problem);
        else if (name == "constant-boundary") r.report["extras"] = constant_boundary_extras(entry.problem);
        else if (name == "rees-f2") r.report["extras"] = rees_extras(entry.problem);
    } catch (const BudgetExceeded& e) {
        return budget_result(r.report, e);
    }
    return r;
}

inline RunResult list_examples() {
    Json ex = Json::array(), sfts = Json::array();
    for (const auto& e : example_registry())
        ex.push_back(Json{{"name", e.name}, {"kind", e.problem.kind}, {"description", e.description}});
    for (const auto& s : builtin_sfts())
        sfts.push_back(Json{{"name", s.name}, {"alphabet_size", s.sft.alphabet_size()}, {"description", s.description}});
    return {kExitOk,
            Json{{"schema_version", kReportSchemaVersion}, {"command", "list-examples"}, {"examples", ex}, {"sfts", sfts}},
            {}};
}

// Runs one command; no I/O.
inline RunResult execute(const std::string& command, const std::string& target, const CliFlags& flags) {
    if (command == "list-examples") return list_examples();
    if (command == "reproduce-example") return reproduce_example(target, flags);
    if (command == "analyze-cocycle" || command == "analyze-representation") {
        auto p = parse_problem(target);
        std::string want = command == "analyze-cocycle" ? "cocycle" : "representation";
        if (p.kind != want) throw ValidationError(command + " needs a problem of kind '" + want + "', got '" + p.kind + "'");
        p.analysis = resolve_params(p.analysis, flags);
        return analyze(p, command);
    }
    throw ValidationError("unknown command '" + command + "'");
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot write '" + path + "'");
    f << text;
}

// Runs one command and writes the report (to flags.out or `out`) and the optional CSV.
inline int run(const std::string& command, const std::string& target, const CliFlags& flags, std::ostream& out,
               std::ostream& err) {
    try {
        auto r = execute(command, target, flags);
        auto text = dump_report(r.report);
        if (flags.out.empty())
            out << text;
        else
            write_file(flags.out, text);
        if (!flags.csv.empty()) write_file(flags.csv, render_csv(r.csv));
        if (r.exit_code == kExitBudget) err << "budget exceeded: " << r.report.value("error", "") << "\n";
        return r.exit_code;
    } catch (const BudgetExceeded& e) {
        err << "budget exceeded: " << e.what() << "\n";
        return kExitBudget;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitInput;
    } catch (const DimensionMismatch& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitInput;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}

}  // namespace cocygap
