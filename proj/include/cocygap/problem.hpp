#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cocycle.hpp"
#include "expression.hpp"
#include "semigroup.hpp"

namespace cocygap {

using Json = nlohmann::ordered_json;
using ExprMatrix = std::vector<std::vector<std::string>>;

inline std::string shortest(double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

struct AnalysisParams {
    int index = 1;
    int n_max = 20;
    int p_max = 10;
    int length_bound = 8;
    std::uint64_t budget = kDefaultBudget;
    double slope_threshold = kDefaultSlopeThreshold;
    double zero_tol = kDefaultZeroTol;
    int threads = 0;  // 0 = all cores
    // stable-length brackets for representations: powers up to 2^k <= stable_n_max, lengths up to stable_r_max
    int stable_n_max = 16;
    int stable_r_max = 16;

    bool operator==(const AnalysisParams&) const = default;
};

struct ProblemFile {
    std::string kind;  // "cocycle" or "representation"
    // cocycle
    std::vector<std::vector<int>> adjacency;
    std::vector<ExprMatrix> generators;
    // representation
    Json presentation;
    std::vector<std::pair<std::string, ExprMatrix>> images;
    Json factors;  // Rees only: {"q": [...], "r": [...]}
    AnalysisParams analysis;

    bool operator==(const ProblemFile&) const = default;
};

namespace detail {

inline std::string entry_string(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return shortest(v.get<double>());
    throw ValidationError("matrix entries must be strings or numbers");
}

inline ExprMatrix expr_matrix(const Json& v) {
    if (!v.is_array() || v.empty()) throw ValidationError("matrix must be a non-empty array of rows");
    ExprMatrix m;
    for (const auto& row : v) {
        if (!row.is_array()) throw ValidationError("matrix rows must be arrays");
        std::vector<std::string> r;
        for (const auto& x : row) r.push_back(entry_string(x));
        m.push_back(std::move(r));
    }
    for (const auto& row : m)
        if (row.size() != m.size()) throw ValidationError("matrix must be square");
    return m;
}

inline Json matrix_json(const ExprMatrix& m) {
    Json a = Json::array();
    for (const auto& row : m) a.push_back(row);
    return a;
}

template <class T>
void read_field(const Json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError(std::string("analysis field '") + key + "' has the wrong type");
    }
}

}  // namespace detail

inline AnalysisParams analysis_from_json(const Json& j) {
    AnalysisParams a;
    if (j.is_null()) return a;
    if (!j.is_object()) throw ValidationError("'analysis' must be an object");
    detail::read_field(j, "index", a.index);
    detail::read_field(j, "n_max", a.n_max);
    detail::read_field(j, "p_max", a.p_max);
    detail::read_field(j, "length_bound", a.length_bound);
    detail::read_field(j, "budget", a.budget);
    detail::read_field(j, "slope_threshold", a.slope_threshold);
    detail::read_field(j, "zero_tol", a.zero_tol);
    detail::read_field(j, "threads", a.threads);
    detail::read_field(j, "stable_n_max", a.stable_n_max);
    detail::read_field(j, "stable_r_max", a.stable_r_max);
    return a;
}

inline Json analysis_to_json(const AnalysisParams& a) {
    return Json{{"index", a.index},
                {"n_max", a.n_max},
                {"p_max", a.p_max},
                {"length_bound", a.length_bound},
                {"budget", a.budget},
                {"slope_threshold", a.slope_threshold},
                {"zero_tol", a.zero_tol},
                {"threads", a.threads},
                {"stable_n_max", a.stable_n_max},
                {"stable_r_max", a.stable_r_max}};
}

inline ProblemFile problem_from_json(const Json& j) {
    if (!j.is_object()) throw ValidationError("problem must be a JSON object");
    ProblemFile p;
    p.kind = j.value("kind", "");
    if (p.kind == "cocycle") {
        if (!j.contains("sft") || !j.contains("generators"))
            throw ValidationError("cocycle problem needs 'sft' and 'generators'");
        const auto& sft = j.at("sft");
        try {
            p.adjacency = sft.at("adjacency").get<std::vector<std::vector<int>>>();
        } catch (const nlohmann::json::exception&) {
            throw ValidationError("sft.adjacency must be a 0/1 matrix");
        }
        if (sft.contains("alphabet_size") && sft.at("alphabet_size").get<int>() != static_cast<int>(p.adjacency.size()))
            throw ValidationError("sft.alphabet_size does not match the adjacency matrix");
        for (const auto& g : j.at("generators")) p.generators.push_back(detail::expr_matrix(g));
        if (p.generators.size() != p.adjacency.size())
            throw ValidationError("need one generator per symbol");
        for (const auto& g : p.generators)
            if (g.size() != p.generators.front().size()) throw ValidationError("all generators must have the same dimension");
    } else if (p.kind == "representation") {
        if (!j.contains("presentation") || !j.contains("representation"))
            throw ValidationError("representation problem needs 'presentation' and 'representation'");
        p.presentation = j.at("presentation");
        const auto& rep = j.at("representation");
        if (!rep.contains("generators") || !rep.at("generators").is_object())
            throw ValidationError("representation.generators must be an object");
        for (const auto& [name, m] : rep.at("generators").items()) p.images.emplace_back(name, detail::expr_matrix(m));
        if (rep.contains("factors")) p.factors = rep.at("factors");
        for (const auto& [name, m] : p.images)
            if (m.size() != p.images.front().second.size())
                throw ValidationError("all generator images must have the same dimension");
    } else {
        throw ValidationError("problem kind must be 'cocycle' or 'representation'");
    }
    p.analysis = analysis_from_json(j.contains("analysis") ? j.at("analysis") : Json());
    return p;
}

inline Json problem_to_json(const ProblemFile& p) {
    Json j;
    j["kind"] = p.kind;
    if (p.kind == "cocycle") {
        j["sft"] = Json{{"alphabet_size", p.adjacency.size()}, {"adjacency", p.adjacency}};
        Json gens = Json::array();
        for (const auto& g : p.generators) gens.push_back(detail::matrix_json(g));
        j["generators"] = gens;
    } else {
        j["presentation"] = p.presentation;
        Json gens = Json::object();
        for (const auto& [name, m] : p.images) gens[name] = detail::matrix_json(m);
        Json rep{{"generators", gens}};
        if (!p.factors.is_null()) rep["factors"] = p.factors;
        j["representation"] = rep;
    }
    j["analysis"] = analysis_to_json(p.analysis);
    return j;
}

inline ProblemFile parse_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open problem file '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.byte, std::string("invalid JSON in '") + path + "'");
    }
    return problem_from_json(j);
}

// ---------------------------------------------------------------- builders

inline LocallyConstantCocycle build_cocycle(const ProblemFile& p) {
    if (p.kind != "cocycle") throw ValidationError("not a cocycle problem");
    std::vector<MatrixGL> gens;
    for (const auto& g : p.generators) gens.emplace_back(parse_matrix(g));
    return {SubshiftOfFiniteType(p.adjacency), gens};
}

inline PresentationPtr build_presentation(const Json& j) {
    if (!j.is_object() || !j.contains("variant")) throw ValidationError("presentation needs a 'variant'");
    auto v = j.at("variant").get<std::string>();
    Json params = j.value("params", Json::object());
    try {
        if (v == "FreeSemigroup") return std::make_shared<FreeSemigroup>(params.at("r").get<int>());
        if (v == "FreeGroupSymmetric") return std::make_shared<FreeGroupSymmetric>(params.at("r").get<int>());
        if (v == "BaumslagSolitar12") return std::make_shared<BS12>();
        if (v == "FiniteGroup")
            return std::make_shared<FiniteGroup>(params.at("table").get<std::vector<std::vector<int>>>(),
                                                 params.at("generators").get<std::vector<int>>());
        if (v == "Rees") {
            auto base = build_presentation(params.at("base"));
            int I = params.at("I").get<int>(), J = params.at("J").get<int>();
            auto P = params.at("P").get<std::vector<std::vector<Element>>>();
            return rees_build(base, I, J, P);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("presentation '" + v + "': malformed params (" + e.what() + ")");
    }
    throw ValidationError("unknown presentation variant '" + v + "'");
}

// Names the images are keyed by: the generators before symmetrization.
inline std::vector<std::string> image_names(const SemigroupPresentation& p) {
    auto v = p.variant();
    std::vector<std::string> out;
    if (v == "FreeGroupSymmetric" || v == "BaumslagSolitar12") {
        for (std::size_t k = 0; k < p.generator_count(); k += 2) out.push_back(p.generator_names()[k]);
    } else {
        out = p.generator_names();
    }
    return out;
}

inline Matrix lookup_image(const ProblemFile& p, const std::string& name) {
    for (const auto& [n, m] : p.images)
        if (n == name) return parse_matrix(m);
    throw ValidationError("representation: no image for generator '" + name + "'");
}

inline SemigroupRepresentation build_representation(const ProblemFile& p) {
    if (p.kind != "representation") throw ValidationError("not a representation problem");
    auto pres = build_presentation(p.presentation);
    if (auto rees = std::dynamic_pointer_cast<const Rees>(pres)) {
        auto sigma_images = std::vector<Matrix>{};
        for (const auto& name : image_names(rees->base())) sigma_images.push_back(lookup_image(p, name));
        auto sigma = make_representation(rees->base_ptr(), sigma_images);
        if (!p.factors.is_object()) throw ValidationError("Rees representation needs factors {q, r}");
        std::vector<Element> q, r;
        try {
            q = p.factors.at("q").get<std::vector<Element>>();
            r = p.factors.at("r").get<std::vector<Element>>();
        } catch (const nlohmann::json::exception&) {
            throw ValidationError("factors must hold arrays 'q' and 'r' of elements");
        }
        return rees_representation(std::const_pointer_cast<Rees>(rees), sigma, q, r);
    }
    std::vector<Matrix> images;
    for (const auto& name : image_names(*pres)) images.push_back(lookup_image(p, name));
    return make_representation(pres, images);
}

}  // namespace cocygap
