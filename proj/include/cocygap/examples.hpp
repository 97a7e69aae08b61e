#pragma once

#include <string>
#include <vector>

#include "problem.hpp"

namespace cocygap {

struct ExampleEntry {
    std::string name;
    std::string description;
    ProblemFile problem;
};

struct SftEntry {
    std::string name;
    std::string description;
    SubshiftOfFiniteType sft;
};

namespace detail {

inline ProblemFile cocycle_problem(std::vector<std::vector<int>> adj, std::vector<ExprMatrix> gens, AnalysisParams a) {
    ProblemFile p;
    p.kind = "cocycle";
    p.adjacency = std::move(adj);
    p.generators = std::move(gens);
    p.analysis = a;
    return p;
}

inline ProblemFile rep_problem(Json presentation, std::vector<std::pair<std::string, ExprMatrix>> images,
                               AnalysisParams a, Json factors = Json()) {
    ProblemFile p;
    p.kind = "representation";
    p.presentation = std::move(presentation);
    p.images = std::move(images);
    p.factors = std::move(factors);
    p.analysis = a;
    return p;
}

inline AnalysisParams params(int index, int n_max, int p_max, int length_bound) {
    AnalysisParams a;
    a.index = index;
    a.n_max = n_max;
    a.p_max = p_max;
    a.length_bound = length_bound;
    return a;
}

inline AnalysisParams with_stable_cap(AnalysisParams a, int r) {
    a.stable_r_max = r;
    return a;
}

inline const ExprMatrix kSchottkyA{{"5", "0"}, {"0", "1/5"}};
inline const ExprMatrix kSchottkyAInv{{"1/5", "0"}, {"0", "5"}};
// diag(5, 1/5) conjugated by the rotation through pi/4
inline const ExprMatrix kSchottkyB{{"(5+1/5)/2", "(5-1/5)/2"}, {"(5-1/5)/2", "(5+1/5)/2"}};
inline const ExprMatrix kSchottkyBInv{{"(5+1/5)/2", "-(5-1/5)/2"}, {"-(5-1/5)/2", "(5+1/5)/2"}};
inline const ExprMatrix kRotation{{"sqrt(2)/2", "-sqrt(2)/2"}, {"sqrt(2)/2", "sqrt(2)/2"}};
inline const ExprMatrix kRotationInv{{"sqrt(2)/2", "sqrt(2)/2"}, {"-sqrt(2)/2", "sqrt(2)/2"}};

}  // namespace detail

inline std::vector<ExampleEntry> example_registry() {
    using detail::params;
    auto full2 = SubshiftOfFiniteType::full_shift(2).adjacency();
    auto f2 = geodesic_sft_free_group(2).adjacency();
    Json free_group{{"variant", "FreeGroupSymmetric"}, {"params", {{"r", 2}}}};

    std::vector<ExampleEntry> out;
    out.push_back({"nonuniform-gap",
                   "full 2-shift, diag(2, 1/8, 1/2) and a quarter turn with 1/e; every periodic 2-gap is positive "
                   "but the gaps decay like 1/(2k+1)",
                   detail::cocycle_problem(full2,
                                           {{{"2", "0", "0"}, {"0", "1/8", "0"}, {"0", "0", "1/2"}},
                                            {{"0", "-1", "0"}, {"1", "0", "0"}, {"0", "0", "1/e"}}},
                                           params(2, 30, 13, 8))});
    out.push_back({"positive-pair", "full 2-shift, two positive SL(2) matrices; dominated of index 1",
                   detail::cocycle_problem(full2, {{{"2", "1"}, {"1", "1"}}, {{"3", "1"}, {"2", "1"}}},
                                           params(1, 20, 10, 8))});
    out.push_back({"schottky-f2",
                   "geodesic shift of F2, a = diag(5, 1/5) and b its conjugate by rotation pi/4 (symbols a, a^-1, b, b^-1)",
                   detail::cocycle_problem(f2, {detail::kSchottkyA, detail::kSchottkyAInv, detail::kSchottkyB,
                                                detail::kSchottkyBInv},
                                           params(1, 12, 8, 8))});
    out.push_back({"schottky-f2-rotated", "schottky-f2 with b replaced by a rotation through pi/4; refuted",
                   detail::cocycle_problem(f2, {detail::kSchottkyA, detail::kSchottkyAInv, detail::kRotation,
                                                detail::kRotationInv},
                                           params(1, 12, 8, 8))});
    out.push_back({"bs12", "BS(1,2) = <a, b | b a b^-1 = a^2>, a -> [[1,1],[0,1]], b -> diag(2,1)",
                   detail::rep_problem(Json{{"variant", "BaumslagSolitar12"}},
                                       {{"a", {{"1", "1"}, {"0", "1"}}}, {"b", {{"2", "0"}, {"0", "1"}}}},
                                       params(1, 20, 10, 8))});
    out.push_back({"constant-boundary",
                   "free semigroup on two proximal matrices sharing the attracting line e1; the boundary map is constant",
                   detail::rep_problem(Json{{"variant", "FreeSemigroup"}, {"params", {{"r", 2}}}},
                                       {{"f0", {{"3", "0"}, {"0", "1"}}}, {"f1", {{"2", "1"}, {"0", "1/2"}}}},
                                       params(1, 20, 10, 8))});
    out.push_back({"schottky-f2-rep", "the schottky-f2 images as a representation of F2",
                   detail::rep_problem(free_group, {{"f0", detail::kSchottkyA}, {"f1", detail::kSchottkyB}},
                                       params(1, 20, 10, 6))});
    out.push_back({"rees-f2",
                   "Rees semigroup over F2 with I = J = 2, sandwich p_{j,i} = r_j q_i for q = (e, a), r = (e, b)",
                   detail::rep_problem(Json{{"variant", "Rees"},
                                            {"params",
                                             {{"base", free_group},
                                              {"I", 2},
                                              {"J", 2},
                                              {"P", Json::array({Json::array({Json::array(), Json::array({0})}),
                                                                 Json::array({Json::array({2}), Json::array({2, 0})})})}}}},
                                       {{"f0", detail::kSchottkyA}, {"f1", detail::kSchottkyB}}, detail::with_stable_cap(params(1, 20, 10, 3), 3),
                                       Json{{"q", Json::array({Json::array(), Json::array({0})})},
                                            {"r", Json::array({Json::array(), Json::array({2})})}})});
    return out;
}

inline ExampleEntry find_example(const std::string& name) {
    for (auto& e : example_registry())
        if (e.name == name) return e;
    throw ValidationError("unknown example '" + name + "' (see list-examples)");
}

inline std::vector<SftEntry> builtin_sfts() {
    return {{"full-2", "full shift on 2 symbols", SubshiftOfFiniteType::full_shift(2)},
            {"full-3", "full shift on 3 symbols", SubshiftOfFiniteType::full_shift(3)},
            {"golden-mean", "no two consecutive 1s", SubshiftOfFiniteType({{1, 1}, {1, 0}})},
            {"free-group-2", "reduced words in F2 over a, a^-1, b, b^-1", geodesic_sft_free_group(2)}};
}

}  // namespace cocygap
