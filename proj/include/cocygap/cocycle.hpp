#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "affine_fit.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "subshift.hpp"

namespace cocygap {

inline constexpr std::uint64_t kDefaultBudget = 20'000'000;
inline constexpr double kDefaultSlopeThreshold = 0.05;
inline constexpr double kDefaultZeroTol = 1e-8;

struct ScanOptions {
    std::uint64_t budget = kDefaultBudget;
    int threads = 1;
    double zero_tol = kDefaultZeroTol;
    double slope_threshold = kDefaultSlopeThreshold;
};

class LocallyConstantCocycle {
public:
    LocallyConstantCocycle() = default;

    LocallyConstantCocycle(SubshiftOfFiniteType sft, std::vector<MatrixGL> generators)
        : sft_(std::move(sft)), gens_(std::move(generators)) {
        if (static_cast<int>(gens_.size()) != sft_.alphabet_size())
            throw ValidationError("cocycle: need exactly one generator per symbol");
        for (const auto& g : gens_)
            if (g.dim() != gens_.front().dim()) throw DimensionMismatch("cocycle: generators differ in dimension");
        for (const auto& g : gens_) {
            compound_.push_back(CompoundProduct::of(g.matrix()));
            inverse_compound_.push_back(CompoundProduct::of(g.matrix().inverse()));
        }
    }

    const SubshiftOfFiniteType& sft() const { return sft_; }
    const std::vector<MatrixGL>& generators() const { return gens_; }
    int dim() const { return gens_.front().dim(); }
    int alphabet_size() const { return sft_.alphabet_size(); }

    const CompoundProduct& compound(int s) const { return compound_[static_cast<std::size_t>(s)]; }
    const CompoundProduct& inverse_compound(int s) const { return inverse_compound_[static_cast<std::size_t>(s)]; }

private:
    SubshiftOfFiniteType sft_;
    std::vector<MatrixGL> gens_;
    std::vector<CompoundProduct> compound_, inverse_compound_;
};

// Λ^i φ(s) for every symbol; gap index 1 of the result is gap index i of the input.
inline LocallyConstantCocycle exterior_cocycle(const LocallyConstantCocycle& c, int i) {
    std::vector<MatrixGL> gens;
    for (const auto& g : c.generators()) gens.push_back(exterior_power(g, i));
    return {c.sft(), gens};
}

inline void check_index(const LocallyConstantCocycle& c, int i) {
    if (i < 1 || i > c.dim() - 1) throw ValidationError("gap index must satisfy 1 <= i <= d-1");
}

// φ(x_{n-1}) ⋯ φ(x_0)
inline ScaledMatrix evaluate(const LocallyConstantCocycle& c, const Word& word) {
    require_admissible(c.sft(), word);
    ScaledMatrix p = ScaledMatrix::identity(c.dim());
    for (int s : word) p = ScaledMatrix::from(c.generators()[static_cast<std::size_t>(s)]) * p;
    return p;
}

inline CompoundProduct evaluate_compound(const LocallyConstantCocycle& c, const Word& word) {
    require_admissible(c.sft(), word);
    CompoundProduct p = CompoundProduct::identity(c.dim());
    for (int s : word) p.left_multiply(c.compound(s));
    return p;
}

// (φ(x_{n-1}) ⋯ φ(x_0))^{-1} = φ(x_0)^{-1} ⋯ φ(x_{n-1})^{-1}
inline CompoundProduct evaluate_inverse_compound(const LocallyConstantCocycle& c, const Word& word) {
    require_admissible(c.sft(), word);
    CompoundProduct p = CompoundProduct::identity(c.dim());
    for (int s : word) p.right_multiply(c.inverse_compound(s));
    return p;
}

struct LyapunovSpectrum {
    std::vector<double> chi;
    PeriodicOrbit orbit;
};

inline LyapunovSpectrum periodic_lyapunov(const LocallyConstantCocycle& c, const PeriodicOrbit& orbit) {
    if (!is_cyclically_admissible(c.sft(), orbit.necklace))
        throw InadmissibleWord("periodic_lyapunov: orbit is not cyclically admissible");
    auto lam = evaluate_compound(c, orbit.necklace).jordan().lambda;
    for (double& x : lam) x /= orbit.period();
    return {lam, orbit};
}

inline double periodic_gap(const LocallyConstantCocycle& c, const PeriodicOrbit& orbit, int i) {
    return evaluate_compound(c, orbit.necklace).eigen_gap(i) / orbit.period();
}

struct PeriodMinimum {
    int period = 0;
    double min_gap = 0.0;
    PeriodicOrbit argmin;
};

struct PeriodicGapScan {
    int index = 0;
    int p_max = 0;
    double min_gap = std::numeric_limits<double>::infinity();
    PeriodicOrbit argmin;
    std::vector<PeriodMinimum> per_period;
    std::size_t orbit_count = 0;
};

inline PeriodicGapScan periodic_gap_scan(const LocallyConstantCocycle& c, int i, int p_max,
                                         const ScanOptions& opt = {}) {
    check_index(c, i);
    if (!primitivity(c.sft()).is_primitive) throw NotPrimitive("periodic_gap_scan requires a primitive subshift");
    auto orbits = periodic_orbits(c.sft(), p_max);
    std::vector<double> gaps(orbits.size());
    parallel_chunks(orbits.size(), resolve_threads(opt.threads), [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) gaps[k] = periodic_gap(c, orbits[k], i);
    });
    PeriodicGapScan out;
    out.index = i;
    out.p_max = p_max;
    out.orbit_count = orbits.size();
    for (std::size_t k = 0; k < orbits.size(); ++k) {
        int p = orbits[k].period();
        if (out.per_period.empty() || out.per_period.back().period != p)
            out.per_period.push_back({p, std::numeric_limits<double>::infinity(), {}});
        auto& pm = out.per_period.back();
        if (gaps[k] < pm.min_gap) {
            pm.min_gap = gaps[k];
            pm.argmin = orbits[k];
        }
        if (gaps[k] < out.min_gap) {
            out.min_gap = gaps[k];
            out.argmin = orbits[k];
        }
    }
    return out;
}

struct GapProfile {
    int index = 0;
    std::vector<int> lengths;
    std::vector<double> min_gap;
    std::vector<Word> argmin_word;
    std::vector<std::size_t> distinct_products;  // per length, after merging equal products
    std::uint64_t evaluations = 0;
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct StateKey {
    std::uint64_t h1 = 0, h2 = 0;
    bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
    std::size_t operator()(const StateKey& k) const { return static_cast<std::size_t>(k.h1); }
};

// Products that agree to ~1e-11 (relative, per exterior block) are merged:
// their continuations coincide, so only the lexicographically first one is kept.
inline StateKey state_key(const CompoundProduct& p, int last) {
    constexpr double grid = 1e11;
    StateKey k{mix64(static_cast<std::uint64_t>(last) + 1), mix64(static_cast<std::uint64_t>(last) + 0x51ed27)};
    auto feed = [&](double v) {
        auto q = static_cast<std::uint64_t>(std::llround(v * grid));
        k.h1 = mix64(k.h1 ^ q);
        k.h2 = mix64(k.h2 + q * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
    };
    for (std::size_t b = 0; b < p.blocks().size(); ++b) {
        feed(p.log_scales()[b]);
        const Matrix& m = p.blocks()[b];
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index col = 0; col < m.cols(); ++col) feed(m(r, col));
    }
    feed(p.log_abs_det());
    return k;
}

}  // namespace detail

// Exhaustive per-length minima of (μ_i − μ_{i+1})(Φ^{(n)}) over admissible words,
// by breadth-first extension with merging of equal products. The budget bounds
// the number of product evaluations.
inline GapProfile bg_gap_profile(const LocallyConstantCocycle& c, int i, int n_max, const ScanOptions& opt = {}) {
    check_index(c, i);
    if (n_max < 1) throw ValidationError("bg_gap_profile: n_max must be >= 1");
    const auto& sft = c.sft();
    int N = sft.alphabet_size();
    int threads = resolve_threads(opt.threads);

    GapProfile out;
    out.index = i;
    std::vector<CompoundProduct> prod;
    std::vector<int> last;
    std::vector<std::vector<std::uint32_t>> parents;
    std::vector<std::vector<int>> symbols;

    for (int s = 0; s < N; ++s) {
        prod.push_back(c.compound(s));
        last.push_back(s);
    }
    parents.emplace_back(static_cast<std::size_t>(N), 0);
    symbols.push_back(last);
    out.evaluations = static_cast<std::uint64_t>(N);
    if (out.evaluations > opt.budget)
        throw BudgetExceeded(opt.budget, "bg_gap_profile: enumeration budget exceeded");

    auto witness = [&](int level, std::size_t idx) {
        Word w(static_cast<std::size_t>(level) + 1);
        for (int l = level; l >= 0; --l) {
            w[static_cast<std::size_t>(l)] = symbols[static_cast<std::size_t>(l)][idx];
            idx = parents[static_cast<std::size_t>(l)][idx];
        }
        return w;
    };

    for (int n = 1; n <= n_max; ++n) {
        std::size_t count = prod.size();
        std::size_t chunks = chunk_count(count, threads);
        std::vector<double> best(chunks, std::numeric_limits<double>::infinity());
        std::vector<std::size_t> best_idx(chunks, 0);
        parallel_chunks(count, threads, [&](std::size_t ch, std::size_t b, std::size_t e) {
            for (std::size_t k = b; k < e; ++k) {
                double g = prod[k].gap(i);
                if (g < best[ch]) {
                    best[ch] = g;
                    best_idx[ch] = k;
                }
            }
        });
        double mg = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t ch = 0; ch < chunks; ++ch)
            if (best[ch] < mg) {
                mg = best[ch];
                arg = best_idx[ch];
            }
        out.lengths.push_back(n);
        out.min_gap.push_back(mg);
        out.argmin_word.push_back(witness(n - 1, arg));
        out.distinct_products.push_back(count);
        if (n == n_max) break;

        std::uint64_t children = 0;
        for (std::size_t k = 0; k < count; ++k)
            for (int s = 0; s < N; ++s) children += sft.allowed(last[k], s) ? 1 : 0;
        if (out.evaluations + children > opt.budget)
            throw BudgetExceeded(opt.budget, "bg_gap_profile: enumeration budget exceeded at length " +
                                                 std::to_string(n + 1));
        out.evaluations += children;

        struct Child {
            CompoundProduct p;
            detail::StateKey key;
            std::uint32_t parent;
            int symbol;
        };
        std::vector<std::vector<Child>> produced(chunks);
        parallel_chunks(count, threads, [&](std::size_t ch, std::size_t b, std::size_t e) {
            auto& dst = produced[ch];
            for (std::size_t k = b; k < e; ++k)
                for (int s = 0; s < N; ++s) {
                    if (!sft.allowed(last[k], s)) continue;
                    CompoundProduct p = prod[k];
                    p.left_multiply(c.compound(s));
                    auto key = detail::state_key(p, s);
                    dst.push_back({std::move(p), key, static_cast<std::uint32_t>(k), s});
                }
        });
        std::unordered_set<detail::StateKey, detail::StateKeyHash> seen;
        seen.reserve(static_cast<std::size_t>(children));
        std::vector<CompoundProduct> next;
        std::vector<int> next_last;
        std::vector<std::uint32_t> par;
        std::vector<int> sym;
        for (auto& chunk : produced) {
            for (auto& ch : chunk) {
                if (!seen.insert(ch.key).second) continue;
                next.push_back(std::move(ch.p));
                next_last.push_back(ch.symbol);
                par.push_back(ch.parent);
                sym.push_back(ch.symbol);
            }
            chunk.clear();
            chunk.shrink_to_fit();
        }
        prod = std::move(next);
        last = std::move(next_last);
        parents.push_back(std::move(par));
        symbols.push_back(std::move(sym));
    }
    return out;
}

enum class VerdictKind { DominatedEvidence, Refuted, Inconclusive };

inline const char* verdict_name(VerdictKind k) {
    switch (k) {
        case VerdictKind::DominatedEvidence: return "DominatedEvidence";
        case VerdictKind::Refuted: return "Refuted";
        case VerdictKind::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct DominationVerdict {
    VerdictKind kind = VerdictKind::Inconclusive;
    std::optional<AffineBound> certificate;
    std::optional<PeriodicOrbit> witness;
    double slope_estimate = 0.0;
    AffineBound fit;
    PeriodicGapScan periodic;
    std::optional<GapProfile> profile;
};

inline AffineBound fit_profile(const GapProfile& prof) {
    std::vector<double> x, y;
    for (std::size_t k = 0; k < prof.lengths.size(); ++k) {
        x.push_back(prof.lengths[k]);
        y.push_back(prof.min_gap[k]);
    }
    return fit_affine_lower_bound(x, y);
}

inline DominationVerdict certify_domination(const LocallyConstantCocycle& c, int i, int n_max, int p_max,
                                            const ScanOptions& opt = {}) {
    DominationVerdict v;
    v.periodic = periodic_gap_scan(c, i, p_max, opt);
    if (v.periodic.min_gap <= opt.zero_tol) {
        v.kind = VerdictKind::Refuted;
        v.witness = v.periodic.argmin;
        try {
            v.profile = bg_gap_profile(c, i, n_max, opt);
            v.fit = fit_profile(*v.profile);
            v.slope_estimate = v.fit.slope;
        } catch (const BudgetExceeded&) {
            // the periodic witness already settles the verdict
        }
        return v;
    }
    v.profile = bg_gap_profile(c, i, n_max, opt);
    v.fit = fit_profile(*v.profile);
    v.slope_estimate = v.fit.slope;
    if (v.fit.slope >= opt.slope_threshold && v.fit.slope > 0.0) {
        v.kind = VerdictKind::DominatedEvidence;
        v.certificate = v.fit;
    } else {
        v.kind = VerdictKind::Inconclusive;
    }
    return v;
}

struct EcsValue {
    Subspace subspace;
    std::optional<double> cauchy_gap;  // empty when the value at n-1 is undefined
};

// E^cs approximant Ξ_{d-i}((Φ^{(n)})^{-1}) along word_prefix.
inline EcsValue ecs_bundle(const LocallyConstantCocycle& c, const Word& word_prefix, int i, int n) {
    check_index(c, i);
    if (n < 1 || static_cast<int>(word_prefix.size()) < n)
        throw ValidationError("ecs_bundle: prefix shorter than n");
    Word w(word_prefix.begin(), word_prefix.begin() + n);
    require_admissible(c.sft(), w);
    int j = c.dim() - i;
    CompoundProduct inv = CompoundProduct::identity(c.dim());
    for (int k = 0; k + 1 < n; ++k) inv.right_multiply(c.inverse_compound(w[static_cast<std::size_t>(k)]));
    std::optional<Subspace> prev;
    try {
        prev = inv.xi(j);
    } catch (const GapTooSmall&) {
    }
    inv.right_multiply(c.inverse_compound(w.back()));
    EcsValue out{inv.xi(j), std::nullopt};
    if (prev) out.cauchy_gap = principal_angle(out.subspace, *prev);
    return out;
}

struct EcsCauchyScan {
    int index = 0;
    int n = 0;
    double max_cauchy_gap = 0.0;
    Word argmax;
    std::uint64_t words = 0;
    std::uint64_t undefined = 0;  // words where Ξ was ill-defined at n or n-1
};

namespace detail {

struct M2 {
    double a, b, c, d;
};

inline M2 mul(const M2& x, const M2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

// Running product exp(log_scale) * x with |det x| carried multiplicatively,
// since the entries cancel catastrophically in a*d - b*c.
struct Frame2 {
    M2 x;
    double det;
    double log_scale;
};

// Double-angle vector (u, v) of the top left singular direction, its length,
// and whether the singular gap exceeds the library tolerance.
struct DoubleAngle {
    double u, v, len;
    bool defined;
};

inline DoubleAngle double_angle(const Frame2& f, double fast_ratio) {
    const M2& x = f.x;
    double p = x.a * x.a + x.b * x.b, r = x.c * x.c + x.d * x.d, q = x.a * x.c + x.b * x.d;
    double u = p - r, v = 2.0 * q, t = p + r;
    double len = std::sqrt(u * u + v * v);
    // σ1/σ2 = (t + len) / (2 det)
    double ratio = (t + len) / (2.0 * f.det);
    if (ratio > fast_ratio) return {u, v, len, true};
    double gap = std::log(ratio);
    double mu1 = 0.5 * std::log(0.5 * (t + len)) + f.log_scale;
    double mu2 = std::log(f.det) + 2.0 * f.log_scale - mu1;
    return {u, v, len, gap > kGapTol * (std::hypot(mu1, mu2) + 1.0)};
}

// Increasing function of the angle between the two double-angle vectors.
inline double angle_key(const DoubleAngle& x, const DoubleAngle& y) {
    double cross = std::abs(x.u * y.v - x.v * y.u), dot = x.u * y.u + x.v * y.v;
    double sn = cross / (x.len * y.len);
    return dot >= 0.0 ? sn : 2.0 - sn;
}

inline double half_angle_between(const DoubleAngle& x, const DoubleAngle& y) {
    double cross = x.u * y.v - x.v * y.u, dot = x.u * y.u + x.v * y.v;
    return 0.5 * std::atan2(std::abs(cross), dot);
}

}  // namespace detail

// Largest Cauchy gap of the E^cs approximant at depth n over every admissible word of length n.
inline EcsCauchyScan ecs_cauchy_scan(const LocallyConstantCocycle& c, int i, int n, const ScanOptions& opt = {}) {
    check_index(c, i);
    if (n < 2) throw ValidationError("ecs_cauchy_scan: n must be >= 2");
    const auto& sft = c.sft();
    int N = sft.alphabet_size();
    std::uint64_t total = count_admissible_words(sft, n);
    if (total > opt.budget) throw BudgetExceeded(opt.budget, "ecs_cauchy_scan: enumeration budget exceeded");
    int threads = resolve_threads(opt.threads);
    int j = c.dim() - i;

    // split the tree on the first two symbols so chunks are balanced and ordered
    std::vector<Word> roots;
    for (const auto& w : admissible_words(sft, std::min(2, n - 1))) roots.push_back(w);
    std::size_t chunks = chunk_count(roots.size(), threads);
    std::vector<EcsCauchyScan> part(chunks);
    std::vector<double> part_key(chunks, -1.0);  // chunk maxima compared on the same scale they were found on

    if (c.dim() == 2) {
        std::vector<detail::M2> hinv;
        std::vector<double> hdet;
        double lmax = 0.0;
        for (int s = 0; s < N; ++s) {
            Matrix m = c.generators()[static_cast<std::size_t>(s)].matrix().inverse();
            hinv.push_back({m(0, 0), m(0, 1), m(1, 0), m(1, 1)});
            hdet.push_back(std::abs(c.generators()[static_cast<std::size_t>(s)].matrix().determinant()));
            hdet.back() = 1.0 / hdet.back();
            for (double mu : cartan_projection(m).mu) lmax = std::max(lmax, std::abs(mu));
        }
        // above this singular value ratio the gap clears the tolerance for any product of length <= n
        double fast_ratio = std::exp(kGapTol * (std::sqrt(2.0) * n * lmax + 1.0));
        auto step = [&](const detail::Frame2& f, int s) {
            detail::Frame2 g{detail::mul(f.x, hinv[static_cast<std::size_t>(s)]),
                             f.det * hdet[static_cast<std::size_t>(s)], f.log_scale};
            double m = std::max({std::abs(g.x.a), std::abs(g.x.b), std::abs(g.x.c), std::abs(g.x.d)});
            if (m > 1e30 || m < 1e-30) {
                g.x = {g.x.a / m, g.x.b / m, g.x.c / m, g.x.d / m};
                g.det /= m * m;
                g.log_scale += std::log(m);
            }
            return g;
        };
        parallel_chunks(roots.size(), threads, [&](std::size_t ch, std::size_t b, std::size_t e) {
            auto& res = part[ch];
            double best_key = -1.0;
            detail::DoubleAngle best_pa{}, best_ca{};
            Word w(static_cast<std::size_t>(n));
            std::function<void(int, const detail::Frame2&)> rec = [&](int depth, const detail::Frame2& f) {
                if (depth == n - 1) {
                    auto pa = detail::double_angle(f, fast_ratio);
                    for (int s = 0; s < N; ++s) {
                        if (!sft.allowed(w[static_cast<std::size_t>(depth - 1)], s)) continue;
                        auto ca = detail::double_angle(step(f, s), fast_ratio);
                        ++res.words;
                        if (!pa.defined || !ca.defined) {
                            ++res.undefined;
                            continue;
                        }
                        double key = detail::angle_key(pa, ca);
                        if (key > best_key) {
                            best_key = key;
                            best_pa = pa;
                            best_ca = ca;
                            w[static_cast<std::size_t>(depth)] = s;
                            res.argmax = w;
                        }
                    }
                    return;
                }
                for (int s = 0; s < N; ++s) {
                    if (depth > 0 && !sft.allowed(w[static_cast<std::size_t>(depth - 1)], s)) continue;
                    w[static_cast<std::size_t>(depth)] = s;
                    rec(depth + 1, step(f, s));
                }
            };
            for (std::size_t r = b; r < e; ++r) {
                const Word& root = roots[r];
                detail::Frame2 f{{1, 0, 0, 1}, 1.0, 0.0};
                for (std::size_t k = 0; k < root.size(); ++k) {
                    w[k] = root[k];
                    f = step(f, root[k]);
                }
                rec(static_cast<int>(root.size()), f);
            }
            if (!res.argmax.empty()) res.max_cauchy_gap = detail::half_angle_between(best_pa, best_ca);
            part_key[ch] = best_key;
        });
    } else {
        parallel_chunks(roots.size(), threads, [&](std::size_t ch, std::size_t b, std::size_t e) {
            auto& res = part[ch];
            Word w(static_cast<std::size_t>(n));
            std::function<void(int, const CompoundProduct&)> rec = [&](int depth, const CompoundProduct& x) {
                if (depth == n - 1) {
                    std::optional<Subspace> pa;
                    try {
                        pa = x.xi(j);
                    } catch (const GapTooSmall&) {
                    }
                    for (int s = 0; s < N; ++s) {
                        if (!sft.allowed(w[static_cast<std::size_t>(depth - 1)], s)) continue;
                        w[static_cast<std::size_t>(depth)] = s;
                        CompoundProduct y = x;
                        y.right_multiply(c.inverse_compound(s));
                        ++res.words;
                        std::optional<Subspace> ca;
                        try {
                            ca = y.xi(j);
                        } catch (const GapTooSmall&) {
                        }
                        if (!pa || !ca) {
                            ++res.undefined;
                            continue;
                        }
                        double g = principal_angle(*pa, *ca);
                        if (g > res.max_cauchy_gap || res.argmax.empty()) {
                            res.max_cauchy_gap = g;
                            res.argmax = w;
                        }
                    }
                    return;
                }
                for (int s = 0; s < N; ++s) {
                    if (depth > 0 && !sft.allowed(w[static_cast<std::size_t>(depth - 1)], s)) continue;
                    w[static_cast<std::size_t>(depth)] = s;
                    CompoundProduct y = x;
                    y.right_multiply(c.inverse_compound(s));
                    rec(depth + 1, y);
                }
            };
            for (std::size_t r = b; r < e; ++r) {
                const Word& root = roots[r];
                CompoundProduct x = CompoundProduct::identity(c.dim());
                for (std::size_t k = 0; k < root.size(); ++k) {
                    w[k] = root[k];
                    x.right_multiply(c.inverse_compound(root[k]));
                }
                rec(static_cast<int>(root.size()), x);
            }
            if (!res.argmax.empty()) part_key[ch] = res.max_cauchy_gap;
        });
    }
    EcsCauchyScan out;
    out.index = i;
    out.n = n;
    double best_key = -1.0;
    for (std::size_t ch = 0; ch < chunks; ++ch) {
        const auto& p = part[ch];
        out.words += p.words;
        out.undefined += p.undefined;
        if (!p.argmax.empty() && part_key[ch] > best_key) {
            best_key = part_key[ch];
            out.max_cauchy_gap = p.max_cauchy_gap;
            out.argmax = p.argmax;
        }
    }
    return out;
}

struct LimitConeSample {
    std::vector<std::vector<double>> directions;
    std::vector<PeriodicOrbit> orbits;           // orbit of each direction
    std::vector<double> wall_gap;                // per i = 1..d-1 (index i-1)
    std::vector<std::optional<PeriodicOrbit>> wall_argmin;
};

inline LimitConeSample limit_cone_sample(const LocallyConstantCocycle& c, int p_max, const ScanOptions& opt = {}) {
    if (!primitivity(c.sft()).is_primitive) throw NotPrimitive("limit_cone_sample requires a primitive subshift");
    auto orbits = periodic_orbits(c.sft(), p_max);
    std::vector<std::vector<double>> lam(orbits.size());
    parallel_chunks(orbits.size(), resolve_threads(opt.threads), [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) lam[k] = evaluate_compound(c, orbits[k].necklace).jordan().lambda;
    });
    int d = c.dim();
    LimitConeSample out;
    out.wall_gap.assign(static_cast<std::size_t>(std::max(0, d - 1)), std::numeric_limits<double>::infinity());
    out.wall_argmin.assign(static_cast<std::size_t>(std::max(0, d - 1)), std::nullopt);
    for (std::size_t k = 0; k < orbits.size(); ++k) {
        double nrm = norm(lam[k]);
        if (nrm <= 1e-9 * orbits[k].period()) continue;
        std::vector<double> x = lam[k];
        for (double& v : x) v /= nrm;
        for (int w = 0; w + 1 < d; ++w) {
            double g = x[static_cast<std::size_t>(w)] - x[static_cast<std::size_t>(w) + 1];
            if (g < out.wall_gap[static_cast<std::size_t>(w)]) {
                out.wall_gap[static_cast<std::size_t>(w)] = g;
                out.wall_argmin[static_cast<std::size_t>(w)] = orbits[k];
            }
        }
        out.directions.push_back(std::move(x));
        out.orbits.push_back(orbits[k]);
    }
    return out;
}

// Angle between Ξ_{d-i}((Φ^{(m)}(T^n x))^{-1}) and Ξ_i(Φ^{(n)}(x)) for the word split at n.
inline double angle_diagnostic(const LocallyConstantCocycle& c, const Word& word, int split_n, int i) {
    check_index(c, i);
    if (split_n < 1 || split_n >= static_cast<int>(word.size()))
        throw ValidationError("angle_diagnostic: need 1 <= split_n < word length");
    require_admissible(c.sft(), word);
    Word pre(word.begin(), word.begin() + split_n), suf(word.begin() + split_n, word.end());
    Subspace top = evaluate_compound(c, pre).xi(i);
    Subspace bottom = evaluate_inverse_compound(c, suf).xi(c.dim() - i);
    return principal_angle(bottom, top);
}

struct AngleScan {
    double min_angle = std::numeric_limits<double>::infinity();
    Word argmin;
    std::uint64_t pairs = 0;
    std::uint64_t undefined = 0;
};

// Minimum of angle_diagnostic over every admissible word of the given length with a fixed split.
inline AngleScan angle_scan(const LocallyConstantCocycle& c, int i, int length, int split_n,
                            const ScanOptions& opt = {}) {
    check_index(c, i);
    if (split_n < 1 || split_n >= length) throw ValidationError("angle_scan: need 1 <= split_n < length");
    auto pre = admissible_words(c.sft(), split_n), suf = admissible_words(c.sft(), length - split_n);
    if (static_cast<std::uint64_t>(pre.size()) * suf.size() > opt.budget)
        throw BudgetExceeded(opt.budget, "angle_scan: enumeration budget exceeded");
    int threads = resolve_threads(opt.threads);
    std::vector<std::optional<Subspace>> top(pre.size()), bottom(suf.size());
    parallel_chunks(pre.size(), threads, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) try {
                top[k] = evaluate_compound(c, pre[k]).xi(i);
            } catch (const GapTooSmall&) {
            }
    });
    parallel_chunks(suf.size(), threads, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) try {
                bottom[k] = evaluate_inverse_compound(c, suf[k]).xi(c.dim() - i);
            } catch (const GapTooSmall&) {
            }
    });
    std::size_t chunks = chunk_count(pre.size(), threads);
    std::vector<AngleScan> part(chunks);
    parallel_chunks(pre.size(), threads, [&](std::size_t ch, std::size_t b, std::size_t e) {
        auto& r = part[ch];
        for (std::size_t p = b; p < e; ++p)
            for (std::size_t s = 0; s < suf.size(); ++s) {
                if (!c.sft().allowed(pre[p].back(), suf[s].front())) continue;
                ++r.pairs;
                if (!top[p] || !bottom[s]) {
                    ++r.undefined;
                    continue;
                }
                double a = principal_angle(*bottom[s], *top[p]);
                if (a < r.min_angle) {
                    r.min_angle = a;
                    r.argmin = pre[p];
                    r.argmin.insert(r.argmin.end(), suf[s].begin(), suf[s].end());
                }
            }
    });
    AngleScan out;
    for (const auto& r : part) {
        out.pairs += r.pairs;
        out.undefined += r.undefined;
        if (r.min_angle < out.min_angle) {
            out.min_angle = r.min_angle;
            out.argmin = r.argmin;
        }
    }
    return out;
}

struct GrowthDiagnostic {
    int index = 0;
    int n_max = 0;
    std::vector<int> m_values;
    std::vector<double> min_increment;  // min over (n, word) of |S_i(n+m) − S_i(n)|
    AffineBound fit;
    std::uint64_t evaluations = 0;
};

// Minimum increments of μ_1+…+μ_i along words for the determinant-normalized cocycle.
inline GrowthDiagnostic growth_diagnostic(const LocallyConstantCocycle& c, int i, int n_max,
                                          const ScanOptions& opt = {}) {
    check_index(c, i);
    if (n_max < 1) throw ValidationError("growth_diagnostic: n_max must be >= 1");
    const auto& sft = c.sft();
    int N = sft.alphabet_size(), d = c.dim();
    std::uint64_t nodes = 0;
    for (int n = 1; n <= n_max; ++n) nodes += count_admissible_words(sft, n);
    if (nodes > opt.budget) throw BudgetExceeded(opt.budget, "growth_diagnostic: enumeration budget exceeded");
    std::vector<CompoundProduct> gens;
    for (int s = 0; s < N; ++s) {
        const Matrix& g = c.generators()[static_cast<std::size_t>(s)].matrix();
        gens.push_back(CompoundProduct::of(g / std::pow(std::abs(g.determinant()), 1.0 / d)));
    }
    int threads = resolve_threads(opt.threads);
    std::vector<int> roots;
    for (int s = 0; s < N; ++s) roots.push_back(s);
    std::size_t chunks = chunk_count(roots.size(), threads);
    std::vector<std::vector<double>> part(chunks,
                                          std::vector<double>(static_cast<std::size_t>(n_max) + 1,
                                                              std::numeric_limits<double>::infinity()));
    parallel_chunks(roots.size(), threads, [&](std::size_t ch, std::size_t b, std::size_t e) {
        auto& best = part[ch];
        std::vector<double> sums(static_cast<std::size_t>(n_max) + 1, 0.0);
        std::function<void(int, int, const CompoundProduct&)> rec = [&](int depth, int lastsym,
                                                                         const CompoundProduct& x) {
            double sk = x.partial_sums()[static_cast<std::size_t>(i)];
            sums[static_cast<std::size_t>(depth)] = sk;
            for (int j0 = 0; j0 < depth; ++j0) {
                double v = std::abs(sk - sums[static_cast<std::size_t>(j0)]);
                auto& slot = best[static_cast<std::size_t>(depth - j0)];
                slot = std::min(slot, v);
            }
            if (depth == n_max) return;
            for (int s = 0; s < N; ++s) {
                if (!sft.allowed(lastsym, s)) continue;
                CompoundProduct y = x;
                y.left_multiply(gens[static_cast<std::size_t>(s)]);
                rec(depth + 1, s, y);
            }
        };
        for (std::size_t r = b; r < e; ++r) rec(1, roots[r], gens[static_cast<std::size_t>(roots[r])]);
    });
    GrowthDiagnostic out;
    out.index = i;
    out.n_max = n_max;
    out.evaluations = nodes;
    std::vector<double> x, y;
    for (int m = 1; m <= n_max; ++m) {
        double v = std::numeric_limits<double>::infinity();
        for (const auto& p : part) v = std::min(v, p[static_cast<std::size_t>(m)]);
        out.m_values.push_back(m);
        out.min_increment.push_back(v);
        x.push_back(m);
        y.push_back(v);
    }
    out.fit = fit_affine_lower_bound(x, y);
    return out;
}

}  // namespace cocygap
