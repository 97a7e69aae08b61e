#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace cocygap {

using Word = std::vector<int>;

class SubshiftOfFiniteType {
public:
    SubshiftOfFiniteType() = default;

    explicit SubshiftOfFiniteType(std::vector<std::vector<int>> adjacency) : adj_(std::move(adjacency)) {
        n_ = static_cast<int>(adj_.size());
        if (n_ < 1) throw ValidationError("SFT: alphabet must be non-empty");
        for (const auto& row : adj_) {
            if (static_cast<int>(row.size()) != n_) throw ValidationError("SFT: adjacency must be square");
            for (int v : row)
                if (v != 0 && v != 1) throw ValidationError("SFT: adjacency entries must be 0 or 1");
        }
        for (int a = 0; a < n_; ++a) {
            bool row = false, col = false;
            for (int b = 0; b < n_; ++b) {
                row = row || adj_[a][b];
                col = col || adj_[b][a];
            }
            if (!row || !col) throw ValidationError("SFT: symbol " + std::to_string(a) + " is not bi-extendable");
        }
    }

    static SubshiftOfFiniteType full_shift(int n) {
        return SubshiftOfFiniteType(std::vector<std::vector<int>>(n, std::vector<int>(n, 1)));
    }

    int alphabet_size() const { return n_; }
    const std::vector<std::vector<int>>& adjacency() const { return adj_; }
    bool allowed(int a, int b) const { return adj_[a][b] != 0; }

    bool operator==(const SubshiftOfFiniteType&) const = default;

private:
    int n_ = 0;
    std::vector<std::vector<int>> adj_;
};

struct PeriodicOrbit {
    Word necklace;
    int period() const { return static_cast<int>(necklace.size()); }
    bool operator==(const PeriodicOrbit&) const = default;
};

inline bool is_admissible(const SubshiftOfFiniteType& sft, const Word& w) {
    for (int s : w)
        if (s < 0 || s >= sft.alphabet_size()) return false;
    for (std::size_t k = 0; k + 1 < w.size(); ++k)
        if (!sft.allowed(w[k], w[k + 1])) return false;
    return true;
}

inline bool is_cyclically_admissible(const SubshiftOfFiniteType& sft, const Word& w) {
    return !w.empty() && is_admissible(sft, w) && sft.allowed(w.back(), w.front());
}

inline void require_admissible(const SubshiftOfFiniteType& sft, const Word& w) {
    if (!is_admissible(sft, w)) throw InadmissibleWord("word is not admissible for the subshift");
}

// ---- integer and boolean matrix powers ----

using CountMatrix = std::vector<std::vector<std::uint64_t>>;

inline CountMatrix count_product(const CountMatrix& a, const CountMatrix& b) {
    std::size_t n = a.size();
    CountMatrix c(n, std::vector<std::uint64_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            if (a[i][k])
                for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}

inline CountMatrix adjacency_power(const SubshiftOfFiniteType& sft, int p) {
    std::size_t n = static_cast<std::size_t>(sft.alphabet_size());
    CountMatrix id(n, std::vector<std::uint64_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) id[i][i] = 1;
    CountMatrix a(n, std::vector<std::uint64_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i][j] = static_cast<std::uint64_t>(sft.adjacency()[i][j]);
    CountMatrix r = id;
    for (int k = 0; k < p; ++k) r = count_product(r, a);
    return r;
}

inline std::uint64_t trace_of_power(const SubshiftOfFiniteType& sft, int p) {
    auto m = adjacency_power(sft, p);
    std::uint64_t t = 0;
    for (std::size_t i = 0; i < m.size(); ++i) t += m[i][i];
    return t;
}

inline std::uint64_t count_admissible_words(const SubshiftOfFiniteType& sft, int n) {
    if (n <= 0) return n == 0 ? 1 : 0;
    auto m = adjacency_power(sft, n - 1);
    std::uint64_t t = 0;
    for (const auto& row : m)
        for (auto v : row) t += v;
    return t;
}

// reach[m][a][b] == true iff there is an admissible path of m steps from a to b.
inline std::vector<std::vector<std::vector<char>>> reachability(const SubshiftOfFiniteType& sft, int max_steps) {
    int n = sft.alphabet_size();
    std::vector<std::vector<std::vector<char>>> reach(max_steps + 1,
                                                      std::vector<std::vector<char>>(n, std::vector<char>(n, 0)));
    for (int a = 0; a < n; ++a) reach[0][a][a] = 1;
    for (int m = 1; m <= max_steps; ++m)
        for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c)
                if (reach[m - 1][a][c])
                    for (int b = 0; b < n; ++b)
                        if (sft.allowed(c, b)) reach[m][a][b] = 1;
    return reach;
}

struct Primitivity {
    bool is_primitive = false;
    std::optional<int> n0;
};

inline Primitivity primitivity(const SubshiftOfFiniteType& sft) {
    int n = sft.alphabet_size();
    int bound = (n - 1) * (n - 1) + 1;
    auto reach = reachability(sft, bound);
    // once A^m > 0 every higher power stays positive since rows of A are non-zero
    for (int m = 1; m <= bound; ++m) {
        bool positive = true;
        for (int a = 0; a < n && positive; ++a)
            for (int b = 0; b < n && positive; ++b) positive = reach[m][a][b] != 0;
        if (positive) return {true, m};
    }
    return {false, std::nullopt};
}

// Visits admissible words of length n in lexicographic order. The visitor
// may return false to stop early.
inline void for_each_admissible_word(const SubshiftOfFiniteType& sft, int n,
                                     const std::function<bool(const Word&)>& visit) {
    if (n <= 0) {
        visit(Word{});
        return;
    }
    Word w(n, 0);
    int N = sft.alphabet_size();
    std::function<bool(int)> rec = [&](int pos) -> bool {
        if (pos == n) return visit(w);
        for (int s = 0; s < N; ++s) {
            if (pos > 0 && !sft.allowed(w[pos - 1], s)) continue;
            w[pos] = s;
            if (!rec(pos + 1)) return false;
        }
        return true;
    };
    rec(0);
}

inline std::vector<Word> admissible_words(const SubshiftOfFiniteType& sft, int n) {
    std::vector<Word> out;
    for_each_admissible_word(sft, n, [&](const Word& w) {
        out.push_back(w);
        return true;
    });
    return out;
}

// Booth's least rotation: index where the lexicographically minimal rotation starts.
inline std::size_t least_rotation(const Word& s) {
    std::size_t n = s.size();
    if (n == 0) return 0;
    std::vector<long> f(2 * n, -1);
    long k = 0;
    for (long j = 1; j < static_cast<long>(2 * n); ++j) {
        int sj = s[static_cast<std::size_t>(j) % n];
        long i = f[static_cast<std::size_t>(j - k - 1)];
        while (i != -1 && sj != s[static_cast<std::size_t>(k + i + 1) % n]) {
            if (sj < s[static_cast<std::size_t>(k + i + 1) % n]) k = j - i - 1;
            i = f[static_cast<std::size_t>(i)];
        }
        if (i == -1 && sj != s[static_cast<std::size_t>(k + i + 1) % n]) {
            if (sj < s[static_cast<std::size_t>(k + i + 1) % n]) k = j;
            f[static_cast<std::size_t>(j - k)] = -1;
        } else {
            f[static_cast<std::size_t>(j - k)] = i + 1;
        }
    }
    return static_cast<std::size_t>(k) % n;
}

inline Word minimal_rotation(const Word& w) {
    std::size_t k = least_rotation(w);
    Word r(w.begin() + static_cast<long>(k), w.end());
    r.insert(r.end(), w.begin(), w.begin() + static_cast<long>(k));
    return r;
}

// Smallest p with w = (w[0..p))^{n/p}.
inline int primitive_period(const Word& w) {
    int n = static_cast<int>(w.size());
    for (int p = 1; p < n; ++p) {
        if (n % p) continue;
        bool ok = true;
        for (int k = p; k < n && ok; ++k) ok = w[k] == w[k - p];
        if (ok) return p;
    }
    return n;
}

inline bool is_primitive_word(const Word& w) { return !w.empty() && primitive_period(w) == static_cast<int>(w.size()); }

// The orbit of a cyclically admissible word, reduced to its primitive root.
inline PeriodicOrbit orbit_of(const SubshiftOfFiniteType& sft, const Word& w) {
    if (!is_cyclically_admissible(sft, w)) throw InadmissibleWord("word is not cyclically admissible");
    Word root(w.begin(), w.begin() + primitive_period(w));
    return {minimal_rotation(root)};
}

// All periodic orbits with period <= p_max, ordered by period then necklace.
// Lyndon words are produced by the FKM recursion, pruned on inadmissible prefixes.
inline std::vector<PeriodicOrbit> periodic_orbits(const SubshiftOfFiniteType& sft, int p_max) {
    std::vector<PeriodicOrbit> out;
    int N = sft.alphabet_size();
    for (int n = 1; n <= p_max; ++n) {
        std::vector<int> a(n + 1, 0);
        std::function<void(int, int)> gen = [&](int t, int p) {
            if (t > n) {
                if (p == n && sft.allowed(a[n], a[1])) out.push_back({Word(a.begin() + 1, a.end())});
                return;
            }
            a[t] = a[t - p];
            if (t == 1 || sft.allowed(a[t - 1], a[t])) gen(t + 1, p);
            for (int j = a[t - p] + 1; j < N; ++j) {
                a[t] = j;
                if (t == 1 || sft.allowed(a[t - 1], a[t])) gen(t + 1, t);
            }
        };
        gen(1, 1);
    }
    return out;
}

struct SpecificationResult {
    Word word;            // y_0 = j, input word at offset n0
    PeriodicOrbit orbit;  // necklace of the primitive root of word
    int n0 = 0;
    bool exact_period = true;  // false when every completion is a proper power
};

inline SpecificationResult specification_extension(const SubshiftOfFiniteType& sft, const Word& word, int j) {
    auto prim = primitivity(sft);
    if (!prim.is_primitive) throw NotPrimitive("specification_extension requires a primitive subshift");
    require_admissible(sft, word);
    if (j < 0 || j >= sft.alphabet_size()) throw ValidationError("specification_extension: symbol out of range");
    int n0 = *prim.n0;
    int k = static_cast<int>(word.size());
    int L = k + 2 * n0;
    Word y(L, -1);
    std::vector<char> fixed(L, 0);
    y[0] = j;
    fixed[0] = 1;
    for (int t = 0; t < k; ++t) {
        y[n0 + t] = word[t];
        fixed[n0 + t] = 1;
    }
    auto reach = reachability(sft, L);
    // distance to the next fixed position (cyclically, position L is y_0)
    std::vector<int> next_fixed(L + 1, L);
    for (int p = L - 1; p >= 0; --p) next_fixed[p] = fixed[p] ? p : next_fixed[p + 1];
    int N = sft.alphabet_size();
    std::optional<Word> found;
    bool need_primitive = true;
    std::function<bool(int)> fill = [&](int p) -> bool {
        if (p == L) {
            if (!sft.allowed(y[L - 1], y[0])) return false;
            if (need_primitive && !is_primitive_word(y)) return false;
            found = y;
            return true;
        }
        if (fixed[p]) {
            if (p > 0 && !sft.allowed(y[p - 1], y[p])) return false;
            return fill(p + 1);
        }
        int q = next_fixed[p + 1];
        int target = q == L ? y[0] : y[q];
        for (int s = 0; s < N; ++s) {
            if (p > 0 && !sft.allowed(y[p - 1], s)) continue;
            if (!reach[q - p][s][target]) continue;
            y[p] = s;
            if (fill(p + 1)) return true;
        }
        y[p] = -1;
        return false;
    };
    if (!fill(0)) {
        // e.g. golden mean, word (0,1), j=1: the only completion is (100)^2
        need_primitive = false;
        if (!fill(0)) throw NotPrimitive("specification_extension: no admissible completion exists");
    }
    return {*found, orbit_of(sft, *found), n0, need_primitive};
}

// Alphabet a_1, a_1^{-1}, ..., a_r, a_r^{-1}; symbol s has inverse s ^ 1.
inline SubshiftOfFiniteType geodesic_sft_free_group(int r) {
    if (r < 1) throw ValidationError("geodesic_sft_free_group: rank must be >= 1");
    int n = 2 * r;
    std::vector<std::vector<int>> adj(n, std::vector<int>(n, 1));
    for (int f = 0; f < n; ++f) adj[f][f ^ 1] = 0;
    return SubshiftOfFiniteType(adj);
}

inline int free_group_inverse_symbol(int s) { return s ^ 1; }

}  // namespace cocygap
