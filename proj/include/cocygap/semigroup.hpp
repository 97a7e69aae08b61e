#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "affine_fit.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "parallel.hpp"

namespace cocygap {

// Canonical form of a semigroup element. Layout per variant:
//   free semigroup   letters (generator indices); the empty word is the unit
//   free group       reduced word, letter 2k = f_k and 2k+1 = f_k^-1
//   finite group     {index}
//   BS(1,2)          {m, N, n} for b^-m a^N b^n
//   Rees             {i, j, base element...}; the empty vector is the adjoined unit
using Element = std::vector<std::int64_t>;

struct ElementHash {
    std::size_t operator()(const Element& e) const {
        std::uint64_t h = 0x84222325cbf29ce4ULL ^ e.size();
        for (auto v : e) {
            h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h *= 0x100000001b3ULL;
        }
        return static_cast<std::size_t>(h ^ (h >> 29));
    }
};

class SemigroupPresentation {
public:
    virtual ~SemigroupPresentation() = default;

    virtual std::string variant() const = 0;
    virtual Element multiply(const Element& a, const Element& b) const = 0;
    // identity for groups and monoids; an adjoined unit otherwise
    virtual Element unit() const = 0;
    virtual bool is_group() const { return false; }
    virtual Element inverse(const Element&) const { throw ValidationError(variant() + " is not a group"); }
    // every x with x * f == y (x may be unit())
    virtual std::vector<Element> left_quotients(const Element& y, const Element& f) const = 0;
    virtual std::optional<double> exact_stable_length(const Element&) const { return std::nullopt; }
    virtual std::string format(const Element& e) const = 0;

    const std::vector<Element>& generators() const { return gens_; }
    const std::vector<std::string>& generator_names() const { return names_; }
    std::size_t generator_count() const { return gens_.size(); }

    Element product(const std::vector<int>& word) const {
        Element x = unit();
        for (int g : word) x = multiply(x, gens_.at(static_cast<std::size_t>(g)));
        return x;
    }

    Element power(const Element& g, int n) const {
        Element x = unit();
        for (int k = 0; k < n; ++k) x = multiply(x, g);
        return x;
    }

protected:
    std::vector<Element> gens_;
    std::vector<std::string> names_;
};

using PresentationPtr = std::shared_ptr<const SemigroupPresentation>;

class FreeSemigroup : public SemigroupPresentation {
public:
    explicit FreeSemigroup(int r) : r_(r) {
        if (r < 1) throw ValidationError("free semigroup needs r >= 1");
        for (int k = 0; k < r; ++k) {
            gens_.push_back({k});
            names_.push_back("f" + std::to_string(k));
        }
    }
    int rank() const { return r_; }
    std::string variant() const override { return "FreeSemigroup"; }
    Element unit() const override { return {}; }
    Element multiply(const Element& a, const Element& b) const override {
        Element c = a;
        c.insert(c.end(), b.begin(), b.end());
        return c;
    }
    std::vector<Element> left_quotients(const Element& y, const Element& f) const override {
        if (y.empty() || y.back() != f.front()) return {};
        return {Element(y.begin(), y.end() - 1)};
    }
    std::optional<double> exact_stable_length(const Element& e) const override {
        return static_cast<double>(e.size());
    }
    std::string format(const Element& e) const override {
        if (e.empty()) return "e";
        std::string s;
        for (auto v : e) s += (s.empty() ? "" : " ") + names_[static_cast<std::size_t>(v)];
        return s;
    }

private:
    int r_;
};

class FreeGroupSymmetric : public SemigroupPresentation {
public:
    explicit FreeGroupSymmetric(int r) : r_(r) {
        if (r < 1) throw ValidationError("free group needs r >= 1");
        for (int k = 0; k < r; ++k) {
            gens_.push_back({2 * k});
            gens_.push_back({2 * k + 1});
            names_.push_back("f" + std::to_string(k));
            names_.push_back("f" + std::to_string(k) + "^-1");
        }
    }
    int rank() const { return r_; }
    std::string variant() const override { return "FreeGroupSymmetric"; }
    bool is_group() const override { return true; }
    Element unit() const override { return {}; }
    Element multiply(const Element& a, const Element& b) const override {
        Element c = a;
        for (auto v : b) {
            if (!c.empty() && c.back() == (v ^ 1))
                c.pop_back();
            else
                c.push_back(v);
        }
        return c;
    }
    Element inverse(const Element& a) const override {
        Element c(a.rbegin(), a.rend());
        for (auto& v : c) v ^= 1;
        return c;
    }
    std::vector<Element> left_quotients(const Element& y, const Element& f) const override {
        return {multiply(y, inverse(f))};
    }
    // length of the cyclic reduction
    std::optional<double> exact_stable_length(const Element& e) const override {
        std::size_t lo = 0, hi = e.size();
        while (hi - lo >= 2 && e[lo] == (e[hi - 1] ^ 1)) {
            ++lo;
            --hi;
        }
        return static_cast<double>(hi - lo);
    }
    std::string format(const Element& e) const override {
        if (e.empty()) return "e";
        std::string s;
        for (auto v : e) s += (s.empty() ? "" : " ") + names_[static_cast<std::size_t>(v)];
        return s;
    }

private:
    int r_;
};

class FiniteGroup : public SemigroupPresentation {
public:
    // table[x][y] = index of x*y; generators are symmetrized
    FiniteGroup(std::vector<std::vector<int>> table, std::vector<int> generators) : table_(std::move(table)) {
        int n = static_cast<int>(table_.size());
        if (n == 0) throw ValidationError("finite group: empty table");
        for (const auto& row : table_) {
            if (static_cast<int>(row.size()) != n) throw ValidationError("finite group: table must be square");
            std::vector<char> seen(static_cast<std::size_t>(n), 0);
            for (int v : row) {
                if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)])
                    throw ValidationError("finite group: rows must be permutations");
                seen[static_cast<std::size_t>(v)] = 1;
            }
        }
        identity_ = -1;
        for (int x = 0; x < n && identity_ < 0; ++x) {
            bool ok = true;
            for (int y = 0; y < n; ++y) ok = ok && at(x, y) == y && at(y, x) == y;
            if (ok) identity_ = x;
        }
        if (identity_ < 0) throw ValidationError("finite group: no identity");
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                for (int z = 0; z < n; ++z)
                    if (at(at(x, y), z) != at(x, at(y, z))) throw ValidationError("finite group: not associative");
        inv_.assign(static_cast<std::size_t>(n), -1);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                if (at(x, y) == identity_) inv_[static_cast<std::size_t>(x)] = y;
        std::vector<int> sym;
        for (int g : generators) {
            if (g < 0 || g >= n) throw ValidationError("finite group: generator out of range");
            for (int h : {g, inv_[static_cast<std::size_t>(g)]})
                if (std::find(sym.begin(), sym.end(), h) == sym.end()) sym.push_back(h);
        }
        for (int g : sym) {
            gens_.push_back({g});
            names_.push_back("g" + std::to_string(g));
        }
        // the generators must generate
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::vector<int> stack{identity_};
        seen[static_cast<std::size_t>(identity_)] = 1;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            for (int g : sym) {
                int y = at(x, g);
                if (!seen[static_cast<std::size_t>(y)]) {
                    seen[static_cast<std::size_t>(y)] = 1;
                    stack.push_back(y);
                }
            }
        }
        if (std::count(seen.begin(), seen.end(), 1) != n)
            throw ValidationError("finite group: generators do not generate the group");
    }

    static std::shared_ptr<FiniteGroup> cyclic(int n) {
        std::vector<std::vector<int>> t(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) t[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] = (x + y) % n;
        return std::make_shared<FiniteGroup>(t, std::vector<int>{n > 1 ? 1 : 0});
    }

    int order() const { return static_cast<int>(table_.size()); }
    const std::vector<std::vector<int>>& table() const { return table_; }
    std::string variant() const override { return "FiniteGroup"; }
    bool is_group() const override { return true; }
    Element unit() const override { return {identity_}; }
    Element multiply(const Element& a, const Element& b) const override {
        return {at(static_cast<int>(a[0]), static_cast<int>(b[0]))};
    }
    Element inverse(const Element& a) const override { return {inv_[static_cast<std::size_t>(a[0])]}; }
    std::vector<Element> left_quotients(const Element& y, const Element& f) const override {
        return {multiply(y, inverse(f))};
    }
    std::optional<double> exact_stable_length(const Element&) const override { return 0.0; }
    std::string format(const Element& e) const override { return "g" + std::to_string(e[0]); }

private:
    std::vector<std::vector<int>> table_;
    std::vector<int> inv_;
    int identity_ = 0;

    int at(int x, int y) const { return table_[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)]; }
};

// ⟨a, b : b a b^-1 = a^2⟩ with normal form b^-m a^N b^n, m, n >= 0, and mn = 0 whenever N is even.
class BS12 : public SemigroupPresentation {
public:
    BS12() {
        gens_ = {{0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {1, 0, 0}};
        names_ = {"a", "a^-1", "b", "b^-1"};
    }

    static Element normal_form(std::int64_t m, std::int64_t N, std::int64_t n) {
        if (m < 0 || n < 0) throw ValidationError("BS(1,2): exponents m, n must be >= 0");
        if (N == 0) return n >= m ? Element{0, 0, n - m} : Element{m - n, 0, 0};
        while (N % 2 == 0 && m > 0 && n > 0) {
            N /= 2;
            --m;
            --n;
        }
        return {m, N, n};
    }

    std::string variant() const override { return "BaumslagSolitar12"; }
    bool is_group() const override { return true; }
    Element unit() const override { return {0, 0, 0}; }

    Element multiply(const Element& x, const Element& y) const override {
        std::int64_t m = x[0], N = x[1], n = x[2], m2 = y[0], N2 = y[1], n2 = y[2];
        std::int64_t t = n - m2;
        if (t >= 0) return normal_form(m, checked_add(N, shifted(N2, t)), t + n2);
        return normal_form(m - t, checked_add(shifted(N, -t), N2), n2);
    }

    Element inverse(const Element& x) const override { return normal_form(x[2], -x[1], x[0]); }

    std::vector<Element> left_quotients(const Element& y, const Element& f) const override {
        return {multiply(y, inverse(f))};
    }

    std::string format(const Element& e) const override {
        return "b^-" + std::to_string(e[0]) + " a^" + std::to_string(e[1]) + " b^" + std::to_string(e[2]);
    }

private:
    static std::int64_t shifted(std::int64_t v, std::int64_t t) {
        if (v == 0) return 0;
        if (t >= 62 || std::abs(v) > (std::int64_t{1} << (62 - t)))
            throw ValidationError("BS(1,2): normal form exponent overflow");
        return v * (std::int64_t{1} << t);
    }
    static std::int64_t checked_add(std::int64_t a, std::int64_t b) {
        std::int64_t r;
        if (__builtin_add_overflow(a, b, &r)) throw ValidationError("BS(1,2): normal form exponent overflow");
        return r;
    }
};

// M(Γ, I, J, P) = I × Γ × J with (i,g,j)(i',g',j') = (i, g p_{j,i'} g', j').
class Rees : public SemigroupPresentation {
public:
    // sandwich[j][i] = p_{j,i}
    Rees(PresentationPtr base, int I, int J, std::vector<std::vector<Element>> sandwich)
        : base_(std::move(base)), I_(I), J_(J), P_(std::move(sandwich)) {
        if (!base_ || !base_->is_group()) throw ValidationError("Rees: base must be a group variant");
        if (I < 1 || J < 1) throw ValidationError("Rees: I and J must be nonempty");
        if (static_cast<int>(P_.size()) != J) throw ValidationError("Rees: sandwich matrix must have |J| rows");
        for (const auto& row : P_)
            if (static_cast<int>(row.size()) != I) throw ValidationError("Rees: sandwich matrix must have |I| columns");
        for (int i = 0; i < I; ++i)
            for (int j = 0; j < J; ++j)
                for (std::size_t k = 0; k < base_->generator_count(); ++k) {
                    gens_.push_back(phi(i, j, base_->generators()[k]));
                    names_.push_back("phi" + std::to_string(i) + std::to_string(j) + "(" + base_->generator_names()[k] +
                                     ")");
                }
    }

    const SemigroupPresentation& base() const { return *base_; }
    PresentationPtr base_ptr() const { return base_; }
    int I() const { return I_; }
    int J() const { return J_; }
    const Element& p(int j, int i) const { return P_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]; }

    // φ_{i,j}(g) = (i, g p_{j,i}^{-1}, j)
    Element phi(int i, int j, const Element& g) const { return pack(i, j, base_->multiply(g, base_->inverse(p(j, i)))); }

    static Element pack(int i, int j, const Element& g) {
        Element e{i, j};
        e.insert(e.end(), g.begin(), g.end());
        return e;
    }
    static Element group_part(const Element& e) { return Element(e.begin() + 2, e.end()); }

    std::string variant() const override { return "Rees"; }
    Element unit() const override { return {}; }

    Element multiply(const Element& a, const Element& b) const override {
        if (a.empty()) return b;
        if (b.empty()) return a;
        auto j = static_cast<int>(a[1]), i2 = static_cast<int>(b[0]);
        Element g = base_->multiply(base_->multiply(group_part(a), p(j, i2)), group_part(b));
        return pack(static_cast<int>(a[0]), static_cast<int>(b[1]), g);
    }

    std::vector<Element> left_quotients(const Element& y, const Element& f) const override {
        std::vector<Element> out;
        if (y == f) out.push_back(unit());
        if (y.empty() || y[1] != f[1]) return out;
        // (i, h, j)(i_f, g_f, j_f) = (i, h p_{j,i_f} g_f, j_f)
        Element tail_inv = base_->inverse(group_part(f));
        for (int j = 0; j < J_; ++j) {
            Element h = base_->multiply(base_->multiply(group_part(y), tail_inv),
                                        base_->inverse(p(j, static_cast<int>(f[0]))));
            out.push_back(pack(static_cast<int>(y[0]), j, h));
        }
        return out;
    }

    std::string format(const Element& e) const override {
        if (e.empty()) return "e";
        return "(" + std::to_string(e[0]) + ", " + base_->format(group_part(e)) + ", " + std::to_string(e[1]) + ")";
    }

private:
    PresentationPtr base_;
    int I_, J_;
    std::vector<std::vector<Element>> P_;
};

inline std::shared_ptr<Rees> rees_build(PresentationPtr base, int I, int J, std::vector<std::vector<Element>> P) {
    return std::make_shared<Rees>(std::move(base), I, J, std::move(P));
}

// ---------------------------------------------------------------- Cayley balls

struct CayleyBall {
    std::vector<Element> elements;  // breadth-first, generators in order
    std::vector<int> length;
    std::vector<std::int64_t> parent;  // -1 for the unit
    std::vector<int> last_generator;
    std::vector<std::size_t> sphere_begin;  // sphere ℓ is [sphere_begin[ℓ], sphere_begin[ℓ+1])
    std::unordered_map<Element, std::size_t, ElementHash> index;

    int radius() const { return static_cast<int>(sphere_begin.size()) - 2; }

    std::vector<int> word(std::size_t k) const {
        std::vector<int> w;
        for (auto x = static_cast<std::int64_t>(k); parent[static_cast<std::size_t>(x)] >= 0;
             x = parent[static_cast<std::size_t>(x)])
            w.push_back(last_generator[static_cast<std::size_t>(x)]);
        std::reverse(w.begin(), w.end());
        return w;
    }
};

inline void grow_ball(const SemigroupPresentation& p, CayleyBall& ball, int radius, std::uint64_t budget) {
    if (ball.elements.empty()) {
        ball.elements.push_back(p.unit());
        ball.length.push_back(0);
        ball.parent.push_back(-1);
        ball.last_generator.push_back(-1);
        ball.index.emplace(p.unit(), 0);
        ball.sphere_begin = {0, 1};
    }
    const auto& gens = p.generators();
    while (ball.radius() < radius) {
        std::size_t b = ball.sphere_begin[ball.sphere_begin.size() - 2], e = ball.sphere_begin.back();
        int ell = ball.radius() + 1;
        for (std::size_t k = b; k < e; ++k)
            for (std::size_t g = 0; g < gens.size(); ++g) {
                Element y = p.multiply(ball.elements[k], gens[g]);
                if (ball.index.count(y)) continue;
                if (ball.elements.size() >= budget)
                    throw BudgetExceeded(budget, "Cayley ball exceeds the element budget");
                ball.index.emplace(y, ball.elements.size());
                ball.elements.push_back(std::move(y));
                ball.length.push_back(ell);
                ball.parent.push_back(static_cast<std::int64_t>(k));
                ball.last_generator.push_back(static_cast<int>(g));
            }
        ball.sphere_begin.push_back(ball.elements.size());
        if (ball.sphere_begin.back() == e) break;  // saturated
    }
}

inline CayleyBall cayley_ball(const SemigroupPresentation& p, int radius, std::uint64_t budget = 20'000'000) {
    CayleyBall ball;
    grow_ball(p, ball, radius, budget);
    return ball;
}

// Exact word lengths by meeting a cached forward ball with a backward search from the target.
class WordLengthOracle {
public:
    explicit WordLengthOracle(PresentationPtr p, std::uint64_t budget = 20'000'000)
        : p_(std::move(p)), budget_(budget) {}

    const SemigroupPresentation& presentation() const { return *p_; }

    // Bidirectional: the forward ball is shared across queries and grown lazily; the side
    // with the smaller frontier is expanded. After each step every path of length <= A + B
    // has been seen, so the first meeting of total <= A + B is exact.
    int length(const Element& g, int r_max) { return static_cast<int>(geodesic(g, r_max).size()); }

    // a shortest word of generator indices for g
    std::vector<int> geodesic(const Element& g, int r_max) {
        if (r_max < 0) throw ValidationError("word_length: R_max must be >= 0");
        auto too_long = [&] { return NotInBall(r_max, "word length exceeds R_max = " + std::to_string(r_max)); };
        grow_ball(*p_, ball_, 0, budget_);
        int A = ball_.radius();
        if (auto it = ball_.index.find(g); it != ball_.index.end()) {
            if (ball_.length[it->second] > r_max) throw too_long();
            return ball_.word(it->second);
        }
        struct Back {
            int depth;
            int gen;  // x * f_gen = next
            Element next;
        };
        std::unordered_map<Element, Back, ElementHash> back{{g, {0, -1, {}}}};
        Element meet;
        std::vector<Element> layer{g};
        int B = 0, best = std::numeric_limits<int>::max();
        bool saturated = false;
        while (A + B < r_max && best > A + B) {
            std::size_t sphere = ball_.sphere_begin.back() - ball_.sphere_begin[ball_.sphere_begin.size() - 2];
            if (!saturated && (sphere <= layer.size() || layer.empty())) {
                grow_ball(*p_, ball_, A + 1, budget_);
                if (ball_.radius() == A) {
                    saturated = true;
                    if (layer.empty()) break;
                    continue;
                }
                ++A;
                for (std::size_t k = ball_.sphere_begin[static_cast<std::size_t>(A)]; k < ball_.elements.size(); ++k)
                    if (auto it = back.find(ball_.elements[k]); it != back.end() && A + it->second.depth < best) {
                        best = A + it->second.depth;
                        meet = ball_.elements[k];
                    }
            } else {
                if (layer.empty()) break;
                ++B;
                std::vector<Element> next;
                for (const auto& y : layer)
                    for (std::size_t f = 0; f < p_->generator_count(); ++f)
                        for (auto& x : p_->left_quotients(y, p_->generators()[f])) {
                            if (back.count(x)) continue;
                            if (auto it = ball_.index.find(x); it != ball_.index.end() && ball_.length[it->second] + B < best) {
                                best = ball_.length[it->second] + B;
                                meet = x;
                            }
                            if (back.size() >= budget_)
                                throw BudgetExceeded(budget_, "word_length: backward search exceeds the budget");
                            back.emplace(x, Back{B, static_cast<int>(f), y});
                            next.push_back(std::move(x));
                        }
                layer = std::move(next);
            }
        }
        if (best > r_max) throw too_long();
        auto word = ball_.word(ball_.index.at(meet));
        for (Element x = meet; !(x == g);) {
            const auto& b = back.at(x);
            word.push_back(b.gen);
            x = b.next;
        }
        return word;
    }

    const CayleyBall& ball() const { return ball_; }

private:
    PresentationPtr p_;
    std::uint64_t budget_;
    CayleyBall ball_;
};

inline int word_length(const PresentationPtr& p, const Element& g, int r_max) {
    WordLengthOracle o(p);
    return o.length(g, r_max);
}

struct StableLength {
    double estimate = 0.0;
    double lower = 0.0;  // estimate minus the declared slack, not certified
    double upper = 0.0;  // min_n |γ^n| / n, a certified upper bound
    int n_at_upper = 1;
    bool exact = false;
};

// Brackets from the powers n = 1, 2, 4, ... <= n_max. Powers whose length exceeds
// r_max are skipped; |γ| itself must be within r_max.
inline StableLength stable_length(WordLengthOracle& o, const Element& g, int n_max, int r_max) {
    if (n_max < 1) throw ValidationError("stable_length: n_max must be >= 1");
    const auto& p = o.presentation();
    StableLength s;
    if (auto ex = p.exact_stable_length(g)) {
        s.estimate = s.lower = s.upper = *ex;
        s.exact = true;
        return s;
    }
    int first = o.length(g, r_max);
    s.upper = s.estimate = first;
    int last_n = 1;
    Element x = g;
    for (int n = 2; n <= n_max; n *= 2) {
        int len;
        try {
            x = p.multiply(x, x);
            len = o.length(x, r_max);
        } catch (const NotInBall&) {
            continue;
        } catch (const ValidationError&) {
            break;  // normal form overflow: the power is far outside any ball
        }
        double v = static_cast<double>(len) / n;
        if (v < s.upper) {
            s.upper = v;
            s.n_at_upper = n;
        }
        s.estimate = v;
        last_n = n;
    }
    s.lower = std::max(0.0, s.estimate - static_cast<double>(first) / last_n);
    return s;
}

inline StableLength stable_length(const PresentationPtr& p, const Element& g, int n_max, int r_max) {
    WordLengthOracle o(p);
    return stable_length(o, g, n_max, r_max);
}

// ------------------------------------------------------------- representations

struct SemigroupRepresentation {
    PresentationPtr presentation;
    std::vector<MatrixGL> images;  // one per generator of F

    int dim() const { return images.front().dim(); }

    Matrix image_of_word(const std::vector<int>& word) const {
        Matrix m = Matrix::Identity(dim(), dim());
        for (int g : word) m = m * images.at(static_cast<std::size_t>(g)).matrix();
        return m;
    }
};

inline constexpr double kRelationTol = 1e-12;

// base_images: one per free generator for semigroup variants; for group variants one per
// generator before symmetrization (f_k for free groups, a and b for BS(1,2)), inverses added.
inline SemigroupRepresentation make_representation(PresentationPtr p, const std::vector<Matrix>& base_images) {
    SemigroupRepresentation rep{p, {}};
    auto v = p->variant();
    if (v == "FreeSemigroup") {
        if (base_images.size() != p->generator_count()) throw ValidationError("representation: one image per generator");
        for (const auto& m : base_images) rep.images.emplace_back(m);
    } else if (v == "FreeGroupSymmetric" || v == "BaumslagSolitar12") {
        if (base_images.size() * 2 != p->generator_count())
            throw ValidationError("representation: one image per group generator");
        for (const auto& m : base_images) {
            rep.images.emplace_back(m);
            rep.images.emplace_back(Matrix(m.inverse()));
        }
    } else {
        if (base_images.size() != p->generator_count()) throw ValidationError("representation: one image per generator");
        for (const auto& m : base_images) rep.images.emplace_back(m);
    }
    int d = rep.images.front().dim();
    for (const auto& g : rep.images)
        if (g.dim() != d) throw DimensionMismatch("representation: images differ in dimension");
    if (v == "BaumslagSolitar12") {
        const Matrix& A = rep.images[0].matrix();
        const Matrix& B = rep.images[2].matrix();
        Matrix lhs = B * A * B.inverse(), rhs = A * A;
        if ((lhs - rhs).norm() > kRelationTol * std::max(1.0, rhs.norm()))
            throw RelationViolated("representation: B A B^-1 != A^2");
    }
    return rep;
}

// ρ on a Rees semigroup from a base representation σ and factors with p_{j,i} = r_j q_i:
// ρ(i, g, j) = σ(q_i g r_j).
inline std::shared_ptr<Rees> rees_from_factors(PresentationPtr base, const std::vector<Element>& q,
                                               const std::vector<Element>& r) {
    std::vector<std::vector<Element>> P(r.size(), std::vector<Element>(q.size()));
    for (std::size_t j = 0; j < r.size(); ++j)
        for (std::size_t i = 0; i < q.size(); ++i) P[j][i] = base->multiply(r[j], q[i]);
    return rees_build(std::move(base), static_cast<int>(q.size()), static_cast<int>(r.size()), std::move(P));
}

namespace detail {

inline Matrix base_image(const SemigroupRepresentation& sigma, const Element& g, WordLengthOracle& oracle, int r_max) {
    return sigma.image_of_word(oracle.geodesic(g, r_max));
}

}  // namespace detail

inline SemigroupRepresentation rees_representation(const std::shared_ptr<Rees>& rees,
                                                   const SemigroupRepresentation& sigma,
                                                   const std::vector<Element>& q, const std::vector<Element>& r,
                                                   int r_max = 16) {
    const auto& base = rees->base();
    if (static_cast<int>(q.size()) != rees->I() || static_cast<int>(r.size()) != rees->J())
        throw DimensionMismatch("rees_representation: need |I| left and |J| right factors");
    for (int j = 0; j < rees->J(); ++j)
        for (int i = 0; i < rees->I(); ++i)
            if (base.multiply(r[static_cast<std::size_t>(j)], q[static_cast<std::size_t>(i)]) != rees->p(j, i))
                throw RelationViolated("rees_representation: sandwich entry is not r_j q_i");
    WordLengthOracle oracle(rees->base_ptr());
    SemigroupRepresentation rep{rees, {}};
    for (const auto& f : rees->generators()) {
        Element g = base.multiply(base.multiply(q[static_cast<std::size_t>(f[0])], Rees::group_part(f)),
                                  r[static_cast<std::size_t>(f[1])]);
        rep.images.emplace_back(detail::base_image(sigma, g, oracle, r_max));
    }
    return rep;
}

// ------------------------------------------------------------------- gap scans

struct ImagedBall {
    CayleyBall ball;
    std::vector<CompoundProduct> images;
};

// Cayley ball with ρ evaluated along the breadth-first tree; a second path to an
// element must give the same matrix, otherwise ρ is not a homomorphism.
inline ImagedBall imaged_ball(const SemigroupRepresentation& rep, int radius, std::uint64_t budget) {
    const auto& p = *rep.presentation;
    ImagedBall out;
    out.ball = cayley_ball(p, radius, budget);
    const auto& ball = out.ball;
    std::vector<CompoundProduct> gens;
    for (const auto& g : rep.images) gens.push_back(CompoundProduct::of(g.matrix()));
    out.images.reserve(ball.elements.size());
    for (std::size_t k = 0; k < ball.elements.size(); ++k) {
        if (ball.parent[k] < 0) {
            out.images.push_back(CompoundProduct::identity(rep.dim()));
            continue;
        }
        CompoundProduct c = out.images[static_cast<std::size_t>(ball.parent[k])];
        c.right_multiply(gens[static_cast<std::size_t>(ball.last_generator[k])]);
        out.images.push_back(std::move(c));
    }
    // relation check on every edge that closes a cycle
    for (std::size_t k = 0; k < ball.elements.size(); ++k) {
        if (ball.length[k] >= ball.radius()) continue;
        for (std::size_t g = 0; g < gens.size(); ++g) {
            auto it = ball.index.find(p.multiply(ball.elements[k], p.generators()[g]));
            if (it == ball.index.end() || ball.parent[it->second] == static_cast<std::int64_t>(k)) continue;
            CompoundProduct c = out.images[k];
            c.right_multiply(gens[g]);
            ScaledMatrix x = c.first(), y = out.images[it->second].first();
            double diff = std::abs(x.log_scale - y.log_scale) + (x.unit - y.unit).norm();
            if (diff > 1e-8)
                throw RelationViolated("representation is not a homomorphism: two words for " + p.format(ball.elements[it->second]) +
                                       " have different images");
        }
    }
    return out;
}

struct SphereMinimum {
    int length = 0;
    double min_gap = 0.0;
    Element witness;
    std::size_t count = 0;
};

struct StableBucket {
    double stable_length = 0.0;
    double min_gap = 0.0;
    Element witness;
    std::size_t count = 0;
};

struct RepGapScan {
    int index = 0;
    int length_bound = 0;
    std::vector<SphereMinimum> sv_profile;
    std::vector<StableBucket> ev_profile;
    AffineBound sv_fit, ev_fit;
};

struct RepScanOptions {
    std::uint64_t budget = 20'000'000;
    int threads = 1;
    // stable-length brackets when no closed form exists: powers up to stable_n_max, lengths up to stable_r_max
    int stable_n_max = 16;
    int stable_r_max = 16;
};

inline RepGapScan rep_gap_scan(const SemigroupRepresentation& rep, int i, int L, const RepScanOptions& opt = {}) {
    int d = rep.dim();
    if (i < 1 || i > d - 1) throw ValidationError("gap index must satisfy 1 <= i <= d-1");
    if (L < 1) throw ValidationError("rep_gap_scan: L must be >= 1");
    auto ib = imaged_ball(rep, L, opt.budget);
    const auto& ball = ib.ball;
    std::size_t count = ball.elements.size();
    std::vector<double> sv(count), ev(count), stable(count);
    int threads = resolve_threads(opt.threads);
    parallel_chunks(count, threads, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
            sv[k] = ib.images[k].gap(i);
            ev[k] = ib.images[k].eigen_gap(i);
        }
    });
    // stable lengths: closed form when available, otherwise brackets from powers
    WordLengthOracle oracle(rep.presentation, opt.budget);
    for (std::size_t k = 0; k < count; ++k) {
        int r = std::max(opt.stable_r_max, ball.length[k]);
        stable[k] = stable_length(oracle, ball.elements[k], opt.stable_n_max, r).upper;
    }
    RepGapScan out;
    out.index = i;
    out.length_bound = L;
    for (int ell = 1; ell <= ball.radius() && ell <= L; ++ell) {
        SphereMinimum sm{ell, std::numeric_limits<double>::infinity(), {}, 0};
        for (std::size_t k = ball.sphere_begin[static_cast<std::size_t>(ell)];
             k < ball.sphere_begin[static_cast<std::size_t>(ell) + 1]; ++k) {
            ++sm.count;
            if (sv[k] < sm.min_gap) {
                sm.min_gap = sv[k];
                sm.witness = ball.elements[k];
            }
        }
        if (sm.count > 0) out.sv_profile.push_back(sm);
    }
    std::vector<std::size_t> order;
    for (std::size_t k = 1; k < count; ++k) order.push_back(k);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return stable[a] < stable[b]; });
    for (std::size_t k : order) {
        if (out.ev_profile.empty() || out.ev_profile.back().stable_length != stable[k])
            out.ev_profile.push_back({stable[k], std::numeric_limits<double>::infinity(), {}, 0});
        auto& bk = out.ev_profile.back();
        ++bk.count;
        if (ev[k] < bk.min_gap) {
            bk.min_gap = ev[k];
            bk.witness = ball.elements[k];
        }
    }
    std::vector<double> x, y;
    for (const auto& s : out.sv_profile) {
        x.push_back(s.length);
        y.push_back(s.min_gap);
    }
    out.sv_fit = fit_affine_lower_bound(x, y);
    x.clear();
    y.clear();
    for (const auto& s : out.ev_profile) {
        x.push_back(s.stable_length);
        y.push_back(s.min_gap);
    }
    out.ev_fit = fit_affine_lower_bound(x, y);
    return out;
}

// ---------------------------------------------------------------- BS(1,2) study

inline Matrix bs12_standard_image(std::int64_t m, std::int64_t N, std::int64_t n) {
    Matrix r(2, 2);
    r << std::ldexp(1.0, static_cast<int>(n - m)), std::ldexp(static_cast<double>(N), -static_cast<int>(m)), 0.0, 1.0;
    return r;
}

struct ConjugateLength {
    std::int64_t N = 0;
    int upper = 0;         // min over n of |b^-n a^N b^n|
    int best_conjugator = 0;
};

struct Bs12Report {
    std::size_t normal_forms = 0;
    double max_identity_error = 0.0;  // |λ-gap − |n−m| ln 2|
    std::vector<ConjugateLength> conjugate_lengths;
    AffineBound conjugate_fit;  // upper vs log2 |N|
    RepGapScan scan;
};

// ρ(b^-m a^N b^n) from the generator images by direct products.
inline Matrix bs12_image(const SemigroupRepresentation& rep, std::int64_t m, std::int64_t N, std::int64_t n) {
    const Matrix& A = rep.images[0].matrix();
    const Matrix& B = rep.images[2].matrix();
    Matrix Binv = B.inverse();
    Matrix An = Matrix::Identity(2, 2);
    Matrix step = N >= 0 ? A : Matrix(A.inverse());
    for (std::int64_t k = 0; k < std::abs(N); ++k) An = An * step;
    Matrix r = Matrix::Identity(2, 2);
    for (std::int64_t k = 0; k < m; ++k) r = r * Binv;
    r = r * An;
    for (std::int64_t k = 0; k < n; ++k) r = r * B;
    return r;
}

inline Bs12Report bs12_case_study(const SemigroupRepresentation& rep, int m_max, std::int64_t N_max, int n_max,
                                  int L = 6, const RepScanOptions& opt = {}) {
    if (rep.presentation->variant() != "BaumslagSolitar12")
        throw ValidationError("bs12_case_study needs a BS(1,2) representation");
    const Matrix& A = rep.images[0].matrix();
    const Matrix& B = rep.images[2].matrix();
    if ((B * A * B.inverse() - A * A).norm() > kRelationTol * std::max(1.0, (A * A).norm()))
        throw RelationViolated("bs12_case_study: B A B^-1 != A^2");
    Bs12Report out;
    for (int m = 0; m <= m_max; ++m)
        for (std::int64_t N = -N_max; N <= N_max; ++N)
            for (int n = 0; n <= m_max; ++n) {
                if (N == 0 && m > 0 && n > 0) continue;
                if (N != 0 && N % 2 == 0 && m > 0 && n > 0) continue;
                auto lam = jordan_projection(bs12_image(rep, m, N, n)).lambda;
                double err = std::abs((lam[0] - lam[1]) - std::abs(n - m) * std::numbers::ln2);
                out.max_identity_error = std::max(out.max_identity_error, err);
                ++out.normal_forms;
            }
    WordLengthOracle oracle(rep.presentation, opt.budget);
    auto p = rep.presentation;
    std::vector<double> x, y;
    for (std::int64_t N = 2; N <= N_max; N *= 2) {
        ConjugateLength c{N, std::numeric_limits<int>::max(), 0};
        for (int n = 0; n <= n_max; ++n) {
            Element g = p->multiply(p->multiply(BS12::normal_form(n, 0, 0), BS12::normal_form(0, N, 0)),
                                    BS12::normal_form(0, 0, n));
            int len = oracle.length(g, 2 * n + static_cast<int>(N));
            if (len < c.upper) {
                c.upper = len;
                c.best_conjugator = n;
            }
        }
        out.conjugate_lengths.push_back(c);
        x.push_back(std::log2(static_cast<double>(N)));
        y.push_back(c.upper);
    }
    if (!x.empty()) out.conjugate_fit = fit_affine_lower_bound(x, y);
    out.scan = rep_gap_scan(rep, 1, L, opt);
    return out;
}

// --------------------------------------------------------------- Rees checks

struct ReesBoundsReport {
    int r = 1;
    std::size_t samples = 0;
    bool part1 = true, part2 = true, part3 = true, part4 = true;
    double min_ratio = std::numeric_limits<double>::infinity();  // |φ(g)|_F / |g|_{F_Γ}
    double max_ratio = 0.0;
    int max_part3 = 0;  // largest certified path length in part (3)
    int max_part4 = 0;  // largest certified path length in part (4)
    bool passed() const { return part1 && part2 && part3 && part4; }
};

// F'_Γ = ⋃ F_Γ p_{j,i}^{-1} p_{j,i'}
class PrimedGenerators : public SemigroupPresentation {
public:
    explicit PrimedGenerators(const Rees& rees) : base_(rees.base_ptr()) {
        const auto& b = *base_;
        for (std::size_t k = 0; k < b.generator_count(); ++k)
            for (int i = 0; i < rees.I(); ++i)
                for (int i2 = 0; i2 < rees.I(); ++i2)
                    for (int j = 0; j < rees.J(); ++j) {
                        Element g = b.multiply(b.multiply(b.generators()[k], b.inverse(rees.p(j, i))), rees.p(j, i2));
                        if (std::find(gens_.begin(), gens_.end(), g) != gens_.end()) continue;
                        gens_.push_back(g);
                        names_.push_back(b.format(g));
                    }
    }
    std::string variant() const override { return base_->variant() + "'"; }
    bool is_group() const override { return true; }
    Element unit() const override { return base_->unit(); }
    Element multiply(const Element& a, const Element& b) const override { return base_->multiply(a, b); }
    Element inverse(const Element& a) const override { return base_->inverse(a); }
    std::vector<Element> left_quotients(const Element& y, const Element& f) const override {
        return {multiply(y, inverse(f))};
    }
    std::string format(const Element& e) const override { return base_->format(e); }

private:
    PresentationPtr base_;
};

inline int rees_constant_r(const Rees& rees, int r_max = 64) {
    WordLengthOracle o(rees.base_ptr());
    int mx = 0;
    for (int j = 0; j < rees.J(); ++j)
        for (int i = 0; i < rees.I(); ++i) mx = std::max(mx, o.length(rees.p(j, i), r_max));
    return 1 + 2 * mx;
}

// Exhaustive over the base ball of radius sample_radius. Lengths beyond their claimed bound
// count as violations rather than errors.
inline ReesBoundsReport rees_length_bounds_check(const std::shared_ptr<Rees>& rees, int sample_radius, int r_max = 64) {
    constexpr int stable_powers = 3;
    const auto& base = rees->base();
    ReesBoundsReport rep;
    rep.r = rees_constant_r(*rees, r_max);
    int r = rep.r;
    auto base_ball = cayley_ball(base, sample_radius);
    WordLengthOracle lam(rees), primed(std::make_shared<PrimedGenerators>(*rees)), gam(rees->base_ptr());
    auto capped = [](WordLengthOracle& o, const Element& x, int cap) {
        try {
            return o.length(x, cap);
        } catch (const NotInBall&) {
            return cap + 1;
        }
    };
    for (std::size_t k = 0; k < base_ball.elements.size(); ++k) {
        const Element& g = base_ball.elements[k];
        int lg = base_ball.length[k];
        int lp = primed.length(g, lg);
        ++rep.samples;
        for (int i = 0; i < rees->I(); ++i)
            for (int j = 0; j < rees->J(); ++j) {
                Element x = rees->phi(i, j, g);
                // (1) r^-1 |g| <= |g|' <= |φ(g)| <= |g|, as integer inequalities, for g != e
                if (lg > 0) {
                    int lx = capped(lam, x, lg);
                    if (!(lg <= r * lp && lp <= lx && lx <= lg)) rep.part1 = false;
                    rep.min_ratio = std::min(rep.min_ratio, static_cast<double>(lx) / lg);
                    rep.max_ratio = std::max(rep.max_ratio, static_cast<double>(lx) / lg);
                }
                // (3) explicit path φ_{i,j}(g) → φ_{i,j}(g)φ_{i,j'}(f) = φ_{i,j'}(g f) ← φ_{i,j'}(g)
                for (int j2 = 0; j2 < rees->J(); ++j2) {
                    if (j2 == j) continue;
                    bool found = false;
                    for (const auto& f : base.generators()) {
                        Element via = rees->multiply(x, rees->phi(i, j2, f));
                        if (via == rees->multiply(rees->phi(i, j2, g), rees->phi(i, j2, f))) {
                            found = true;
                            break;
                        }
                    }
                    if (!found) rep.part3 = false;
                    rep.max_part3 = std::max(rep.max_part3, found ? 2 : 0);
                }
                // (4) φ_{i,j}(h) φ_{i',j}(g) = φ_{i,j}(g) φ_{i,j}(h) with h = p_{j,i'}^-1 p_{j,i}; the displacement is 0
                // when this equals φ_{i,j}(g), otherwise at most |φ_{i,j}(h)| <= r
                for (int i2 = 0; i2 < rees->I(); ++i2) {
                    Element h = base.multiply(base.inverse(rees->p(j, i2)), rees->p(j, i));
                    Element lhs = rees->multiply(rees->phi(i, j, h), rees->phi(i2, j, g));
                    Element rhs = rees->multiply(x, rees->phi(i, j, h));
                    int lh = lhs == x ? 0 : capped(lam, rees->phi(i, j, h), r);
                    if (lhs != rhs || lh > r) rep.part4 = false;
                    rep.max_part4 = std::max(rep.max_part4, lh);
                }
            }
        // (2) on powers: r^-1 |g^n| <= |φ(g^n)| <= |g^n|, and the stable-length brackets are ordered
        if (lg > 0 && lg * stable_powers <= sample_radius + 2) {
            for (int n = 1; n <= stable_powers; ++n) {
                Element gn = base.power(g, n);
                int lgn = gam.length(gn, lg * n);
                int lx = capped(lam, rees->phi(0, 0, gn), lgn);
                if (!(lgn <= r * lx && lx <= lgn)) rep.part2 = false;
            }
            if (auto ex = base.exact_stable_length(g)) {
                auto up = stable_length(lam, rees->phi(0, 0, g), stable_powers, lg * stable_powers).upper;
                if (!(*ex <= r * up + 1e-12)) rep.part2 = false;
            }
        }
    }
    return rep;
}

struct GapTransferReport {
    int i0 = 0, j0 = 0;
    double m = 0.0;               // (2+r)·max_f ‖μ(ρ(f))‖ + max_j ‖μ(ρ(φ_{i0,j}(p_{j,i}^-1 p_{j,i0})))‖
    double max_difference = 0.0;  // max ‖μ(ρ(φ_{i0,j0}(g))) − μ(ρ(φ_{i,j}(g)))‖ over the sample
    std::size_t samples = 0;
    bool holds() const { return max_difference <= m + 1e-9; }
};

// rep is a representation of the Rees semigroup; images of φ_{i,j}(g) are evaluated along geodesic words.
inline GapTransferReport rees_gap_transfer(const SemigroupRepresentation& rep, int sample_radius, int i0 = 0,
                                           int j0 = 0) {
    auto rees = std::dynamic_pointer_cast<const Rees>(rep.presentation);
    if (!rees) throw ValidationError("rees_gap_transfer needs a representation of a Rees semigroup");
    const auto& base = rees->base();
    GapTransferReport out;
    out.i0 = i0;
    out.j0 = j0;
    int r = rees_constant_r(*rees);
    WordLengthOracle lam(rep.presentation);
    auto mu = [&](const Element& x, int cap) { return cartan_projection(rep.image_of_word(lam.geodesic(x, cap))).mu; };
    double lip = 0.0;
    for (const auto& g : rep.images) lip = std::max(lip, norm(cartan_projection(g).mu));
    double tail = 0.0;
    for (int j = 0; j < rees->J(); ++j)
        for (int i = 0; i < rees->I(); ++i) {
            Element h = base.multiply(base.inverse(rees->p(j, i)), rees->p(j, i0));
            tail = std::max(tail, norm(mu(rees->phi(i0, j, h), 4 * r)));
        }
    out.m = (2 + r) * lip + tail;
    auto ball = cayley_ball(base, sample_radius);
    for (std::size_t k = 1; k < ball.elements.size(); ++k) {
        const Element& g = ball.elements[k];
        int cap = ball.length[k];
        auto ref = mu(rees->phi(i0, j0, g), cap);
        for (int i = 0; i < rees->I(); ++i)
            for (int j = 0; j < rees->J(); ++j) {
                out.max_difference = std::max(out.max_difference, norm(difference(ref, mu(rees->phi(i, j, g), cap))));
                ++out.samples;
            }
    }
    return out;
}

// ------------------------------------------------------- properties (D) and (U)

enum class PropertyStatus { Holds, Fails, Unknown };

inline const char* status_name(PropertyStatus s) {
    switch (s) {
        case PropertyStatus::Holds: return "Holds";
        case PropertyStatus::Fails: return "Fails";
        case PropertyStatus::Unknown: return "Unknown";
    }
    return "?";
}

struct PropertyD {
    PropertyStatus status = PropertyStatus::Unknown;
    double kappa = 0.0, kappa_prime = 0.0, N = 0.0;
    std::string note;
};

struct PropertyU {
    PropertyStatus status = PropertyStatus::Unknown;
    std::vector<Element> s_prime;
    double c = 0.0, c_prime = 0.0;
    std::string note;
};

struct PropertyConstants {
    PropertyD D;
    PropertyU U;
};

inline PropertyConstants property_constants(const PresentationPtr& p) {
    PropertyConstants out;
    auto v = p->variant();
    if (v == "FreeSemigroup") {
        out.D = {PropertyStatus::Holds, 1.0, 0.0, 0.0, "every element lies on a forward geodesic ray"};
        out.U = {PropertyStatus::Holds, {p->unit()}, 1.0, 0.0, "|γ|_∞ = |γ| for free semigroups"};
    } else if (v == "FreeGroupSymmetric") {
        out.D = {PropertyStatus::Holds, 1.0, 0.0, 0.0, "reduced words extend to geodesic rays"};
        auto fg = std::static_pointer_cast<const FreeGroupSymmetric>(p);
        if (fg->rank() == 1) {
            out.U = {PropertyStatus::Holds, {p->unit()}, 1.0, 0.0, "Z: |γ|_∞ = |γ|"};
        } else {
            std::vector<Element> s{p->unit()};
            for (const auto& g : p->generators()) s.push_back(g);
            out.U = {PropertyStatus::Holds, s, 1.0, 0.0,
                     "some letter s avoids cancellation at both ends, so γs is cyclically reduced"};
        }
    } else if (v == "FiniteGroup") {
        auto ball = cayley_ball(*p, std::numeric_limits<int>::max() / 2);
        double diam = ball.length.back();
        out.D = {PropertyStatus::Fails, 0.0, 0.0, 0.0, "a finite Cayley graph has no quasigeodesic rays"};
        out.U = {PropertyStatus::Holds, {p->unit()}, 1.0, diam, "bounded word length: c' = diameter"};
    } else if (v == "Rees") {
        auto rees = std::static_pointer_cast<const Rees>(p);
        auto base = property_constants(rees->base_ptr());
        double r = rees_constant_r(*rees);
        if (base.D.status == PropertyStatus::Holds)
            out.D = {PropertyStatus::Holds, base.D.kappa / r, base.D.kappa_prime / r, base.D.N,
                     "transferred from the base group with r = " + std::to_string(static_cast<int>(r))};
        else
            out.D = {base.D.status, 0, 0, 0, "base group: " + base.D.note};
        if (base.U.status == PropertyStatus::Holds) {
            std::vector<Element> s;
            for (int i = 0; i < rees->I(); ++i)
                for (int j = 0; j < rees->J(); ++j)
                    for (const auto& g : base.U.s_prime) s.push_back(rees->phi(i, j, g));
            out.U = {PropertyStatus::Holds, s, base.U.c / r, base.U.c_prime / r,
                     "transferred from the base group with r = " + std::to_string(static_cast<int>(r))};
        } else {
            out.U = {base.U.status, {}, 0, 0, "base group: " + base.U.note};
        }
    } else {
        out.D.note = "no finite procedure known";
        out.U.note = "no finite procedure known";
    }
    return out;
}

// ------------------------------------------------------------ boundary probe

struct BoundaryProbe {
    int index = 0;
    int depth = 0;
    std::vector<std::vector<int>> rays;  // generator indices, first the constant rays
    std::vector<Subspace> values;
    std::vector<double> cauchy;  // angle between depth n and n-1 along each ray
    double max_pairwise_angle = 0.0;
    std::vector<double> fixed_point_angle;  // per generator: ray value vs attracting eigenspace
    std::vector<double> invariance_angle;   // per generator: angle(ρ(f) V, V)
    bool dynamics_ok = true;
};

inline BoundaryProbe boundary_probe(const SemigroupRepresentation& rep, int i, int ray_samples, int n,
                                    std::uint64_t seed = 0x5eed) {
    const auto& p = *rep.presentation;
    auto v = p.variant();
    if (v != "FreeSemigroup" && v != "FreeGroupSymmetric")
        throw ValidationError("boundary_probe needs a free semigroup or free group representation");
    int d = rep.dim();
    if (i < 1 || i > d - 1) throw ValidationError("gap index must satisfy 1 <= i <= d-1");
    if (n < 2) throw ValidationError("boundary_probe: depth must be >= 2");
    bool group = v == "FreeGroupSymmetric";
    int G = static_cast<int>(p.generator_count());
    BoundaryProbe out;
    out.index = i;
    out.depth = n;
    for (int g = 0; g < G; ++g) out.rays.emplace_back(static_cast<std::size_t>(n), g);
    std::mt19937_64 rng(seed);
    for (int s = 0; s < ray_samples; ++s) {
        std::vector<int> w;
        while (static_cast<int>(w.size()) < n) {
            int g = static_cast<int>(rng() % static_cast<std::uint64_t>(G));
            if (group && !w.empty() && w.back() == (g ^ 1)) continue;
            w.push_back(g);
        }
        out.rays.push_back(std::move(w));
    }
    std::vector<CompoundProduct> gens;
    for (const auto& g : rep.images) gens.push_back(CompoundProduct::of(g.matrix()));
    for (const auto& w : out.rays) {
        CompoundProduct c = CompoundProduct::identity(d);
        for (int k = 0; k + 1 < n; ++k) c.right_multiply(gens[static_cast<std::size_t>(w[static_cast<std::size_t>(k)])]);
        Subspace prev = c.xi(i);
        c.right_multiply(gens[static_cast<std::size_t>(w.back())]);
        out.values.push_back(c.xi(i));
        out.cauchy.push_back(principal_angle(prev, out.values.back()));
    }
    for (std::size_t a = 0; a < out.values.size(); ++a)
        for (std::size_t b = a + 1; b < out.values.size(); ++b)
            out.max_pairwise_angle = std::max(out.max_pairwise_angle, principal_angle(out.values[a], out.values[b]));
    for (int g = 0; g < G; ++g) {
        const Matrix& m = rep.images[static_cast<std::size_t>(g)].matrix();
        const Subspace& V = out.values[static_cast<std::size_t>(g)];
        out.invariance_angle.push_back(principal_angle(span_of(m * V.basis), V));
        Eigen::EigenSolver<Matrix> es(m);
        std::vector<int> idx(static_cast<std::size_t>(d));
        for (int k = 0; k < d; ++k) idx[static_cast<std::size_t>(k)] = k;
        std::sort(idx.begin(), idx.end(),
                  [&](int a, int b) { return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(b)); });
        Eigen::MatrixXcd vecs = es.eigenvectors();
        Matrix top(d, i);
        bool real = true;
        for (int k = 0; k < i; ++k) {
            Eigen::VectorXcd col = vecs.col(idx[static_cast<std::size_t>(k)]);
            if (col.imag().norm() > 1e-12 * col.norm()) real = false;
            top.col(k) = col.real();
        }
        double ang = real ? principal_angle(span_of(top), V) : std::numeric_limits<double>::quiet_NaN();
        out.fixed_point_angle.push_back(ang);
        if (real && ang > 1e-6) out.dynamics_ok = false;
    }
    return out;
}

}  // namespace cocygap
