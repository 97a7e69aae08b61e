#include <gtest/gtest.h>

#include <random>

#include "cocygap/semigroup.hpp"
#include "support.hpp"

using namespace cocygap;
using testsupport::diag;
using testsupport::mat2;

namespace {

// Faithful affine model of BS(1,2): x ↦ 2^k x + num / 2^e.
struct Affine {
    std::int64_t k = 0;
    std::int64_t num = 0;
    std::int64_t e = 0;

    void normalize() {
        if (num == 0) e = 0;
        while (e > 0 && num % 2 == 0) {
            num /= 2;
            --e;
        }
    }
    bool operator==(const Affine&) const = default;
};

// (f ∘ g)(x) = 2^{k1}(2^{k2} x + t2) + t1, matching left-to-right products of matrices [[2^k, t], [0, 1]]
Affine compose(const Affine& f, const Affine& g) {
    Affine r;
    r.k = f.k + g.k;
    // t1 + 2^{k1} t2 over the common denominator 2^E
    std::int64_t E = std::max(f.e, g.e - f.k);
    E = std::max<std::int64_t>(E, 0);
    std::int64_t a = f.num << (E - f.e);
    std::int64_t shift = E + f.k - g.e;
    std::int64_t b = shift >= 0 ? g.num << shift : g.num >> -shift;
    r.num = a + b;
    r.e = E;
    r.normalize();
    return r;
}

Affine affine_of(const Element& x) {
    // b^-m a^N b^n ↦ [[2^{n-m}, N 2^{-m}], [0, 1]]
    Affine r{x[2] - x[0], x[1], x[0]};
    r.normalize();
    return r;
}

Element random_bs(std::mt19937_64& rng, const BS12& g, int len) {
    Element x = g.unit();
    for (int k = 0; k < len; ++k) x = g.multiply(x, g.generators()[rng() % 4]);
    return x;
}

// symmetric group S3 as permutations of {0,1,2}
std::shared_ptr<FiniteGroup> s3() {
    std::vector<std::array<int, 3>> perms{{0, 1, 2}, {1, 0, 2}, {0, 2, 1}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    std::vector<std::vector<int>> t(6, std::vector<int>(6));
    for (int x = 0; x < 6; ++x)
        for (int y = 0; y < 6; ++y) {
            std::array<int, 3> c{};
            for (int k = 0; k < 3; ++k) c[k] = perms[x][perms[y][k]];
            t[x][y] = static_cast<int>(std::find(perms.begin(), perms.end(), c) - perms.begin());
        }
    return std::make_shared<FiniteGroup>(t, std::vector<int>{1, 2});
}

std::shared_ptr<Rees> free_rees() {
    auto f2 = std::make_shared<FreeGroupSymmetric>(2);
    Element e{}, a{0}, b{2};
    return rees_from_factors(f2, {e, a}, {e, b});
}

Element random_element(std::mt19937_64& rng, const SemigroupPresentation& p, int len) {
    Element x = p.unit();
    for (int k = 0; k < len; ++k) x = p.multiply(x, p.generators()[rng() % p.generator_count()]);
    return x;
}

double dense_gap(const Matrix& m, int i) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return std::log(svd.singularValues()(i - 1) / svd.singularValues()(i));
}

}  // namespace

TEST(Semigroup, BS12MatchesAffineModel) {
    BS12 g;
    std::mt19937_64 rng(3);
    for (int t = 0; t < 2000; ++t) {
        Element x = random_bs(rng, g, 1 + t % 9), y = random_bs(rng, g, 1 + t % 7);
        EXPECT_EQ(affine_of(g.multiply(x, y)), compose(affine_of(x), affine_of(y)));
        EXPECT_EQ(g.multiply(x, g.inverse(x)), g.unit());
    }
    // b a b^-1 = a^2
    Element a{0, 1, 0}, b{0, 0, 1}, binv{1, 0, 0};
    EXPECT_EQ(g.multiply(g.multiply(b, a), binv), g.multiply(a, a));
}

TEST(Semigroup, NormalFormsAreUnique) {
    EXPECT_EQ(BS12::normal_form(2, 4, 3), (Element{0, 1, 1}));
    EXPECT_EQ(BS12::normal_form(2, 0, 3), (Element{0, 0, 1}));
    EXPECT_EQ(BS12::normal_form(3, 0, 1), (Element{2, 0, 0}));
    EXPECT_THROW(BS12::normal_form(-1, 1, 0), ValidationError);
    BS12 g;
    EXPECT_THROW(g.multiply({0, 0, 62}, {0, 3, 0}), ValidationError);
}

TEST(Semigroup, AssociativityAllVariants) {
    std::vector<PresentationPtr> ps{std::make_shared<FreeSemigroup>(3), std::make_shared<FreeGroupSymmetric>(2),
                                    s3(), std::make_shared<BS12>(), free_rees(),
                                    rees_build(FiniteGroup::cyclic(5), 2, 2, {{{0}, {3}}, {{1}, {4}}})};
    std::mt19937_64 rng(5);
    for (const auto& p : ps)
        for (int t = 0; t < 10000; ++t) {
            Element x = random_element(rng, *p, 1 + t % 6), y = random_element(rng, *p, 1 + t % 5),
                    z = random_element(rng, *p, 1 + t % 4);
            ASSERT_EQ(p->multiply(p->multiply(x, y), z), p->multiply(x, p->multiply(y, z))) << p->variant();
        }
}

TEST(Semigroup, FiniteGroupValidation) {
    EXPECT_THROW(FiniteGroup({{0, 1}, {0, 1}}, {1}), ValidationError);
    EXPECT_THROW(FiniteGroup({{0, 1}, {1, 0}}, {0}), ValidationError);
    EXPECT_NO_THROW(FiniteGroup({{0, 1}, {1, 0}}, {1}));
}

TEST(Semigroup, ReesOverCyclicGroupHasTwentyElements) {
    auto r = rees_build(FiniteGroup::cyclic(5), 2, 2, {{{0}, {3}}, {{1}, {4}}});
    auto ball = cayley_ball(*r, 100);
    EXPECT_EQ(ball.elements.size(), 21u);  // plus the adjoined unit
    EXPECT_LT(ball.radius(), 100);
}

TEST(WordLength, FiniteGroupMatchesFloydWarshall) {
    auto g = s3();
    const int n = g->order();
    std::vector<std::vector<int>> dist(n, std::vector<int>(n, 1000));
    for (int x = 0; x < n; ++x) {
        dist[x][x] = 0;
        for (const auto& f : g->generators()) dist[x][g->table()[x][f[0]]] = std::min(dist[x][g->table()[x][f[0]]], 1);
    }
    for (int k = 0; k < n; ++k)
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) dist[x][y] = std::min(dist[x][y], dist[x][k] + dist[k][y]);
    WordLengthOracle o(g);
    for (int y = 0; y < n; ++y) EXPECT_EQ(o.length({y}, 6), dist[g->unit()[0]][y]);
}

TEST(WordLength, FreeGroupIsReducedLength) {
    auto f = std::make_shared<FreeGroupSymmetric>(2);
    std::mt19937_64 rng(9);
    WordLengthOracle o(f);
    for (int t = 0; t < 300; ++t) {
        Element x = random_element(rng, *f, 1 + t % 12);
        EXPECT_EQ(o.length(x, 12), static_cast<int>(x.size()));
    }
    EXPECT_THROW(o.length(Element(13, 0), 12), NotInBall);
}

TEST(WordLength, MeetInTheMiddleMatchesForwardBall) {
    std::vector<PresentationPtr> ps{std::make_shared<BS12>(), free_rees(), std::make_shared<FreeSemigroup>(2)};
    for (const auto& p : ps) {
        auto ball = cayley_ball(*p, 4);
        WordLengthOracle o(p);
        for (std::size_t k = 0; k < ball.elements.size(); ++k)
            ASSERT_EQ(o.length(ball.elements[k], 4), ball.length[k]) << p->variant() << " " << p->format(ball.elements[k]);
        // fresh oracles meet in the middle; the returned word must spell the element
        for (std::size_t k = 0; k < ball.elements.size(); k += 7) {
            WordLengthOracle fresh(p);
            auto w = fresh.geodesic(ball.elements[k], 4);
            EXPECT_EQ(static_cast<int>(w.size()), ball.length[k]);
            EXPECT_EQ(p->product(w), ball.elements[k]);
        }
    }
}

TEST(WordLength, PowersOfAInBS12) {
    auto g = std::make_shared<BS12>();
    auto ball = cayley_ball(*g, 8);
    WordLengthOracle o(g);
    std::vector<int> want{4, 6, 8};
    for (int k = 2; k <= 4; ++k) {
        Element x = BS12::normal_form(0, std::int64_t{1} << k, 0);
        EXPECT_EQ(ball.length[ball.index.at(x)], want[k - 2]);
        EXPECT_EQ(o.length(x, 10), want[k - 2]);
    }
}

TEST(WordLength, FreeSemigroupRejectsOutsideElements) {
    auto f = std::make_shared<FreeSemigroup>(2);
    WordLengthOracle o(f);
    EXPECT_EQ(o.length({1, 0, 1}, 5), 3);
    EXPECT_THROW(o.length({0, 1, 0, 1}, 3), NotInBall);
}

TEST(StableLength, FreeGroupCyclicReductionMatchesPowers) {
    auto f = std::make_shared<FreeGroupSymmetric>(2);
    std::mt19937_64 rng(13);
    for (int t = 0; t < 200; ++t) {
        Element x = random_element(rng, *f, 1 + t % 8);
        // |x^n| = n·cr + (|x| − cr) in a free group, so consecutive differences give cr
        double diff = static_cast<double>(f->power(x, 3).size()) - static_cast<double>(f->power(x, 2).size());
        EXPECT_EQ(*f->exact_stable_length(x), diff);
    }
}

TEST(StableLength, BracketsFromPowers) {
    auto g = std::make_shared<BS12>();
    WordLengthOracle o(g);
    auto s = stable_length(o, {0, 0, 1}, 4, 8);
    EXPECT_EQ(s.upper, 1.0);
    // |a^8| = 6, and a^16 is beyond the cap
    auto t = stable_length(o, {0, 1, 0}, 16, 7);
    EXPECT_EQ(t.upper, 0.75);
    EXPECT_EQ(t.n_at_upper, 8);
    EXPECT_LE(t.lower, t.estimate);
}

TEST(StableLength, PowersAreSubadditive) {
    std::vector<PresentationPtr> ps{std::make_shared<BS12>(), free_rees()};
    std::mt19937_64 rng(21);
    for (const auto& p : ps) {
        WordLengthOracle o(p);
        for (int t = 0; t < 20; ++t) {
            Element g = random_element(rng, *p, 1 + t % 3);
            std::vector<int> len{0};
            for (int n = 1; n <= 4; ++n) len.push_back(o.length(p->power(g, n), 12));
            for (int m = 1; m <= 4; ++m)
                for (int n = 1; m + n <= 4; ++n) EXPECT_LE(len[m + n], len[m] + len[n]) << p->format(g);
        }
    }
}

TEST(RepGapScan, DiscreteUnderGapEvidence) {
    auto f = std::make_shared<FreeSemigroup>(2);
    auto rep = make_representation(f, {mat2(2, 1, 1, 1), mat2(3, 1, 2, 1)});
    auto ib = imaged_ball(rep, 10, 1'000'000);
    std::size_t prev = 0;
    for (double R = 0.5; R <= 8.0; R += 0.5) {
        std::size_t count = 0;
        for (const auto& c : ib.images) count += c.gap(1) <= R;
        EXPECT_GE(count, prev);
        prev = count;
    }
    // with c|γ| − c' below the gap, only lengths up to (R + c')/c can qualify
    auto scan = rep_gap_scan(rep, 1, 10);
    for (std::size_t k = 0; k < ib.ball.elements.size(); ++k)
        if (ib.images[k].gap(1) <= 2.0)
            EXPECT_LE(scan.sv_fit.slope * ib.ball.length[k] - scan.sv_fit.intercept, 2.0 + 1e-9);
}

TEST(RepGapScan, IdentityRepresentationHasNoGaps) {
    auto g = std::make_shared<FreeGroupSymmetric>(2);
    auto rep = make_representation(g, {diag({1, 1}), diag({1, 1})});
    auto scan = rep_gap_scan(rep, 1, 4);
    for (const auto& s : scan.sv_profile) EXPECT_EQ(s.min_gap, 0.0);
    EXPECT_EQ(scan.sv_fit.slope, 0.0);
}

TEST(Representation, RelationIsEnforced) {
    auto g = std::make_shared<BS12>();
    EXPECT_NO_THROW(make_representation(g, {mat2(1, 1, 0, 1), diag({2, 1})}));
    EXPECT_THROW(make_representation(g, {mat2(1, 1, 0, 1), diag({3, 1})}), RelationViolated);
    // a finite group representation that ignores the table
    auto c = FiniteGroup::cyclic(3);
    auto bad = make_representation(c, {diag({2, 1}), diag({0.5, 1})});
    EXPECT_THROW(imaged_ball(bad, 4, 1000), RelationViolated);
}

TEST(RepGapScan, FreeSemigroupMatchesBruteForce) {
    auto f = std::make_shared<FreeSemigroup>(2);
    auto rep = make_representation(f, {mat2(2, 1, 1, 1), mat2(3, 1, 2, 1)});
    auto scan = rep_gap_scan(rep, 1, 8);
    ASSERT_EQ(scan.sv_profile.size(), 8u);
    for (int ell = 1; ell <= 8; ++ell) {
        double best = 1e300;
        for (int w = 0; w < (1 << ell); ++w) {
            std::vector<int> word;
            for (int k = ell - 1; k >= 0; --k) word.push_back((w >> k) & 1);
            best = std::min(best, dense_gap(rep.image_of_word(word), 1));
        }
        EXPECT_NEAR(scan.sv_profile[ell - 1].min_gap, best, 1e-9);
        EXPECT_EQ(scan.sv_profile[ell - 1].count, std::size_t{1} << ell);
    }
    EXPECT_GT(scan.sv_fit.slope, 0.3);
    EXPECT_GT(scan.ev_fit.slope, 0.3);
}

TEST(RepGapScan, BS12Profiles) {
    auto g = std::make_shared<BS12>();
    auto rep = make_representation(g, {mat2(1, 1, 0, 1), diag({2, 1})});
    auto scan = rep_gap_scan(rep, 1, 6);
    for (const auto& s : scan.sv_profile) EXPECT_GT(s.min_gap, 0.0);
    EXPECT_GT(scan.ev_fit.slope, 0.0);
    // the zero stable-length bucket contains powers of a with no eigenvalue gap
    ASSERT_FALSE(scan.ev_profile.empty());
    EXPECT_NEAR(scan.ev_profile.front().min_gap, 0.0, 1e-12);
}

TEST(RepGapScan, ThreadsAgree) {
    auto f = std::make_shared<FreeGroupSymmetric>(2);
    auto rep = make_representation(f, {diag({5, 0.2}), mat2(2, 1, 1, 1)});
    RepScanOptions one, many;
    many.threads = 8;
    auto a = rep_gap_scan(rep, 1, 6, one), b = rep_gap_scan(rep, 1, 6, many);
    ASSERT_EQ(a.sv_profile.size(), b.sv_profile.size());
    for (std::size_t k = 0; k < a.sv_profile.size(); ++k) {
        EXPECT_EQ(a.sv_profile[k].min_gap, b.sv_profile[k].min_gap);
        EXPECT_EQ(a.sv_profile[k].witness, b.sv_profile[k].witness);
    }
    EXPECT_EQ(a.ev_fit.slope, b.ev_fit.slope);
}

TEST(Bs12CaseStudy, IdentityHoldsOnNormalForms) {
    auto g = std::make_shared<BS12>();
    auto rep = make_representation(g, {mat2(1, 1, 0, 1), diag({2, 1})});
    auto r = bs12_case_study(rep, 3, 16, 4, 4);
    EXPECT_LT(r.max_identity_error, 1e-9);
    EXPECT_GT(r.normal_forms, 100u);
    ASSERT_EQ(r.conjugate_lengths.size(), 4u);
    for (std::size_t k = 1; k < r.conjugate_lengths.size(); ++k)
        EXPECT_LE(r.conjugate_lengths[k].upper, r.conjugate_lengths[k - 1].upper + 2);
}

TEST(Rees, SandwichAndPhi) {
    auto r = free_rees();
    const auto& base = r->base();
    std::mt19937_64 rng(17);
    for (int t = 0; t < 500; ++t) {
        Element g = random_element(rng, base, 1 + t % 6), h = random_element(rng, base, 1 + t % 5);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                EXPECT_EQ(r->multiply(r->phi(i, j, g), r->phi(i, j, h)), r->phi(i, j, base.multiply(g, h)));
    }
    EXPECT_EQ(rees_constant_r(*r), 5);
}

TEST(Rees, LengthBoundsHold) {
    auto rep = rees_length_bounds_check(free_rees(), 6);
    EXPECT_TRUE(rep.part1);
    EXPECT_TRUE(rep.part2);
    EXPECT_TRUE(rep.part3);
    EXPECT_TRUE(rep.part4);
    EXPECT_EQ(rep.samples, 1 + 4 * (729u - 1) / 2);
    EXPECT_GE(rep.min_ratio, 1.0 / rep.r);
    EXPECT_LE(rep.max_ratio, 1.0);
    EXPECT_LE(rep.max_part4, rep.r);
}

TEST(Rees, RepresentationRequiresFactorization) {
    auto f2 = std::make_shared<FreeGroupSymmetric>(2);
    auto sigma = make_representation(f2, {diag({5, 0.2}), mat2(2, 1, 1, 1)});
    Element e{}, a{0}, b{2};
    auto rees = rees_from_factors(f2, {e, a}, {e, b});
    EXPECT_NO_THROW(rees_representation(rees, sigma, {e, a}, {e, b}));
    EXPECT_THROW(rees_representation(rees, sigma, {e, b}, {e, a}), RelationViolated);
}

TEST(Rees, GapTransferInvariant) {
    auto f2 = std::make_shared<FreeGroupSymmetric>(2);
    auto sigma = make_representation(f2, {diag({5, 0.2}), mat2(2, 1, 1, 1)});
    Element e{}, a{0}, b{2};
    auto rees = rees_from_factors(f2, {e, a}, {e, b});
    auto rho = rees_representation(rees, sigma, {e, a}, {e, b});
    auto ib = imaged_ball(rho, 3, 1'000'000);  // throws if ρ is not a homomorphism
    double lip = 0.0;
    for (const auto& g : rho.images) lip = std::max(lip, norm(cartan_projection(g).mu));
    // d_F(φ_{i,j}(g), φ_{i,j'}(g)) <= 2 bounds the Cartan distance by 2·max_f ‖μ(ρ(f))‖
    auto base_ball = cayley_ball(*f2, 3);
    for (const auto& g : base_ball.elements)
        for (int i = 0; i < 2; ++i) {
            const auto& x = ib.images[ib.ball.index.at(rees->phi(i, 0, g))];
            const auto& y = ib.images[ib.ball.index.at(rees->phi(i, 1, g))];
            EXPECT_LE(norm(difference(x.cartan().mu, y.cartan().mu)), 2 * lip + 1e-9);
        }
    // Lipschitz remark on ball edges: ‖μ(ρ(xf)) − μ(ρ(x))‖ <= max_f ‖μ(ρ(f))‖
    const auto& ball = ib.ball;
    for (std::size_t k = 1; k < ball.elements.size(); ++k) {
        auto parent = static_cast<std::size_t>(ball.parent[k]);
        double diff = norm(difference(ib.images[k].cartan().mu, ib.images[parent].cartan().mu));
        EXPECT_LE(diff, lip + 1e-9);
    }
}

TEST(Rees, LengthOneSandwichHasRThree) {
    auto f2 = std::make_shared<FreeGroupSymmetric>(2);
    Element e{}, a{0}, b{2};
    auto rees = rees_build(f2, 2, 2, {{e, a}, {b, e}});
    auto rep = rees_length_bounds_check(rees, 6);
    EXPECT_EQ(rep.r, 3);
    EXPECT_TRUE(rep.passed());
}

TEST(Rees, TrivialReesIsTheBaseGroup) {
    auto f2 = std::make_shared<FreeGroupSymmetric>(2);
    auto rees = rees_build(f2, 1, 1, {{Element{}}});
    auto rep = rees_length_bounds_check(rees, 4);
    EXPECT_EQ(rep.r, 1);
    EXPECT_TRUE(rep.passed());
    EXPECT_EQ(rep.min_ratio, 1.0);
    EXPECT_EQ(rep.max_ratio, 1.0);
}

TEST(Rees, GapTransferConstant) {
    auto f2 = std::make_shared<FreeGroupSymmetric>(2);
    auto sigma = make_representation(f2, {diag({5, 0.2}), mat2(2, 1, 1, 1)});
    Element e{}, a{0}, b{2};
    auto rees = rees_from_factors(f2, {e, a}, {e, b});
    auto rho = rees_representation(rees, sigma, {e, a}, {e, b});
    auto t = rees_gap_transfer(rho, 4);
    EXPECT_TRUE(t.holds());
    EXPECT_GT(t.max_difference, 0.0);
    EXPECT_EQ(t.samples, 4u * (1 + 4 * (81u - 1) / 2 - 1));
}

TEST(Properties, FreeGroupUniformConstantsHold) {
    auto f = std::make_shared<FreeGroupSymmetric>(2);
    auto pc = property_constants(f);
    ASSERT_EQ(pc.U.status, PropertyStatus::Holds);
    auto ball = cayley_ball(*f, 7);
    for (const auto& g : ball.elements) {
        double best = 0.0;
        for (const auto& s : pc.U.s_prime) best = std::max(best, *f->exact_stable_length(f->multiply(g, s)));
        EXPECT_GE(best, pc.U.c * static_cast<double>(g.size()) - pc.U.c_prime) << f->format(g);
    }
}

TEST(Properties, VariantsAndTransfer) {
    EXPECT_EQ(property_constants(std::make_shared<FreeSemigroup>(2)).D.status, PropertyStatus::Holds);
    auto fin = property_constants(s3());
    EXPECT_EQ(fin.D.status, PropertyStatus::Fails);
    EXPECT_EQ(fin.U.status, PropertyStatus::Holds);
    EXPECT_EQ(fin.U.c_prime, 3.0);
    auto bs = property_constants(std::make_shared<BS12>());
    EXPECT_EQ(bs.D.status, PropertyStatus::Unknown);
    auto rees = property_constants(free_rees());
    EXPECT_EQ(rees.D.status, PropertyStatus::Holds);
    EXPECT_DOUBLE_EQ(rees.D.kappa, 1.0 / 5);
    EXPECT_DOUBLE_EQ(rees.U.c, 1.0 / 5);
    EXPECT_EQ(rees.U.s_prime.size(), 4u * 5u);
}

TEST(Properties, ReesUniformConstantsOnBall) {
    auto r = free_rees();
    auto pc = property_constants(r);
    WordLengthOracle o(r);
    auto ball = cayley_ball(*r, 3);
    for (std::size_t k = 1; k < ball.elements.size(); ++k) {
        double best = 0.0;
        for (const auto& s : pc.U.s_prime) {
            Element y = r->multiply(ball.elements[k], s);
            best = std::max(best, stable_length(o, y, 2, 2 * (ball.length[k] + 3)).upper);
        }
        // the upper bracket dominates the stable length, so failure here would refute the constants
        EXPECT_GE(best, pc.U.c * ball.length[k] - pc.U.c_prime);
    }
}

TEST(BoundaryProbe, ConstantBoundary) {
    auto f = std::make_shared<FreeSemigroup>(2);
    auto rep = make_representation(f, {diag({3, 1}), mat2(2, 1, 0, 0.5)});
    auto bp = boundary_probe(rep, 1, 32, 40);
    EXPECT_LT(bp.max_pairwise_angle, 1e-6);
    EXPECT_TRUE(bp.dynamics_ok);
    for (double c : bp.cauchy) EXPECT_LT(c, 1e-6);
}

TEST(BoundaryProbe, DistinctAttractors) {
    auto f = std::make_shared<FreeSemigroup>(2);
    double c = std::cos(0.7), s = std::sin(0.7);
    Matrix R = mat2(c, -s, s, c);
    auto rep = make_representation(f, {diag({10, 1}), Matrix(R * diag({10, 1}) * R.transpose())});
    auto bp = boundary_probe(rep, 1, 16, 30);
    EXPECT_GT(bp.max_pairwise_angle, 0.5);
    EXPECT_TRUE(bp.dynamics_ok);
    EXPECT_NEAR(bp.fixed_point_angle[0], 0.0, 1e-9);
}
