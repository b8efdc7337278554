#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "iwip/graph_map.hpp"

using namespace iwip;

namespace {

TransitionMatrix mat(std::vector<std::vector<long long>> m) { return TransitionMatrix(std::move(m)); }

// Oracle: largest real root of a monic polynomial by bisection above 1.
double largest_root(const std::vector<double>& coeffs_high_first, double lo, double hi) {
    auto p = [&](double x) {
        double s = 0;
        for (double c : coeffs_high_first) s = s * x + c;
        return s;
    };
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (p(mid) > 0) == (p(hi) > 0) ? hi = mid : lo = mid;
    }
    return 0.5 * (lo + hi);
}

// Oracle: brute force M^k > 0 over k up to the Wielandt bound.
bool brute_primitive(const TransitionMatrix& m) {
    const int n = m.size();
    std::vector<std::vector<char>> p(n, std::vector<char>(n)), b(n, std::vector<char>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) p[i][j] = b[i][j] = m(i, j) > 0;
    for (int k = 1; k <= n * n - 2 * n + 2; ++k) {
        bool all = true;
        for (auto& row : p)
            for (char c : row) all &= c != 0;
        if (all) return true;
        std::vector<std::vector<char>> q(n, std::vector<char>(n, 0));
        for (int i = 0; i < n; ++i)
            for (int l = 0; l < n; ++l)
                if (p[i][l])
                    for (int j = 0; j < n; ++j) q[i][j] |= b[l][j];
        p = q;
    }
    return false;
}

bool brute_irreducible(const TransitionMatrix& m) {
    const int n = m.size();
    for (int s = 0; s < n; ++s) {
        std::vector<char> seen(n, 0);
        std::vector<int> st{s};
        while (!st.empty()) {
            int v = st.back();
            st.pop_back();
            for (int w = 0; w < n; ++w)
                if (m(v, w) && !seen[w]) {
                    seen[w] = 1;
                    st.push_back(w);
                }
        }
        for (int w = 0; w < n; ++w)
            if (!seen[w]) return false;
    }
    return true;
}

}  // namespace

TEST(RoseMap, Transcribes) {
    auto g = rose_map(FreeAutomorphism::identity(2));
    EXPECT_EQ(g.edge_image[0], (EdgePath{0}));
    EXPECT_EQ(g.edge_image[1], (EdgePath{2}));
    auto phi3 = rose_map(FreeAutomorphism::from_strings({"b", "c", "ab"}));
    EXPECT_EQ(path_to_string(phi3.edge_image[2]), "e1 e2");
    EXPECT_DOUBLE_EQ(phi3.g().length[0], 1.0 / 3);
    EXPECT_NO_THROW(phi3.validate());
}

TEST(Tighten, Examples) {
    auto g = rose_map(FreeAutomorphism::identity(2));
    g.edge_image[0] = {0, 1, 2};  // e1 E1 e2
    EXPECT_EQ(tighten(g).edge_image[0], (EdgePath{2}));
    auto t = rose_map(FreeAutomorphism::from_strings({"b", "c", "ab"}));
    EXPECT_EQ(tighten(t).edge_image, t.edge_image);
    g.edge_image[0] = {0, 1};
    EXPECT_THROW(tighten(g), DegenerateEdge);
}

TEST(TransitionMatrix, Examples) {
    EXPECT_EQ(transition_matrix(rose_map(FreeAutomorphism::identity(2))), mat({{1, 0}, {0, 1}}));
    EXPECT_EQ(transition_matrix(rose_map(FreeAutomorphism::from_strings({"ab", "a"}))), mat({{1, 1}, {1, 0}}));
    EXPECT_EQ(transition_matrix(rose_map(FreeAutomorphism::from_strings({"b", "c", "ab"}))),
              mat({{0, 1, 0}, {0, 0, 1}, {1, 1, 0}}));
}

TEST(TransitionMatrix, RowSumsAreImageLengths) {
    std::mt19937_64 rng(2);
    auto gens = nielsen_generators(3);
    for (int t = 0; t < 50; ++t) {
        auto phi = FreeAutomorphism::identity(3);
        for (int i = 0; i < 6; ++i) phi = compose(phi, gens[rng() % gens.size()]);
        auto m = transition_matrix(rose_map(phi));
        for (int e = 0; e < 3; ++e) EXPECT_EQ(m.row_sum(e), static_cast<long long>(phi.image(e).size()));
    }
}

TEST(PerronFrobenius, Examples) {
    EXPECT_NEAR(pf_eigenvalue(mat({{1}})), 1.0, 1e-12);
    EXPECT_NEAR(spectral_radius(mat({{1, 0}, {0, 1}})), 1.0, 1e-12);
    EXPECT_NEAR(pf_eigenvalue(mat({{1, 1}, {1, 0}})), largest_root({1, -1, -1}, 1, 2), 1e-9);
    double plastic = largest_root({1, 0, -1, -1}, 1, 2);
    EXPECT_NEAR(plastic, 1.3247179572, 1e-9);
    EXPECT_NEAR(pf_eigenvalue(mat({{0, 1, 0}, {0, 0, 1}, {1, 1, 0}})), plastic, 1e-9);
}

TEST(PerronFrobenius, ReducibleRejected) {
    EXPECT_THROW(pf_eigenvalue(mat({{1, 1}, {0, 1}})), Reducible);
    EXPECT_THROW(pf_eigenvalue(mat({{1, 0}, {0, 1}})), Reducible);
}

TEST(PerronFrobenius, EqualRowSumsAndEigenvector) {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 100; ++t) {
        int n = 2 + static_cast<int>(rng() % 4);
        std::vector<std::vector<long long>> m(n, std::vector<long long>(n, 0));
        for (auto& row : m)
            for (auto& x : row) x = rng() % 3;
        auto tm = mat(m);
        if (!is_irreducible(tm)) continue;
        auto pf = perron_frobenius(tm);
        EXPECT_GE(pf.eigenvalue, 1.0 - 1e-12);
        for (int i = 0; i < n; ++i) {
            double s = 0;
            for (int j = 0; j < n; ++j) s += m[i][j] * pf.eigenvector[j];
            EXPECT_NEAR(s, pf.eigenvalue * pf.eigenvector[i], 1e-8);
        }
        long long lo = tm.row_sum(0), hi = lo;
        for (int i = 0; i < n; ++i) {
            lo = std::min(lo, tm.row_sum(i));
            hi = std::max(hi, tm.row_sum(i));
        }
        EXPECT_LE(pf.eigenvalue, hi + 1e-9);
        EXPECT_GE(pf.eigenvalue, lo - 1e-9);
        if (lo == hi) EXPECT_NEAR(pf.eigenvalue, static_cast<double>(hi), 1e-9);
    }
}

TEST(Primitivity, Examples) {
    auto id = primitivity_class(mat({{1, 0}, {0, 1}}));
    EXPECT_EQ(id.kind, Primitivity::Reducible);
    EXPECT_EQ(id.invariant_subset, (std::vector<int>{0}));
    auto swap = primitivity_class(mat({{0, 1}, {1, 0}}));
    EXPECT_EQ(swap.kind, Primitivity::IrreducibleNotPrimitive);
    EXPECT_EQ(swap.period, 2);
    EXPECT_EQ(primitivity_class(mat({{0, 1, 0}, {0, 0, 1}, {1, 1, 0}})).kind, Primitivity::Primitive);
}

TEST(Primitivity, AgreesWithBruteForce) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 200; ++t) {
        int n = 1 + static_cast<int>(rng() % 5);
        std::vector<std::vector<long long>> m(n, std::vector<long long>(n, 0));
        for (auto& row : m)
            for (auto& x : row) x = rng() % 3 == 0;
        auto tm = mat(m);
        auto res = primitivity_class(tm);
        bool irr = brute_irreducible(tm) && !(n == 1 && m[0][0] == 0);
        EXPECT_EQ(res.kind == Primitivity::Reducible, !irr);
        if (irr) EXPECT_EQ(res.kind == Primitivity::Primitive, brute_primitive(tm));
        if (res.kind == Primitivity::Reducible && !res.invariant_subset.empty()) {
            // the witness is closed under successors
            std::vector<char> in(n, 0);
            for (int i : res.invariant_subset) in[i] = 1;
            for (int i : res.invariant_subset)
                for (int j = 0; j < n; ++j)
                    if (m[i][j]) EXPECT_TRUE(in[j]);
            EXPECT_LT(static_cast<int>(res.invariant_subset.size()), n);
        }
    }
}

TEST(InducedAutomorphism, RoundTrip) {
    std::mt19937_64 rng(8);
    auto gens = nielsen_generators(3);
    for (int t = 0; t < 100; ++t) {
        auto phi = FreeAutomorphism::identity(3);
        for (int i = 0; i < 8; ++i) phi = compose(phi, gens[rng() % gens.size()]);
        auto g = rose_map(phi);
        EXPECT_TRUE(same_outer_class(induced_automorphism(g), phi));
        EXPECT_TRUE(same_outer_class(induced_automorphism(tighten(g)), phi));
    }
}

TEST(InducedAutomorphism, RejectsNonEquivalence) {
    auto g = rose_map(FreeAutomorphism::identity(2));
    g.edge_image[1] = {0};
    EXPECT_THROW(induced_automorphism(g), NotHomotopyEquivalence);
}

TEST(MarkedGraph, Validation) {
    EXPECT_NO_THROW(MarkedGraph::rose(3).validate());
    auto m = MarkedGraph::rose(2);
    m.marking[1] = {0};
    EXPECT_THROW(m.validate(), InvalidGraph);
    m = MarkedGraph::rose(2);
    m.graph.length[0] = 0;
    EXPECT_THROW(m.validate(), InvalidGraph);
}
