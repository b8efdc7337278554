#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "iwip/outer_space.hpp"

using namespace iwip;

namespace {

OuterSpacePoint rose_point(std::vector<double> lengths) {
    auto mg = MarkedGraph::rose(static_cast<int>(lengths.size()));
    mg.graph.length = lengths;
    return normalize_volume(mg);
}

MarkedGraph theta() {
    MarkedGraph mg;
    mg.graph.vertex_count = 2;
    for (int i = 0; i < 3; ++i) mg.graph.add_edge(0, 1);
    mg.marking = {{0, 3}, {0, 5}};
    return mg;
}

// two loops joined by a bridge
MarkedGraph barbell() {
    MarkedGraph mg;
    mg.graph.vertex_count = 2;
    mg.graph.add_edge(0, 0);
    mg.graph.add_edge(1, 1);
    mg.graph.add_edge(0, 1);
    mg.marking = {{0}, {4, 2, 5}};
    return mg;
}

MarkedGraph theta_loop() {
    MarkedGraph mg;
    mg.graph.vertex_count = 2;
    for (int i = 0; i < 3; ++i) mg.graph.add_edge(0, 1);
    mg.graph.add_edge(0, 0);
    mg.marking = {{0, 3}, {0, 5}, {6}};
    return mg;
}

MarkedGraph k4() {
    MarkedGraph mg;
    mg.graph.vertex_count = 4;
    mg.graph.add_edge(0, 1);  // tree
    mg.graph.add_edge(0, 2);
    mg.graph.add_edge(0, 3);
    mg.graph.add_edge(1, 2);
    mg.graph.add_edge(2, 3);
    mg.graph.add_edge(3, 1);
    mg.marking = {{0, 6, 3}, {2, 8, 5}, {4, 10, 1}};
    return mg;
}

// Random metric and a marking precomposed with a random automorphism.
OuterSpacePoint random_point(std::mt19937_64& rng, int rank) {
    std::vector<MarkedGraph> shapes;
    if (rank == 2) shapes = {MarkedGraph::rose(2), theta(), barbell()};
    else shapes = {MarkedGraph::rose(3), theta_loop(), k4()};
    MarkedGraph mg = shapes[rng() % shapes.size()];
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (double& l : mg.graph.length) l = u(rng);
    auto gens = nielsen_generators(rank);
    auto phi = FreeAutomorphism::identity(rank);
    int n = static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) phi = compose(phi, gens[rng() % gens.size()]);
    MarkingChart chart(mg);
    std::vector<EdgePath> marking;
    for (const auto& w : phi.images()) marking.push_back(tighten_path(chart.path_of(w)));
    mg.marking = marking;
    return normalize_volume(mg);
}

// Oracle: stretch of one loop, computed directly from the markings.
double stretch(const OuterSpacePoint& x, const OuterSpacePoint& y, const Word& w) {
    MarkingChart cx(x.graph), cy(y.graph);
    double lx = x.graph.graph.path_length(cyclically_tighten(cx.path_of(w)));
    double ly = y.graph.graph.path_length(cyclically_tighten(cy.path_of(w)));
    return ly / lx;
}

std::set<std::string> candidate_words(const OuterSpacePoint& x) {
    MarkingChart c(x.graph);
    std::set<std::string> out;
    for (const auto& cand : candidates(x)) out.insert(to_string(c.word_of(cand.path).cyclic_core()));
    return out;
}

}  // namespace

TEST(NormalizeVolume, Examples) {
    EXPECT_EQ(rose_point({2, 2}).graph.graph.length, (std::vector<double>{0.5, 0.5}));
    auto p = rose_point({1, 2, 3});
    EXPECT_NEAR(p.graph.graph.length[0], 1.0 / 6, 1e-15);
    EXPECT_NEAR(p.graph.graph.length[1], 1.0 / 3, 1e-15);
    EXPECT_NEAR(p.graph.graph.length[2], 0.5, 1e-15);
    EXPECT_EQ(normalize_volume(p.graph).graph.graph.length, p.graph.graph.length);
    auto bad = MarkedGraph::rose(2);
    bad.graph.length[0] = 0;
    EXPECT_THROW(normalize_volume(bad), InvalidGraph);
}

TEST(OuterSpacePoint, RejectsLowValence) {
    auto mg = MarkedGraph::rose(2);
    mg.graph.add_vertex();
    mg.graph.add_edge(0, 1);
    mg.graph.length = {0.25, 0.5, 0.25};
    EXPECT_THROW(OuterSpacePoint::from(mg), InvalidGraph);
    auto s = normalize_volume(smooth(mg));
    EXPECT_EQ(s.graph.graph.edge_count(), 2);
}

TEST(Candidates, Examples) {
    auto r2 = rose_point({1, 1});
    EXPECT_EQ(candidate_words(r2), (std::set<std::string>{"a", "b", "ab", "aB"}));
    auto c3 = candidates(rose_point({1, 1, 1}));
    EXPECT_EQ(c3.size(), 9u);
    int circles = 0, eights = 0;
    for (const auto& c : c3) {
        circles += c.shape == CandidateShape::EmbeddedCircle;
        eights += c.shape == CandidateShape::FigureEight;
    }
    EXPECT_EQ(circles, 3);
    EXPECT_EQ(eights, 6);
    auto th = candidates(normalize_volume(theta()));
    EXPECT_EQ(th.size(), 3u);
    for (const auto& c : th) EXPECT_EQ(c.shape, CandidateShape::EmbeddedCircle);
    auto bb = candidates(normalize_volume(barbell()));
    ASSERT_EQ(bb.size(), 4u);
    EXPECT_EQ(bb[2].shape, CandidateShape::Barbell);
}

TEST(Candidates, LoopsAreClosedAndReduced) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 30; ++t) {
        auto x = random_point(rng, 2 + static_cast<int>(rng() % 2));
        for (const auto& c : candidates(x)) {
            const Graph& g = x.graph.graph;
            EXPECT_TRUE(g.is_path(c.path));
            EXPECT_EQ(g.init(c.path.front()), g.term(c.path.back()));
            EXPECT_EQ(cyclically_tighten(c.path), c.path);
            std::map<int, int> mult;
            for (HalfEdge h : c.path) mult[edge_of(h)]++;
            for (auto [e, m] : mult) EXPECT_LE(m, 2);
        }
    }
}

TEST(Lipschitz, RoseFixtures) {
    auto x = rose_point({0.5, 0.5}), y = rose_point({1.0 / 3, 2.0 / 3});
    auto f = lipschitz_distance(x, y);
    EXPECT_NEAR(f.d_cv, std::log(4.0 / 3), 1e-9);
    EXPECT_EQ(to_string(f.witness_word), "b");
    EXPECT_NEAR(lipschitz_distance(y, x).d_cv, std::log(1.5), 1e-9);
    EXPECT_NEAR(sym_distance(x, y), std::log(2.0), 1e-9);
    EXPECT_EQ(lipschitz_distance(x, x).d_cv, 0.0);
    EXPECT_EQ(sym_distance(y, y), 0.0);
    EXPECT_THROW(lipschitz_distance(x, rose_point({1, 1, 1})), RankMismatch);
}

TEST(Lipschitz, CandidateMaximality) {
    std::mt19937_64 rng(41);
    const int pairs = 20, loops = 50;
    for (int p = 0; p < pairs; ++p) {
        int rank = 2 + p % 2;
        auto x = random_point(rng, rank), y = random_point(rng, rank);
        double best = std::exp(lipschitz_distance(x, y).d_cv);
        for (int l = 0; l < loops; ++l) {
            Word w;
            while (w.empty()) {
                std::vector<Letter> letters;
                int len = 1 + static_cast<int>(rng() % 10);
                for (int i = 0; i < len; ++i) {
                    Letter a = 1 + static_cast<Letter>(rng() % rank);
                    letters.push_back(rng() % 2 ? a : -a);
                }
                w = Word::reduce(letters, rank).cyclic_core();
            }
            EXPECT_LE(stretch(x, y, w), best * (1 + 1e-9)) << to_string(w);
        }
    }
}

TEST(Lipschitz, TriangleInequalityAndSymmetry) {
    std::mt19937_64 rng(43);
    for (int t = 0; t < 200; ++t) {
        int rank = 2 + t % 2;
        auto x = random_point(rng, rank), y = random_point(rng, rank), z = random_point(rng, rank);
        double xy = lipschitz_distance(x, y).d_cv, yz = lipschitz_distance(y, z).d_cv, xz = lipschitz_distance(x, z).d_cv;
        EXPECT_LE(xz, xy + yz + 1e-9);
        EXPECT_GE(xy, -1e-12);
        EXPECT_NEAR(sym_distance(x, y), sym_distance(y, x), 1e-12);
    }
}

TEST(FreeFactors, Examples) {
    auto r3 = free_factor_projection(rose_point({1, 1, 1}));
    std::set<std::string> got;
    for (const auto& f : r3) {
        std::string s;
        for (const auto& w : f.basis) s += (s.empty() ? "" : ",") + to_string(w);
        got.insert(s);
    }
    EXPECT_EQ(got, (std::set<std::string>{"a", "b", "c", "a,b", "a,c", "b,c"}));
    EXPECT_EQ(free_factor_projection(rose_point({1, 1})).size(), 2u);
    auto th = free_factor_projection(normalize_volume(theta()));
    ASSERT_EQ(th.size(), 3u);
    for (const auto& f : th) EXPECT_EQ(f.basis.size(), 1u);
    EXPECT_EQ(th[0].code, factor_normal_form({parse_word("a")}).code);
}

TEST(FreeFactors, ConjugationInvariantCode) {
    auto f = factor_normal_form({parse_word("ab"), parse_word("c")});
    auto g = factor_normal_form({parse_word("Cabc"), parse_word("c")});
    EXPECT_EQ(f.code, g.code);
    EXPECT_NE(f.code, factor_normal_form({parse_word("a"), parse_word("c")}).code);
}

namespace {

void check_fold_path(const FreeAutomorphism& phi, const GraphMap& g) {
    const double lambda = pf_eigenvalue(transition_matrix(g));
    for (int stages : {1, 3, 8}) {
        auto pts = fold_path_points(g, stages);
        ASSERT_EQ(pts.size(), static_cast<std::size_t>(stages + 1));
        double sum = 0;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            double d = lipschitz_distance(pts[i], pts[i + 1]).d_cv;
            EXPECT_GE(d, -1e-12);
            sum += d;
        }
        EXPECT_NEAR(sum, std::log(lambda), 1e-6) << to_string(phi) << " stages " << stages;
    }
    EXPECT_EQ(fold_path_points(g, 0).size(), 1u);
}

}  // namespace

TEST(FoldPath, LengthIsLogLambda) {
    auto fib = FreeAutomorphism::from_strings({"ab", "a"});
    check_fold_path(fib, rose_map(fib));
    auto phi3 = FreeAutomorphism::from_strings({"b", "c", "ab"});
    check_fold_path(phi3, rose_map(phi3));
}

TEST(FoldPath, EndpointIsTwistedStart) {
    auto fib = FreeAutomorphism::from_strings({"ab", "a"});
    auto g = rose_map(fib);
    auto pts = fold_path_points(g, 4);
    MarkedGraph tw = pts.front().graph;
    GraphMap gg = g;
    gg.graph = tw;
    for (auto& p : tw.marking) p = gg.apply(p);
    auto twisted = OuterSpacePoint::from(tw);
    EXPECT_NEAR(lipschitz_distance(twisted, pts.back()).d_cv, 0.0, 1e-9);
    EXPECT_NEAR(lipschitz_distance(pts.back(), twisted).d_cv, 0.0, 1e-9);
}

TEST(FoldPath, Rejections) {
    EXPECT_THROW(fold_path_points(rose_map(FreeAutomorphism::identity(2)), 2), NotTrainTrack);
    EXPECT_THROW(fold_path_points(rose_map(FreeAutomorphism::from_strings({"ab", "a"})), -1), std::invalid_argument);
}
