#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "iwip/random_walk.hpp"

using namespace iwip;

namespace {

FreeAutomorphism aut(std::vector<std::string> images) { return FreeAutomorphism::from_strings(images); }

const FreeAutomorphism phi3 = aut({"b", "c", "ab"});

StepDistribution point_mass(const FreeAutomorphism& f) { return StepDistribution::uniform(f.rank(), {f}); }

StepDistribution small_mu() {
    return StepDistribution::uniform(3, {phi3, aut({"ab", "b", "c"}), aut({"a", "bc", "c"}), aut({"Aca", "Ac", "Acb"})});
}

}  // namespace

TEST(StepDistribution, Validation) {
    EXPECT_NO_THROW(small_mu().validate());
    StepDistribution bad = small_mu();
    bad.support[0].second = 0.15;
    EXPECT_THROW(bad.validate(), InvalidDistribution);
    bad = small_mu();
    bad.support[1].second = -0.25;
    bad.support[2].second = 0.75;
    EXPECT_THROW(bad.validate(), InvalidDistribution);
    bad = small_mu();
    bad.support[0].first = aut({"ab", "b"});
    EXPECT_THROW(bad.validate(), InvalidDistribution);
    EXPECT_THROW(StepDistribution{}.validate(), InvalidDistribution);
}

TEST(Reflect, Examples) {
    auto mu = small_mu();
    auto twice = reflect(reflect(mu));
    ASSERT_EQ(twice.support.size(), mu.support.size());
    for (std::size_t i = 0; i < mu.support.size(); ++i) {
        EXPECT_EQ(twice.support[i].first, mu.support[i].first);
        EXPECT_EQ(twice.support[i].second, mu.support[i].second);
    }
    EXPECT_EQ(reflect(point_mass(phi3)).support[0].first, invert(phi3));
    StepDistribution two;
    two.rank = 3;
    two.support = {{phi3, 0.3}, {aut({"ab", "b", "c"}), 0.7}};
    auto r = reflect(two);
    EXPECT_EQ(r.support[0].first, invert(phi3));
    EXPECT_EQ(r.support[0].second, 0.3);
    EXPECT_EQ(r.support[1].first, aut({"aB", "b", "c"}));
    EXPECT_EQ(r.support[1].second, 0.7);
    EXPECT_NO_THROW(r.validate());
}

TEST(SampleWalk, PointMasses) {
    std::mt19937_64 rng(1);
    auto w = sample_walk(point_mass(phi3), 3, rng);
    ASSERT_EQ(w.positions.size(), 3u);
    EXPECT_EQ(w.positions[0], phi3);
    EXPECT_EQ(w.positions[1], compose(phi3, phi3));
    EXPECT_EQ(w.positions[2], compose(phi3, compose(phi3, phi3)));
    auto id = sample_walk(point_mass(FreeAutomorphism::identity(3)), 5, rng);
    for (const auto& p : id.positions) EXPECT_TRUE(p.is_identity());
    EXPECT_THROW(sample_walk(point_mass(phi3), 0, rng), std::invalid_argument);
}

TEST(SampleWalk, RightMultiplication) {
    // independent replay of the draws: w_{k+1} = w_k g_k
    auto mu = small_mu();
    std::mt19937_64 a(77), b(77);
    auto walk = sample_walk(mu, 12, a);
    auto w = FreeAutomorphism::identity(3);
    for (int k = 0; k < 12; ++k) {
        const double u = static_cast<double>(b() >> 11) / 9007199254740992.0;
        auto idx = static_cast<std::size_t>(std::min(3.0, std::floor(u * 4)));
        w = compose(w, mu.support[idx].first);
        EXPECT_EQ(walk.positions[k], w) << k;
    }
}

TEST(SampleWalk, PrefixAndDeterminism) {
    auto mu = small_mu();
    for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
        std::mt19937_64 a(seed), b(seed), c(seed);
        auto short_walk = sample_walk(mu, 7, a), long_walk = sample_walk(mu, 15, b), again = sample_walk(mu, 15, c);
        for (int k = 0; k < 7; ++k) EXPECT_EQ(short_walk.positions[k], long_walk.positions[k]);
        EXPECT_EQ(long_walk.positions, again.positions);
    }
}

TEST(SampleWalk, LetterBudget) {
    std::mt19937_64 rng(5);
    auto w = sample_walk(point_mass(aut({"ab", "a"})), 40, rng, 1000);
    EXPECT_TRUE(w.truncated);
    EXPECT_LT(w.positions.size(), 40u);
    for (const auto& p : w.positions) EXPECT_LE(p.total_length(), 1000u);
}

TEST(TrialSeed, DistinctStreams) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t t = 0; t < 1000; ++t) seen.insert(trial_seed(42, t));
    EXPECT_EQ(seen.size(), 1000u);
    EXPECT_NE(trial_seed(42, 0), trial_seed(43, 0));
}

TEST(AnalyzeCheckpoint, Examples) {
    auto r = analyze_checkpoint(phi3);
    EXPECT_NEAR(r.lambda, 1.3247179572, 1e-9);
    EXPECT_EQ(r.k_list, (std::vector<int>{5}));
    EXPECT_EQ(*r.index, Rational(-3, 2));
    EXPECT_FALSE(r.triangular);
    EXPECT_FALSE(r.unresolved());
    auto id = analyze_checkpoint(FreeAutomorphism::identity(3));
    EXPECT_EQ(id.fully_irreducible, Verdict::CertifiedNo);
    AnalysisLimits capped;
    capped.max_steps = 0;
    auto inc = analyze_checkpoint(aut({"ab", "A"}), capped);
    EXPECT_EQ(inc.train_track, TrainTrackOutcome::Inconclusive);
    EXPECT_EQ(inc.fully_irreducible, Verdict::Unknown);
    EXPECT_TRUE(inc.unresolved());
}

TEST(RunExperiment, DegenerateSingleTrial) {
    WalkConfig cfg;
    cfg.steps = 1;
    cfg.checkpoints = {1};
    cfg.trials = 1;
    cfg.seed = 3;
    auto rep = run_experiment(point_mass(phi3), cfg);
    ASSERT_EQ(rep.records.size(), 1u);
    auto direct = analyze_checkpoint(phi3);
    const auto& r = rep.records[0];
    EXPECT_EQ(r.lambda, direct.lambda);
    EXPECT_EQ(r.k_list, direct.k_list);
    EXPECT_EQ(r.index, direct.index);
    EXPECT_EQ(r.fully_irreducible, direct.fully_irreducible);
    ASSERT_EQ(rep.summary.size(), 1u);
    EXPECT_EQ(rep.summary[0].trials, 1);
    EXPECT_EQ(rep.summary[0].frac_fi_certified, 1.0);
    EXPECT_EQ(rep.summary[0].mean_index, -1.5);
}

TEST(RunExperiment, ConfigValidation) {
    WalkConfig cfg;
    cfg.steps = 10;
    cfg.checkpoints = {5, 20};
    EXPECT_THROW(run_experiment(small_mu(), cfg), std::invalid_argument);
    cfg.checkpoints = {5, 5};
    EXPECT_THROW(run_experiment(small_mu(), cfg), std::invalid_argument);
    cfg.checkpoints = {5};
    cfg.trials = 0;
    EXPECT_THROW(run_experiment(small_mu(), cfg), std::invalid_argument);
}

TEST(RunExperiment, DeterministicAcrossRunsAndThreads) {
    WalkConfig cfg;
    cfg.steps = 8;
    cfg.checkpoints = {2, 4, 8};
    cfg.trials = 12;
    cfg.seed = 7;
    cfg.also_inverse = true;
    auto a = run_experiment(small_mu(), cfg);
    auto b = run_experiment(small_mu(), cfg);
    cfg.threads = 3;
    auto c = run_experiment(small_mu(), cfg);
    EXPECT_EQ(a.csv(), b.csv());
    EXPECT_EQ(a.csv(), c.csv());
    EXPECT_NE(a.csv().find("frac_joint_triangular"), std::string::npos);
    cfg.seed = 8;
    EXPECT_NE(run_experiment(small_mu(), cfg).csv(), a.csv());
}

TEST(RunExperiment, SummaryIsAFoldOfRecords) {
    WalkConfig cfg;
    cfg.steps = 6;
    cfg.checkpoints = {3, 6};
    cfg.trials = 15;
    cfg.seed = 11;
    auto rep = run_experiment(small_mu(), cfg);
    for (const auto& s : rep.summary) {
        int count = 0, fi = 0, tri = 0;
        double idx = 0;
        int nidx = 0;
        for (const auto& r : rep.records) {
            if (r.n != s.n) continue;
            ++count;
            fi += r.fully_irreducible == Verdict::CertifiedYes;
            tri += r.triangular;
            if (r.index) {
                idx += static_cast<double>(r.index->numerator()) / r.index->denominator();
                ++nidx;
            }
        }
        EXPECT_EQ(s.trials, count);
        EXPECT_EQ(s.frac_fi_certified, static_cast<double>(fi) / count);
        EXPECT_EQ(s.frac_triangular, static_cast<double>(tri) / count);
        if (nidx) EXPECT_NEAR(s.mean_index, idx / nidx, 1e-12);
        for (double f : {s.frac_tt_found, s.frac_fi_certified, s.frac_ageometric, s.frac_triangular,
                         s.frac_principal, s.frac_unresolved})
            EXPECT_TRUE(f >= 0 && f <= 1);
    }
    auto again = summarize(cfg.checkpoints, rep.records);
    ASSERT_EQ(again.size(), rep.summary.size());
    for (std::size_t i = 0; i < again.size(); ++i) EXPECT_EQ(again[i].frac_principal, rep.summary[i].frac_principal);
}

TEST(RunExperiment, ImplicationsFuzz) {
    WalkConfig cfg;
    cfg.steps = 10;
    cfg.checkpoints = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    cfg.trials = 1000;
    cfg.seed = 2024;
    auto mu = StepDistribution::uniform(3, {aut({"Aca", "Ac", "Acb"}), aut({"Ba", "Bc", "Bab"}), aut({"ab", "b", "c"}),
                                            aut({"aB", "b", "c"}), aut({"a", "bc", "c"}), aut({"a", "bC", "c"})});
    auto rep = run_experiment(mu, cfg);
    ASSERT_EQ(rep.records.size(), 10000u);
    for (const auto& r : rep.records) {
        Classification c;
        c.fully_irreducible = r.fully_irreducible;
        c.ageometric = r.ageometric;
        c.triangular = r.triangular;
        c.principal = r.principal;
        ASSERT_TRUE(c.consistent(r.k_list, 3)) << "trial " << r.trial << " n " << r.n;
        if (r.fully_irreducible == Verdict::CertifiedYes && r.triangular) {
            ASSERT_TRUE(r.index.has_value());
            EXPECT_GE(*r.index, Rational(3, 2) - Rational(3));
        }
        if (r.fully_irreducible == Verdict::CertifiedNo) EXPECT_EQ(r.ageometric, Verdict::NotApplicable);
    }
}
