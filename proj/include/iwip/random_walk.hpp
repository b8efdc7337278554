#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "iwip/classify.hpp"

namespace iwip {

class InvalidDistribution : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct StepDistribution {
    int rank = 0;
    std::vector<std::pair<FreeAutomorphism, double>> support;

    void validate() const {
        if (support.empty()) throw InvalidDistribution("empty support");
        double total = 0;
        for (std::size_t i = 0; i < support.size(); ++i) {
            if (support[i].first.rank() != rank)
                throw InvalidDistribution("support element " + std::to_string(i) + " has rank " +
                                          std::to_string(support[i].first.rank()) + ", expected " +
                                          std::to_string(rank));
            if (!(support[i].second > 0))
                throw InvalidDistribution("support element " + std::to_string(i) + " has non-positive probability");
            total += support[i].second;
        }
        if (std::abs(total - 1) > 1e-9)
            throw InvalidDistribution("probabilities sum to " + std::to_string(total));
    }

    static StepDistribution uniform(int rank, const std::vector<FreeAutomorphism>& elements) {
        StepDistribution mu;
        mu.rank = rank;
        for (const auto& f : elements) mu.support.push_back({f, 1.0 / static_cast<double>(elements.size())});
        return mu;
    }
};

/// mu-check(g) = mu(g^-1).
inline StepDistribution reflect(const StepDistribution& mu) {
    StepDistribution out;
    out.rank = mu.rank;
    for (const auto& [f, p] : mu.support) out.support.push_back({invert(f), p});
    return out;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of the rng stream of one trial.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
    return splitmix64(splitmix64(master) ^ splitmix64(trial + 1));
}

/// Index drawn from mu by inverse CDF on a 53-bit uniform.
inline std::size_t draw(const StepDistribution& mu, std::mt19937_64& rng) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    double acc = 0;
    for (std::size_t i = 0; i < mu.support.size(); ++i) {
        acc += mu.support[i].second;
        if (u < acc) return i;
    }
    return mu.support.size() - 1;
}

struct WalkOutcome {
    std::vector<FreeAutomorphism> positions;  // w_1 .. w_k
    bool truncated = false;
};

/// w_k = g_1 g_2 ... g_k. Stops early, flagged truncated, once the total image
/// length would exceed `letter_budget`.
inline WalkOutcome sample_walk(const StepDistribution& mu, int n, std::mt19937_64& rng,
                               std::size_t letter_budget = 1000000) {
    if (n < 1) throw std::invalid_argument("walk length must be positive");
    WalkOutcome out;
    FreeAutomorphism w = FreeAutomorphism::identity(mu.rank);
    for (int k = 0; k < n; ++k) {
        const auto& g = mu.support[draw(mu, rng)].first;
        // |w(g(x))| <= |g(x)| max|w(y)|
        std::size_t longest = 0;
        for (const auto& im : w.images()) longest = std::max(longest, im.size());
        if (static_cast<double>(g.total_length()) * static_cast<double>(longest) >
            static_cast<double>(letter_budget)) {
            auto next = compose(w, g);
            if (next.total_length() > letter_budget) {
                out.truncated = true;
                return out;
            }
            w = std::move(next);
        } else {
            w = compose(w, g);
        }
        out.positions.push_back(w);
    }
    return out;
}

struct CheckpointRecord {
    int trial = 0;
    int n = 0;
    bool inverse = false;
    bool truncated = false;
    TrainTrackOutcome train_track = TrainTrackOutcome::Inconclusive;
    double lambda = 0;
    Verdict fully_irreducible = Verdict::Unknown;
    Verdict ageometric = Verdict::Unknown;
    std::vector<int> k_list;
    std::optional<Rational> index;
    bool triangular = false;
    bool principal = false;
    PnpOutcome pnp = PnpOutcome::Inconclusive;
    bool pnp_searched = false;
    double wall_seconds = 0;

    /// Pipeline did not finish: truncated walk, inconclusive train track
    /// search, or inconclusive PNP search.
    bool unresolved() const {
        return truncated || train_track == TrainTrackOutcome::Inconclusive ||
               (pnp_searched && pnp == PnpOutcome::Inconclusive);
    }
};

inline CheckpointRecord analyze_checkpoint(const FreeAutomorphism& w, const AnalysisLimits& limits = {}) {
    auto t0 = std::chrono::steady_clock::now();
    auto a = analyze(w, limits);
    CheckpointRecord r;
    r.train_track = a.train_track.outcome;
    r.lambda = a.train_track.outcome == TrainTrackOutcome::TrainTrack ? a.train_track.lambda : 0;
    r.fully_irreducible = a.classification.fully_irreducible;
    r.ageometric = a.classification.ageometric;
    if (a.ideal) r.k_list = a.ideal->k_list();
    r.index = a.index;
    r.triangular = a.classification.triangular;
    r.principal = a.classification.principal;
    r.pnp = a.pnp.outcome;
    r.pnp_searched = a.pnp_searched;
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

struct WalkConfig {
    int steps = 40;
    std::vector<int> checkpoints{5, 10, 20, 40};
    int trials = 200;
    std::uint64_t seed = 0;
    AnalysisLimits limits;
    std::size_t letter_budget = 1000000;
    bool also_inverse = false;
    /// Worker threads; results do not depend on it.
    int threads = 1;

    void validate() const {
        if (trials < 1) throw std::invalid_argument("trials must be at least 1");
        if (steps < 1) throw std::invalid_argument("steps must be at least 1");
        if (checkpoints.empty()) throw std::invalid_argument("no checkpoints");
        for (std::size_t i = 0; i < checkpoints.size(); ++i) {
            if (checkpoints[i] < 1 || checkpoints[i] > steps)
                throw std::invalid_argument("checkpoint " + std::to_string(checkpoints[i]) + " outside [1, " +
                                            std::to_string(steps) + "]");
            if (i && checkpoints[i] <= checkpoints[i - 1])
                throw std::invalid_argument("checkpoints must be strictly increasing");
        }
    }
};

struct CheckpointSummary {
    int n = 0;
    int trials = 0;
    double frac_tt_found = 0;
    double frac_fi_certified = 0;
    double frac_ageometric = 0;
    double frac_triangular = 0;
    double frac_principal = 0;
    double frac_unresolved = 0;
    double mean_index = NAN;
    double mean_log_lambda = NAN;
    double frac_triangular_given_fi = NAN;
    // with the inverse walk
    double inv_frac_fi_certified = NAN;
    double inv_frac_triangular = NAN;
    double frac_joint_triangular = NAN;
};

struct ExperimentReport {
    bool also_inverse = false;
    /// Trial-major, then checkpoint order; inverse records separately.
    std::vector<CheckpointRecord> records;
    std::vector<CheckpointRecord> inverse_records;
    std::vector<CheckpointSummary> summary;

    std::string csv() const;
};

namespace detail {

inline std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

}  // namespace detail

/// Per-checkpoint aggregates, a pure function of the records.
inline std::vector<CheckpointSummary> summarize(const std::vector<int>& checkpoints,
                                                const std::vector<CheckpointRecord>& records,
                                                const std::vector<CheckpointRecord>* inverse = nullptr) {
    std::vector<CheckpointSummary> out;
    for (int n : checkpoints) {
        CheckpointSummary s;
        s.n = n;
        int tt = 0, fi = 0, ageo = 0, tri = 0, pr = 0, unres = 0, nidx = 0, nlam = 0, fi_tri = 0;
        double idx = 0, loglam = 0;
        std::vector<const CheckpointRecord*> at;
        for (const auto& r : records)
            if (r.n == n) at.push_back(&r);
        for (const auto* r : at) {
            tt += r->train_track == TrainTrackOutcome::TrainTrack;
            fi += r->fully_irreducible == Verdict::CertifiedYes;
            ageo += r->ageometric == Verdict::CertifiedYes;
            tri += r->triangular;
            pr += r->principal;
            unres += r->unresolved();
            if (r->fully_irreducible == Verdict::CertifiedYes && r->triangular) ++fi_tri;
            if (r->index) {
                idx += boost::rational_cast<double>(*r->index);
                ++nidx;
            }
            if (r->train_track == TrainTrackOutcome::TrainTrack && r->lambda > 0) {
                loglam += std::log(r->lambda);
                ++nlam;
            }
        }
        s.trials = static_cast<int>(at.size());
        const double t = s.trials;
        if (s.trials) {
            s.frac_tt_found = tt / t;
            s.frac_fi_certified = fi / t;
            s.frac_ageometric = ageo / t;
            s.frac_triangular = tri / t;
            s.frac_principal = pr / t;
            s.frac_unresolved = unres / t;
        }
        if (nidx) s.mean_index = idx / nidx;
        if (nlam) s.mean_log_lambda = loglam / nlam;
        if (fi) s.frac_triangular_given_fi = static_cast<double>(fi_tri) / fi;
        if (inverse) {
            int ifi = 0, itri = 0, joint = 0, cnt = 0;
            for (const auto& r : *inverse) {
                if (r.n != n) continue;
                ++cnt;
                ifi += r.fully_irreducible == Verdict::CertifiedYes;
                itri += r.triangular;
                for (const auto* f : at)
                    if (f->trial == r.trial) joint += f->triangular && r.triangular;
            }
            if (cnt) {
                s.inv_frac_fi_certified = static_cast<double>(ifi) / cnt;
                s.inv_frac_triangular = static_cast<double>(itri) / cnt;
                s.frac_joint_triangular = static_cast<double>(joint) / cnt;
            }
        }
        out.push_back(s);
    }
    return out;
}

inline std::string ExperimentReport::csv() const {
    std::ostringstream os;
    os << "checkpoint_n,trials,frac_tt_found,frac_fi_certified,frac_ageometric,frac_triangular,frac_principal,"
          "frac_unresolved,mean_index,mean_log_lambda,frac_triangular_given_fi";
    if (also_inverse) os << ",inv_frac_fi_certified,inv_frac_triangular,frac_joint_triangular";
    os << "\n";
    using detail::fmt;
    for (const auto& s : summary) {
        os << s.n << ',' << s.trials << ',' << fmt(s.frac_tt_found) << ',' << fmt(s.frac_fi_certified) << ','
           << fmt(s.frac_ageometric) << ',' << fmt(s.frac_triangular) << ',' << fmt(s.frac_principal) << ','
           << fmt(s.frac_unresolved) << ',' << fmt(s.mean_index) << ',' << fmt(s.mean_log_lambda) << ','
           << fmt(s.frac_triangular_given_fi);
        if (also_inverse)
            os << ',' << fmt(s.inv_frac_fi_certified) << ',' << fmt(s.inv_frac_triangular) << ','
               << fmt(s.frac_joint_triangular);
        os << "\n";
    }
    return os.str();
}

namespace detail {

struct TrialResult {
    std::vector<CheckpointRecord> records, inverse;
};

inline TrialResult run_trial(const StepDistribution& mu, const WalkConfig& cfg, int trial) {
    TrialResult res;
    std::mt19937_64 rng(trial_seed(cfg.seed, static_cast<std::uint64_t>(trial)));
    auto walk = sample_walk(mu, cfg.steps, rng, cfg.letter_budget);
    for (int n : cfg.checkpoints) {
        CheckpointRecord r, ri;
        if (n <= static_cast<int>(walk.positions.size())) {
            const auto& w = walk.positions[n - 1];
            r = analyze_checkpoint(w, cfg.limits);
            if (cfg.also_inverse) ri = analyze_checkpoint(invert(w), cfg.limits);
        } else {
            r.truncated = ri.truncated = true;
        }
        r.trial = ri.trial = trial;
        r.n = ri.n = n;
        ri.inverse = true;
        res.records.push_back(std::move(r));
        if (cfg.also_inverse) res.inverse.push_back(std::move(ri));
    }
    return res;
}

}  // namespace detail

/// Independent trials keyed on (seed, trial index), aggregated in trial order.
inline ExperimentReport run_experiment(const StepDistribution& mu, const WalkConfig& cfg) {
    mu.validate();
    cfg.validate();
    std::vector<detail::TrialResult> results(cfg.trials);
    const int workers = std::max(1, std::min(cfg.threads, cfg.trials));
    if (workers == 1) {
        for (int t = 0; t < cfg.trials; ++t) results[t] = detail::run_trial(mu, cfg, t);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (int t = w; t < cfg.trials; t += workers) results[t] = detail::run_trial(mu, cfg, t);
            });
        for (auto& th : pool) th.join();
    }
    ExperimentReport rep;
    rep.also_inverse = cfg.also_inverse;
    for (auto& r : results) {
        for (auto& x : r.records) rep.records.push_back(std::move(x));
        for (auto& x : r.inverse) rep.inverse_records.push_back(std::move(x));
    }
    rep.summary = summarize(cfg.checkpoints, rep.records, cfg.also_inverse ? &rep.inverse_records : nullptr);
    return rep;
}

}  // namespace iwip
