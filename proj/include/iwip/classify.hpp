#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "iwip/whitehead.hpp"

namespace iwip {

enum class Verdict { CertifiedYes, CertifiedNo, Unknown, NotApplicable };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::CertifiedYes: return "CertifiedYes";
        case Verdict::CertifiedNo: return "CertifiedNo";
        case Verdict::Unknown: return "Unknown";
        case Verdict::NotApplicable: return "NotApplicable";
    }
    return "?";
}

struct Classification {
    Verdict fully_irreducible = Verdict::Unknown;
    std::string witness;
    Verdict ageometric = Verdict::Unknown;
    bool triangular = false;
    bool principal = false;
    PnpOutcome pnp_status = PnpOutcome::Inconclusive;

    /// principal => triangular; triangular => all k = 3 and at most 2r-3
    /// components; principal <=> exactly 2r-3 triangles.
    bool consistent(const std::vector<int>& k_list, int rank) const {
        bool all3 = !k_list.empty() && std::all_of(k_list.begin(), k_list.end(), [](int k) { return k == 3; });
        const int n = static_cast<int>(k_list.size());
        if (principal && !triangular) return false;
        if (triangular && !(all3 && n <= 2 * rank - 3)) return false;
        if (principal != (triangular && n == 2 * rank - 3)) return false;
        if (ageometric == Verdict::CertifiedYes && fully_irreducible != Verdict::CertifiedYes) return false;
        return true;
    }
};

struct AnalysisLimits {
    int max_steps = 500;
    double pnp_slack = 2.0;
    bool record_trace = false;
};

/// Everything computed about one automorphism.
struct Analysis {
    int rank = 0;
    TrainTrackResult train_track;
    std::optional<PrimitivityResult> primitivity;
    std::optional<WhiteheadGraphs> whitehead;
    std::optional<IdealWhiteheadGraph> ideal;
    std::optional<Rational> index;
    PnpStatus pnp;
    bool pnp_searched = false;
    /// Edges of an invariant subgraph of a power of the train track, when its
    /// transition matrix is irreducible but not primitive.
    std::vector<int> power_witness;
    int power_witness_exponent = 0;
    Classification classification;
};

namespace detail {

inline TransitionMatrix matrix_power(const TransitionMatrix& m, int k) {
    const int n = m.size();
    std::vector<std::vector<long long>> r(n, std::vector<long long>(n, 0));
    for (int i = 0; i < n; ++i) r[i][i] = 1;
    for (int s = 0; s < k; ++s) {
        std::vector<std::vector<long long>> t(n, std::vector<long long>(n, 0));
        for (int i = 0; i < n; ++i)
            for (int l = 0; l < n; ++l)
                if (r[i][l])
                    for (int j = 0; j < n; ++j)
                        if (m(l, j)) t[i][j] = 1;  // only the support matters
        r = std::move(t);
    }
    return TransitionMatrix(std::move(r));
}

/// Invariant subgraph of g^k with a non-contractible component, read off from
/// the support of M^k.
inline std::vector<int> power_invariant_subgraph(const GraphMap& g, int k) {
    auto mk = matrix_power(transition_matrix(g), k);
    for (const auto& comp : strong_components(mk)) {
        std::vector<char> in(mk.size(), 0);
        for (int e : comp) in[e] = 1;
        // the forward closure of a component is g^k-invariant
        std::vector<int> stack(comp.begin(), comp.end());
        while (!stack.empty()) {
            int e = stack.back();
            stack.pop_back();
            for (int f = 0; f < mk.size(); ++f)
                if (mk(e, f) && !in[f]) {
                    in[f] = 1;
                    stack.push_back(f);
                }
        }
        std::vector<int> edges;
        for (int e = 0; e < mk.size(); ++e)
            if (in[e]) edges.push_back(e);
        if (static_cast<int>(edges.size()) == mk.size()) continue;
        for (const auto& c : subgraph_components(g.g(), in))
            if (component_betti(g.g(), c) > 0) return edges;
    }
    return {};
}

}  // namespace detail

/// Flags from an analysis bundle.
inline Classification classify(const Analysis& a) {
    Classification c;
    c.pnp_status = a.pnp.outcome;
    const auto& tt = a.train_track;
    if (tt.outcome == TrainTrackOutcome::ReductionWitness) {
        c.fully_irreducible = Verdict::CertifiedNo;
        c.witness = "invariant subgraph";
        for (const auto& f : tt.invariant_factors) {
            c.witness += " <";
            for (std::size_t i = 0; i < f.size(); ++i) c.witness += (i ? "," : "") + iwip::to_string(f[i]);
            c.witness += ">";
        }
    } else if (!a.power_witness.empty()) {
        c.fully_irreducible = Verdict::CertifiedNo;
        c.witness = "invariant subgraph of power " + std::to_string(a.power_witness_exponent);
        const GraphMap& g = tt.map;
        std::vector<char> in(g.g().edge_count(), 0);
        for (int e : a.power_witness) in[e] = 1;
        for (const auto& comp : detail::subgraph_components(g.g(), in)) {
            if (detail::component_betti(g.g(), comp) == 0) continue;
            auto basis = detail::subgraph_basis(g.graph, comp);
            c.witness += " <";
            for (std::size_t i = 0; i < basis.size(); ++i) c.witness += (i ? "," : "") + iwip::to_string(basis[i]);
            c.witness += ">";
        }
    } else if (tt.outcome == TrainTrackOutcome::TrainTrack && a.primitivity &&
               a.primitivity->kind == Primitivity::Primitive && a.whitehead && a.whitehead->all_local_connected() &&
               a.pnp_searched && a.pnp.outcome == PnpOutcome::NoneFoundUpToBound && tt.lambda > 1) {
        c.fully_irreducible = Verdict::CertifiedYes;
    }
    if (a.ideal && c.fully_irreducible != Verdict::CertifiedNo) {
        auto k = a.ideal->k_list();
        const int n = static_cast<int>(k.size());
        bool all_triangles = n > 0;
        for (const auto& comp : a.ideal->components)
            if (!comp.is_triangle()) all_triangles = false;
        c.triangular = all_triangles && n <= 2 * a.rank - 3;
        c.principal = c.triangular && n == 2 * a.rank - 3;
    }
    if (c.fully_irreducible == Verdict::CertifiedNo) {
        c.ageometric = Verdict::NotApplicable;
    } else if (c.fully_irreducible == Verdict::CertifiedYes && a.index) {
        Rational lower(1 - a.rank);
        if (Rational(0) > *a.index && *a.index > lower) c.ageometric = Verdict::CertifiedYes;
    }
    return c;
}

/// Train track search, primitivity, Whitehead graphs, PNP search, ideal
/// Whitehead graph, index and classification.
inline Analysis analyze(const FreeAutomorphism& phi, const AnalysisLimits& limits = {}) {
    Analysis a;
    a.rank = phi.rank();
    TrainTrackOptions opt;
    opt.max_steps = limits.max_steps;
    opt.record_trace = limits.record_trace;
    a.train_track = find_train_track(phi, opt);
    if (a.train_track.outcome == TrainTrackOutcome::TrainTrack) {
        const GraphMap& g = a.train_track.map;
        auto m = transition_matrix(g);
        a.primitivity = primitivity_class(m);
        a.whitehead = whitehead_graphs(g);
        if (a.primitivity->kind == Primitivity::IrreducibleNotPrimitive) {
            a.power_witness = detail::power_invariant_subgraph(g, a.primitivity->period);
            a.power_witness_exponent = a.primitivity->period;
        }
        if (a.train_track.lambda > 1 + 1e-9) {
            try {
                a.pnp = pnp_search(g, limits.pnp_slack);
                a.pnp_searched = true;
            } catch (const NotTrainTrack&) {
            }
            if (a.pnp_searched && a.pnp.outcome != PnpOutcome::Found) {
                IdealWhiteheadGraph iw;
                iw.pnp = a.pnp;
                iw.provisional = a.pnp.outcome != PnpOutcome::NoneFoundUpToBound;
                iw.power = a.whitehead->power;
                iw.components = a.whitehead->stable;
                a.index = rotationless_index(iw);
                a.ideal = std::move(iw);
            }
        }
    }
    a.classification = classify(a);
    return a;
}

}  // namespace iwip
