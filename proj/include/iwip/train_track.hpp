#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "iwip/moves.hpp"
#include "iwip/turns.hpp"

namespace iwip {

struct TrainTrackCertificate {
    bool is_train_track = false;
    /// Degenerate turn reached by the closure and the first iterate g^k in
    /// which the corresponding cancellation occurs.
    std::optional<Turn> degenerate_turn;
    int iterate = 0;
    /// Illegal turn crossed by an edge image whose Dg-orbit degenerates.
    std::optional<Turn> source_turn;
    TurnSet closure;
};

inline TrainTrackCertificate is_train_track(const GraphMap& g) {
    TrainTrackCertificate cert;
    auto c = turn_closure(g);
    cert.closure = c.turns();
    std::optional<Turn> worst;
    for (const auto& [t, k] : c.first_iterate)
        if (t.degenerate() && (!worst || k < cert.iterate)) {
            worst = t;
            cert.iterate = k;
        }
    if (!worst) {
        cert.is_train_track = true;
        return cert;
    }
    cert.degenerate_turn = worst;
    auto dg = direction_map(g);
    for (const auto& t : turns_in_images(g)) {
        int d = illegality_depth(dg, t);
        if (d > 0 && d + 1 == cert.iterate) {
            cert.source_turn = t;
            break;
        }
    }
    return cert;
}

enum class TrainTrackOutcome { TrainTrack, ReductionWitness, Inconclusive };

inline std::string to_string(TrainTrackOutcome o) {
    switch (o) {
        case TrainTrackOutcome::TrainTrack: return "TrainTrack";
        case TrainTrackOutcome::ReductionWitness: return "ReductionWitness";
        case TrainTrackOutcome::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct TrainTrackOptions {
    int max_steps = 500;
    /// Maps explored per stage when no direct fold lowers the growth.
    int max_search_nodes = 20000;
    bool record_trace = false;
    /// Recompute the induced outer class after every move and throw on drift.
    bool check_invariants = false;
};

struct TrainTrackResult {
    TrainTrackOutcome outcome = TrainTrackOutcome::Inconclusive;
    /// Final representative (train track, or the map carrying the witness).
    GraphMap map;
    double lambda = 0;
    /// Fold stages performed.
    int steps = 0;
    /// Invariant subgraph and a basis of pi_1 of each of its non-contractible
    /// components, in the reference basis (each up to conjugacy).
    std::vector<int> invariant_edges;
    std::vector<std::vector<Word>> invariant_factors;
    /// Spectral radius after each fold stage, starting with the initial map.
    std::vector<double> lambda_history;
    std::vector<Step> trace;
};

namespace detail {

inline std::vector<std::vector<int>> subgraph_components(const Graph& g, const std::vector<char>& in) {
    std::vector<int> parent(g.vertex_count);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (int e = 0; e < g.edge_count(); ++e)
        if (in[e]) parent[find(g.from[e])] = find(g.to[e]);
    std::map<int, std::vector<int>> by_root;
    for (int e = 0; e < g.edge_count(); ++e)
        if (in[e]) by_root[find(g.from[e])].push_back(e);
    std::vector<std::vector<int>> out;
    for (auto& [r, es] : by_root) out.push_back(std::move(es));
    return out;
}

inline int component_betti(const Graph& g, const std::vector<int>& edges) {
    std::set<int> verts;
    for (int e : edges) {
        verts.insert(g.from[e]);
        verts.insert(g.to[e]);
    }
    return static_cast<int>(edges.size()) - static_cast<int>(verts.size()) + 1;
}

/// Free basis of pi_1 of a connected subgraph, conjugated to the basepoint
/// and read in the reference basis.
inline std::vector<Word> subgraph_basis(const MarkedGraph& mg, const std::vector<int>& edges) {
    MarkingChart chart(mg);
    const Graph& g = mg.graph;
    // relabel the subgraph as a graph of its own to reuse the tree machinery
    std::map<int, int> vid;
    Graph sub;
    for (int e : edges)
        for (int v : {g.from[e], g.to[e]})
            if (!vid.count(v)) vid[v] = sub.add_vertex();
    for (int e : edges) sub.add_edge(vid[g.from[e]], vid[g.to[e]]);
    int root_old = g.from[edges.front()];
    SpanningTree tree(sub, vid[root_old]);
    EdgePath to_root = chart.tree().path_between(mg.basepoint, root_old);
    std::vector<Word> out;
    for (int gen = 0; gen < tree.generator_count(); ++gen) {
        EdgePath loop = to_root;
        for (HalfEdge h : tree.generator_loop(gen)) push_tight(loop, 2 * edges[edge_of(h)] + (h & 1));
        for (HalfEdge h : reverse_path(to_root)) push_tight(loop, h);
        out.push_back(chart.word_of(loop));
    }
    return out;
}

inline bool is_source_component(const TransitionMatrix& m, const std::vector<int>& comp) {
    std::vector<char> in(m.size(), 0);
    for (int e : comp) in[e] = 1;
    for (int e = 0; e < m.size(); ++e)
        if (!in[e])
            for (int f : comp)
                if (m(e, f) > 0) return false;
    return true;
}

inline bool has_trivial_image(const GraphMap& g) {
    for (const auto& p : g.edge_image)
        if (p.empty()) return true;
    return false;
}

/// Tighten, collapse pretrivial forests and drop valence-one vertices,
/// keeping valence-two vertices.
inline GraphMap prune(GraphMap g) {
    for (;;) {
        for (auto& p : g.edge_image) p = tighten_path(p);
        for (auto& m : g.graph.marking) m = tighten_path(m);
        if (auto c = collapse_pretrivial(g)) {
            g = std::move(*c);
            continue;
        }
        auto dirs = g.g().directions();
        int w = -1;
        for (int v = 0; v < g.g().vertex_count && w < 0; ++v)
            if (dirs[v].size() == 1) w = v;
        if (w < 0) return g;
        g = remove_valence_one(g, w);
    }
}

inline std::string map_key(const GraphMap& g) {
    const Graph& gr = g.g();
    std::string s;
    for (int e = 0; e < gr.edge_count(); ++e)
        s += std::to_string(gr.from[e]) + ">" + std::to_string(gr.to[e]) + ":" + path_to_string(g.edge_image[e]) + ";";
    return s;
}

struct Move {
    std::string kind, detail;
    GraphMap result;
};

/// Folds of directions with a common first image letter, and subdivisions
/// of edge images at illegal turns or at valence-two vertices.
inline std::vector<Move> candidate_moves(const GraphMap& g) {
    std::vector<Move> out;
    auto dg = direction_map(g);
    const Graph& gr = g.g();
    auto dirs = gr.directions();
    for (int v = 0; v < gr.vertex_count; ++v)
        for (std::size_t i = 0; i < dirs[v].size(); ++i)
            for (std::size_t j = i + 1; j < dirs[v].size(); ++j) {
                HalfEdge a = dirs[v][i], b = dirs[v][j];
                if (dg[a] != dg[b]) continue;
                try {
                    out.push_back({"fold", half_edge_name(a) + " " + half_edge_name(b), elementary_fold(g, a, b)});
                } catch (const NotFoldable&) {
                }
            }
    for (int e = 0; e < gr.edge_count(); ++e) {
        const auto& p = g.edge_image[e];
        for (std::size_t k = 1; k < p.size(); ++k) {
            bool at_turn = illegality_depth(dg, Turn(reversed(p[k - 1]), p[k])) > 0;
            if (!at_turn && dirs[gr.term(p[k - 1])].size() != 2) continue;
            GraphMap h = g;
            subdivide(h, forward_half(e), static_cast<int>(k));
            out.push_back({"subdivide", edge_name(e) + " at " + std::to_string(k), std::move(h)});
        }
    }
    return out;
}

/// One descent stage: a sequence of moves after which the normalized map has
/// smaller spectral radius. Folding an illegal turn of depth one crossed by an
/// edge image always works; otherwise the moves are searched breadth first.
/// Returns false if `max_nodes` maps were explored without success.
inline bool descent_stage(GraphMap& g, int& steps, int max_nodes, std::vector<Step>* trace) {
    const double lambda = spectral_radius(transition_matrix(g));
    const double tol = 1e-9 * lambda;
    auto lowers = [&](const GraphMap& h, GraphMap& normal) {
        for (const auto& p : h.edge_image)
            if (p.empty()) return false;
        normal = normalize(h);
        return spectral_radius(transition_matrix(normal)) < lambda - tol;
    };
    auto dg = direction_map(g);
    for (const auto& t : turns_in_images(g)) {
        if (illegality_depth(dg, t) != 1) continue;
        GraphMap h = prune(elementary_fold(g, t.first, t.second)), normal;
        if (!lowers(h, normal)) continue;
        if (trace) trace->push_back({"fold", half_edge_name(t.first) + " " + half_edge_name(t.second), h.graph});
        g = std::move(h);
        ++steps;
        return true;
    }
    struct Node {
        GraphMap g;
        int parent;
        std::string kind, detail;
    };
    std::vector<Node> nodes{{g, -1, "", ""}};
    std::unordered_set<std::string> seen{map_key(g)};
    for (std::size_t q = 0; q < nodes.size() && static_cast<int>(nodes.size()) < max_nodes; ++q) {
        std::vector<Move> moves;
        try {
            moves = candidate_moves(nodes[q].g);
        } catch (const DegenerateEdge&) {
            continue;
        }
        for (auto& m : moves) {
            GraphMap h = prune(std::move(m.result));
            if (!seen.insert(map_key(h)).second) continue;
            GraphMap normal;
            bool done = lowers(h, normal);
            nodes.push_back({std::move(h), static_cast<int>(q), m.kind, m.detail});
            if (!done) continue;
            if (trace) {
                std::vector<Step> path;
                for (int i = static_cast<int>(nodes.size()) - 1; nodes[i].parent >= 0; i = nodes[i].parent)
                    path.push_back({nodes[i].kind, nodes[i].detail, nodes[i].g.graph});
                trace->insert(trace->end(), path.rbegin(), path.rend());
            }
            g = std::move(nodes.back().g);
            ++steps;
            return true;
        }
    }
    return false;
}

}  // namespace detail

/// Reducibility witness for g, if its transition matrix is reducible and
/// some invariant subgraph has a non-contractible component.
inline std::optional<std::vector<int>> invariant_subgraph_witness(const GraphMap& g,
                                                                 std::vector<int>* forest = nullptr) {
    auto m = transition_matrix(g);
    if (is_irreducible(m)) return std::nullopt;
    const int n = m.size();
    std::optional<std::vector<int>> best;
    for (const auto& comp : strong_components(m)) {
        if (!detail::is_source_component(m, comp)) continue;
        std::vector<char> in(n, 1);
        for (int e : comp) in[e] = 0;
        std::vector<int> rest;
        for (int e = 0; e < n; ++e)
            if (in[e]) rest.push_back(e);
        if (rest.empty()) continue;
        bool essential = false;
        for (const auto& c : detail::subgraph_components(g.g(), in))
            if (detail::component_betti(g.g(), c) > 0) essential = true;
        if (!essential) {
            if (forest && forest->empty()) *forest = rest;
            continue;
        }
        if (!best || rest.size() > best->size() || (rest.size() == best->size() && rest < *best)) best = rest;
    }
    return best;
}

/// Bestvina-Handel search for an irreducible train track representative,
/// starting from the rose.
inline TrainTrackResult find_train_track(const FreeAutomorphism& phi, const TrainTrackOptions& opt = {}) {
    TrainTrackResult res;
    const FreeAutomorphism start = outer_normal_form(phi);
    std::vector<Step>* trace = opt.record_trace ? &res.trace : nullptr;
    auto check = [&](const GraphMap& g) {
        if (!opt.check_invariants) return;
        g.validate();
        g.graph.validate();
        if (!same_outer_class(induced_automorphism(g), start))
            throw std::logic_error("move changed the outer class");
    };
    GraphMap g = rose_map(start);
    if (trace) trace->push_back({"start", to_string(start), g.graph});
    g = normalize(std::move(g), trace);
    check(g);
    res.lambda_history.push_back(spectral_radius(transition_matrix(g)));
    for (;;) {
        std::vector<int> forest;
        if (auto w = invariant_subgraph_witness(g, &forest)) {
            res.outcome = TrainTrackOutcome::ReductionWitness;
            res.invariant_edges = *w;
            std::vector<char> in(g.g().edge_count(), 0);
            for (int e : *w) in[e] = 1;
            for (const auto& c : detail::subgraph_components(g.g(), in))
                if (detail::component_betti(g.g(), c) > 0)
                    res.invariant_factors.push_back(detail::subgraph_basis(g.graph, c));
            res.map = std::move(g);
            return res;
        }
        if (!forest.empty()) {
            g = collapse_forest(g, forest);
            if (trace) trace->push_back({"collapse", "invariant forest", g.graph});
            g = normalize(std::move(g), trace);
            check(g);
            continue;
        }
        auto cert = is_train_track(g);
        if (cert.is_train_track) {
            auto pf = perron_frobenius(transition_matrix(g));
            res.outcome = TrainTrackOutcome::TrainTrack;
            res.lambda = pf.eigenvalue;
            g.graph.graph.length = pf.eigenvector;
            res.map = std::move(g);
            return res;
        }
        if (res.steps >= opt.max_steps) {
            res.outcome = TrainTrackOutcome::Inconclusive;
            res.map = std::move(g);
            return res;
        }
        if (!detail::descent_stage(g, res.steps, opt.max_search_nodes, trace)) {
            res.outcome = TrainTrackOutcome::Inconclusive;
            res.map = std::move(g);
            return res;
        }
        g = normalize(std::move(g), trace);
        check(g);
        res.lambda_history.push_back(spectral_radius(transition_matrix(g)));
    }
}

}  // namespace iwip
