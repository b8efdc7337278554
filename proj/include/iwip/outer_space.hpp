#pragma once

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "iwip/fold.hpp"
#include "iwip/pnp.hpp"
#include "iwip/stallings.hpp"

namespace iwip {

/// Volume-one marked metric graph with all valences at least 3.
struct OuterSpacePoint {
    MarkedGraph graph;

    int rank() const { return graph.rank(); }

    /// Throws InvalidGraph unless `mg` is a valid point.
    static OuterSpacePoint from(MarkedGraph mg) {
        mg.validate();
        if (std::abs(mg.graph.volume() - 1) > 1e-12) throw InvalidGraph("volume is not 1");
        for (int v : mg.graph.valences())
            if (v < 3) throw InvalidGraph("vertex of valence " + std::to_string(v));
        return OuterSpacePoint{std::move(mg)};
    }
};

inline OuterSpacePoint normalize_volume(MarkedGraph mg) {
    for (double l : mg.graph.length)
        if (!(l > 0)) throw InvalidGraph("edge length must be positive");
    const double vol = mg.graph.volume();
    for (double& l : mg.graph.length) l /= vol;
    return OuterSpacePoint::from(std::move(mg));
}

namespace detail {

/// Conjugate the marking so that the basepoint moves along `h` to term(h).
inline void move_basepoint(MarkedGraph& mg, HalfEdge h) {
    for (auto& p : mg.marking) {
        EdgePath q{reversed(h)};
        for (HalfEdge x : p) push_tight(q, x);
        push_tight(q, h);
        p = q;
    }
    mg.basepoint = mg.graph.term(h);
}

/// Rebuild `mg` without vertex `gone`, sending each old half-edge to a path.
inline void rebuild(MarkedGraph& mg, int gone, const std::vector<char>& drop_edge,
                    const std::vector<EdgePath>& sub) {
    const Graph& g = mg.graph;
    std::vector<int> vid(g.vertex_count, -1);
    int next = 0;
    for (int v = 0; v < g.vertex_count; ++v)
        if (v != gone) vid[v] = next++;
    Graph out;
    out.vertex_count = next;
    std::vector<int> eid(g.edge_count(), -1);
    for (int e = 0; e < g.edge_count(); ++e)
        if (!drop_edge[e]) eid[e] = out.add_edge(vid[g.from[e]], vid[g.to[e]], g.length[e]);
    for (auto& p : mg.marking) {
        EdgePath q;
        for (HalfEdge h : p)
            for (HalfEdge x : sub[h]) push_tight(q, 2 * eid[edge_of(x)] + (x & 1));
        p = q;
    }
    mg.basepoint = vid[mg.basepoint];
    mg.graph = std::move(out);
}

}  // namespace detail

/// Remove valence-one and valence-two vertices, keeping the metric and the
/// marking (up to conjugacy).
inline MarkedGraph smooth(MarkedGraph mg) {
    for (bool changed = true; changed;) {
        changed = false;
        Graph& g = mg.graph;
        auto dirs = g.directions();
        for (int v = 0; v < g.vertex_count && !changed; ++v) {
            if (dirs[v].size() == 1) {
                HalfEdge d = dirs[v][0];
                if (mg.basepoint == v) detail::move_basepoint(mg, d);
                std::vector<char> drop(g.edge_count(), 0);
                drop[edge_of(d)] = 1;
                std::vector<EdgePath> sub(g.half_edge_count());
                for (HalfEdge h = 0; h < g.half_edge_count(); ++h)
                    if (edge_of(h) != edge_of(d)) sub[h] = {h};
                detail::rebuild(mg, v, drop, sub);
                changed = true;
            } else if (dirs[v].size() == 2 && edge_of(dirs[v][0]) != edge_of(dirs[v][1])) {
                HalfEdge a = reversed(dirs[v][0]);  // into v
                HalfEdge b = dirs[v][1];             // out of v
                if (mg.basepoint == v) detail::move_basepoint(mg, reversed(a));
                // lengthen a by b, drop b
                const int ea = edge_of(a);
                double len = g.length[ea] + g.length[edge_of(b)];
                int from = g.init(a), to = g.term(b);
                std::vector<char> drop(g.edge_count(), 0);
                drop[edge_of(b)] = 1;
                HalfEdge n = 2 * ea;
                g.from[ea] = from;
                g.to[ea] = to;
                g.length[ea] = len;
                std::vector<EdgePath> sub(g.half_edge_count());
                for (HalfEdge h = 0; h < g.half_edge_count(); ++h) sub[h] = {h};
                sub[a] = {n};
                sub[reversed(a)] = {};
                sub[b] = {};
                sub[reversed(b)] = {reversed(n)};
                detail::rebuild(mg, v, drop, sub);
                changed = true;
            }
        }
    }
    return mg;
}

enum class CandidateShape { EmbeddedCircle, FigureEight, Barbell };

inline std::string to_string(CandidateShape s) {
    switch (s) {
        case CandidateShape::EmbeddedCircle: return "embedded circle";
        case CandidateShape::FigureEight: return "figure-eight";
        case CandidateShape::Barbell: return "barbell";
    }
    return "?";
}

struct CandidateLoop {
    EdgePath path;
    CandidateShape shape = CandidateShape::EmbeddedCircle;
};

namespace detail {

/// Embedded circles, each once, oriented so that its smallest edge is
/// traversed forward and listed first.
inline std::vector<EdgePath> embedded_circles(const Graph& g) {
    std::vector<EdgePath> out;
    auto dirs = g.directions();
    for (int e0 = 0; e0 < g.edge_count(); ++e0) {
        const int start = g.from[e0];
        if (g.to[e0] == start) {
            out.push_back({2 * e0});
            continue;
        }
        EdgePath path{2 * e0};
        std::vector<char> used(g.vertex_count, 0);
        used[start] = used[g.to[e0]] = 1;
        // iterative DFS over half-edges of edges > e0
        std::vector<std::size_t> pos{0};
        while (!pos.empty()) {
            int v = g.term(path.back());
            if (pos.back() == dirs[v].size()) {
                pos.pop_back();
                used[v] = v == start;
                path.pop_back();
                if (pos.empty()) break;
                continue;
            }
            HalfEdge h = dirs[v][pos.back()++];
            if (edge_of(h) <= e0) continue;
            int w = g.term(h);
            if (w == start) {
                path.push_back(h);
                out.push_back(path);
                path.pop_back();
                continue;
            }
            if (used[w]) continue;
            used[w] = 1;
            path.push_back(h);
            pos.push_back(0);
        }
        used.assign(g.vertex_count, 0);
    }
    return out;
}

inline std::set<int> circle_vertices(const Graph& g, const EdgePath& c) {
    std::set<int> s;
    for (HalfEdge h : c) s.insert(g.init(h));
    return s;
}

/// Rotate a closed path to start at vertex v.
inline EdgePath rotate_to(const Graph& g, const EdgePath& c, int v) {
    for (std::size_t i = 0; i < c.size(); ++i)
        if (g.init(c[i]) == v) {
            EdgePath r(c.begin() + static_cast<long>(i), c.end());
            r.insert(r.end(), c.begin(), c.begin() + static_cast<long>(i));
            return r;
        }
    throw std::logic_error("vertex not on circle");
}

/// Embedded paths from a vertex of `a` to a vertex of `b` whose interior
/// avoids both vertex sets.
inline std::vector<EdgePath> connecting_paths(const Graph& g, const std::set<int>& a, const std::set<int>& b) {
    std::vector<EdgePath> out;
    auto dirs = g.directions();
    for (int s : a) {
        std::vector<char> used(g.vertex_count, 0);
        for (int v : a) used[v] = 1;
        EdgePath path;
        std::vector<std::size_t> pos{0};
        std::vector<int> at{s};
        while (!pos.empty()) {
            int v = at.back();
            if (pos.back() == dirs[v].size()) {
                pos.pop_back();
                at.pop_back();
                if (!path.empty()) {
                    if (v != s) used[v] = 0;
                    path.pop_back();
                }
                continue;
            }
            HalfEdge h = dirs[v][pos.back()++];
            int w = g.term(h);
            if (b.count(w)) {
                path.push_back(h);
                out.push_back(path);
                path.pop_back();
                continue;
            }
            if (used[w]) continue;
            used[w] = 1;
            path.push_back(h);
            pos.push_back(0);
            at.push_back(w);
        }
    }
    return out;
}

}  // namespace detail

/// Embedded circles, figure-eights and barbells (two orientations each for the
/// last two shapes).
inline std::vector<CandidateLoop> candidates(const MarkedGraph& mg) {
    const Graph& g = mg.graph;
    auto circles = detail::embedded_circles(g);
    std::vector<CandidateLoop> out;
    for (const auto& c : circles) out.push_back({c, CandidateShape::EmbeddedCircle});
    for (std::size_t i = 0; i < circles.size(); ++i)
        for (std::size_t j = i + 1; j < circles.size(); ++j) {
            std::set<int> ei, ej;
            for (HalfEdge h : circles[i]) ei.insert(edge_of(h));
            bool share_edge = false;
            for (HalfEdge h : circles[j]) share_edge |= ei.count(edge_of(h)) > 0;
            if (share_edge) continue;
            auto vi = detail::circle_vertices(g, circles[i]), vj = detail::circle_vertices(g, circles[j]);
            std::vector<int> common;
            std::set_intersection(vi.begin(), vi.end(), vj.begin(), vj.end(), std::back_inserter(common));
            if (common.size() == 1) {
                EdgePath ci = detail::rotate_to(g, circles[i], common[0]);
                EdgePath cj = detail::rotate_to(g, circles[j], common[0]);
                for (bool flip : {false, true}) {
                    EdgePath p = ci;
                    EdgePath q = flip ? reverse_path(cj) : cj;
                    p.insert(p.end(), q.begin(), q.end());
                    out.push_back({p, CandidateShape::FigureEight});
                }
            } else if (common.empty()) {
                for (const auto& bar : detail::connecting_paths(g, vi, vj)) {
                    EdgePath ci = detail::rotate_to(g, circles[i], g.init(bar.front()));
                    EdgePath cj = detail::rotate_to(g, circles[j], g.term(bar.back()));
                    for (bool flip : {false, true}) {
                        EdgePath p = ci;
                        p.insert(p.end(), bar.begin(), bar.end());
                        EdgePath q = flip ? reverse_path(cj) : cj;
                        p.insert(p.end(), q.begin(), q.end());
                        for (HalfEdge h : reverse_path(bar)) p.push_back(h);
                        out.push_back({p, CandidateShape::Barbell});
                    }
                }
            }
        }
    return out;
}

inline std::vector<CandidateLoop> candidates(const OuterSpacePoint& x) { return candidates(x.graph); }

/// Length in `to` of the loop of `from` given by a closed path, carried over
/// by the difference of markings.
inline double transported_length(const MarkingChart& from, const MarkedGraph& to_graph, const MarkingChart& to,
                                 const EdgePath& loop) {
    Word w = from.word_of(loop);
    return to_graph.graph.path_length(cyclically_tighten(to.path_of(w)));
}

struct DistanceResult {
    double d_cv = 0;
    CandidateLoop witness;
    /// Witness as a word in the reference basis.
    Word witness_word;
};

inline DistanceResult lipschitz_distance(const OuterSpacePoint& x, const OuterSpacePoint& y) {
    if (x.rank() != y.rank())
        throw RankMismatch("ranks " + std::to_string(x.rank()) + " and " + std::to_string(y.rank()) + " differ");
    MarkingChart cx(x.graph), cy(y.graph);
    DistanceResult best;
    double best_ratio = -1;
    for (auto& c : candidates(x)) {
        double ratio = transported_length(cx, y.graph, cy, c.path) / x.graph.graph.path_length(c.path);
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best.witness = c;
        }
    }
    best.witness_word = cx.word_of(best.witness.path).cyclic_core();
    best.d_cv = std::log(best_ratio);
    if (best.d_cv < 0 && best.d_cv > -1e-12) best.d_cv = 0;
    return best;
}

inline double sym_distance(const OuterSpacePoint& x, const OuterSpacePoint& y) {
    return lipschitz_distance(x, y).d_cv + lipschitz_distance(y, x).d_cv;
}

struct FreeFactor {
    /// Basis read on the core of the Stallings graph of the subgroup.
    std::vector<Word> basis;
    /// Conjugacy-invariant code of the subgroup.
    std::string code;

    friend bool operator<(const FreeFactor& a, const FreeFactor& b) {
        if (a.basis.size() != b.basis.size()) return a.basis.size() < b.basis.size();
        return a.code < b.code;
    }
};

inline FreeFactor factor_normal_form(const std::vector<Word>& gens) {
    StallingsGraph sg(gens, false);
    sg.fold();
    sg.prune_to_core(false);
    FreeFactor f;
    int root = 0;
    f.code = sg.canonical_code(true, &root);
    f.basis = sg.basis_at(root);
    return f;
}

/// Conjugacy classes of the free factors carried by proper connected core
/// subgraphs with nontrivial fundamental group.
inline std::vector<FreeFactor> free_factor_projection(const OuterSpacePoint& x) {
    const Graph& g = x.graph.graph;
    const int ne = g.edge_count();
    if (ne > 24) throw std::invalid_argument("too many edges for subgraph enumeration");
    std::map<std::string, FreeFactor> found;
    for (unsigned long mask = 1; mask + 1 < (1UL << ne); ++mask) {
        std::vector<char> in(ne, 0);
        std::vector<int> edges;
        for (int e = 0; e < ne; ++e)
            if (mask >> e & 1) {
                in[e] = 1;
                edges.push_back(e);
            }
        std::vector<int> deg(g.vertex_count, 0);
        for (int e : edges) {
            deg[g.from[e]]++;
            deg[g.to[e]]++;
        }
        bool core = true;
        for (int d : deg) core &= d == 0 || d >= 2;
        if (!core) continue;
        if (detail::subgraph_components(g, in).size() != 1) continue;
        int betti = detail::component_betti(g, edges);
        if (betti < 1 || betti >= x.rank()) continue;
        auto f = factor_normal_form(detail::subgraph_basis(x.graph, edges));
        found.emplace(f.code, std::move(f));
    }
    std::vector<FreeFactor> out;
    for (auto& [code, f] : found) out.push_back(std::move(f));
    std::sort(out.begin(), out.end());
    return out;
}

/// Points along one fundamental domain of the fold line of a train track map:
/// the eigenmetric graph folded back onto itself, indices round(i N / stages)
/// of the N-step fold sequence, smoothed and normalized.
inline std::vector<OuterSpacePoint> fold_path_points(const GraphMap& g, int stages) {
    if (stages < 0) throw std::invalid_argument("stages must be non-negative");
    auto m = transition_matrix(g);
    if (!is_irreducible(m)) throw NotTrainTrack("transition matrix is reducible");
    auto pf = perron_frobenius(m);
    if (!(pf.eigenvalue > 1 + 1e-9)) throw NotTrainTrack("map is not expanding");
    if (!is_train_track(g).is_train_track) throw NotTrainTrack("map is not a train track");
    GraphMap metric = g;
    metric.graph.graph.length = pf.eigenvector;
    auto seq = fold_decomposition(metric);
    const std::size_t n = seq.steps.size();
    auto graph_at = [&](std::size_t i) -> const MarkedGraph& { return i == 0 ? seq.domain : seq.steps[i - 1].graph; };
    std::vector<OuterSpacePoint> out;
    if (stages == 0) {
        out.push_back(normalize_volume(smooth(graph_at(0))));
        return out;
    }
    for (int i = 0; i <= stages; ++i) {
        auto idx = static_cast<std::size_t>(std::llround(static_cast<double>(i) * static_cast<double>(n) / stages));
        out.push_back(normalize_volume(smooth(graph_at(idx))));
    }
    return out;
}

}  // namespace iwip
