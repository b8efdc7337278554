#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iwip/automorphism.hpp"

namespace iwip {

/// Oriented edge. Edge e has half-edges 2e (forward) and 2e+1 (reversed);
/// a half-edge doubles as the direction it points in at its initial vertex.
using HalfEdge = std::int32_t;
using EdgePath = std::vector<HalfEdge>;

inline constexpr int edge_of(HalfEdge h) { return h >> 1; }
inline constexpr HalfEdge reversed(HalfEdge h) { return h ^ 1; }
inline constexpr bool is_forward(HalfEdge h) { return (h & 1) == 0; }
inline constexpr HalfEdge forward_half(int e) { return 2 * e; }

class InvalidGraph : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline EdgePath reverse_path(const EdgePath& p) {
    EdgePath out(p.rbegin(), p.rend());
    for (auto& h : out) h = reversed(h);
    return out;
}

inline void push_tight(EdgePath& buf, HalfEdge h) {
    if (!buf.empty() && buf.back() == reversed(h))
        buf.pop_back();
    else
        buf.push_back(h);
}

inline EdgePath tighten_path(const EdgePath& p) {
    EdgePath out;
    out.reserve(p.size());
    for (HalfEdge h : p) push_tight(out, h);
    return out;
}

inline bool is_tight(const EdgePath& p) {
    for (std::size_t i = 1; i < p.size(); ++i)
        if (p[i] == reversed(p[i - 1])) return false;
    return true;
}

/// Cyclic reduction of a closed path.
inline EdgePath cyclically_tighten(const EdgePath& p) {
    EdgePath t = tighten_path(p);
    std::size_t i = 0, j = t.size();
    while (j - i >= 2 && t[i] == reversed(t[j - 1])) {
        ++i;
        --j;
    }
    return EdgePath(t.begin() + static_cast<long>(i), t.begin() + static_cast<long>(j));
}

/// Finite graph with edge lengths.
struct Graph {
    int vertex_count = 0;
    std::vector<int> from;
    std::vector<int> to;
    std::vector<double> length;

    int edge_count() const { return static_cast<int>(from.size()); }
    int half_edge_count() const { return 2 * edge_count(); }

    int init(HalfEdge h) const { return is_forward(h) ? from[edge_of(h)] : to[edge_of(h)]; }
    int term(HalfEdge h) const { return is_forward(h) ? to[edge_of(h)] : from[edge_of(h)]; }

    int add_vertex() { return vertex_count++; }
    int add_edge(int a, int b, double len = 1.0) {
        from.push_back(a);
        to.push_back(b);
        length.push_back(len);
        return edge_count() - 1;
    }

    /// Half-edges (directions) at each vertex, in increasing order.
    std::vector<std::vector<HalfEdge>> directions() const {
        std::vector<std::vector<HalfEdge>> out(vertex_count);
        for (HalfEdge h = 0; h < half_edge_count(); ++h) out[init(h)].push_back(h);
        return out;
    }

    std::vector<int> valences() const {
        std::vector<int> val(vertex_count, 0);
        for (int e = 0; e < edge_count(); ++e) {
            val[from[e]]++;
            val[to[e]]++;
        }
        return val;
    }

    double volume() const { return std::accumulate(length.begin(), length.end(), 0.0); }

    double path_length(const EdgePath& p) const {
        double s = 0;
        for (HalfEdge h : p) s += length[edge_of(h)];
        return s;
    }

    bool is_path(const EdgePath& p) const {
        for (HalfEdge h : p)
            if (h < 0 || h >= half_edge_count()) return false;
        for (std::size_t i = 1; i < p.size(); ++i)
            if (term(p[i - 1]) != init(p[i])) return false;
        return true;
    }

    int component_count() const {
        std::vector<int> parent(vertex_count);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int v) {
            while (parent[v] != v) v = parent[v] = parent[parent[v]];
            return v;
        };
        int comps = vertex_count;
        for (int e = 0; e < edge_count(); ++e) {
            int a = find(from[e]), b = find(to[e]);
            if (a != b) {
                parent[a] = b;
                --comps;
            }
        }
        return comps;
    }

    int betti_number() const { return edge_count() - vertex_count + component_count(); }
};

/// Default edge names "e1", "e2", ...; reversed traversal prints uppercase.
inline std::string edge_name(int e) { return "e" + std::to_string(e + 1); }

inline std::string half_edge_name(HalfEdge h) {
    std::string s = edge_name(edge_of(h));
    if (!is_forward(h))
        for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

inline std::string path_to_string(const EdgePath& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ' ';
        s += half_edge_name(p[i]);
    }
    return s;
}

/// Spanning tree rooted at a vertex, with the dual free basis of pi_1: one
/// generator per non-tree edge, numbered in edge order.
class SpanningTree {
public:
    SpanningTree(const Graph& g, int root) : graph_(&g), root_(root) {
        const int n = g.vertex_count;
        parent_half_.assign(n, -1);
        depth_.assign(n, -1);
        in_tree_.assign(g.edge_count(), 0);
        auto dirs = g.directions();
        std::vector<int> queue{root};
        depth_[root] = 0;
        for (std::size_t q = 0; q < queue.size(); ++q) {
            int v = queue[q];
            for (HalfEdge h : dirs[v]) {
                int w = g.term(h);
                if (depth_[w] >= 0) continue;
                depth_[w] = depth_[v] + 1;
                parent_half_[w] = h;  // h runs from parent to w
                in_tree_[edge_of(h)] = 1;
                queue.push_back(w);
            }
        }
        generator_of_edge_.assign(g.edge_count(), -1);
        for (int e = 0; e < g.edge_count(); ++e)
            if (!in_tree_[e]) generator_of_edge_[e] = generator_count_++;
    }

    bool spans() const {
        return std::all_of(depth_.begin(), depth_.end(), [](int d) { return d >= 0; });
    }
    int generator_count() const { return generator_count_; }
    bool in_tree(int e) const { return in_tree_[e] != 0; }
    int generator_of_edge(int e) const { return generator_of_edge_[e]; }

    /// Tree path from the root to v.
    EdgePath path_from_root(int v) const {
        EdgePath p;
        while (v != root_) {
            HalfEdge h = parent_half_[v];
            p.push_back(h);
            v = graph_->init(h);
        }
        std::reverse(p.begin(), p.end());
        return p;
    }
    EdgePath path_between(int a, int b) const {
        EdgePath p = reverse_path(path_from_root(a));
        for (HalfEdge h : path_from_root(b)) p.push_back(h);
        return tighten_path(p);
    }

    /// Word in the tree basis of the loop root ~> init(p) . p . term(p) ~> root.
    Word coordinates(const EdgePath& p) const {
        std::vector<Letter> out;
        for (HalfEdge h : p) {
            int gen = generator_of_edge_[edge_of(h)];
            if (gen < 0) continue;
            push_reduced(out, is_forward(h) ? gen + 1 : -(gen + 1));
        }
        return Word::from_reduced(std::move(out));
    }

    /// Closed path at the root realising generator `gen`.
    EdgePath generator_loop(int gen) const {
        for (int e = 0; e < graph_->edge_count(); ++e)
            if (generator_of_edge_[e] == gen) {
                EdgePath p = path_from_root(graph_->from[e]);
                p.push_back(forward_half(e));
                for (HalfEdge h : reverse_path(path_from_root(graph_->to[e]))) p.push_back(h);
                return tighten_path(p);
            }
        throw std::out_of_range("generator index");
    }

    /// Realise a word in the tree basis as a tight closed path at the root.
    EdgePath realize(const Word& w) const {
        EdgePath out;
        for (Letter x : w.letters()) {
            EdgePath loop = generator_loop(generator_index(x));
            if (x < 0) loop = reverse_path(loop);
            for (HalfEdge h : loop) push_tight(out, h);
        }
        return out;
    }

private:
    const Graph* graph_;
    int root_;
    std::vector<HalfEdge> parent_half_;
    std::vector<int> depth_;
    std::vector<char> in_tree_;
    std::vector<int> generator_of_edge_;
    int generator_count_ = 0;
};

/// A graph together with a marking: closed paths at the basepoint giving the
/// images of the rose petals under a homotopy equivalence R_r -> graph.
struct MarkedGraph {
    Graph graph;
    int basepoint = 0;
    std::vector<EdgePath> marking;

    int rank() const { return static_cast<int>(marking.size()); }

    /// Rose of rank r with lengths 1/r and the identity marking.
    static MarkedGraph rose(int r) {
        MarkedGraph m;
        m.graph.vertex_count = 1;
        for (int i = 0; i < r; ++i) {
            m.graph.add_edge(0, 0, 1.0 / r);
            m.marking.push_back({forward_half(i)});
        }
        return m;
    }

    /// Check connectivity, rank and marking validity. Throws InvalidGraph.
    void validate() const;
};

/// Coordinates of loops in the reference basis of F_r, via the marking.
class MarkingChart {
public:
    explicit MarkingChart(const MarkedGraph& mg) : tree_(mg.graph, mg.basepoint) {
        if (!tree_.spans()) throw InvalidGraph("graph is disconnected");
        if (tree_.generator_count() != mg.rank())
            throw InvalidGraph("first Betti number " + std::to_string(tree_.generator_count()) +
                               " does not match marking rank " + std::to_string(mg.rank()));
        std::vector<Word> in_tree;
        for (const auto& p : mg.marking) in_tree.push_back(tree_.coordinates(p));
        auto cert = is_basis(in_tree, mg.rank());
        if (!cert.is_basis) throw InvalidGraph("marking loops do not generate pi_1: " + cert.witness);
        to_tree_ = FreeAutomorphism::trusted(mg.rank(), std::move(in_tree));
        from_tree_ = FreeAutomorphism::trusted(mg.rank(), std::move(cert.generator_expressions));
    }

    /// Element of F_r represented by a path (closed up through the tree).
    Word word_of(const EdgePath& p) const { return from_tree_.apply(tree_.coordinates(p)); }

    /// Tight closed path at the basepoint representing w in F_r.
    EdgePath path_of(const Word& w) const { return tree_.realize(to_tree_.apply(w)); }

    const SpanningTree& tree() const { return tree_; }

private:
    SpanningTree tree_;
    FreeAutomorphism to_tree_;
    FreeAutomorphism from_tree_;
};

inline void MarkedGraph::validate() const {
    if (graph.vertex_count <= 0) throw InvalidGraph("graph has no vertices");
    if (basepoint < 0 || basepoint >= graph.vertex_count) throw InvalidGraph("basepoint out of range");
    for (int e = 0; e < graph.edge_count(); ++e) {
        if (graph.from[e] < 0 || graph.from[e] >= graph.vertex_count || graph.to[e] < 0 ||
            graph.to[e] >= graph.vertex_count)
            throw InvalidGraph("edge endpoint out of range");
        if (!(graph.length[e] > 0)) throw InvalidGraph("edge length must be positive");
    }
    if (graph.component_count() != 1) throw InvalidGraph("graph is disconnected");
    for (const auto& p : marking) {
        if (!graph.is_path(p) || !is_tight(p)) throw InvalidGraph("marking path is not a reduced edge path");
        if (p.empty() || graph.init(p.front()) != basepoint || graph.term(p.back()) != basepoint)
            throw InvalidGraph("marking path is not a closed path at the basepoint");
    }
    MarkingChart chart(*this);
}

}  // namespace iwip
