#pragma once

#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iwip/graph_map.hpp"

namespace iwip {

class NotFoldable : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// One recorded move together with the graph it produced.
struct Step {
    std::string kind;  // subdivide, fold, tighten, collapse, remove_valence_one, remove_valence_two
    std::string detail;
    MarkedGraph graph;
};

namespace detail {

inline EdgePath substitute(const EdgePath& p, const std::vector<EdgePath>& sub) {
    EdgePath out;
    for (HalfEdge h : p)
        for (HalfEdge x : sub[h]) push_tight(out, x);
    return out;
}

/// Apply a half-edge substitution to every edge image and marking path.
inline void substitute_all(GraphMap& g, const std::vector<EdgePath>& sub) {
    for (auto& p : g.edge_image) p = substitute(p, sub);
    for (auto& m : g.graph.marking) m = substitute(m, sub);
}

inline std::vector<EdgePath> identity_substitution(int half_edges) {
    std::vector<EdgePath> sub(half_edges);
    for (HalfEdge h = 0; h < half_edges; ++h) sub[h] = {h};
    return sub;
}

/// Quotient by dropped edges and merged vertices. `vclass` sends old vertices
/// to new ones; the new vertex c takes the image of old vertex survivor[c].
/// Letters of dropped edges are deleted from every path.
inline GraphMap quotient(const GraphMap& g, const std::vector<char>& drop, const std::vector<int>& vclass,
                         int new_vertices, const std::vector<int>& survivor) {
    const Graph& old = g.g();
    std::vector<int> new_id(old.edge_count(), -1);
    int ne = 0;
    for (int e = 0; e < old.edge_count(); ++e)
        if (!drop[e]) new_id[e] = ne++;
    std::vector<EdgePath> sub(old.half_edge_count());
    for (HalfEdge h = 0; h < old.half_edge_count(); ++h)
        if (!drop[edge_of(h)]) sub[h] = {2 * new_id[edge_of(h)] + (h & 1)};

    GraphMap out;
    out.graph.graph.vertex_count = new_vertices;
    for (int e = 0; e < old.edge_count(); ++e)
        if (!drop[e]) out.graph.graph.add_edge(vclass[old.from[e]], vclass[old.to[e]], old.length[e]);
    out.graph.basepoint = vclass[g.graph.basepoint];
    for (const auto& m : g.graph.marking) out.graph.marking.push_back(substitute(m, sub));
    out.vertex_image.resize(new_vertices);
    for (int c = 0; c < new_vertices; ++c) out.vertex_image[c] = vclass[g.vertex_image[survivor[c]]];
    for (int e = 0; e < old.edge_count(); ++e)
        if (!drop[e]) out.edge_image.push_back(substitute(g.edge_image[e], sub));
    return out;
}

/// Collapse each connected component of the edge set `forest` to a vertex.
inline GraphMap collapse_edges(const GraphMap& g, const std::vector<char>& forest) {
    const Graph& gr = g.g();
    std::vector<int> parent(gr.vertex_count);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (int e = 0; e < gr.edge_count(); ++e)
        if (forest[e]) {
            int a = find(gr.from[e]), b = find(gr.to[e]);
            if (a == b) throw InvalidGraph("collapsed edge set contains a cycle");
            parent[a] = b;
        }
    std::vector<int> cls(gr.vertex_count, -1), root_class(gr.vertex_count, -1), survivor;
    int n = 0;
    for (int v = 0; v < gr.vertex_count; ++v) {
        int r = find(v);
        if (root_class[r] < 0) {
            root_class[r] = n++;
            survivor.push_back(v);
        }
        cls[v] = root_class[r];
    }
    return quotient(g, forest, cls, n, survivor);
}

/// Merge vertex `gone` into `keep` while dropping edges in `drop`.
inline GraphMap merge_vertex(const GraphMap& g, const std::vector<char>& drop, int gone, int keep) {
    const int n = g.g().vertex_count;
    std::vector<int> cls(n), survivor;
    int c = 0;
    for (int v = 0; v < n; ++v) {
        if (v == gone) continue;
        cls[v] = c++;
        survivor.push_back(v);
    }
    cls[gone] = cls[keep];
    return quotient(g, drop, cls, c, survivor);
}

}  // namespace detail

/// Subdivide the edge of `h` so that the piece starting at init(h) maps to
/// the first `k` letters of g(h). Returns the half-edge of that piece; the
/// new edge gets the last index. Lengths split in proportion to the image.
inline HalfEdge subdivide(GraphMap& g, HalfEdge h, int k, HalfEdge* other = nullptr,
                          std::vector<HalfEdge>* remap = nullptr) {
    const int e = edge_of(h);
    const EdgePath img = g.edge_image[e];
    const int len = static_cast<int>(img.size());
    if (k <= 0 || k >= len) throw std::out_of_range("subdivision point outside the image");
    const int pos = is_forward(h) ? k : len - k;
    Graph& gr = g.graph.graph;
    const double total = gr.path_length(img);
    const double head = gr.path_length(EdgePath(img.begin(), img.begin() + pos));
    const double old_len = gr.length[e];

    int w = gr.add_vertex();
    g.vertex_image.push_back(gr.term(img[pos - 1]));
    int old_to = gr.to[e];
    gr.to[e] = w;
    gr.length[e] = total > 0 ? old_len * head / total : old_len / 2;
    int n = gr.add_edge(w, old_to, old_len - gr.length[e]);
    g.edge_image[e] = EdgePath(img.begin(), img.begin() + pos);
    g.edge_image.push_back(EdgePath(img.begin() + pos, img.end()));

    auto sub = detail::identity_substitution(gr.half_edge_count());
    sub[2 * e] = {2 * e, 2 * n};
    sub[2 * e + 1] = {2 * n + 1, 2 * e + 1};
    // images of the two pieces were written in old letters too
    detail::substitute_all(g, sub);
    auto moved = [&](HalfEdge d) { return d == 2 * e + 1 ? 2 * n + 1 : d; };
    if (other) *other = moved(*other);
    if (remap)
        for (auto& d : *remap) d = moved(d);
    return moved(h);
}

/// Identify two edges whose images agree (as paths from the same vertex).
/// `remap`, if given, holds directions of g and is rewritten in place.
inline GraphMap full_fold(const GraphMap& g, HalfEdge h1, HalfEdge h2, std::vector<HalfEdge>* remap = nullptr) {
    const Graph& gr = g.g();
    if (edge_of(h1) == edge_of(h2)) throw NotFoldable("cannot fold an edge with itself");
    if (gr.init(h1) != gr.init(h2)) throw NotFoldable("directions are at different vertices");
    if (g.image(h1) != g.image(h2)) throw NotFoldable("edge images differ");
    int keep = gr.term(h1), gone = gr.term(h2);
    if (keep == gone) throw NotFoldable("fold of parallel edges would lower the rank");
    GraphMap out = g;
    auto sub = detail::identity_substitution(gr.half_edge_count());
    sub[h2] = {h1};
    sub[reversed(h2)] = {reversed(h1)};
    detail::substitute_all(out, sub);
    std::vector<char> drop(gr.edge_count(), 0);
    drop[edge_of(h2)] = 1;
    if (gone == out.graph.basepoint) out.graph.basepoint = keep;
    if (remap)
        for (auto& d : *remap) {
            if (d == h2) d = h1;
            if (d == reversed(h2)) d = reversed(h1);
            if (edge_of(d) > edge_of(h2)) d -= 2;
        }
    return detail::merge_vertex(out, drop, gone, keep);
}

/// Fold the maximal common initial segments of the images of d1 and d2.
inline GraphMap elementary_fold(const GraphMap& g, HalfEdge d1, HalfEdge d2,
                                std::vector<HalfEdge>* remap = nullptr) {
    const Graph& gr = g.g();
    if (d1 == d2) throw NotFoldable("directions coincide");
    if (gr.init(d1) != gr.init(d2)) throw NotFoldable("directions are at different vertices");
    EdgePath p1 = g.image(d1), p2 = g.image(d2);
    std::size_t common = 0;
    while (common < p1.size() && common < p2.size() && p1[common] == p2[common]) ++common;
    if (common == 0) throw NotFoldable("images start in different directions");
    if (common == p1.size() && common == p2.size() && edge_of(d1) == edge_of(d2))
        throw NotFoldable("cannot fold an edge with itself");
    GraphMap out = g;
    if (common < p1.size()) d1 = subdivide(out, d1, static_cast<int>(common), &d2, remap);
    // the first subdivision rewrites letters, so measure the prefix again
    common = out.image(d1).size();
    if (common < out.image(d2).size()) d2 = subdivide(out, d2, static_cast<int>(common), &d1, remap);
    return full_fold(out, d1, d2, remap);
}

/// Collapse the forest of edges whose images are eventually trivial.
inline std::optional<GraphMap> collapse_pretrivial(const GraphMap& g) {
    std::vector<char> trivial(g.g().edge_count(), 0);
    bool any = false;
    for (int e = 0; e < g.g().edge_count(); ++e)
        if (g.edge_image[e].empty()) trivial[e] = any = 1;
    if (!any) return std::nullopt;
    return detail::collapse_edges(g, trivial);
}

/// Collapse an invariant forest.
inline GraphMap collapse_forest(const GraphMap& g, const std::vector<int>& edges) {
    std::vector<char> f(g.g().edge_count(), 0);
    for (int e : edges) f[e] = 1;
    return detail::collapse_edges(g, f);
}

/// Remove a valence-one vertex together with its edge.
inline GraphMap remove_valence_one(const GraphMap& g, int w) {
    const Graph& gr = g.g();
    auto dirs = gr.directions();
    if (dirs[w].size() != 1) throw std::invalid_argument("vertex is not of valence one");
    HalfEdge h = dirs[w][0];
    int u = gr.term(h);
    std::vector<char> drop(gr.edge_count(), 0);
    drop[edge_of(h)] = 1;
    GraphMap out = g;
    if (out.graph.basepoint == w) out.graph.basepoint = u;
    return detail::merge_vertex(out, drop, w, u);
}

/// Remove a valence-two vertex w by absorbing the edge leaving along
/// `absorbed` into the other edge at w.
inline GraphMap remove_valence_two(const GraphMap& g, int w, HalfEdge absorbed) {
    const Graph& gr = g.g();
    auto dirs = gr.directions();
    if (dirs[w].size() != 2) throw std::invalid_argument("vertex is not of valence two");
    HalfEdge d1 = dirs[w][0] == absorbed ? dirs[w][1] : dirs[w][0];
    HalfEdge b = absorbed;
    if (edge_of(d1) == edge_of(b)) throw std::invalid_argument("vertex lies on an isolated circle");
    HalfEdge a = reversed(d1);  // arrives at w
    int y = gr.term(b);
    GraphMap out = g;
    Graph& og = out.graph.graph;
    EdgePath joined = g.image(a);
    for (HalfEdge x : g.image(b)) push_tight(joined, x);
    int ea = edge_of(a);
    if (is_forward(a)) {
        og.to[ea] = y;
        out.edge_image[ea] = joined;
    } else {
        og.from[ea] = y;
        out.edge_image[ea] = reverse_path(joined);
    }
    og.length[ea] += og.length[edge_of(b)];
    std::vector<char> drop(gr.edge_count(), 0);
    drop[edge_of(b)] = 1;
    if (out.graph.basepoint == w) out.graph.basepoint = y;
    return detail::merge_vertex(out, drop, w, y);
}

/// Tighten images and marking, then collapse pretrivial forests and remove
/// valence-one and valence-two vertices until none remain. Valence-two
/// vertices are removed along whichever edge gives the smaller spectral
/// radius afterwards.
inline GraphMap normalize(GraphMap g, std::vector<Step>* trace = nullptr) {
    auto record = [&](const std::string& kind, const std::string& detail) {
        if (trace) trace->push_back({kind, detail, g.graph});
    };
    for (;;) {
        for (auto& p : g.edge_image) p = tighten_path(p);
        for (auto& m : g.graph.marking) m = tighten_path(m);
        if (auto c = collapse_pretrivial(g)) {
            g = std::move(*c);
            record("collapse", "pretrivial forest");
            continue;
        }
        const Graph& gr = g.g();
        auto dirs = gr.directions();
        bool changed = false;
        for (int v = 0; v < gr.vertex_count && !changed; ++v) {
            if (dirs[v].size() == 1) {
                g = remove_valence_one(g, v);
                record("remove_valence_one", "v" + std::to_string(v));
                changed = true;
            }
        }
        if (changed) continue;
        for (int v = 0; v < gr.vertex_count && !changed; ++v) {
            if (dirs[v].size() != 2 || edge_of(dirs[v][0]) == edge_of(dirs[v][1])) continue;
            GraphMap opt1 = remove_valence_two(g, v, dirs[v][1]);
            GraphMap opt2 = remove_valence_two(g, v, dirs[v][0]);
            double r1 = spectral_radius(transition_matrix(opt1));
            double r2 = spectral_radius(transition_matrix(opt2));
            g = r2 < r1 - 1e-12 ? std::move(opt2) : std::move(opt1);
            record("remove_valence_two", "v" + std::to_string(v));
            changed = true;
        }
        if (!changed) return g;
    }
}

}  // namespace iwip
