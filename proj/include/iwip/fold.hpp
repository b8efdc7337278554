#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "iwip/graph_map.hpp"

namespace iwip {

/// Cellular map between graphs: vertex images and forward edge images.
struct GraphMorphism {
    std::vector<int> vertex;
    std::vector<EdgePath> edge;

    EdgePath apply(const EdgePath& p) const {
        EdgePath out;
        for (HalfEdge h : p) {
            const auto& q = edge[edge_of(h)];
            if (is_forward(h))
                for (HalfEdge x : q) push_tight(out, x);
            else
                for (auto it = q.rbegin(); it != q.rend(); ++it) push_tight(out, reversed(*it));
        }
        return out;
    }
};

struct FoldStep {
    std::string kind;  // subdivide, fold, remove_valence_one
    std::string detail;
    /// From the previous graph to `graph`.
    GraphMorphism map;
    MarkedGraph graph;
    /// Image in the target of each edge of `graph` (a single half-edge).
    std::vector<HalfEdge> labels;
    std::vector<int> vertex_labels;
};

/// g = iso o (fold maps) o (subdivisions). The domain carries the pulled-back
/// metric, each fine edge the length of its label.
struct FoldSequence {
    MarkedGraph domain;
    std::vector<FoldStep> steps;
    /// Final graph onto the target, an isomorphism.
    GraphMorphism identification;

    std::size_t fold_count() const {
        std::size_t n = 0;
        for (const auto& s : steps) n += s.kind == "fold";
        return n;
    }
};

namespace detail {

struct LabelledGraph {
    MarkedGraph mg;
    std::vector<HalfEdge> label;
    std::vector<int> vlabel;

    HalfEdge label_of(HalfEdge h) const {
        HalfEdge l = label[edge_of(h)];
        return is_forward(h) ? l : reversed(l);
    }
};

inline void push_marking(MarkedGraph& mg, const GraphMorphism& m) {
    for (auto& p : mg.marking) p = m.apply(p);
    mg.basepoint = m.vertex[mg.basepoint];
}

/// Drop edge `gone` and vertex `vgone` (merged into `vkeep`), renumbering.
inline void drop_and_merge(LabelledGraph& h, int gone_edge, int vgone, int vkeep, GraphMorphism& m,
                           HalfEdge gone_image) {
    Graph& g = h.mg.graph;
    const int n = g.vertex_count, ne = g.edge_count();
    std::vector<int> vid(n);
    int next = 0;
    for (int v = 0; v < n; ++v) vid[v] = v == vgone ? -1 : next++;
    for (int v = 0; v < n; ++v) m.vertex.push_back(v == vgone ? vid[vkeep] : vid[v]);
    std::vector<int> eid(ne);
    next = 0;
    for (int e = 0; e < ne; ++e) eid[e] = e == gone_edge ? -1 : next++;
    auto rename = [&](HalfEdge x) { return 2 * eid[edge_of(x)] + (x & 1); };
    Graph out;
    out.vertex_count = n - (vgone >= 0 ? 1 : 0);
    std::vector<HalfEdge> lab;
    for (int e = 0; e < ne; ++e) {
        if (e == gone_edge) {
            m.edge.push_back(gone_image < 0 ? EdgePath{} : EdgePath{rename(gone_image)});
            continue;
        }
        auto fix = [&](int v) { return v == vgone ? vid[vkeep] : vid[v]; };
        out.add_edge(fix(g.from[e]), fix(g.to[e]), g.length[e]);
        lab.push_back(h.label[e]);
        m.edge.push_back({2 * eid[e]});
    }
    std::vector<int> vl(out.vertex_count);
    for (int v = 0; v < n; ++v)
        if (v != vgone) vl[vid[v]] = h.vlabel[v];
    h.mg.graph = std::move(out);
    h.label = std::move(lab);
    h.vlabel = std::move(vl);
    push_marking(h.mg, m);
}

}  // namespace detail

/// Stallings decomposition of a homotopy equivalence g: subdivide every edge
/// into one piece per letter of its image, then fold pairs of equally labelled
/// directions one at a time until the label map is an isomorphism. Fine edges
/// get the length in g's graph of their label.
inline FoldSequence fold_decomposition(const GraphMap& gm) {
    const Graph& tgt = gm.g();
    FoldSequence seq;
    seq.domain = gm.graph;
    for (int e = 0; e < tgt.edge_count(); ++e) {
        if (gm.edge_image[e].empty()) throw DegenerateEdge("image of " + edge_name(e) + " reduces to a point");
        seq.domain.graph.length[e] = tgt.path_length(gm.edge_image[e]);
    }

    detail::LabelledGraph h;
    h.mg = seq.domain;
    h.vlabel = gm.vertex_image;
    for (int e = 0; e < tgt.edge_count(); ++e) {
        h.label.push_back(gm.edge_image[e].front());
        h.mg.graph.length[e] = tgt.length[edge_of(gm.edge_image[e].front())];
    }
    for (int e = 0; e < tgt.edge_count(); ++e) {
        const EdgePath& img = gm.edge_image[e];
        if (img.size() < 2) continue;
        FoldStep st;
        st.kind = "subdivide";
        st.detail = edge_name(e) + " into " + std::to_string(img.size());
        Graph& g = h.mg.graph;
        GraphMorphism m;
        for (int v = 0; v < g.vertex_count; ++v) m.vertex.push_back(v);
        for (int f = 0; f < g.edge_count(); ++f) m.edge.push_back({2 * f});
        const int end = g.to[e];
        int prev = g.add_vertex();
        h.vlabel.push_back(tgt.term(img[0]));
        g.to[e] = prev;
        for (std::size_t i = 1; i < img.size(); ++i) {
            int nxt = i + 1 == img.size() ? end : g.add_vertex();
            if (i + 1 < img.size()) h.vlabel.push_back(tgt.term(img[i]));
            int f = g.add_edge(prev, nxt, tgt.length[edge_of(img[i])]);
            h.label.push_back(img[i]);
            m.edge[e].push_back(2 * f);
            prev = nxt;
        }
        detail::push_marking(h.mg, m);
        st.map = std::move(m);
        st.graph = h.mg;
        st.labels = h.label;
        st.vertex_labels = h.vlabel;
        seq.steps.push_back(std::move(st));
    }

    for (;;) {
        const Graph& g = h.mg.graph;
        auto dirs = g.directions();
        HalfEdge h1 = -1, h2 = -1;
        int hanging = -1;
        for (int v = 0; v < g.vertex_count && h1 < 0 && hanging < 0; ++v) {
            if (dirs[v].size() == 1) {
                hanging = v;
                break;
            }
            for (std::size_t i = 0; i < dirs[v].size() && h1 < 0; ++i)
                for (std::size_t j = i + 1; j < dirs[v].size(); ++j)
                    if (h.label_of(dirs[v][i]) == h.label_of(dirs[v][j])) {
                        h1 = dirs[v][i];
                        h2 = dirs[v][j];
                        break;
                    }
        }
        if (hanging >= 0) {
            FoldStep st;
            st.kind = "remove_valence_one";
            st.detail = "v" + std::to_string(hanging);
            HalfEdge d = dirs[hanging][0];
            detail::drop_and_merge(h, edge_of(d), hanging, g.term(d), st.map, -1);
            st.graph = h.mg;
            st.labels = h.label;
            st.vertex_labels = h.vlabel;
            seq.steps.push_back(std::move(st));
            continue;
        }
        if (h1 < 0) break;
        const int t1 = g.term(h1), t2 = g.term(h2);
        if (t1 == t2)
            throw NotHomotopyEquivalence("fold of " + half_edge_name(h1) + " and " + half_edge_name(h2) +
                                         " would lower the rank");
        FoldStep st;
        st.kind = "fold";
        st.detail = half_edge_name(h1) + " " + half_edge_name(h2);
        // send h2 onto h1; keep the basepoint if it is one of the merged ends
        int vgone = t2 == h.mg.basepoint ? t1 : t2, vkeep = vgone == t2 ? t1 : t2;
        HalfEdge image = is_forward(h2) ? h1 : reversed(h1);
        if (vgone == t1) {
            // h1 is dropped instead
            image = is_forward(h1) ? h2 : reversed(h2);
            detail::drop_and_merge(h, edge_of(h1), vgone, vkeep, st.map, image);
        } else {
            detail::drop_and_merge(h, edge_of(h2), vgone, vkeep, st.map, image);
        }
        st.graph = h.mg;
        st.labels = h.label;
        st.vertex_labels = h.vlabel;
        seq.steps.push_back(std::move(st));
    }

    // the label map is now an immersion; check it is an isomorphism
    const Graph& g = h.mg.graph;
    if (g.edge_count() != tgt.edge_count() || g.vertex_count != tgt.vertex_count)
        throw NotHomotopyEquivalence("folding ended at a proper immersion");
    std::vector<char> hit(tgt.edge_count(), 0), vhit(tgt.vertex_count, 0);
    for (int e = 0; e < g.edge_count(); ++e) hit[edge_of(h.label[e])] = 1;
    for (int v = 0; v < g.vertex_count; ++v) vhit[h.vlabel[v]] = 1;
    for (char c : hit)
        if (!c) throw NotHomotopyEquivalence("folding ended at a proper immersion");
    for (char c : vhit)
        if (!c) throw NotHomotopyEquivalence("folding ended at a proper immersion");
    seq.identification.vertex = h.vlabel;
    for (HalfEdge l : h.label) seq.identification.edge.push_back({l});
    return seq;
}

/// Composite of the recorded step maps followed by the identification, as a
/// self-map of the original graph.
inline GraphMap recompose(const FoldSequence& seq) {
    GraphMap out;
    out.graph = seq.domain;
    const int n = seq.domain.graph.edge_count();
    std::vector<EdgePath> paths(n);
    std::vector<int> verts(seq.domain.graph.vertex_count);
    for (int e = 0; e < n; ++e) paths[e] = {2 * e};
    for (int v = 0; v < seq.domain.graph.vertex_count; ++v) verts[v] = v;
    auto push = [&](const GraphMorphism& m) {
        for (auto& p : paths) p = m.apply(p);
        for (auto& v : verts) v = m.vertex[v];
    };
    for (const auto& s : seq.steps) push(s.map);
    push(seq.identification);
    out.edge_image = std::move(paths);
    out.vertex_image = std::move(verts);
    return out;
}

}  // namespace iwip
