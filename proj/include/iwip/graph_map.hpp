#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "iwip/automorphism.hpp"
#include "iwip/graph.hpp"
#include "iwip/matrix.hpp"

namespace iwip {

class DegenerateEdge : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class NotHomotopyEquivalence : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Self-map of a marked graph sending vertices to vertices and each edge to
/// an edge path. Images of reversed half-edges are the reversed paths.
struct GraphMap {
    MarkedGraph graph;
    std::vector<int> vertex_image;
    std::vector<EdgePath> edge_image;  // indexed by edge, forward orientation

    const Graph& g() const { return graph.graph; }
    int rank() const { return graph.rank(); }

    EdgePath image(HalfEdge h) const {
        const auto& p = edge_image[edge_of(h)];
        return is_forward(h) ? p : reverse_path(p);
    }

    /// Tight image of a path.
    EdgePath apply(const EdgePath& path) const {
        EdgePath out;
        for (HalfEdge h : path) {
            const auto& p = edge_image[edge_of(h)];
            if (is_forward(h))
                for (HalfEdge x : p) push_tight(out, x);
            else
                for (auto it = p.rbegin(); it != p.rend(); ++it) push_tight(out, reversed(*it));
        }
        return out;
    }

    std::size_t total_image_length() const {
        std::size_t n = 0;
        for (const auto& p : edge_image) n += p.size();
        return n;
    }

    /// Endpoint compatibility of every edge image. Throws InvalidGraph.
    void validate() const {
        const Graph& gr = g();
        if (static_cast<int>(vertex_image.size()) != gr.vertex_count ||
            static_cast<int>(edge_image.size()) != gr.edge_count())
            throw InvalidGraph("graph map size mismatch");
        for (int e = 0; e < gr.edge_count(); ++e) {
            const auto& p = edge_image[e];
            if (!gr.is_path(p)) throw InvalidGraph("edge image of " + edge_name(e) + " is not a path");
            int a = vertex_image[gr.from[e]], b = vertex_image[gr.to[e]];
            if (p.empty()) {
                if (a != b) throw InvalidGraph("collapsed edge " + edge_name(e) + " joins distinct images");
                continue;
            }
            if (gr.init(p.front()) != a || gr.term(p.back()) != b)
                throw InvalidGraph("edge image of " + edge_name(e) + " has wrong endpoints");
        }
    }
};

/// Standard topological representative on the rose.
inline GraphMap rose_map(const FreeAutomorphism& phi) {
    GraphMap g;
    g.graph = MarkedGraph::rose(phi.rank());
    g.vertex_image = {0};
    for (const auto& w : phi.images()) {
        EdgePath p;
        for (Letter x : w.letters())
            p.push_back(x > 0 ? forward_half(x - 1) : reversed(forward_half(-x - 1)));
        g.edge_image.push_back(std::move(p));
    }
    return g;
}

/// Freely reduce every edge image. Throws DegenerateEdge if one collapses.
inline GraphMap tighten(GraphMap g) {
    for (int e = 0; e < g.g().edge_count(); ++e) {
        g.edge_image[e] = tighten_path(g.edge_image[e]);
        if (g.edge_image[e].empty())
            throw DegenerateEdge("image of " + edge_name(e) + " reduces to a point");
    }
    return g;
}

inline TransitionMatrix transition_matrix(const GraphMap& g) {
    const int n = g.g().edge_count();
    std::vector<std::vector<long long>> m(n, std::vector<long long>(n, 0));
    for (int e = 0; e < n; ++e)
        for (HalfEdge h : g.edge_image[e]) m[e][edge_of(h)]++;
    return TransitionMatrix(std::move(m));
}

/// The automorphism traced by the marking loops through g, read in the
/// reference basis. Defined up to an inner automorphism (the choice of tree
/// path back from g(basepoint)).
inline FreeAutomorphism induced_automorphism(const GraphMap& g) {
    MarkingChart chart(g.graph);
    std::vector<Word> images;
    for (const auto& loop : g.graph.marking) images.push_back(chart.word_of(g.apply(loop)));
    auto cert = is_basis(images, g.rank());
    if (!cert.is_basis) throw NotHomotopyEquivalence("traced images are not a basis: " + cert.witness);
    return FreeAutomorphism::trusted(g.rank(), std::move(images));
}

/// Eigenmetric: right PF eigenvector of the transition matrix, lengths sum 1.
inline std::vector<double> eigen_lengths(const GraphMap& g) {
    return perron_frobenius(transition_matrix(g)).eigenvector;
}

/// Iterated image g^k(e) of an edge, tightened at every step.
inline EdgePath iterate_edge(const GraphMap& g, int e, int k) {
    EdgePath p{forward_half(e)};
    for (int i = 0; i < k; ++i) p = g.apply(p);
    return p;
}

/// Untightened concatenation g(p) (for legality checks).
inline EdgePath raw_image(const GraphMap& g, const EdgePath& path) {
    EdgePath out;
    for (HalfEdge h : path) {
        EdgePath p = g.image(h);
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

}  // namespace iwip
