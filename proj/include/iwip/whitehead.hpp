#pragma once

#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "iwip/pnp.hpp"

namespace iwip {

using Rational = boost::rational<long long>;

inline std::string to_string(const Rational& q) {
    return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

class PNPFound : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class IdealGraphUndefined : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Graph on directions at one vertex whose edges are turns.
struct TurnGraph {
    int vertex = 0;
    std::vector<HalfEdge> directions;
    std::vector<Turn> edges;

    /// Vertex counts of the connected components.
    std::vector<int> component_sizes() const {
        std::map<HalfEdge, int> id;
        for (HalfEdge d : directions) id.emplace(d, static_cast<int>(id.size()));
        std::vector<int> parent(directions.size());
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int v) {
            while (parent[v] != v) v = parent[v] = parent[parent[v]];
            return v;
        };
        for (const auto& t : edges) parent[find(id.at(t.first))] = find(id.at(t.second));
        std::map<int, int> size;
        for (std::size_t i = 0; i < directions.size(); ++i) size[find(static_cast<int>(i))]++;
        std::vector<int> out;
        for (auto [r, s] : size) out.push_back(s);
        return out;
    }
    bool connected() const { return component_sizes().size() <= 1; }

    /// Components as graphs of their own, ordered by smallest direction.
    std::vector<TurnGraph> components() const {
        std::vector<TurnGraph> out;
        std::map<HalfEdge, int> comp;
        for (HalfEdge d : directions) {
            if (comp.count(d)) continue;
            TurnGraph c;
            c.vertex = vertex;
            std::vector<HalfEdge> stack{d};
            comp[d] = static_cast<int>(out.size());
            while (!stack.empty()) {
                HalfEdge x = stack.back();
                stack.pop_back();
                c.directions.push_back(x);
                for (const auto& t : edges) {
                    HalfEdge y = t.first == x ? t.second : t.second == x ? t.first : -1;
                    if (y >= 0 && !comp.count(y)) {
                        comp[y] = static_cast<int>(out.size());
                        stack.push_back(y);
                    }
                }
            }
            std::sort(c.directions.begin(), c.directions.end());
            for (const auto& t : edges)
                if (comp[t.first] == static_cast<int>(out.size())) c.edges.push_back(t);
            out.push_back(std::move(c));
        }
        return out;
    }

    bool is_triangle() const {
        if (directions.size() != 3 || edges.size() != 3) return false;
        TurnSet s(edges.begin(), edges.end());
        for (const auto& t : edges)
            if (t.degenerate()) return false;
        return s.size() == 3;
    }
};

struct PrincipalVertices {
    /// Power of g used (its rotationless power).
    int power = 1;
    std::vector<int> vertices;
    /// Dg^power-fixed directions at each principal vertex.
    std::vector<std::vector<HalfEdge>> fixed_directions;
};

/// Vertices fixed by g^k with at least three Dg^k-fixed directions, where k
/// is the rotationless power of g.
inline PrincipalVertices principal_vertices(const GraphMap& g) {
    PrincipalVertices pv;
    pv.power = rotationless_power(g);
    auto fixed = fixed_directions(g, pv.power);
    auto vk = power_of_map(g.vertex_image, pv.power);
    auto dirs = g.g().directions();
    for (int v = 0; v < g.g().vertex_count; ++v) {
        if (vk[v] != v) continue;
        std::vector<HalfEdge> f;
        for (HalfEdge d : dirs[v])
            if (fixed[d]) f.push_back(d);
        if (f.size() >= 3) {
            pv.vertices.push_back(v);
            pv.fixed_directions.push_back(std::move(f));
        }
    }
    return pv;
}

struct WhiteheadGraphs {
    int power = 1;
    /// LW(g, v) for every vertex v.
    std::vector<TurnGraph> local;
    /// SW(g, x) for every principal vertex x.
    std::vector<TurnGraph> stable;

    bool all_local_connected() const {
        for (const auto& lw : local)
            if (!lw.connected()) return false;
        return true;
    }
};

inline WhiteheadGraphs whitehead_graphs(const GraphMap& g) {
    WhiteheadGraphs wg;
    auto taken = taken_turns(g);
    auto dirs = g.g().directions();
    for (int v = 0; v < g.g().vertex_count; ++v) {
        TurnGraph lw;
        lw.vertex = v;
        lw.directions = dirs[v];
        for (const auto& t : taken)
            if (!t.degenerate() && g.g().init(t.first) == v) lw.edges.push_back(t);
        wg.local.push_back(std::move(lw));
    }
    auto pv = principal_vertices(g);
    wg.power = pv.power;
    for (std::size_t i = 0; i < pv.vertices.size(); ++i) {
        const auto& lw = wg.local[pv.vertices[i]];
        TurnGraph sw;
        sw.vertex = lw.vertex;
        sw.directions = pv.fixed_directions[i];
        for (const auto& t : lw.edges)
            if (std::binary_search(sw.directions.begin(), sw.directions.end(), t.first) &&
                std::binary_search(sw.directions.begin(), sw.directions.end(), t.second))
                sw.edges.push_back(t);
        wg.stable.push_back(std::move(sw));
    }
    return wg;
}

struct IdealWhiteheadGraph {
    int power = 1;
    std::vector<TurnGraph> components;
    /// Set when no PNP search bound could be certified.
    bool provisional = false;
    PnpStatus pnp;

    std::vector<int> k_list() const {
        std::vector<int> k;
        for (const auto& c : components) k.push_back(static_cast<int>(c.directions.size()));
        return k;
    }
};

/// IW as the disjoint union of the stable Whitehead graphs over principal
/// vertices, one component each. Needs an expanding irreducible
/// train track; throws PNPFound when the bounded search finds a periodic
/// Nielsen path.
inline IdealWhiteheadGraph ideal_whitehead_graph(const GraphMap& g, double slack = 2.0) {
    IdealWhiteheadGraph iw;
    try {
        iw.pnp = pnp_search(g, slack);
    } catch (const NotTrainTrack& e) {
        throw IdealGraphUndefined(std::string("ideal Whitehead graph undefined: ") + e.what());
    }
    if (iw.pnp.outcome == PnpOutcome::Found) throw PNPFound("periodic Nielsen path found");
    iw.provisional = iw.pnp.outcome != PnpOutcome::NoneFoundUpToBound;
    auto wg = whitehead_graphs(g);
    iw.power = wg.power;
    iw.components = std::move(wg.stable);
    return iw;
}

/// i = sum over components of (1 - k/2).
inline Rational rotationless_index(const std::vector<int>& k_list) {
    Rational i(0);
    for (int k : k_list) {
        if (k < 3) throw std::invalid_argument("component with fewer than three vertices");
        i += Rational(1) - Rational(k, 2);
    }
    return i;
}

inline Rational rotationless_index(const IdealWhiteheadGraph& iw) { return rotationless_index(iw.k_list()); }

struct IndexReport {
    Rational index;
    std::vector<int> k_list;
    int rotationless_power = 1;
};

inline IndexReport index_report(const IdealWhiteheadGraph& iw) {
    return {rotationless_index(iw), iw.k_list(), iw.power};
}

}  // namespace iwip
