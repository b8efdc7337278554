#pragma once

#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "iwip/graph_map.hpp"

namespace iwip {

/// Unordered pair of directions (half-edges) at a common vertex.
struct Turn {
    HalfEdge first = 0;
    HalfEdge second = 0;

    Turn() = default;
    Turn(HalfEdge a, HalfEdge b) : first(std::min(a, b)), second(std::max(a, b)) {}

    bool degenerate() const { return first == second; }
    friend auto operator<=>(const Turn&, const Turn&) = default;
};

using TurnSet = std::set<Turn>;

/// Dg: each direction goes to the first direction of its image path.
inline std::vector<HalfEdge> direction_map(const GraphMap& g) {
    std::vector<HalfEdge> dg(g.g().half_edge_count());
    for (HalfEdge h = 0; h < g.g().half_edge_count(); ++h) {
        const auto& p = g.edge_image[edge_of(h)];
        if (p.empty()) throw DegenerateEdge("direction map needs non-trivial edge images");
        dg[h] = is_forward(h) ? p.front() : reversed(p.back());
    }
    return dg;
}

inline Turn apply_direction_map(const std::vector<HalfEdge>& dg, const Turn& t) {
    return Turn(dg[t.first], dg[t.second]);
}

/// Turns crossed by a path: consecutive letters x, y give {x^-1, y}.
inline void collect_turns(const EdgePath& p, TurnSet& out) {
    for (std::size_t i = 1; i < p.size(); ++i) out.insert(Turn(reversed(p[i - 1]), p[i]));
}

inline TurnSet turns_in_images(const GraphMap& g) {
    TurnSet out;
    for (const auto& p : g.edge_image) collect_turns(p, out);
    return out;
}

/// Least set containing the turns crossed by edge images and closed under
/// Dg, with the first iterate k such that the turn is crossed by some
/// g^k(e) in the untightened sense.
struct TurnClosure {
    std::map<Turn, int> first_iterate;

    TurnSet turns() const {
        TurnSet s;
        for (const auto& [t, k] : first_iterate) s.insert(t);
        return s;
    }
    bool contains_degenerate() const {
        for (const auto& [t, k] : first_iterate)
            if (t.degenerate()) return true;
        return false;
    }
};

inline TurnClosure turn_closure(const GraphMap& g) {
    auto dg = direction_map(g);
    TurnClosure c;
    std::vector<Turn> frontier;
    for (const auto& t : turns_in_images(g)) {
        c.first_iterate.emplace(t, 1);
        frontier.push_back(t);
    }
    int k = 1;
    while (!frontier.empty()) {
        ++k;
        std::vector<Turn> next;
        for (const auto& t : frontier) {
            if (t.degenerate()) continue;
            Turn u = apply_direction_map(dg, t);
            if (c.first_iterate.emplace(u, k).second) next.push_back(u);
        }
        frontier = std::move(next);
    }
    return c;
}

/// Taken turns of g (turns crossed by some iterate g^k(e)).
inline TurnSet taken_turns(const GraphMap& g) { return turn_closure(g).turns(); }

/// Number of Dg applications making the turn degenerate, 0 if it is legal.
inline int illegality_depth(const std::vector<HalfEdge>& dg, Turn t) {
    std::set<Turn> seen;
    int depth = 0;
    while (!t.degenerate()) {
        if (!seen.insert(t).second) return 0;
        t = apply_direction_map(dg, t);
        ++depth;
    }
    return depth;
}

inline bool is_legal_turn(const std::vector<HalfEdge>& dg, const Turn& t) {
    return !t.degenerate() && illegality_depth(dg, t) == 0;
}

inline bool is_legal_path(const std::vector<HalfEdge>& dg, const EdgePath& p) {
    for (std::size_t i = 1; i < p.size(); ++i)
        if (!is_legal_turn(dg, Turn(reversed(p[i - 1]), p[i]))) return false;
    return true;
}

namespace detail {

/// Cycle structure of a self-map of {0..n-1}: lcm of eventual cycle lengths
/// and the indicator of periodic points.
inline long long eventual_cycle_lcm(const std::vector<int>& f, std::vector<char>* periodic = nullptr) {
    const int n = static_cast<int>(f.size());
    std::vector<int> state(n, 0);  // 0 unvisited, 1 on stack, 2 done
    std::vector<char> per(n, 0);
    long long l = 1;
    for (int s = 0; s < n; ++s) {
        if (state[s]) continue;
        std::vector<int> path;
        int v = s;
        while (state[v] == 0) {
            state[v] = 1;
            path.push_back(v);
            v = f[v];
        }
        if (state[v] == 1) {
            long long len = 0;
            int w = v;
            do {
                per[w] = 1;
                w = f[w];
                ++len;
            } while (w != v);
            l = std::lcm(l, len);
        }
        for (int p : path) state[p] = 2;
    }
    if (periodic) *periodic = std::move(per);
    return l;
}

}  // namespace detail

/// Smallest k >= 1 with every Dg-periodic direction and every periodic
/// vertex fixed by the k-th power.
inline int rotationless_power(const GraphMap& g) {
    auto dg = direction_map(g);
    std::vector<int> df(dg.begin(), dg.end());
    long long a = detail::eventual_cycle_lcm(df);
    long long b = detail::eventual_cycle_lcm(g.vertex_image);
    return static_cast<int>(std::lcm(a, b));
}

inline std::vector<int> power_of_map(const std::vector<int>& f, long long k) {
    std::vector<int> out(f.size());
    std::iota(out.begin(), out.end(), 0);
    std::vector<int> base = f;
    while (k > 0) {
        if (k & 1)
            for (auto& x : out) x = base[x];
        std::vector<int> sq(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) sq[i] = base[base[i]];
        base = std::move(sq);
        k >>= 1;
    }
    return out;
}

/// Directions fixed by Dg^k.
inline std::vector<char> fixed_directions(const GraphMap& g, int k) {
    auto dg = direction_map(g);
    auto pk = power_of_map(std::vector<int>(dg.begin(), dg.end()), k);
    std::vector<char> fixed(pk.size(), 0);
    for (std::size_t h = 0; h < pk.size(); ++h) fixed[h] = pk[h] == static_cast<int>(h);
    return fixed;
}

}  // namespace iwip
