#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "iwip/train_track.hpp"

namespace iwip {

class NotTrainTrack : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class PnpOutcome { NoneFoundUpToBound, Found, Inconclusive };

inline std::string to_string(PnpOutcome o) {
    switch (o) {
        case PnpOutcome::NoneFoundUpToBound: return "NoneFoundUpToBound";
        case PnpOutcome::Found: return "Found";
        case PnpOutcome::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct PnpStatus {
    PnpOutcome outcome = PnpOutcome::Inconclusive;
    /// Edge paths carrying the two legal legs of a found path; the path itself
    /// is the reverse of `first` truncated at `leg_length`, followed by `second`.
    EdgePath first, second;
    double leg_length = 0;
    int period = 0;
    /// Eigenmetric bound on leg lengths used by the search.
    double bound = 0;
    std::size_t states = 0;
};

namespace detail {

struct PairState {
    EdgePath a, b;
    friend auto operator<=>(const PairState&, const PairState&) = default;
};

struct PairEdge {
    int target;
    double cancelled;        // eigenlength of the common prefix of the images
    double len_a, len_b;     // lengths of the (possibly extended) legs
    EdgePath a, b;
};

inline bool shared_prefix_consumes(const EdgePath& x, const EdgePath& y, std::size_t& common) {
    common = 0;
    while (common < x.size() && common < y.size() && x[common] == y[common]) ++common;
    return common == x.size() || common == y.size();
}

}  // namespace detail

/// Bounded search for periodic Nielsen paths of an expanding irreducible
/// train track map. A path alpha-bar beta at an illegal turn, with alpha and
/// beta legal of equal eigenlength, is sent by g to the pair left after the
/// common initial segment of g(alpha), g(beta) cancels; candidates are pairs
/// of legal edge paths truncated at the length bound, and a periodic
/// Nielsen path is a cycle of this dynamics with consistent leg lengths.
inline PnpStatus pnp_search(const GraphMap& g, double slack = 2.0, std::size_t max_states = 200000) {
    if (slack < 1) throw std::invalid_argument("slack must be at least 1");
    auto m = transition_matrix(g);
    if (!is_irreducible(m)) throw NotTrainTrack("transition matrix is reducible");
    auto pf = perron_frobenius(m);
    const double lambda = pf.eigenvalue;
    if (!(lambda > 1 + 1e-9)) throw NotTrainTrack("map is not expanding");
    if (!is_train_track(g).is_train_track) throw NotTrainTrack("map is not a train track");

    const Graph& gr = g.g();
    const std::vector<double>& len = pf.eigenvector;
    auto plen = [&](const EdgePath& p) {
        double s = 0;
        for (HalfEdge h : p) s += len[edge_of(h)];
        return s;
    };
    const double l_max = lambda * *std::max_element(len.begin(), len.end());
    const double bound = slack * 2 * lambda * l_max / (lambda - 1);
    const double tol = 1e-9;

    auto dg = direction_map(g);
    auto dirs = gr.directions();
    auto truncate = [&](EdgePath p) {
        double s = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            s += len[edge_of(p[i])];
            if (s >= bound) {
                p.resize(i + 1);
                break;
            }
        }
        return p;
    };

    PnpStatus status;
    status.bound = bound;
    std::map<detail::PairState, int> index;
    std::vector<detail::PairState> states;
    std::vector<std::vector<detail::PairEdge>> out;
    auto intern = [&](detail::PairState s) {
        auto [it, fresh] = index.emplace(s, static_cast<int>(states.size()));
        if (fresh) {
            states.push_back(std::move(s));
            out.emplace_back();
        }
        return it->second;
    };

    for (int v = 0; v < gr.vertex_count; ++v)
        for (std::size_t i = 0; i < dirs[v].size(); ++i)
            for (std::size_t j = i + 1; j < dirs[v].size(); ++j)
                if (illegality_depth(dg, Turn(dirs[v][i], dirs[v][j])) > 0)
                    intern({{dirs[v][i]}, {dirs[v][j]}});

    // expand: refine legs whose image is swallowed, then step. Refinements
    // count against the same budget as states.
    std::size_t refinements = 0;
    for (std::size_t q = 0; q < states.size(); ++q) {
        std::vector<detail::PairState> work{states[q]};
        while (!work.empty()) {
            if (states.size() + refinements > max_states) {
                status.outcome = PnpOutcome::Inconclusive;
                status.states = states.size();
                return status;
            }
            ++refinements;
            auto s = std::move(work.back());
            work.pop_back();
            EdgePath ia = raw_image(g, s.a), ib = raw_image(g, s.b);
            std::size_t common;
            if (detail::shared_prefix_consumes(ia, ib, common)) {
                // a leg whose image is swallowed must be longer than it is
                bool grow_a = common == ia.size(), grow_b = common == ib.size();
                auto extend = [&](EdgePath p) {
                    std::vector<EdgePath> res;
                    if (plen(p) >= bound) return res;
                    HalfEdge last = p.back();
                    for (HalfEdge x : dirs[gr.term(last)]) {
                        if (x == reversed(last)) continue;
                        if (illegality_depth(dg, Turn(reversed(last), x)) > 0) continue;
                        EdgePath np = p;
                        np.push_back(x);
                        res.push_back(std::move(np));
                    }
                    return res;
                };
                std::vector<EdgePath> as{s.a}, bs{s.b};
                if (grow_a) as = extend(s.a);
                if (grow_b) bs = extend(s.b);
                for (const auto& a : as)
                    for (const auto& b : bs) work.push_back({a, b});
                continue;
            }
            EdgePath ra(ia.begin() + static_cast<long>(common), ia.end());
            EdgePath rb(ib.begin() + static_cast<long>(common), ib.end());
            if (illegality_depth(dg, Turn(ra.front(), rb.front())) == 0) continue;
            double cancelled = plen(EdgePath(ia.begin(), ia.begin() + static_cast<long>(common)));
            int t = intern({truncate(std::move(ra)), truncate(std::move(rb))});
            out[q].push_back({t, cancelled, plen(s.a), plen(s.b), s.a, s.b});
        }
    }
    status.states = states.size();

    // elementary cycles, each checked for a consistent leg length
    const int n = static_cast<int>(states.size());
    std::size_t cycles = 0;
    const std::size_t max_cycles = 100000;
    std::vector<const detail::PairEdge*> path;
    std::vector<char> on_path(n, 0);
    auto check = [&]() -> bool {
        const int q = static_cast<int>(path.size());
        double s = 0, scale = 1;
        for (int i = 0; i < q; ++i) {
            scale /= lambda;
            s += scale * path[i]->cancelled;
        }
        s /= 1 - std::pow(lambda, -q);
        double si = s;
        for (int i = 0; i < q; ++i) {
            if (!(si > tol) || si > std::min(path[i]->len_a, path[i]->len_b) + tol) return false;
            si = lambda * si - path[i]->cancelled;
        }
        return true;
    };
    // a cycle stays inside one strong component of the state graph
    std::vector<int> comp(n, -1);
    {
        std::vector<std::vector<int>> rev(n);
        for (int v = 0; v < n; ++v)
            for (const auto& e : out[v]) rev[e.target].push_back(v);
        std::vector<int> order;
        std::vector<char> seen(n, 0);
        for (int r = 0; r < n; ++r) {
            if (seen[r]) continue;
            std::vector<std::pair<int, std::size_t>> st{{r, 0}};
            seen[r] = 1;
            while (!st.empty()) {
                auto [v, k] = st.back();
                if (k == out[v].size()) {
                    order.push_back(v);
                    st.pop_back();
                    continue;
                }
                st.back().second++;
                int w = out[v][k].target;
                if (!seen[w]) {
                    seen[w] = 1;
                    st.push_back({w, 0});
                }
            }
        }
        int c = 0;
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            if (comp[*it] >= 0) continue;
            std::vector<int> st{*it};
            comp[*it] = c;
            while (!st.empty()) {
                int v = st.back();
                st.pop_back();
                for (int w : rev[v])
                    if (comp[w] < 0) {
                        comp[w] = c;
                        st.push_back(w);
                    }
            }
            ++c;
        }
    }
    std::size_t visits = 0;
    const std::size_t max_visits = 20 * max_states;
    bool overflow = false;
    for (int start = 0; start < n && !overflow; ++start) {
        // cycles whose smallest state is `start`
        std::vector<std::pair<int, std::size_t>> stack{{start, 0}};
        on_path[start] = 1;
        while (!stack.empty()) {
            auto& [v, k] = stack.back();
            if (k == out[v].size()) {
                on_path[v] = 0;
                stack.pop_back();
                if (!path.empty()) path.pop_back();
                continue;
            }
            const detail::PairEdge& e = out[v][k++];
            if (e.target < start || comp[e.target] != comp[start]) continue;
            if (++visits > max_visits) {
                overflow = true;
                break;
            }
            if (e.target == start) {
                path.push_back(&e);
                if (++cycles > max_cycles) {
                    overflow = true;
                    break;
                }
                if (check()) {
                    status.outcome = PnpOutcome::Found;
                    status.period = static_cast<int>(path.size());
                    const double lambda_q = std::pow(lambda, -status.period);
                    double s = 0, scale = 1;
                    for (auto* p : path) {
                        scale /= lambda;
                        s += scale * p->cancelled;
                    }
                    status.leg_length = s / (1 - lambda_q);
                    status.first = path.front()->a;
                    status.second = path.front()->b;
                    return status;
                }
                path.pop_back();
                continue;
            }
            if (on_path[e.target]) continue;
            path.push_back(&e);
            on_path[e.target] = 1;
            stack.push_back({e.target, 0});
        }
        std::fill(on_path.begin(), on_path.end(), 0);
        path.clear();
    }
    status.outcome = overflow ? PnpOutcome::Inconclusive : PnpOutcome::NoneFoundUpToBound;
    return status;
}

}  // namespace iwip
