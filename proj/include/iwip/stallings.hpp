#pragma once

#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "iwip/word.hpp"

namespace iwip {

/// Folded labelled graph of a tuple of words, read as loops at vertex 0.
///
/// Every edge carries, besides its generator label, a word `omega` over the
/// tuple symbols U_1..U_k. Reading a closed path at the base gives a U-word
/// whose substitution U_i -> words[i] equals the label of the path. Folding
/// acts on omega by gauge shifts at the absorbed vertex, so the invariant
/// survives every fold; on the folded rose the omega of the loop labelled x
/// expresses x in terms of the tuple.
class StallingsGraph {
public:
    struct Edge {
        int from = 0;
        int to = 0;
        int label = 0;  // positive generator letter
        Word omega;
        bool alive = true;
    };

    explicit StallingsGraph(const std::vector<Word>& words, bool track_omega = true);

    /// Fold to completion. Returns false if a fold closed a loop with
    /// non-trivial omega, i.e. the words satisfy a relation.
    bool fold();

    int fold_count() const { return folds_; }
    int alive_vertex_count() const;
    int alive_edge_count() const;
    const std::vector<Edge>& edges() const { return edges_; }
    const std::string& failure() const { return failure_; }

    /// Drop hanging trees not containing the base.
    void prune_to_core(bool keep_base);

    /// Canonical text for the labelled graph up to relabelling of vertices,
    /// minimised over the choice of base vertex when `free_base` is set.
    std::string canonical_code(bool free_base, int* best_root = nullptr) const;

    /// Free basis of the subgroup read at `root`: one word per non-tree edge.
    std::vector<Word> basis_at(int root) const;

private:
    struct Step {
        int edge;
        bool forward;
    };
    int other_end(const Step& s) const {
        return s.forward ? edges_[s.edge].to : edges_[s.edge].from;
    }
    Word step_omega(const Step& s) const {
        return s.forward ? edges_[s.edge].omega : edges_[s.edge].omega.inverse();
    }
    int find(int v) {
        while (parent_[v] != v) v = parent_[v] = parent_[parent_[v]];
        return v;
    }
    bool fold_at(int v, bool& changed);

    std::vector<Edge> edges_;
    std::vector<std::vector<int>> incident_;
    std::vector<int> parent_;
    bool track_omega_;
    int folds_ = 0;
    std::string failure_;
};

inline StallingsGraph::StallingsGraph(const std::vector<Word>& words, bool track_omega)
    : track_omega_(track_omega) {
    int next_vertex = 1;
    incident_.emplace_back();
    for (std::size_t i = 0; i < words.size(); ++i) {
        const auto& letters = words[i].letters();
        int prev = 0;
        for (std::size_t j = 0; j < letters.size(); ++j) {
            int next = (j + 1 == letters.size()) ? 0 : next_vertex++;
            if (next != 0) incident_.emplace_back();
            Edge e;
            Letter x = letters[j];
            e.label = x > 0 ? x : -x;
            e.from = x > 0 ? prev : next;
            e.to = x > 0 ? next : prev;
            if (track_omega_ && j + 1 == letters.size()) {
                Word u = Word::from_reduced({static_cast<Letter>(i + 1)});
                e.omega = x > 0 ? u : u.inverse();
            }
            int id = static_cast<int>(edges_.size());
            edges_.push_back(std::move(e));
            incident_[prev].push_back(id);
            if (next != prev) incident_[next].push_back(id);
            prev = next;
        }
    }
    parent_.resize(incident_.size());
    std::iota(parent_.begin(), parent_.end(), 0);
}

inline bool StallingsGraph::fold_at(int v, bool& changed) {
    // key: signed label leaving v
    std::map<int, Step> seen;
    for (std::size_t k = 0; k < incident_[v].size(); ++k) {
        int id = incident_[v][k];
        Edge& e = edges_[id];
        if (!e.alive) continue;
        for (bool forward : {true, false}) {
            int start = forward ? e.from : e.to;
            if (start != v) continue;
            int key = forward ? e.label : -e.label;
            Step s{id, forward};
            auto it = seen.find(key);
            if (it == seen.end()) {
                seen.emplace(key, s);
                continue;
            }
            if (it->second.edge == id && it->second.forward == forward) continue;  // listed twice
            Step t1 = it->second, t2 = s;
            int w1 = other_end(t1), w2 = other_end(t2);
            ++folds_;
            changed = true;
            if (w1 == w2) {
                if (track_omega_ && step_omega(t1) != step_omega(t2)) {
                    failure_ = "relation: two equally labelled parallel edges with distinct expressions";
                    return false;
                }
                edges_[t2.edge].alive = false;
                return true;
            }
            if (w2 == 0 || (w1 != 0 && incident_[w2].size() > incident_[w1].size())) {
                std::swap(t1, t2);
                std::swap(w1, w2);
            }
            // absorb w2 into w1
            Word delta;
            if (track_omega_) delta = step_omega(t1).inverse() * step_omega(t2);
            Word delta_inv = delta.inverse();
            for (int fid : incident_[w2]) {
                Edge& f = edges_[fid];
                if (!f.alive) continue;
                if (track_omega_ && !delta.empty()) {
                    if (f.from == w2) f.omega = delta * f.omega;
                    if (f.to == w2) f.omega = f.omega * delta_inv;
                }
                if (f.from == w2) f.from = w1;
                if (f.to == w2) f.to = w1;
            }
            edges_[t2.edge].alive = false;
            for (int fid : incident_[w2])
                if (edges_[fid].alive) incident_[w1].push_back(fid);
            incident_[w2].clear();
            parent_[w2] = w1;
            return true;
        }
    }
    return true;
}

inline bool StallingsGraph::fold() {
    std::vector<int> work(incident_.size());
    std::iota(work.begin(), work.end(), 0);
    while (!work.empty()) {
        int v = find(work.back());
        bool changed = false;
        if (!fold_at(v, changed)) return false;
        if (!changed) {
            work.pop_back();
            continue;
        }
        // re-examine v and every neighbour that may have gained edges
        work.push_back(find(v));
        for (int fid : incident_[find(v)]) {
            const Edge& f = edges_[fid];
            if (!f.alive) continue;
            work.push_back(f.from);
            work.push_back(f.to);
        }
    }
    // compact incidence lists
    for (auto& inc : incident_) {
        std::vector<int> keep;
        for (int id : inc)
            if (edges_[id].alive) keep.push_back(id);
        std::sort(keep.begin(), keep.end());
        keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
        inc = std::move(keep);
    }
    return true;
}

inline int StallingsGraph::alive_vertex_count() const {
    std::vector<char> used(incident_.size(), 0);
    used[0] = 1;
    for (const auto& e : edges_)
        if (e.alive) used[e.from] = used[e.to] = 1;
    return static_cast<int>(std::count(used.begin(), used.end(), 1));
}

inline int StallingsGraph::alive_edge_count() const {
    return static_cast<int>(std::count_if(edges_.begin(), edges_.end(),
                                          [](const Edge& e) { return e.alive; }));
}

inline void StallingsGraph::prune_to_core(bool keep_base) {
    bool again = true;
    while (again) {
        again = false;
        std::vector<int> degree(incident_.size(), 0);
        for (const auto& e : edges_) {
            if (!e.alive) continue;
            degree[e.from]++;
            degree[e.to]++;
        }
        for (auto& e : edges_) {
            if (!e.alive) continue;
            for (int end : {e.from, e.to}) {
                if (degree[end] == 1 && !(keep_base && end == 0)) {
                    e.alive = false;
                    again = true;
                    break;
                }
            }
            if (!e.alive) {
                degree[e.from]--;
                degree[e.to]--;
            }
        }
    }
}

inline std::string StallingsGraph::canonical_code(bool free_base, int* best_root) const {
    // outgoing steps per vertex, sorted by signed label (folded => unique)
    std::map<int, std::vector<std::pair<int, int>>> out;
    for (const auto& e : edges_) {
        if (!e.alive) continue;
        out[e.from].push_back({e.label, e.to});
        out[e.to].push_back({-e.label, e.from});
    }
    for (auto& [v, list] : out) std::sort(list.begin(), list.end());
    auto code_from = [&](int root) {
        std::map<int, int> order;
        std::vector<int> queue{root};
        order[root] = 0;
        std::string code;
        for (std::size_t q = 0; q < queue.size(); ++q) {
            int v = queue[q];
            code += "[";
            for (auto [lab, w] : out[v]) {
                auto it = order.find(w);
                if (it == order.end()) {
                    it = order.emplace(w, static_cast<int>(order.size())).first;
                    queue.push_back(w);
                }
                code += std::to_string(lab) + ":" + std::to_string(it->second) + ",";
            }
            code += "]";
        }
        return code;
    };
    if (!free_base) {
        if (best_root) *best_root = 0;
        return code_from(0);
    }
    std::string best;
    int root_best = -1;
    for (const auto& [v, list] : out) {
        std::string c = code_from(v);
        if (root_best < 0 || c.size() < best.size() || (c.size() == best.size() && c < best)) {
            best = c;
            root_best = v;
        }
    }
    if (best_root) *best_root = root_best;
    return best;
}

inline std::vector<Word> StallingsGraph::basis_at(int root) const {
    std::map<int, std::vector<std::pair<int, int>>> out;  // (signed label, edge id)
    for (std::size_t id = 0; id < edges_.size(); ++id) {
        const auto& e = edges_[id];
        if (!e.alive) continue;
        out[e.from].push_back({e.label, static_cast<int>(id)});
        out[e.to].push_back({-e.label, static_cast<int>(id)});
    }
    for (auto& [v, list] : out) std::sort(list.begin(), list.end());
    std::map<int, Word> path_to;  // tree path from root
    std::vector<char> tree(edges_.size(), 0);
    path_to[root] = Word();
    std::vector<int> queue{root};
    for (std::size_t q = 0; q < queue.size(); ++q) {
        int v = queue[q];
        for (auto [lab, id] : out[v]) {
            const auto& e = edges_[id];
            int w = lab > 0 ? e.to : e.from;
            if (path_to.count(w)) continue;
            tree[id] = 1;
            path_to[w] = path_to[v] * Word::from_reduced({static_cast<Letter>(lab)});
            queue.push_back(w);
        }
    }
    std::vector<Word> basis;
    for (std::size_t id = 0; id < edges_.size(); ++id) {
        const auto& e = edges_[id];
        if (!e.alive || tree[id]) continue;
        basis.push_back(path_to[e.from] * Word::from_reduced({static_cast<Letter>(e.label)}) *
                        path_to[e.to].inverse());
    }
    std::sort(basis.begin(), basis.end());
    return basis;
}

}  // namespace iwip
