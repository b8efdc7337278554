#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace iwip {

/// Square non-negative integer matrix; entry (e, f) counts occurrences of
/// f or its reverse in the image of e.
struct TransitionMatrix {
    std::vector<std::vector<long long>> entries;

    TransitionMatrix() = default;
    explicit TransitionMatrix(std::vector<std::vector<long long>> m) : entries(std::move(m)) {}

    int size() const { return static_cast<int>(entries.size()); }
    long long operator()(int i, int j) const { return entries[i][j]; }
    long long row_sum(int i) const {
        return std::accumulate(entries[i].begin(), entries[i].end(), 0LL);
    }
    friend bool operator==(const TransitionMatrix&, const TransitionMatrix&) = default;
};

class Reducible : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class Primitivity { Primitive, IrreducibleNotPrimitive, Reducible };

struct PrimitivityResult {
    Primitivity kind = Primitivity::Reducible;
    /// Invariant proper non-empty index set when reducible.
    std::vector<int> invariant_subset;
    /// Smallest k with M^k > 0 (primitive only).
    int positivity_exponent = 0;
    /// Period of an irreducible matrix (gcd of cycle lengths).
    int period = 0;
};

inline std::string to_string(Primitivity p) {
    switch (p) {
        case Primitivity::Primitive: return "Primitive";
        case Primitivity::IrreducibleNotPrimitive: return "IrreducibleNotPrimitive";
        case Primitivity::Reducible: return "Reducible";
    }
    return "?";
}

namespace detail {

inline std::vector<std::vector<int>> successors(const TransitionMatrix& m) {
    std::vector<std::vector<int>> out(m.size());
    for (int i = 0; i < m.size(); ++i)
        for (int j = 0; j < m.size(); ++j)
            if (m(i, j) > 0) out[i].push_back(j);
    return out;
}

inline std::vector<char> reach_closure(const std::vector<std::vector<int>>& succ, int start) {
    std::vector<char> seen(succ.size(), 0);
    std::vector<int> stack{start};
    seen[start] = 1;
    // the start belongs to its own closure even without a self-loop
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : succ[v])
            if (!seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
    }
    return seen;
}

using BoolMatrix = std::vector<std::vector<char>>;

inline BoolMatrix bool_product(const BoolMatrix& a, const BoolMatrix& b) {
    const std::size_t n = a.size();
    BoolMatrix c(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            if (a[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (b[k][j]) c[i][j] = 1;
    return c;
}

}  // namespace detail

/// Strongly connected components in topological order of the condensation
/// (sources first). Tarjan's algorithm yields reverse topological order.
inline std::vector<std::vector<int>> strong_components(const TransitionMatrix& m) {
    const int n = m.size();
    auto succ = detail::successors(m);
    std::vector<int> index(n, -1), low(n, 0), stack;
    std::vector<char> on_stack(n, 0);
    std::vector<std::vector<int>> comps;
    int counter = 0;
    // iterative Tarjan
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        std::vector<std::pair<int, std::size_t>> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            auto& [v, pos] = call.back();
            if (pos < succ[v].size()) {
                int w = succ[v][pos++];
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::vector<int> comp;
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp.push_back(w);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                comps.push_back(std::move(comp));
            }
            int finished = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[finished]);
        }
    }
    std::reverse(comps.begin(), comps.end());
    return comps;
}

inline bool is_irreducible(const TransitionMatrix& m) {
    if (m.size() == 0) return false;
    if (m.size() == 1) return m(0, 0) > 0;
    return strong_components(m).size() == 1;
}

inline PrimitivityResult primitivity_class(const TransitionMatrix& m) {
    PrimitivityResult res;
    const int n = m.size();
    auto succ = detail::successors(m);
    if (!is_irreducible(m)) {
        res.kind = Primitivity::Reducible;
        for (int i = 0; i < n; ++i) {
            auto closure = detail::reach_closure(succ, i);
            int count = static_cast<int>(std::count(closure.begin(), closure.end(), 1));
            if (count < n) {
                for (int j = 0; j < n; ++j)
                    if (closure[j]) res.invariant_subset.push_back(j);
                break;
            }
        }
        return res;
    }
    // period: gcd over edges of level differences in a BFS layering
    std::vector<int> level(n, -1);
    std::vector<int> queue{0};
    level[0] = 0;
    int period = 0;
    for (std::size_t q = 0; q < queue.size(); ++q) {
        int v = queue[q];
        for (int w : succ[v]) {
            if (level[w] < 0) {
                level[w] = level[v] + 1;
                queue.push_back(w);
            } else {
                period = std::gcd(period, std::abs(level[v] + 1 - level[w]));
            }
        }
    }
    res.period = period;
    detail::BoolMatrix base(n, std::vector<char>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j : succ[i]) base[i][j] = 1;
    // Wielandt: a primitive matrix has M^k > 0 by k = n^2 - 2n + 2
    const int wielandt = n * n - 2 * n + 2;
    detail::BoolMatrix power = base;
    for (int k = 1; k <= std::max(1, wielandt); ++k) {
        bool positive = true;
        for (int i = 0; i < n && positive; ++i)
            for (int j = 0; j < n; ++j)
                if (!power[i][j]) {
                    positive = false;
                    break;
                }
        if (positive) {
            res.kind = Primitivity::Primitive;
            res.positivity_exponent = k;
            return res;
        }
        power = detail::bool_product(power, base);
    }
    res.kind = Primitivity::IrreducibleNotPrimitive;
    return res;
}

struct PerronFrobenius {
    double eigenvalue = 0;
    /// Right eigenvector M v = lambda v, normalised to sum 1.
    std::vector<double> eigenvector;
    int iterations = 0;
};

/// Perron-Frobenius data of an irreducible matrix by power iteration on
/// M + I from the all-ones vector, stopped when the Collatz-Wielandt
/// bracket min/max of (Mx)_i / x_i has relative width below `rel_tol`.
inline PerronFrobenius perron_frobenius(const TransitionMatrix& m, double rel_tol = 1e-10,
                                        int max_iter = 100000) {
    if (!is_irreducible(m)) throw Reducible("transition matrix is not irreducible");
    const int n = m.size();
    std::vector<double> x(n, 1.0), y(n);
    PerronFrobenius pf;
    double lo = 0, hi = 0;
    for (int it = 1; it <= max_iter; ++it) {
        for (int i = 0; i < n; ++i) {
            double s = 0;
            for (int j = 0; j < n; ++j) s += static_cast<double>(m(i, j)) * x[j];
            y[i] = s;
        }
        lo = INFINITY;
        hi = 0;
        for (int i = 0; i < n; ++i) {
            double ratio = y[i] / x[i];
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        pf.iterations = it;
        if (hi - lo <= rel_tol * hi) break;
        double norm = 0;
        for (int i = 0; i < n; ++i) {
            x[i] = x[i] + y[i];
            norm += x[i];
        }
        for (auto& v : x) v /= norm;
    }
    pf.eigenvalue = 0.5 * (lo + hi);
    double sum = std::accumulate(x.begin(), x.end(), 0.0);
    for (auto& v : x) v /= sum;
    pf.eigenvector = std::move(x);
    return pf;
}

inline double pf_eigenvalue(const TransitionMatrix& m) { return perron_frobenius(m).eigenvalue; }

/// Spectral radius of an arbitrary non-negative matrix: the largest
/// Perron-Frobenius eigenvalue over its strong components.
inline double spectral_radius(const TransitionMatrix& m) {
    double best = 0;
    for (const auto& comp : strong_components(m)) {
        std::vector<std::vector<long long>> sub(comp.size(), std::vector<long long>(comp.size()));
        for (std::size_t i = 0; i < comp.size(); ++i)
            for (std::size_t j = 0; j < comp.size(); ++j) sub[i][j] = m(comp[i], comp[j]);
        TransitionMatrix s(std::move(sub));
        if (!is_irreducible(s)) continue;
        best = std::max(best, pf_eigenvalue(s));
    }
    return best;
}

/// Characteristic polynomial det(tI - M), coefficients from t^n down to t^0,
/// by the division-free Berkowitz algorithm.
inline std::vector<std::string> characteristic_polynomial(const TransitionMatrix& m) {
    using boost::multiprecision::cpp_int;
    const int n = m.size();
    std::vector<cpp_int> poly{1};  // for the leading 0x0 block
    for (int k = 0; k < n; ++k) {
        // block A_k = M[0..k][0..k]; r = row k left of diagonal, c = column k above
        std::vector<cpp_int> col(k), row(k);
        for (int i = 0; i < k; ++i) {
            col[i] = m(i, k);
            row[i] = m(k, i);
        }
        // Toeplitz column: 1, -a, -r c, -r A c, -r A^2 c, ...
        std::vector<cpp_int> t(k + 2);
        t[0] = 1;
        t[1] = -cpp_int(m(k, k));
        std::vector<cpp_int> v = col;
        for (int p = 2; p <= k + 1; ++p) {
            cpp_int s = 0;
            for (int i = 0; i < k; ++i) s += row[i] * v[i];
            t[p] = -s;
            std::vector<cpp_int> nv(k, 0);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) nv[i] += cpp_int(m(i, j)) * v[j];
            v = std::move(nv);
        }
        std::vector<cpp_int> next(k + 2, 0);
        for (int i = 0; i < k + 2; ++i)
            for (int j = 0; j <= i && j < static_cast<int>(poly.size()); ++j) next[i] += t[i - j] * poly[j];
        poly = std::move(next);
    }
    std::vector<std::string> out;
    for (const auto& c : poly) out.push_back(c.str());
    return out;
}

}  // namespace iwip
