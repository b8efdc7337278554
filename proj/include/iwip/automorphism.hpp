#pragma once

#include <deque>
#include <set>
#include <string>
#include <vector>

#include "iwip/stallings.hpp"
#include "iwip/word.hpp"

namespace iwip {

class NotAnAutomorphism : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct BasisCertificate {
    bool is_basis = false;
    int folds = 0;
    int folded_vertices = 0;
    int folded_edges = 0;
    long abelian_determinant = 0;
    std::string witness;  // empty on success
    /// Expression of each generator in terms of the tuple (valid on success).
    std::vector<Word> generator_expressions;
};

namespace detail {

// Integer determinant by fraction-free elimination (Bareiss).
inline long long bareiss_determinant(std::vector<std::vector<long long>> m) {
    const std::size_t n = m.size();
    if (n == 0) return 1;
    long long sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t swap_row = k + 1;
            while (swap_row < n && m[swap_row][k] == 0) ++swap_row;
            if (swap_row == n) return 0;
            std::swap(m[k], m[swap_row]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

}  // namespace detail

/// Abelianisation determinant of a word tuple; +-1 is necessary for a basis.
inline long long abelian_determinant(const std::vector<Word>& words, int rank) {
    std::vector<std::vector<long long>> m(words.size(), std::vector<long long>(rank, 0));
    for (std::size_t i = 0; i < words.size(); ++i)
        for (Letter x : words[i].letters()) m[i][generator_index(x)] += x > 0 ? 1 : -1;
    if (static_cast<int>(words.size()) != rank) return 0;
    return detail::bareiss_determinant(std::move(m));
}

/// Decide whether `words` is a free basis of F_rank by Stallings folding.
inline BasisCertificate is_basis(const std::vector<Word>& words, int rank) {
    BasisCertificate cert;
    if (static_cast<int>(words.size()) != rank) {
        cert.witness = "expected " + std::to_string(rank) + " words, got " +
                       std::to_string(words.size());
        return cert;
    }
    for (const auto& w : words) {
        if (w.max_rank() > rank) {
            cert.witness = "letter outside rank in " + to_string(w);
            return cert;
        }
        if (w.empty()) {
            cert.witness = "trivial word in tuple";
            return cert;
        }
    }
    cert.abelian_determinant = static_cast<long>(abelian_determinant(words, rank));
    if (cert.abelian_determinant != 1 && cert.abelian_determinant != -1) {
        cert.witness = "abelianization determinant " + std::to_string(cert.abelian_determinant);
        return cert;
    }
    StallingsGraph graph(words, true);
    bool ok = graph.fold();
    cert.folds = graph.fold_count();
    cert.folded_vertices = graph.alive_vertex_count();
    cert.folded_edges = graph.alive_edge_count();
    if (!ok) {
        cert.witness = graph.failure();
        return cert;
    }
    if (cert.folded_vertices != 1 || cert.folded_edges != rank) {
        cert.witness = "folded graph has " + std::to_string(cert.folded_vertices) +
                       " vertices and " + std::to_string(cert.folded_edges) + " edges";
        return cert;
    }
    cert.generator_expressions.resize(rank);
    for (const auto& e : graph.edges())
        if (e.alive) cert.generator_expressions[e.label - 1] = e.omega;
    cert.is_basis = true;
    return cert;
}

/// An automorphism of F_r given by the images of the basis. Immutable.
class FreeAutomorphism {
public:
    FreeAutomorphism() = default;

    /// Validating constructor; throws NotAnAutomorphism.
    FreeAutomorphism(int rank, std::vector<Word> images) : rank_(rank), images_(std::move(images)) {
        auto cert = is_basis(images_, rank_);
        if (!cert.is_basis) throw NotAnAutomorphism("images do not form a basis: " + cert.witness);
    }

    /// Skip validation; for results of composition and inversion.
    static FreeAutomorphism trusted(int rank, std::vector<Word> images) {
        FreeAutomorphism f;
        f.rank_ = rank;
        f.images_ = std::move(images);
        return f;
    }

    static FreeAutomorphism identity(int rank) {
        std::vector<Word> images;
        for (int i = 0; i < rank; ++i) images.push_back(Word::from_reduced({i + 1}));
        return trusted(rank, std::move(images));
    }

    /// Parse from text images ("b", "c", "ab"); images are reduced.
    static FreeAutomorphism from_strings(const std::vector<std::string>& images) {
        int rank = static_cast<int>(images.size());
        std::vector<Word> words;
        for (const auto& s : images) words.push_back(parse_word(s, rank));
        return FreeAutomorphism(rank, std::move(words));
    }

    int rank() const { return rank_; }
    const std::vector<Word>& images() const { return images_; }
    const Word& image(int i) const { return images_[i]; }
    bool is_identity() const { return *this == identity(rank_); }

    std::size_t total_length() const {
        std::size_t n = 0;
        for (const auto& w : images_) n += w.size();
        return n;
    }

    /// Substitute and reduce.
    Word apply(const Word& w) const {
        if (w.max_rank() > rank_) throw RankMismatch("word rank exceeds automorphism rank");
        std::vector<Letter> out;
        for (Letter x : w.letters()) {
            const auto& img = images_[generator_index(x)].letters();
            if (x > 0)
                for (Letter y : img) push_reduced(out, y);
            else
                for (auto it = img.rbegin(); it != img.rend(); ++it) push_reduced(out, -*it);
        }
        return Word::from_reduced(std::move(out));
    }

    std::vector<std::string> image_strings() const {
        std::vector<std::string> out;
        for (const auto& w : images_) out.push_back(to_string(w));
        return out;
    }

    friend bool operator==(const FreeAutomorphism&, const FreeAutomorphism&) = default;

private:
    int rank_ = 0;
    std::vector<Word> images_;
};

/// (phi o psi)(x) = phi(psi(x)).
inline FreeAutomorphism compose(const FreeAutomorphism& phi, const FreeAutomorphism& psi) {
    if (phi.rank() != psi.rank()) throw RankMismatch("compose: ranks differ");
    std::vector<Word> images;
    images.reserve(psi.rank());
    for (const auto& w : psi.images()) images.push_back(phi.apply(w));
    return FreeAutomorphism::trusted(phi.rank(), std::move(images));
}

inline FreeAutomorphism invert(const FreeAutomorphism& phi) {
    auto cert = is_basis(phi.images(), phi.rank());
    if (!cert.is_basis) throw NotAnAutomorphism("cannot invert: " + cert.witness);
    return FreeAutomorphism::trusted(phi.rank(), std::move(cert.generator_expressions));
}

/// Inner automorphism x -> c x c^-1 applied to an image tuple.
inline std::vector<Word> conjugate_images(const std::vector<Word>& images, const Word& c) {
    std::vector<Word> out;
    Word ci = c.inverse();
    for (const auto& w : images) out.push_back(c * w * ci);
    return out;
}

/// Canonical representative of the outer class: among all conjugates of the
/// image tuple, the one of minimal total length, ties broken by comparing
/// images in order. The conjugates of minimal length form a finite subtree
/// of the Cayley tree, found by descent followed by a plateau search.
inline FreeAutomorphism outer_normal_form(const FreeAutomorphism& phi) {
    const int r = phi.rank();
    if (r == 0) return phi;
    // descent with deques: conjugation by one letter touches only the ends
    std::vector<std::deque<Letter>> cur;
    for (const auto& w : phi.images()) cur.emplace_back(w.letters().begin(), w.letters().end());
    auto delta_for = [&](Letter s) {
        long d = 0;
        for (const auto& q : cur) {
            long change = 2;
            if (!q.empty() && q.front() == -s) change -= 2;
            if (!q.empty() && q.back() == s) change -= 2;
            if (q.size() == 1 && q.front() == -s && q.back() == s) change = 0;
            d += change;
        }
        return d;
    };
    auto apply_letter = [](std::deque<Letter>& q, Letter s) {
        if (!q.empty() && q.front() == -s)
            q.pop_front();
        else
            q.push_front(s);
        if (!q.empty() && q.back() == s)
            q.pop_back();
        else
            q.push_back(-s);
    };
    for (;;) {
        Letter best = 0;
        long best_delta = 0;
        for (int i = 1; i <= r; ++i)
            for (Letter s : {static_cast<Letter>(i), static_cast<Letter>(-i)}) {
                long d = delta_for(s);
                if (d < best_delta) {
                    best_delta = d;
                    best = s;
                }
            }
        if (best == 0) break;
        for (auto& q : cur) apply_letter(q, best);
    }
    std::vector<Word> start;
    for (const auto& q : cur) start.push_back(Word::reduce({q.begin(), q.end()}));
    auto total = [](const std::vector<Word>& t) {
        std::size_t n = 0;
        for (const auto& w : t) n += w.size();
        return n;
    };
    const std::size_t min_len = total(start);
    std::set<std::vector<Word>> plateau{start};
    std::vector<std::vector<Word>> queue{start};
    constexpr std::size_t kPlateauCap = 20000;
    for (std::size_t q = 0; q < queue.size() && plateau.size() < kPlateauCap; ++q) {
        for (int i = 1; i <= r; ++i)
            for (Letter s : {static_cast<Letter>(i), static_cast<Letter>(-i)}) {
                auto next = conjugate_images(queue[q], Word::from_reduced({s}));
                if (total(next) != min_len) continue;
                if (plateau.insert(next).second) queue.push_back(std::move(next));
            }
    }
    return FreeAutomorphism::trusted(r, *plateau.begin());
}

/// Equality in Out(F_r).
inline bool same_outer_class(const FreeAutomorphism& a, const FreeAutomorphism& b) {
    if (a.rank() != b.rank()) return false;
    return outer_normal_form(a) == outer_normal_form(b);
}

/// Elementary Nielsen automorphisms of F_r: right/left transvections,
/// inversions and transpositions.
inline std::vector<FreeAutomorphism> nielsen_generators(int rank) {
    std::vector<FreeAutomorphism> gens;
    for (int i = 0; i < rank; ++i)
        for (int j = 0; j < rank; ++j) {
            if (i == j) continue;
            for (int sign : {1, -1}) {
                auto imgs = FreeAutomorphism::identity(rank).images();
                imgs[i] = imgs[i] * Word::from_reduced({sign * (j + 1)});
                gens.push_back(FreeAutomorphism::trusted(rank, imgs));
                imgs = FreeAutomorphism::identity(rank).images();
                imgs[i] = Word::from_reduced({sign * (j + 1)}) * imgs[i];
                gens.push_back(FreeAutomorphism::trusted(rank, imgs));
            }
        }
    for (int i = 0; i < rank; ++i) {
        auto imgs = FreeAutomorphism::identity(rank).images();
        imgs[i] = imgs[i].inverse();
        gens.push_back(FreeAutomorphism::trusted(rank, imgs));
    }
    for (int i = 0; i + 1 < rank; ++i) {
        auto imgs = FreeAutomorphism::identity(rank).images();
        std::swap(imgs[i], imgs[i + 1]);
        gens.push_back(FreeAutomorphism::trusted(rank, imgs));
    }
    return gens;
}

inline std::string to_string(const FreeAutomorphism& phi) {
    std::string s = "(";
    for (int i = 0; i < phi.rank(); ++i) {
        if (i) s += ", ";
        s += letter_to_char(i + 1);
        s += "->";
        s += phi.image(i).empty() ? std::string("1") : to_string(phi.image(i));
    }
    return s + ")";
}

}  // namespace iwip
