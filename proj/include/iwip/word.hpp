#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace iwip {

/// Signed generator: +(i+1) is the i-th basis element, -(i+1) its inverse.
using Letter = std::int32_t;

inline constexpr Letter inverse(Letter x) { return -x; }
inline constexpr int generator_index(Letter x) { return (x > 0 ? x : -x) - 1; }

class IndexOutOfRank : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class RankMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A freely reduced word in the free group. Rank is carried by the
/// automorphism that owns the word, not by the word itself.
class Word {
public:
    Word() = default;

    /// Reduce an arbitrary letter sequence. Throws IndexOutOfRank when a
    /// letter names a generator outside 1..rank (rank <= 0 disables the check).
    static Word reduce(const std::vector<Letter>& raw, int rank = 0);

    /// Wrap letters already known to be reduced.
    static Word from_reduced(std::vector<Letter> letters) {
        Word w;
        w.letters_ = std::move(letters);
        return w;
    }

    const std::vector<Letter>& letters() const { return letters_; }
    std::size_t size() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }
    Letter operator[](std::size_t i) const { return letters_[i]; }

    Word inverse() const;
    Word operator*(const Word& other) const;

    /// Largest generator index + 1 (0 for the empty word).
    int max_rank() const;

    /// Conjugate to a cyclically reduced word: *this = c * core * c^-1.
    Word cyclic_core(Word* conjugator = nullptr) const;

    friend bool operator==(const Word&, const Word&) = default;
    friend auto operator<=>(const Word& a, const Word& b) {
        if (a.size() != b.size()) return a.size() <=> b.size();
        return a.letters_ <=> b.letters_;
    }

private:
    std::vector<Letter> letters_;
};

/// Append `x` to a reduced letter buffer, cancelling against the tail.
inline void push_reduced(std::vector<Letter>& buf, Letter x) {
    if (!buf.empty() && buf.back() == -x)
        buf.pop_back();
    else
        buf.push_back(x);
}

inline Word Word::reduce(const std::vector<Letter>& raw, int rank) {
    std::vector<Letter> out;
    out.reserve(raw.size());
    for (Letter x : raw) {
        if (x == 0 || (rank > 0 && generator_index(x) >= rank))
            throw IndexOutOfRank("letter index " + std::to_string(std::abs(x)) +
                                 " exceeds rank " + std::to_string(rank));
        push_reduced(out, x);
    }
    return from_reduced(std::move(out));
}

inline Word Word::inverse() const {
    std::vector<Letter> out(letters_.rbegin(), letters_.rend());
    for (auto& x : out) x = -x;
    return from_reduced(std::move(out));
}

inline Word Word::operator*(const Word& other) const {
    std::vector<Letter> out = letters_;
    out.reserve(letters_.size() + other.size());
    for (Letter x : other.letters_) push_reduced(out, x);
    return from_reduced(std::move(out));
}

inline int Word::max_rank() const {
    int r = 0;
    for (Letter x : letters_) r = std::max(r, generator_index(x) + 1);
    return r;
}

inline Word Word::cyclic_core(Word* conjugator) const {
    std::size_t i = 0, j = letters_.size();
    while (j - i >= 2 && letters_[i] == -letters_[j - 1]) {
        ++i;
        --j;
    }
    if (conjugator)
        *conjugator = from_reduced({letters_.begin(), letters_.begin() + static_cast<long>(i)});
    return from_reduced({letters_.begin() + static_cast<long>(i),
                         letters_.begin() + static_cast<long>(j)});
}

// Text encoding: a..z are generators 1..26, A..Z their inverses.

inline Letter letter_from_char(char c) {
    if (c >= 'a' && c <= 'z') return c - 'a' + 1;
    if (c >= 'A' && c <= 'Z') return -(c - 'A' + 1);
    throw ParseError(std::string("invalid letter '") + c + "'");
}

inline char letter_to_char(Letter x) {
    int i = generator_index(x);
    if (i >= 26) throw std::out_of_range("generator index beyond text encoding");
    return static_cast<char>(x > 0 ? 'a' + i : 'A' + i);
}

/// Letters of a text word without reducing. Whitespace is ignored; "1" and
/// the empty string both denote the identity.
inline std::vector<Letter> parse_letters(std::string_view text) {
    std::vector<Letter> out;
    if (text == "1") return out;
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '.') continue;
        out.push_back(letter_from_char(c));
    }
    return out;
}

inline bool is_reduced(const std::vector<Letter>& letters) {
    for (std::size_t i = 1; i < letters.size(); ++i)
        if (letters[i] == -letters[i - 1]) return false;
    return true;
}

inline Word parse_word(std::string_view text, int rank = 0) {
    return Word::reduce(parse_letters(text), rank);
}

inline std::string to_string(const Word& w) {
    std::string s;
    s.reserve(w.size());
    for (Letter x : w.letters()) s.push_back(letter_to_char(x));
    return s;
}

}  // namespace iwip
