#include <random>
#include <string>

#include <gtest/gtest.h>

#include "iwip/automorphism.hpp"
#include "iwip/stallings.hpp"

using namespace iwip;

namespace {

// Oracle: cancel adjacent inverse pairs until none are left.
std::string naive_reduce(std::string s) {
    for (bool again = true; again;) {
        again = false;
        for (std::size_t i = 0; i + 1 < s.size(); ++i)
            if (s[i] != s[i + 1] && std::tolower(s[i]) == std::tolower(s[i + 1])) {
                s.erase(i, 2);
                again = true;
                break;
            }
    }
    return s;
}

std::string inverse_text(const std::string& s) {
    std::string r(s.rbegin(), s.rend());
    for (auto& c : r) c = std::islower(c) ? std::toupper(c) : std::tolower(c);
    return r;
}

// Oracle: textual substitution followed by naive reduction.
std::string naive_apply(const std::vector<std::string>& images, const std::string& w) {
    std::string out;
    for (char c : w) out += std::islower(c) ? images[c - 'a'] : inverse_text(images[std::tolower(c) - 'a']);
    return naive_reduce(out);
}

std::string random_text(std::mt19937_64& rng, int rank, int len) {
    std::string s;
    for (int i = 0; i < len; ++i) {
        char c = static_cast<char>('a' + rng() % rank);
        s += rng() % 2 ? c : static_cast<char>(std::toupper(c));
    }
    return s;
}

FreeAutomorphism random_product(std::mt19937_64& rng, int rank, int max_len) {
    auto gens = nielsen_generators(rank);
    auto phi = FreeAutomorphism::identity(rank);
    int n = 1 + static_cast<int>(rng() % max_len);
    for (int i = 0; i < n; ++i) phi = compose(phi, gens[rng() % gens.size()]);
    return phi;
}

FreeAutomorphism aut(std::vector<std::string> images) { return FreeAutomorphism::from_strings(images); }

}  // namespace

TEST(Reduce, Examples) {
    EXPECT_EQ(to_string(parse_word("aA")), "");
    EXPECT_EQ(to_string(parse_word("abBA")), "");
    EXPECT_EQ(to_string(parse_word("aBbc")), "ac");
}

TEST(Reduce, IndexOutOfRank) {
    EXPECT_THROW(parse_word("abd", 3), IndexOutOfRank);
    EXPECT_NO_THROW(parse_word("abc", 3));
}

TEST(Reduce, MatchesNaiveAndIsIdempotent) {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 500; ++t) {
        std::string s = random_text(rng, 3, static_cast<int>(rng() % 20));
        Word w = parse_word(s, 3);
        EXPECT_EQ(to_string(w), naive_reduce(s)) << s;
        EXPECT_EQ(Word::reduce(w.letters(), 3), w);
    }
}

TEST(Apply, Examples) {
    auto phi3 = aut({"b", "c", "ab"});
    EXPECT_EQ(to_string(phi3.apply(parse_word("c"))), "ab");
    EXPECT_EQ(to_string(phi3.apply(parse_word("Ca"))), "BAb");
    EXPECT_EQ(to_string(FreeAutomorphism::identity(3).apply(parse_word("abc"))), "abc");
    EXPECT_THROW(aut({"b", "a"}).apply(parse_word("c")), RankMismatch);
}

TEST(Apply, MatchesSubstitutionAndIsHomomorphism) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
        auto phi = random_product(rng, 3, 6);
        std::string u = random_text(rng, 3, 6), v = random_text(rng, 3, 6);
        EXPECT_EQ(to_string(phi.apply(parse_word(u))), naive_apply(phi.image_strings(), u));
        EXPECT_EQ(phi.apply(parse_word(u) * parse_word(v)), phi.apply(parse_word(u)) * phi.apply(parse_word(v)));
    }
}

TEST(Compose, Examples) {
    auto phi3 = aut({"b", "c", "ab"});
    EXPECT_EQ(compose(phi3, phi3), aut({"c", "ab", "bc"}));
    EXPECT_EQ(compose(phi3, FreeAutomorphism::identity(3)), phi3);
    EXPECT_TRUE(compose(phi3, invert(phi3)).is_identity());
    EXPECT_THROW(compose(phi3, aut({"b", "a"})), RankMismatch);
}

TEST(Compose, OrderAndAssociativity) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        auto f = random_product(rng, 3, 5), g = random_product(rng, 3, 5), h = random_product(rng, 3, 5);
        std::string w = random_text(rng, 3, 5);
        EXPECT_EQ(compose(f, g).apply(parse_word(w)), f.apply(g.apply(parse_word(w))));
        EXPECT_EQ(compose(compose(f, g), h), compose(f, compose(g, h)));
    }
}

TEST(Invert, Examples) {
    EXPECT_EQ(invert(aut({"b", "c", "ab"})), aut({"cA", "a", "b"}));
    EXPECT_EQ(invert(FreeAutomorphism::identity(2)), FreeAutomorphism::identity(2));
    EXPECT_EQ(invert(aut({"ab", "b"})), aut({"aB", "b"}));
}

TEST(Invert, RoundTripsOnNielsenProducts) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 100; ++t) {
        auto phi = random_product(rng, 3, 10);
        auto inv = invert(phi);
        EXPECT_TRUE(compose(phi, inv).is_identity());
        EXPECT_TRUE(compose(inv, phi).is_identity());
        EXPECT_EQ(invert(inv), phi);
    }
}

TEST(IsBasis, Examples) {
    EXPECT_TRUE(is_basis({parse_word("b"), parse_word("c"), parse_word("ab")}, 3).is_basis);
    EXPECT_FALSE(is_basis({parse_word("a"), parse_word("a")}, 2).is_basis);
    EXPECT_FALSE(is_basis({parse_word("ab"), parse_word("ba")}, 2).is_basis);
    EXPECT_THROW(aut({"ab", "ba"}), NotAnAutomorphism);
    EXPECT_THROW(invert(FreeAutomorphism::trusted(2, {parse_word("a"), parse_word("a")})), NotAnAutomorphism);
}

TEST(IsBasis, NonBasisWithUnitDeterminant) {
    // abelianizes to a basis but generates a proper subgroup
    EXPECT_FALSE(is_basis({parse_word("abAB"), parse_word("b")}, 2).is_basis);
    EXPECT_FALSE(is_basis({parse_word("aabAB"), parse_word("b")}, 2).is_basis);
}

TEST(OuterClass, ConjugatesAgree) {
    auto phi = aut({"b", "c", "ab"});
    auto conj = FreeAutomorphism::trusted(3, conjugate_images(phi.images(), parse_word("aC")));
    EXPECT_TRUE(same_outer_class(phi, conj));
    EXPECT_FALSE(same_outer_class(phi, aut({"c", "ab", "bc"})));
}

TEST(Stallings, FoldsWedgeOfImages) {
    StallingsGraph sg({parse_word("b"), parse_word("c"), parse_word("ab")});
    EXPECT_TRUE(sg.fold());
    sg.prune_to_core(true);
    EXPECT_EQ(sg.alive_vertex_count(), 1);
    EXPECT_EQ(sg.alive_edge_count(), 3);
}
