#pragma once

#include <cmath>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "iwip/outer_space.hpp"
#include "iwip/random_walk.hpp"

namespace iwip {

inline constexpr const char* toolkit_version = "0.1.0";
inline constexpr const char* schema_version = "1";

using json = nlohmann::ordered_json;

/// Well-formed input violating a precondition.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline json parse_json_text(const std::string& text, const std::string& where = "input") {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(where + ": " + e.what());
    }
}

namespace detail {

inline const json& field(const json& j, const char* name, const std::string& where) {
    if (!j.is_object()) throw ParseError(where + ": expected an object");
    auto it = j.find(name);
    if (it == j.end()) throw ParseError(where + ": missing field \"" + name + "\"");
    return *it;
}

inline int int_field(const json& j, const char* name, const std::string& where) {
    const json& v = field(j, name, where);
    if (!v.is_number_integer()) throw ParseError(where + ": field \"" + name + "\" must be an integer");
    return v.get<int>();
}

inline std::string tuple_text(const std::vector<std::string>& images) {
    std::string s = "[";
    for (std::size_t i = 0; i < images.size(); ++i) s += (i ? ", " : "") + std::string("\"") + images[i] + "\"";
    return s + "]";
}

}  // namespace detail

/// Unreduced images are reduced; a note per image goes to `warnings`.
inline FreeAutomorphism automorphism_from_json(const json& j, const std::string& where = "automorphism",
                                               std::vector<std::string>* warnings = nullptr) {
    const int rank = detail::int_field(j, "rank", where);
    if (rank < 1) throw ValidationError(where + ": rank must be positive");
    const json& ims = detail::field(j, "images", where);
    if (!ims.is_array()) throw ParseError(where + ": field \"images\" must be an array");
    std::vector<std::string> text;
    for (std::size_t i = 0; i < ims.size(); ++i) {
        if (!ims[i].is_string()) throw ParseError(where + ".images[" + std::to_string(i) + "]: expected a string");
        text.push_back(ims[i].get<std::string>());
    }
    if (static_cast<int>(text.size()) != rank)
        throw ValidationError(where + ": " + std::to_string(text.size()) + " images for rank " + std::to_string(rank));
    std::vector<Word> words;
    for (std::size_t i = 0; i < text.size(); ++i) {
        try {
            auto letters = parse_letters(text[i]);
            if (!is_reduced(letters) && warnings)
                warnings->push_back(where + ".images[" + std::to_string(i) + "]: \"" + text[i] + "\" was not reduced");
            words.push_back(Word::reduce(letters, rank));
        } catch (const IndexOutOfRank& e) {
            throw ValidationError(where + ".images[" + std::to_string(i) + "]: " + e.what());
        } catch (const std::exception& e) {
            throw ParseError(where + ".images[" + std::to_string(i) + "]: " + e.what());
        }
    }
    auto cert = is_basis(words, rank);
    if (!cert.is_basis)
        throw ValidationError(where + ": images " + detail::tuple_text(text) + " do not form a basis: " + cert.witness);
    return FreeAutomorphism::trusted(rank, std::move(words));
}

inline json to_json(const FreeAutomorphism& phi) {
    return {{"rank", phi.rank()}, {"images", phi.image_strings()}};
}

namespace detail {

inline std::string upper(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

inline std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace detail

/// {"vertices": n, "edges": [{"id": "e1", "from": 0, "to": 1, "length": 0.25}],
/// "basepoint": 0, "marking": ["e1 E2", ...]}. Vertices are 0-based; an
/// uppercase id is the reversed edge; missing lengths default to uniform.
inline MarkedGraph graph_from_json(const json& j, const std::string& where = "graph") {
    MarkedGraph mg;
    mg.graph.vertex_count = detail::int_field(j, "vertices", where);
    const json& edges = detail::field(j, "edges", where);
    if (!edges.is_array()) throw ParseError(where + ": field \"edges\" must be an array");
    const int ne = static_cast<int>(edges.size());
    std::map<std::string, int> id;
    bool any_length = false, all_length = true;
    std::vector<double> len(ne, ne ? 1.0 / ne : 0.0);
    for (int i = 0; i < ne; ++i) {
        std::string w = where + ".edges[" + std::to_string(i) + "]";
        const json& name = detail::field(edges[i], "id", w);
        if (!name.is_string()) throw ParseError(w + ": field \"id\" must be a string");
        std::string n = name.get<std::string>();
        if (n.empty() || n != detail::lower(n) || n == detail::upper(n))
            throw ValidationError(w + ": edge id \"" + n + "\" must be lowercase with at least one letter");
        if (!id.emplace(n, i).second) throw ValidationError(w + ": duplicate edge id \"" + n + "\"");
        int a = detail::int_field(edges[i], "from", w), b = detail::int_field(edges[i], "to", w);
        mg.graph.add_edge(a, b);
        auto it = edges[i].find("length");
        if (it != edges[i].end()) {
            if (!it->is_number()) throw ParseError(w + ": field \"length\" must be a number");
            len[i] = it->get<double>();
            any_length = true;
        } else {
            all_length = false;
        }
    }
    if (any_length && !all_length) throw ValidationError(where + ": lengths must be given for all edges or none");
    mg.graph.length = len;
    mg.basepoint = detail::int_field(j, "basepoint", where);
    const json& mk = detail::field(j, "marking", where);
    if (!mk.is_array()) throw ParseError(where + ": field \"marking\" must be an array");
    for (std::size_t i = 0; i < mk.size(); ++i) {
        std::string w = where + ".marking[" + std::to_string(i) + "]";
        if (!mk[i].is_string()) throw ParseError(w + ": expected a string of edge ids");
        std::istringstream ss(mk[i].get<std::string>());
        EdgePath p;
        for (std::string tok; ss >> tok;) {
            auto it = id.find(detail::lower(tok));
            if (it == id.end() || (tok != detail::lower(tok) && tok != detail::upper(tok)))
                throw ValidationError(w + ": unknown edge \"" + tok + "\"");
            p.push_back(tok == detail::lower(tok) ? forward_half(it->second) : reversed(forward_half(it->second)));
        }
        mg.marking.push_back(std::move(p));
    }
    try {
        mg.validate();
    } catch (const InvalidGraph& e) {
        throw ValidationError(where + ": " + e.what());
    }
    return mg;
}

inline json to_json(const MarkedGraph& mg) {
    json edges = json::array();
    for (int e = 0; e < mg.graph.edge_count(); ++e)
        edges.push_back({{"id", edge_name(e)}, {"from", mg.graph.from[e]}, {"to", mg.graph.to[e]}, {"length", mg.graph.length[e]}});
    json marking = json::array();
    for (const auto& p : mg.marking) marking.push_back(path_to_string(p));
    return {{"vertices", mg.graph.vertex_count}, {"edges", edges}, {"basepoint", mg.basepoint}, {"marking", marking}};
}

inline json to_json(const GraphMap& g) {
    json images = json::array();
    for (const auto& p : g.edge_image) images.push_back(path_to_string(p));
    json verts = json::array();
    for (int v : g.vertex_image) verts.push_back(v);
    return {{"graph", to_json(g.graph)}, {"vertex_images", verts}, {"edge_images", images}};
}

/// {"rank", "support": [{"images", "p"}]}
inline StepDistribution distribution_from_json(const json& j, const std::string& where = "mu") {
    StepDistribution mu;
    mu.rank = detail::int_field(j, "rank", where);
    const json& sup = detail::field(j, "support", where);
    if (!sup.is_array()) throw ParseError(where + ": field \"support\" must be an array");
    for (std::size_t i = 0; i < sup.size(); ++i) {
        std::string w = where + ".support[" + std::to_string(i) + "]";
        json a = {{"rank", mu.rank}, {"images", detail::field(sup[i], "images", w)}};
        auto phi = automorphism_from_json(a, w);
        const json& p = detail::field(sup[i], "p", w);
        if (!p.is_number()) throw ParseError(w + ": field \"p\" must be a number");
        mu.support.push_back({phi, p.get<double>()});
    }
    try {
        mu.validate();
    } catch (const InvalidDistribution& e) {
        throw ValidationError(where + ": " + e.what());
    }
    return mu;
}

inline json to_json(const StepDistribution& mu) {
    json sup = json::array();
    for (const auto& [f, p] : mu.support) sup.push_back({{"images", f.image_strings()}, {"p", p}});
    return {{"rank", mu.rank}, {"support", sup}};
}

/// Floats rendered with 12 significant digits.
inline json num(double x) {
    if (!std::isfinite(x)) return nullptr;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return json::parse(buf);
}

inline json steps_json(const std::vector<Step>& trace) {
    json a = json::array();
    for (const auto& s : trace) a.push_back({{"kind", s.kind}, {"detail", s.detail}, {"graph", to_json(s.graph)}});
    return a;
}

inline json to_json(const TrainTrackResult& r, bool trace = false) {
    json j = {{"outcome", to_string(r.outcome)}, {"steps", r.steps}};
    if (r.outcome == TrainTrackOutcome::TrainTrack) j["lambda"] = num(r.lambda);
    j["map"] = to_json(r.map);
    if (r.outcome == TrainTrackOutcome::ReductionWitness) {
        json edges = json::array();
        for (int e : r.invariant_edges) edges.push_back(edge_name(e));
        json factors = json::array();
        for (const auto& f : r.invariant_factors) {
            json b = json::array();
            for (const auto& w : f) b.push_back(to_string(w));
            factors.push_back(b);
        }
        j["invariant_edges"] = edges;
        j["invariant_factors"] = factors;
    }
    json hist = json::array();
    for (double l : r.lambda_history) hist.push_back(num(l));
    j["lambda_history"] = hist;
    if (trace) j["trace"] = steps_json(r.trace);
    return j;
}

inline json to_json(const Analysis& a, bool trace = false) {
    const auto& c = a.classification;
    json j;
    j["lambda"] = a.train_track.outcome == TrainTrackOutcome::TrainTrack ? num(a.train_track.lambda) : json(nullptr);
    json k = json::array();
    if (a.ideal)
        for (int x : a.ideal->k_list()) k.push_back(x);
    j["k_list"] = k;
    j["index"] = a.index ? json(to_string(*a.index)) : json(nullptr);
    j["flags"] = {{"fully_irreducible", to_string(c.fully_irreducible)},
                  {"witness", c.witness},
                  {"ageometric", to_string(c.ageometric)},
                  {"triangular", c.triangular},
                  {"principal", c.principal}};
    j["pnp_status"] = a.pnp_searched ? to_string(a.pnp.outcome) : "NotSearched";
    j["rotationless_power"] = a.whitehead ? json(a.whitehead->power) : json(nullptr);
    j["train_track"] = to_string(a.train_track.outcome);
    j["ideal_whitehead_provisional"] = a.ideal ? json(a.ideal->provisional) : json(nullptr);
    if (trace) j["trace"] = steps_json(a.train_track.trace);
    return j;
}

}  // namespace iwip
