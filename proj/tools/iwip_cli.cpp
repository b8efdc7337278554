#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iwip/iwip.hpp"

using namespace iwip;

namespace {

enum Exit { ok = 0, inconclusive = 1, parse_error = 2, validation_error = 3, internal_error = 4 };

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out);
    f << text;
}

std::string render(const json& j, const std::string& format) {
    if (format == "json") return j.dump(2) + "\n";
    // text: one key per line, nested values compact
    std::ostringstream os;
    for (auto it = j.begin(); it != j.end(); ++it) os << it.key() << ": " << it.value().dump() << "\n";
    return os.str();
}

FreeAutomorphism load_automorphism(const std::string& path) {
    std::vector<std::string> warnings;
    auto phi = automorphism_from_json(read_json_file(path), path, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    return phi;
}

std::vector<int> parse_checkpoints(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ParseError("--checkpoints: \"" + item + "\" is not an integer");
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Train tracks, ideal Whitehead graphs and random walks in Out(F_r)"};
    app.require_subcommand(0, 1);
    bool show_version = false, strict = false;
    app.add_flag("--version", show_version, "Print toolkit and schema versions");
    app.add_flag("--strict", strict, "Exit 1 when the outcome is inconclusive");

    std::string format = "json", out;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));
        sub->add_option("-o,--out", out, "Output file (default stdout)");
        sub->add_flag("--strict", strict, "Exit 1 when the outcome is inconclusive");
    };

    AnalysisLimits limits;
    bool trace = false;

    std::string input;
    auto* analyze_cmd = app.add_subcommand("analyze", "Classify an automorphism");
    analyze_cmd->add_option("input", input, "Automorphism JSON")->required();
    analyze_cmd->add_flag("--trace", trace, "Include the fold trace");
    analyze_cmd->add_option("--max-steps", limits.max_steps, "Train track step cap");
    analyze_cmd->add_option("--slack", limits.pnp_slack, "PNP search slack (>= 1)");
    add_common(analyze_cmd);

    auto* tt_cmd = app.add_subcommand("traintrack", "Find a train track representative");
    tt_cmd->add_option("input", input, "Automorphism JSON")->required();
    tt_cmd->add_flag("--trace", trace, "Include the fold trace");
    tt_cmd->add_option("--max-steps", limits.max_steps, "Step cap");
    add_common(tt_cmd);

    std::string second;
    auto* dist_cmd = app.add_subcommand("distance", "Lipschitz distance between two marked graphs");
    dist_cmd->add_option("first", input, "Graph JSON")->required();
    dist_cmd->add_option("second", second, "Graph JSON")->required();
    add_common(dist_cmd);

    auto* inv_cmd = app.add_subcommand("invert", "Inverse automorphism");
    inv_cmd->add_option("input", input, "Automorphism JSON")->required();
    add_common(inv_cmd);

    WalkConfig cfg;
    int rank = 0;
    std::string checkpoints = "5,10,20,40", mu_path;
    std::uint64_t seed = 0;
    auto* walk_cmd = app.add_subcommand("walk", "Random walk experiment");
    walk_cmd->add_option("--rank", rank, "Rank of the free group")->required();
    walk_cmd->add_option("--steps", cfg.steps, "Walk length");
    walk_cmd->add_option("--checkpoints", checkpoints, "Comma separated checkpoint list");
    walk_cmd->add_option("--trials", cfg.trials, "Number of trials");
    walk_cmd->add_option("--seed", seed, "Master seed")->required();
    walk_cmd->add_option("--mu", mu_path, "Step distribution JSON")->required();
    walk_cmd->add_option("-o,--out", out, "CSV output (default stdout)");
    walk_cmd->add_option("--records", second, "Per-record JSON output");
    walk_cmd->add_flag("--also-inverse", cfg.also_inverse, "Also analyze the inverse walk");
    walk_cmd->add_option("--max-steps", cfg.limits.max_steps, "Train track step cap");
    walk_cmd->add_option("--slack", cfg.limits.pnp_slack, "PNP search slack (>= 1)");
    walk_cmd->add_option("--letter-budget", cfg.letter_budget, "Total image letters before a trial is truncated");
    walk_cmd->add_option("--threads", cfg.threads, "Worker threads");
    walk_cmd->add_flag("--strict", strict, "Exit 1 when some record is unresolved");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return parse_error;
    }

    try {
        if (show_version) {
            std::cout << "iwip " << toolkit_version << " (schema " << schema_version << ")\n";
            return ok;
        }
        if (*analyze_cmd) {
            if (limits.pnp_slack < 1) throw ValidationError("--slack must be at least 1");
            auto phi = load_automorphism(input);
            limits.record_trace = trace;
            auto a = analyze(phi, limits);
            json j = to_json(a, trace);
            emit(render(j, format), out);
            bool unresolved = a.train_track.outcome == TrainTrackOutcome::Inconclusive ||
                              (a.pnp_searched && a.pnp.outcome == PnpOutcome::Inconclusive);
            return strict && unresolved ? inconclusive : ok;
        }
        if (*tt_cmd) {
            auto phi = load_automorphism(input);
            TrainTrackOptions opt;
            opt.max_steps = limits.max_steps;
            opt.record_trace = trace;
            auto r = find_train_track(phi, opt);
            emit(render(to_json(r, trace), format), out);
            return strict && r.outcome == TrainTrackOutcome::Inconclusive ? inconclusive : ok;
        }
        if (*dist_cmd) {
            OuterSpacePoint x, y;
            try {
                x = normalize_volume(graph_from_json(read_json_file(input), input));
                y = normalize_volume(graph_from_json(read_json_file(second), second));
            } catch (const InvalidGraph& e) {
                throw ValidationError(e.what());
            }
            if (x.rank() != y.rank()) throw ValidationError("graphs have different ranks");
            auto f = lipschitz_distance(x, y);
            auto b = lipschitz_distance(y, x);
            json j = {{"d_cv_forward", num(f.d_cv)},
                      {"d_cv_backward", num(b.d_cv)},
                      {"d_sym", num(f.d_cv + b.d_cv)},
                      {"witness_loop", to_string(f.witness_word)},
                      {"witness_shape", to_string(f.witness.shape)},
                      {"witness_loop_backward", to_string(b.witness_word)}};
            emit(render(j, format), out);
            return ok;
        }
        if (*inv_cmd) {
            auto phi = load_automorphism(input);
            emit(render(to_json(invert(phi)), format), out);
            return ok;
        }
        if (*walk_cmd) {
            cfg.seed = seed;
            cfg.checkpoints = parse_checkpoints(checkpoints);
            auto mu = distribution_from_json(read_json_file(mu_path), mu_path);
            if (mu.rank != rank)
                throw ValidationError("--rank " + std::to_string(rank) + " but " + mu_path + " has rank " +
                                      std::to_string(mu.rank));
            if (cfg.limits.pnp_slack < 1) throw ValidationError("--slack must be at least 1");
            try {
                cfg.validate();
            } catch (const std::invalid_argument& e) {
                throw ValidationError(e.what());
            }
            auto rep = run_experiment(mu, cfg);
            emit(rep.csv(), out);
            if (!second.empty()) {
                json recs = json::array();
                auto add = [&](const CheckpointRecord& r) {
                    json k = json::array();
                    for (int x : r.k_list) k.push_back(x);
                    recs.push_back({{"trial", r.trial},
                                    {"n", r.n},
                                    {"inverse", r.inverse},
                                    {"truncated", r.truncated},
                                    {"train_track", to_string(r.train_track)},
                                    {"lambda", num(r.lambda)},
                                    {"fully_irreducible", to_string(r.fully_irreducible)},
                                    {"ageometric", to_string(r.ageometric)},
                                    {"k_list", k},
                                    {"index", r.index ? json(to_string(*r.index)) : json(nullptr)},
                                    {"triangular", r.triangular},
                                    {"principal", r.principal}});
                };
                for (const auto& r : rep.records) add(r);
                for (const auto& r : rep.inverse_records) add(r);
                emit(recs.dump(1) + "\n", second);
            }
            bool unresolved = false;
            for (const auto& r : rep.records) unresolved |= r.unresolved();
            for (const auto& r : rep.inverse_records) unresolved |= r.unresolved();
            return strict && unresolved ? inconclusive : ok;
        }
        std::cout << app.help();
        return ok;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return parse_error;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return validation_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return internal_error;
    }
}
