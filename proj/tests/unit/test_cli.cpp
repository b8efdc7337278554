#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

namespace {

std::string data(const std::string& name) { return std::string(IWIP_DATA_DIR) + "/" + name; }

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args) {
    std::string cmd = std::string(IWIP_CLI) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
    int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("iwip_test_" + name)).string();
}

}  // namespace

TEST(Cli, Version) {
    auto r = run("--version");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("0.1.0"), std::string::npos);
    EXPECT_NE(r.out.find("schema 1"), std::string::npos);
}

TEST(Cli, AnalyzePhi3) {
    auto r = run("analyze " + data("phi3.json"));
    ASSERT_EQ(r.code, 0);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["index"], "-3/2");
    EXPECT_EQ(j["k_list"], nlohmann::json::array({5}));
    EXPECT_EQ(j["rotationless_power"], 6);
    EXPECT_EQ(j["flags"]["ageometric"], "CertifiedYes");
}

TEST(Cli, AnalyzeTextAndOutFile) {
    std::string out = temp_path("analyze.txt");
    auto r = run("analyze " + data("phi3.json") + " --format text -o " + out);
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    EXPECT_NE(slurp(out).find("index: \"-3/2\""), std::string::npos);
    std::filesystem::remove(out);
}

TEST(Cli, Distance) {
    auto r = run("distance " + data("rose2_half.json") + " " + data("rose2_third.json"));
    ASSERT_EQ(r.code, 0);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["d_cv_forward"].get<double>(), std::log(4.0 / 3), 1e-9);
    EXPECT_NEAR(j["d_cv_backward"].get<double>(), std::log(1.5), 1e-9);
    EXPECT_NEAR(j["d_sym"].get<double>(), std::log(2.0), 1e-9);
    EXPECT_EQ(j["witness_loop"], "b");
    EXPECT_EQ(run("distance " + data("rose2_half.json") + " " + data("theta.json")).code, 0);
}

TEST(Cli, InvertRoundTrip) {
    std::string out = temp_path("inv.json");
    ASSERT_EQ(run("invert " + data("principal_seed.json") + " -o " + out).code, 0);
    auto j = nlohmann::json::parse(slurp(out));
    EXPECT_EQ(j["images"], nlohmann::json::array({"Ba", "Bc", "Bab"}));
    auto back = run("invert " + out);
    EXPECT_EQ(nlohmann::json::parse(back.out)["images"], nlohmann::json::array({"Aca", "Ac", "Acb"}));
    std::filesystem::remove(out);
}

TEST(Cli, TrainTrackTrace) {
    auto r = run("traintrack " + data("not_train_track.json") + " --trace");
    ASSERT_EQ(r.code, 0);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j.contains("trace"));
    EXPECT_TRUE(j.contains("lambda_history"));
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("analyze " + data("malformed.json")).code, 2);
    EXPECT_EQ(run("analyze " + data("no_such_file.json")).code, 2);
    EXPECT_EQ(run("analyze --no-such-flag " + data("phi3.json")).code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("analyze " + data("not_a_basis.json")).code, 3);
    EXPECT_EQ(run("analyze " + data("out_of_rank.json")).code, 3);
    EXPECT_EQ(run("walk --rank 3 --seed 1 --mu " + data("mu_bad_mass.json")).code, 3);
    EXPECT_EQ(run("walk --rank 2 --seed 1 --mu " + data("mu_reference.json")).code, 3);
    EXPECT_EQ(run("walk --rank 3 --steps 5 --checkpoints 10 --seed 1 --mu " + data("mu_reference.json")).code, 3);
    EXPECT_EQ(run("walk --rank 3 --mu " + data("mu_reference.json")).code, 2);
    EXPECT_EQ(run("distance " + data("rose2_half.json") + " " + data("phi3.json")).code, 2);
    EXPECT_EQ(run("analyze " + data("unreduced.json")).code, 0);
}

TEST(Cli, Strict) {
    EXPECT_EQ(run("traintrack " + data("not_train_track.json") + " --max-steps 0").code, 0);
    EXPECT_EQ(run("traintrack " + data("not_train_track.json") + " --max-steps 0 --strict").code, 1);
    EXPECT_EQ(run("--strict analyze " + data("phi3.json")).code, 0);
}

TEST(Cli, WalkMatchesGolden) {
    const std::string args = "walk --rank 3 --steps 10 --checkpoints 2,5,10 --trials 8 --seed 42 --mu " +
                             data("mu_reference.json") + " --also-inverse";
    auto r = run(args);
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out, slurp(data("golden_walk.csv")));
    std::string recs = temp_path("records.json");
    auto threaded = run(args + " --threads 2 --records " + recs);
    EXPECT_EQ(threaded.out, r.out);
    auto j = nlohmann::json::parse(slurp(recs));
    EXPECT_EQ(j.size(), 48u);
    std::filesystem::remove(recs);
}

TEST(Cli, UnreducedWarnsOnStderr) {
    std::string err = temp_path("stderr.txt");
    std::string cmd = std::string(IWIP_CLI) + " analyze " + data("unreduced.json") + " >/dev/null 2>" + err;
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_NE(slurp(err).find("abB"), std::string::npos);
    std::filesystem::remove(err);
}
