#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "json.hpp"

namespace {

const std::string cli = QRT_CLI;
const std::string samples = QRT_SAMPLES;

int run(const std::string& args) {
    int status = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("qrt_cli_" + name)).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Cli, SpectrumAllOnes) {
    auto out = temp_path("ones.csv");
    ASSERT_EQ(run("spectrum --symbol " + samples + "/one.json --partition 2,1 --window 5,5 --out " + out), 0);
    std::stringstream in(slurp(out));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "m_1,m_2,gamma_re,gamma_im,err");
    int rows = 0;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string a, b, re;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        std::getline(ss, re, ',');
        EXPECT_NEAR(std::stod(re), 1.0, 1e-14);
        ++rows;
    }
    EXPECT_EQ(rows, 36);
}

TEST(Cli, SpectrumBox) {
    auto out = temp_path("box.csv");
    ASSERT_EQ(run("spectrum --symbol " + samples + "/box.json --partition 1 --window 200 --out " + out), 0);
    std::stringstream in(slurp(out));
    std::string line;
    std::getline(in, line);
    int m = 0;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string idx, re;
        std::getline(ss, idx, ',');
        std::getline(ss, re, ',');
        EXPECT_EQ(std::stoi(idx), m);
        EXPECT_NEAR(std::stod(re), boost::math::gamma_p(m + 1.0, 1.0), 1e-10);
        ++m;
    }
    EXPECT_EQ(m, 201);
}

TEST(Cli, ConfigErrors) {
    EXPECT_EQ(run("spectrum --symbol /nonexistent.json --window 3"), 2);
    EXPECT_EQ(run("spectrum --symbol " + samples + "/box2.json --partition 1 --window 3"), 2);
    EXPECT_EQ(run("verify nonsense"), 2);
    EXPECT_EQ(run("bogus"), 2);
    EXPECT_EQ(run("spectrum --symbol " + samples + "/one.json --window 5,x"), 2);
}

TEST(Cli, ResourceError) {
    EXPECT_EQ(run("spectrum --symbol " + samples + "/one.json --partition 1,1 --window 5000,5000"), 3);
}

TEST(Cli, VerifyLipschitzWithBox) {
    auto out = temp_path("lip.json");
    ASSERT_EQ(run("verify lipschitz --symbol " + samples + "/box.json --out " + out), 0);
    auto j = nlohmann::json::parse(slurp(out));
    EXPECT_EQ(j["suite"], "lipschitz");
    EXPECT_TRUE(j["pass"].get<bool>());
}

TEST(Cli, VerifyObstruction) { EXPECT_EQ(run("verify obstruction"), 0); }

TEST(Cli, SynthesizeConstant) {
    auto out = temp_path("half_symbol.json");
    ASSERT_EQ(run("synthesize --target " + samples + "/half.json --epsilon 1e-6 --window 50 --out " + out), 0);
    auto sym = nlohmann::json::parse(slurp(out));
    EXPECT_EQ(sym["kind"], "const");
    EXPECT_EQ(sym["value"].get<double>(), 0.5);
    auto report = nlohmann::json::parse(slurp(out + ".report.json"));
    EXPECT_EQ(report["sup_residual"].get<double>(), 0.0);
}

TEST(Cli, SynthesizeSinSqrt) {
    EXPECT_EQ(run("synthesize --target " + samples + "/sin_sqrt.json --epsilon 0.1 --window 400"), 0);
}

TEST(Cli, SynthesizeTargetMissed) {
    EXPECT_EQ(run("synthesize --target " + samples + "/sin_sqrt.json --epsilon 1e-9 --window 100"), 4);
}

TEST(Cli, SynthesizeArityThree) {
    EXPECT_EQ(run("synthesize --target " + samples + "/arity3.json --epsilon 0.1 --window 5,5,5"), 2);
}
