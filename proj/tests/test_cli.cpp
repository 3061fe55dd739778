#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "varwave/cli.hpp"

namespace fs = std::filesystem;

namespace {

const char* kUnit = R"(
[coefficient]
kind = constant
c = 1

[period]
p = 2
q = 1

[spectrum]
m_max = 11
n_max = 12
)";

const char* kNonlinear = R"(
[nonlinearity]
c_lin = -0.25
c_sat = 0.125
symmetry = split_f1_f2
forcing = cos 1 1 0.5
)";

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::path(::testing::TempDir()) /
               ("varwave_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text) {
        const fs::path p = dir_ / name;
        std::ofstream(p) << text;
        return p.string();
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    static Invocation run(std::vector<std::string> args) {
        args.insert(args.begin(), "varwave");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = varwave::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        return {code, out.str(), err.str()};
    }

    static std::string solver(double alpha, double beta) {
        return "\n[solver]\nalpha = " + std::to_string(alpha) + "\nbeta = " + std::to_string(beta) + "\n";
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, SpectrumCsvOnUnitCoefficient) {
    const auto cfg = write("c.ini", kUnit);
    const Invocation r = run({"spectrum", "--config", cfg, "--nmax", "20"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "n,lambda_sq,defect");
    for (int n = 1; n <= 20; ++n) {
        ASSERT_TRUE(std::getline(lines, line));
        std::istringstream row(line);
        std::string idx, lam;
        std::getline(row, idx, ',');
        std::getline(row, lam, ',');
        EXPECT_EQ(std::stoi(idx), n);
        EXPECT_NEAR(std::stod(lam), n * n, 1e-9);
    }
    EXPECT_FALSE(std::getline(lines, line));
    EXPECT_NE(r.err.find("spectrum:"), std::string::npos);
}

TEST_F(Cli, GapsJson) {
    const auto cfg = write("c.ini", kUnit);
    const Invocation r = run({"gaps", "--config", cfg});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["lambda_lower"].get<double>(), -1.25);
    EXPECT_EQ(j["lambda_upper"].get<double>(), 0.75);
    EXPECT_EQ(j["min_abs_mu"].get<double>(), 0.75);
}

TEST_F(Cli, CheckFailsAtTheEigenvalue) {
    const auto cfg = write("c.ini", std::string(kUnit) + solver(-1.25, 0.65));
    const Invocation r = run({"check", "--config", cfg});
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(nlohmann::json::parse(r.out)["verdict"].get<bool>());
}

TEST_F(Cli, CheckPassesInsideTheGap) {
    const auto cfg = write("c.ini", std::string(kUnit) + solver(-1.15, 0.65));
    const Invocation r = run({"check", "--config", cfg, "--out", path("check.json")});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("verdict pass"), std::string::npos);
    std::ifstream in(path("check.json"));
    EXPECT_TRUE(nlohmann::json::parse(in)["verdict"].get<bool>());
}

TEST_F(Cli, ConfigErrorsExitThree) {
    const auto good = write("c.ini", kUnit);
    EXPECT_EQ(run({"spectrum", "--config", good, "--bogus"}).code, 3);
    EXPECT_EQ(run({"spectrum"}).code, 3);
    EXPECT_EQ(run({"nonsense", "--config", good}).code, 3);
    EXPECT_EQ(run({"spectrum", "--config", path("missing.ini")}).code, 3);
    EXPECT_EQ(run({"spectrum", "--config", write("k.ini", "[coefficient]\nkind = constant\nwidth = 2\n")}).code, 3);
    EXPECT_EQ(run({"spectrum", "--config", write("v.ini", "[coefficient]\nkind = constant\nc = abc\n")}).code, 3);
    EXPECT_EQ(run({"spectrum", "--config", write("s.ini", "[extra]\nx = 1\n")}).code, 3);
    EXPECT_EQ(run({"check", "--config", good}).code, 3);  // no [solver] section
    EXPECT_EQ(run({"check", "--config", write("f.ini", std::string(kUnit) + solver(-1.15, 0.65)), "--format", "csv"}).code, 3);
    EXPECT_EQ(run({"spectrum", "--config", write("t.ini", "[coefficient]\nkind = sampled\n")}).code, 3);
}

TEST_F(Cli, HypothesisFailuresExitOne) {
    const std::string odd_p = "[coefficient]\nkind = constant\n[period]\np = 3\nq = 2\n[spectrum]\nm_max = 5\nn_max = 6\n";
    EXPECT_EQ(run({"check", "--config", write("p.ini", odd_p + solver(-0.5, 0.5))}).code, 1);
    EXPECT_EQ(run({"spectrum", "--config", write("u.ini", "[coefficient]\nkind = constant\nc = -1\n")}).code, 1);
}

TEST_F(Cli, SolveRefusesUnlessForced) {
    const auto cfg = write("c.ini", std::string(kUnit) + kNonlinear + solver(-0.25, 0.8));
    const Invocation refused = run({"solve", "--config", cfg});
    EXPECT_EQ(refused.code, 1);
    EXPECT_NE(refused.err.find("--force"), std::string::npos);
    const Invocation forced = run({"solve", "--config", cfg, "--force"});
    EXPECT_EQ(forced.code, 0) << forced.err;
    EXPECT_LT(nlohmann::json::parse(forced.out)["residual_norm"].get<double>(), 1e-8);
}

TEST_F(Cli, SolveVerifyRoundTripAndDeterminism) {
    const auto cfg = write("c.ini", std::string(kUnit) + kNonlinear + solver(-1.15, 0.65));
    const Invocation a = run({"solve", "--config", cfg, "--out", path("a.json")});
    const Invocation b = run({"solve", "--config", cfg, "--out", path("b.json")});
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    std::ifstream fa(path("a.json")), fb(path("b.json"));
    const std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
    EXPECT_FALSE(sa.empty());
    EXPECT_EQ(sa, sb);

    const Invocation v = run({"verify", "--config", cfg, "--solution", path("a.json")});
    ASSERT_EQ(v.code, 0) << v.err;
    const auto j = nlohmann::json::parse(v.out);
    EXPECT_LT(j["spectral_residual"].get<double>(), 1e-8);
    EXPECT_LT(j["weak_residual"].get<double>(), 1e-6);
    EXPECT_GT(j["apriori_bound"].get<double>(), j["solution_norm"].get<double>());
    EXPECT_GT(j["delta_num"].get<double>(), 0.0);

    EXPECT_EQ(run({"verify", "--config", cfg}).code, 3);
    EXPECT_EQ(run({"verify", "--config", cfg, "--solution", path("a.json"), "--nmax", "10"}).code, 3);
}

TEST_F(Cli, SolveGridCsv) {
    const auto cfg = write("c.ini", std::string(kUnit) + kNonlinear + solver(-1.15, 0.65));
    const Invocation r = run({"solve", "--config", cfg, "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("# gridfield n_t=", 0), 0u);
}

TEST_F(Cli, ProbeUniqueness) {
    const std::string nl = "[nonlinearity]\nc_lin = -0.25\nc_osc = 0.125\nsymmetry = odd_f1_only\n";
    const auto cfg = write("c.ini", std::string(kUnit) + nl + solver(-0.375, -0.125) + "num_starts = 5\nnewton_max_iter = 60\n");
    const Invocation r = run({"probe-uniqueness", "--config", cfg, "--seed", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(nlohmann::json::parse(r.out)["unique_trivial"].get<bool>());
    const auto bad = write("d.ini", std::string(kUnit) + nl + solver(-0.3, -0.125));
    EXPECT_EQ(run({"probe-uniqueness", "--config", bad}).code, 1);
}

TEST_F(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST_F(Cli, RelativeTablePathResolvesAgainstConfig) {
    std::ostringstream table;
    for (int j = 0; j < 257; ++j) table << "2 0 0\n";
    write("u.txt", table.str());
    const auto cfg = write("c.ini", "[coefficient]\nkind = sampled\ntable = u.txt\n");
    const Invocation r = run({"spectrum", "--config", cfg, "--nmax", "5", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(nlohmann::json::parse(r.out)["lambda_sq"][4].get<double>(), 25.0, 1e-9);
}
