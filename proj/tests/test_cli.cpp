// Runs the flexcross binary and checks outputs and exit codes.

#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

class Cli : public ::testing::Test {
protected:
    fs::path dir;

    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir = fs::temp_directory_path() / (std::string("flexcross_cli_") + info->name());
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string path(const std::string& name) const { return (dir / name).string(); }

    int run(const std::string& args) const {
        const std::string cmd = std::string(FLEXCROSS_BIN) + " " + args + " 2>" + path("stderr.txt");
        const int st = std::system(cmd.c_str());
        return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    }

    std::string slurp(const std::string& name) const {
        std::ifstream in(path(name));
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    void put(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }
};

}  // namespace

TEST_F(Cli, ConstructIsDeterministic) {
    ASSERT_EQ(run("witness rational spherical 2,1 0.2 --out " + path("s.json")), 0);
    ASSERT_EQ(run("construct " + path("s.json") + " --seed 4 --out " + path("p1.json")), 0);
    ASSERT_EQ(run("construct " + path("s.json") + " --seed 4 --out " + path("p2.json")), 0);
    EXPECT_EQ(slurp("p1.json"), slurp("p2.json"));
    const auto p = json::parse(slurp("p1.json"));
    EXPECT_EQ(p["classification"]["classification"], "spherical");
    EXPECT_EQ(p["G"].size(), 3u);
    EXPECT_TRUE(p.contains("butterfly"));
    EXPECT_TRUE(p["biquad"].contains("E"));
}

TEST_F(Cli, MalformedJsonIsExit2WithLocation) {
    put("bad.json", "{\n  \"curve\": [1,\n");
    EXPECT_EQ(run("construct " + path("bad.json")), 2);
    EXPECT_NE(slurp("stderr.txt").find("line"), std::string::npos);
    put("bad2.json", R"({"curve": {"family": "rational"}, "blocks": [[1,2,3]], "lambda": [1,2,3]})");
    EXPECT_EQ(run("verify " + path("bad2.json")), 2);
    EXPECT_EQ(run("construct " + path("missing.json")), 2);
    EXPECT_EQ(run("nosuchcommand"), 2);
    EXPECT_EQ(run("witness rational spherical 1,x,1 0.2"), 2);
}

TEST_F(Cli, ExoticInEuclideanIsExit3) {
    ASSERT_EQ(run("witness exotic spherical 1,1,1 0.01 --out " + path("s.json")), 0);
    auto s = json::parse(slurp("s.json"));
    s["space"] = "euclidean";
    put("e.json", s.dump());
    EXPECT_EQ(run("construct " + path("e.json")), 3);
    EXPECT_NE(slurp("stderr.txt").find("exotic"), std::string::npos);
    EXPECT_EQ(run("witness exotic hyperbolic 1,1,1 0.01"), 3);
}

TEST_F(Cli, FlexWritesFramesAndObj) {
    ASSERT_EQ(run("witness simplest euclidean 3 0.1 --out " + path("s.json")), 0);
    ASSERT_EQ(run("flex " + path("s.json") + " --out " + path("f.json") + " --obj-dir " + path("obj")), 0);
    const auto f = json::parse(slurp("f.json"));
    ASSERT_EQ(f.size(), 200u);
    EXPECT_TRUE(f[0].contains("u"));
    EXPECT_EQ(f[0]["vertices_a"].size(), 3u);
    EXPECT_EQ(f[0]["phi"].size(), 3u);
    int files = 0;
    for (const auto& e : fs::directory_iterator(path("obj"))) {
        (void)e;
        ++files;
    }
    EXPECT_EQ(files, 200);
    std::ifstream obj(path("obj/frame_0000.obj"));
    int v = 0, faces = 0;
    for (std::string line; std::getline(obj, line);) {
        if (line.rfind("v ", 0) == 0) ++v;
        if (line.rfind("f ", 0) == 0) ++faces;
    }
    EXPECT_EQ(v, 6);
    EXPECT_EQ(faces, 8);

    ASSERT_EQ(run("flex " + path("s.json") + " --samples 2 --out " + path("two.json")), 0);
    EXPECT_EQ(json::parse(slurp("two.json")).size(), 2u);
}

TEST_F(Cli, ObjOnlyForEuclideanThree) {
    ASSERT_EQ(run("witness rational spherical 1,1,1 0.2 --out " + path("s.json")), 0);
    EXPECT_EQ(run("flex " + path("s.json") + " --obj-dir " + path("obj") + " --out " + path("f.json")), 4);
    ASSERT_EQ(run("witness simplest euclidean 4 0.1 --out " + path("e4.json")), 0);
    EXPECT_EQ(run("flex " + path("e4.json") + " --obj-dir " + path("obj") + " --out " + path("f.json")), 4);
}

TEST_F(Cli, PoleFramesAreFinite) {
    ASSERT_EQ(run("witness rational spherical 1,1,1 0.2 --out " + path("s.json")), 0);
    ASSERT_EQ(run("flex " + path("s.json") + " --out " + path("f.json")), 0);
    const auto f = json::parse(slurp("f.json"));
    bool saw_pole = false;
    for (const auto& fr : f) {
        saw_pole = saw_pole || fr["u"].get<double>() == 0.0;
        for (const auto& v : fr["vertices_b"])
            for (const auto& x : v) ASSERT_TRUE(x.is_number());
    }
    EXPECT_TRUE(saw_pole);
}

TEST_F(Cli, VerifyExitCodes) {
    ASSERT_EQ(run("witness exotic spherical 1,1,1 0.01 --out " + path("s.json")), 0);
    EXPECT_EQ(run("verify " + path("s.json") + " --out " + path("r.json")), 0);
    EXPECT_TRUE(json::parse(slurp("r.json"))["pass"].get<bool>());

    // tighter than the arithmetic can deliver
    EXPECT_EQ(run("verify " + path("s.json") + " --tol 1e-30 --out " + path("r2.json")), 1);
    EXPECT_FALSE(json::parse(slurp("r2.json"))["pass"].get<bool>());

    // a polytope file with an edited H entry
    ASSERT_EQ(run("construct " + path("s.json") + " --out " + path("p.json")), 0);
    auto p = json::parse(slurp("p.json"));
    p["H"][0][1] = p["H"][0][1].get<double>() + 1e-3;
    put("p_bad.json", p.dump());
    EXPECT_EQ(run("verify " + path("p_bad.json") + " --out " + path("r3.json")), 1);
    EXPECT_NE(slurp("stderr.txt").find("butterfly"), std::string::npos);
    EXPECT_EQ(json::parse(slurp("r3.json"))["first_failure"], "butterfly");

    // an untouched polytope file passes
    EXPECT_EQ(run("verify " + path("p.json") + " --out " + path("r4.json")), 0);
}

TEST_F(Cli, ShippedWitnessesVerify) {
    const char* witnesses[] = {
        "simplest euclidean 3 0.1",       "simplest hyperbolic 3 0.1",  "rational spherical 1,1,1 0.2",
        "rational euclidean 2,1 0.2",     "rational spherical 2,2 0.2", "elliptic1 spherical 1,1,1 0.001",
        "elliptic2 spherical 1,1,1 0.001 --m-prime 1",
        "exotic spherical 1,1,1 0.01 --alpha 2",
    };
    for (const char* w : witnesses) {
        ASSERT_EQ(run(std::string("witness ") + w + " --out " + path("s.json")), 0) << w;
        EXPECT_EQ(run("verify " + path("s.json") + " --samples 80 --out " + path("r.json")), 0) << w;
    }
}

TEST_F(Cli, Classify) {
    put("id.json", R"({"n": 3, "G": [[1,0,0],[0,1,0],[0,0,1]], "H": [[1,0,0],[0,1,0],[0,0,1]]})");
    ASSERT_EQ(run("classify " + path("id.json") + " --out " + path("c.json")), 0);
    EXPECT_EQ(json::parse(slurp("c.json"))["classification"], "spherical");
    put("asym.json", R"({"G": [[1,0.1,0],[0,1,0],[0,0,1]], "H": [[1,0,0],[0,1,0],[0,0,1]]})");
    EXPECT_EQ(run("classify " + path("asym.json")), 2);
}

TEST_F(Cli, CoeffsThenFit) {
    put("curve.json", R"({"family": "elliptic1", "k": 0.6, "sigma": [0, 0.4, 1.1], "m_prime": 3})");
    ASSERT_EQ(run("coeffs " + path("curve.json") + " --out " + path("cc.json")), 0);
    ASSERT_EQ(run("fit " + path("cc.json") + " --out " + path("fit.json")), 0);
    EXPECT_NEAR(json::parse(slurp("fit.json"))["k"].get<double>(), 0.6, 1e-8);

    put("flat.json", R"({"m": 2, "a": [[null, 1], [1, null]], "b": [[null, 1], [1, null]], "e": [[null, 1], [1, null]]})");
    EXPECT_EQ(run("fit " + path("flat.json")), 5);
    put("line.json", R"({"family": "line"})");
    EXPECT_EQ(run("coeffs " + path("line.json")), 5);
}
