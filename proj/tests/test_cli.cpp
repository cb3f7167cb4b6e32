#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("cmech_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    // Runs the CLI inside the scratch directory and returns its exit status.
    int run(const std::string& args, const std::string& env = "") {
        const std::string cmd = "cd '" + dir_.string() + "' && " + env + " '" CMECH_CLI_PATH "' " + args +
                                " >stdout.txt 2>stderr.txt";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string read(const std::string& name) const {
        std::ifstream in(dir_ / name, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    fs::path dir_;
};

std::vector<double> last_row(const std::string& csv) {
    std::istringstream is(csv);
    std::string line, last;
    while (std::getline(is, line))
        if (!line.empty()) last = line;
    std::vector<double> v;
    std::stringstream ss(last);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    return v;
}

}  // namespace

TEST_F(Cli, SimulateBothFrames) {
    ASSERT_EQ(run("simulate --potential 'i*z^3' --mass 0.5 --z0 0 --p0 1 --t-end 5 --frame both"), 0)
        << read("stderr.txt");
    const std::string csv = read("traj.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,x,y,p,q,x1,p1,x2,p2,Hr,Hi");
    const json summary = json::parse(read("traj.json"));
    EXPECT_EQ(summary["terminated_by"], "t_end");
    EXPECT_LE(summary["drift_Hr"].get<double>(), 1e-8);
    EXPECT_LE(summary["drift_Hi"].get<double>(), 1e-8);
    EXPECT_LE(summary["darboux"]["drift_Hi"].get<double>(), 1e-8);
    EXPECT_TRUE(summary["equivalence"]["passed"].get<bool>());
    EXPECT_DOUBLE_EQ(last_row(csv)[0], 5.0);
}

TEST_F(Cli, SimulateHarmonicPeriod) {
    ASSERT_EQ(run("simulate --potential 'z^2' --z0 1 --p0 0 --t-end 3.14159265 --out h.csv"), 0);
    const auto row = last_row(read("h.csv"));
    EXPECT_NEAR(row[1], 1.0, 1e-6);
    EXPECT_NEAR(row[3], 0.0, 1e-6);
    EXPECT_TRUE(fs::exists(dir_ / "h.json"));
}

TEST_F(Cli, SimulateWithEveryMethodAndBuiltinName) {
    for (const char* m : {"rk4", "rk45", "split"}) {
        ASSERT_EQ(run(std::string("simulate --potential iz3 --t-end 1 --dt 0.01 --frame darboux --method ") + m +
                      " --out " + m + ".csv"),
                  0)
            << m << read("stderr.txt");
        const auto row = last_row(read(std::string(m) + ".csv"));
        EXPECT_EQ(row.size(), 11u);
        EXPECT_DOUBLE_EQ(row[0], 1.0);
    }
}

TEST_F(Cli, SimulateRejectsNonEntirePotential) {
    EXPECT_EQ(run("simulate --potential 'sqrt(z)'"), 1);
    EXPECT_NE(read("stderr.txt").find("UnsupportedFunction"), std::string::npos);
    EXPECT_EQ(run("simulate --potential 'z^2 +'"), 1);
    EXPECT_EQ(run("simulate --z0 1+2"), 1);
    EXPECT_EQ(run("simulate --method leapfrog"), 1);
    EXPECT_EQ(run("simulate --mass -1"), 1);
    EXPECT_EQ(run("no-such-command"), 1);
}

TEST_F(Cli, OutputsAreReproducible) {
    ASSERT_EQ(run("simulate --potential exp_iz --z0 0.2 --p0 0.5+0.1i --t-end 2 --frame both --out a.csv"), 0);
    ASSERT_EQ(run("simulate --potential exp_iz --z0 0.2 --p0 0.5+0.1i --t-end 2 --frame both --out b.csv"), 0);
    EXPECT_EQ(read("a.csv"), read("b.csv"));
    ASSERT_EQ(run("verify-symplectic --random 5 --seed 3 --out s1.json"), 0);
    ASSERT_EQ(run("verify-symplectic --random 5 --seed 3 --out s2.json"), 0);
    EXPECT_EQ(read("s1.json"), read("s2.json"));
}

TEST_F(Cli, VerifyTable) {
    ASSERT_EQ(run("verify-table1 --seed 42 --out table.json"), 0);
    const json report = json::parse(read("table.json"));
    EXPECT_EQ(report["discrepant"], 2);
    for (const auto& row : report["rows"]) {
        const std::string key = row["potential"].get<std::string>() + "/" + row["column"].get<std::string>();
        const bool expect_bad = key == "iz/h" || key == "-z4/Hi";
        EXPECT_EQ(row["status"], expect_bad ? "DISCREPANT" : "PASS") << key;
    }
}

TEST_F(Cli, VerifySymplecticSweep) {
    ASSERT_EQ(run("verify-symplectic --random 100 --seed 42"), 0);
    EXPECT_NE(read("stderr.txt").find("100/100 PASS"), std::string::npos);
    const json report = json::parse(read("stdout.txt"));
    EXPECT_EQ(report["passed"], 100);
}

TEST_F(Cli, SeedFromEnvironment) {
    ASSERT_EQ(run("verify-symplectic --random 2 --out env.json", "CMECH_SEED=7"), 0);
    ASSERT_EQ(run("verify-symplectic --random 2 --seed 7 --out flag.json"), 0);
    EXPECT_EQ(read("env.json"), read("flag.json"));
    EXPECT_EQ(json::parse(read("env.json"))["seed"], 7);
}

TEST_F(Cli, DarbouxFrames) {
    ASSERT_EQ(run("darboux --a 0 --b 0 --alpha 0"), 0);
    const json f = json::parse(read("stdout.txt"));
    EXPECT_EQ(f["r_plus"], 0.5);
    EXPECT_EQ(f["r_minus"], 0.5);
    const json S = f["S"];
    int nonzero = 0;
    for (const auto& row : S)
        for (const auto& x : row)
            if (x.get<double>() != 0.0) {
                EXPECT_EQ(std::abs(x.get<double>()), 1.0);
                ++nonzero;
            }
    EXPECT_EQ(nonzero, 4);
    EXPECT_EQ(run("darboux --a 0 --b 0 --alpha 1"), 3);
    EXPECT_EQ(run("darboux --a 1 --b -1 --alpha 0.3+0.2i"), 0);
}

TEST_F(Cli, HiFlowAndConstrain) {
    ASSERT_EQ(run("hi-flow --potential iz3 --xi0 0.1,0.2,0.3,0.4 --eps-end 1 --d-eps 0.1 --out flow.csv"), 0);
    const json s = json::parse(read("stdout.txt"));
    EXPECT_LE(s["drift_Hr"].get<double>(), 1e-8);
    EXPECT_LE(s["drift_Hi"].get<double>(), 1e-8);
    EXPECT_DOUBLE_EQ(last_row(read("flow.csv"))[0], 1.0);

    ASSERT_EQ(run("constrain --potential iz --x1 1.4142135623730951 --p1 1 --p2 0"), 0);
    const json c = json::parse(read("stdout.txt"));
    EXPECT_NEAR(c["x2"].get<double>(), -1.0, 1e-15);
    EXPECT_EQ(run("constrain --potential iz --x1 1.4142135623730951 --p1 0 --p2 0"), 2);
    EXPECT_EQ(run("constrain --x1 1"), 1);
}
