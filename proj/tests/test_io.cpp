#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace cmech;

TEST(ComplexLiteral, AcceptedForms) {
    EXPECT_EQ(io::parse_complex_literal("1.5"), Complex(1.5, 0));
    EXPECT_EQ(io::parse_complex_literal("-2"), Complex(-2, 0));
    EXPECT_EQ(io::parse_complex_literal("3i"), Complex(0, 3));
    EXPECT_EQ(io::parse_complex_literal("-i"), Complex(0, -1));
    EXPECT_EQ(io::parse_complex_literal("i"), Complex(0, 1));
    EXPECT_EQ(io::parse_complex_literal("1.0+0.0i"), Complex(1, 0));
    EXPECT_EQ(io::parse_complex_literal("1e-3-2.5e2i"), Complex(1e-3, -250));
    EXPECT_EQ(io::parse_complex_literal(" 0.5 - i "), Complex(0.5, -1));
}

TEST(ComplexLiteral, Rejected) {
    for (const char* bad : {"", "abc", "1+2", "1+2j", "i1", "1ii", "nan", "inf", "1+infi", "--1"})
        EXPECT_THROW(io::parse_complex_literal(bad), ConfigError) << bad;
}

TEST(Format, SeventeenDigitsRoundTrip) {
    test::Sampler rng(107);
    for (int k = 0; k < 1000; ++k) {
        const double x = rng.uniform(-1, 1) * std::pow(10.0, rng.uniform(-30, 30));
        EXPECT_EQ(std::strtod(io::format_double(x).c_str(), nullptr), x);
    }
}

TEST(Csv, HeaderAndColumns) {
    const System sys(builtin_potential("iz3").expr, 0.5);
    IntegratorConfig cfg;
    cfg.t_end = 0.5;
    const Trajectory tr = integrate_complex(sys, 0.0, 1.0, cfg);
    std::ostringstream os;
    io::write_trajectory_csv(os, tr);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "t,x,y,p,q,x1,p1,x2,p2,Hr,Hi");
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
        ASSERT_EQ(v.size(), 11u);
        const RealPhasePoint w{v[1], v[3], v[2], v[4]};
        const DarbouxPoint xi = to_darboux(w);
        EXPECT_NEAR(xi.x1, v[5], 1e-15);
        EXPECT_NEAR(xi.p1, v[6], 1e-15);
        EXPECT_NEAR(xi.x2, v[7], 1e-15);
        EXPECT_NEAR(xi.p2, v[8], 1e-15);
        ++rows;
    }
    EXPECT_EQ(rows, tr.samples.size());
}

TEST(AtomicWrite, ReplacesTheTarget) {
    const auto dir = std::filesystem::temp_directory_path() / "cmech_io_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "out.txt";
    io::atomic_write(path, "first");
    io::atomic_write(path, "second");
    std::ifstream in(path);
    std::string s;
    std::getline(in, s);
    EXPECT_EQ(s, "second");
    EXPECT_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
    std::filesystem::remove_all(dir);
}
