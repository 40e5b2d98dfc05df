#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "discspline/cli.hpp"
#include "test_helpers.hpp"

namespace fs = std::filesystem;
using discspline::run_cli;

namespace {

struct TempDir {
    fs::path dir;
    TempDir() {
        dir = fs::temp_directory_path() / ("discspline_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(dir);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(dir, ec); }
    std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

std::string make_xy(const std::string& path, int n, unsigned seed, bool duplicate = false) {
    auto g = testutil::random_grid(n, seed);
    std::mt19937_64 rng(seed + 1);
    std::normal_distribution<double> noise(0.0, 0.1);
    std::ostringstream os;
    os << "x,y\n";
    os.precision(17);
    for (int i = 0; i < n; ++i) {
        double x = (duplicate && i == 3) ? g[2] : g[i];
        os << x << "," << std::sin(5.0 * g[i]) + noise(rng) << "\n";
    }
    write_file(path, os.str());
    return path;
}

std::vector<std::vector<double>> read_numeric_csv(const std::string& path, std::string& header) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, header);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_CASE("fit with lambda 0 reproduces the data column") {
    TempDir tmp;
    make_xy(tmp / "d.csv", 20, 5);
    std::string out = tmp / "fit.csv";
    int rc = run_cli({"fit", tmp / "d.csv", "--method", "tf", "-k", "2", "--lambda", "0",
                      "--output", out});
    CHECK(rc == 0);
    std::string header;
    auto rows = read_numeric_csv(out, header);
    CHECK(header == "x,theta_hat");
    std::string h2;
    auto data = read_numeric_csv(tmp / "d.csv", h2);
    REQUIRE(rows.size() == data.size());
    for (size_t r = 0; r < rows.size(); ++r) CHECK(rows[r][1] == doctest::Approx(data[r][1]));
}

TEST_CASE("duplicate x exits with code 2") {
    TempDir tmp;
    make_xy(tmp / "dup.csv", 12, 9, /*duplicate=*/true);
    int rc = run_cli({"fit", tmp / "dup.csv", "--lambda", "0.1", "--output", tmp / "o.csv"});
    CHECK(rc == 2);
}

TEST_CASE("ntf fit passes its own --verify check") {
    TempDir tmp;
    make_xy(tmp / "d.csv", 40, 13);
    int rc = run_cli({"fit", tmp / "d.csv", "--method", "ntf", "-k", "3", "--lambda", "0.01",
                      "--verify", "--output", tmp / "o.csv"});
    CHECK(rc == 0);
}

TEST_CASE("bw m=1 and ss m=1 outputs agree to 12 significant digits") {
    TempDir tmp;
    make_xy(tmp / "d.csv", 60, 17);
    REQUIRE(run_cli({"fit", tmp / "d.csv", "--method", "bw", "-m", "1", "--lambda", "0.5",
                     "--output", tmp / "bw.csv"}) == 0);
    REQUIRE(run_cli({"fit", tmp / "d.csv", "--method", "ss", "-m", "1", "--lambda", "0.5",
                     "--output", tmp / "ss.csv"}) == 0);
    std::string h1, h2;
    auto a = read_numeric_csv(tmp / "bw.csv", h1);
    auto b = read_numeric_csv(tmp / "ss.csv", h2);
    REQUIRE(a.size() == b.size());
    for (size_t r = 0; r < a.size(); ++r) {
        char ba[64], bb[64];
        std::snprintf(ba, sizeof(ba), "%.12g", a[r][1]);
        std::snprintf(bb, sizeof(bb), "%.12g", b[r][1]);
        CHECK(std::string(ba) == std::string(bb));
    }
}

TEST_CASE("interp: reproduces design values, modes agree, out-of-range becomes nan") {
    TempDir tmp;
    make_xy(tmp / "d.csv", 30, 21);
    REQUIRE(run_cli({"fit", tmp / "d.csv", "--method", "tf", "-k", "2", "--lambda", "0.005",
                     "--output", tmp / "fit.csv", "--summary", tmp / "fit.json"}) == 0);
    std::string h;
    auto fitted = read_numeric_csv(tmp / "fit.csv", h);

    // query the design points plus midpoints plus an out-of-range point
    std::ostringstream qs;
    qs << "x\n";
    qs.precision(17);
    for (auto& row : fitted) qs << row[0] << "\n";
    for (size_t r = 0; r + 1 < fitted.size(); ++r) qs << 0.5 * (fitted[r][0] + fitted[r + 1][0]) << "\n";
    qs << fitted.back()[0] + 100.0 << "\n";
    write_file(tmp / "q.csv", qs.str());

    REQUIRE(run_cli({"interp", tmp / "fit.json", tmp / "q.csv", "--mode", "explicit",
                     "--output", tmp / "ve.csv"}) == 0);
    REQUIRE(run_cli({"interp", tmp / "fit.json", tmp / "q.csv", "--mode", "implicit",
                     "--output", tmp / "vi.csv"}) == 0);
    auto ve = read_numeric_csv(tmp / "ve.csv", h);
    auto vi = read_numeric_csv(tmp / "vi.csv", h);
    REQUIRE(ve.size() == vi.size());
    for (size_t r = 0; r < fitted.size(); ++r) {
        CHECK(ve[r][1] == doctest::Approx(fitted[r][1]).epsilon(1e-10));
        CHECK(vi[r][1] == doctest::Approx(fitted[r][1]).epsilon(1e-10));
    }
    for (size_t r = 0; r + 1 < ve.size(); ++r)
        CHECK(ve[r][1] == doctest::Approx(vi[r][1]).epsilon(1e-8));
    CHECK(std::isnan(ve.back()[1]));
    CHECK(std::isnan(vi.back()[1]));
}

TEST_CASE("interp agreement on many random queries") {
    TempDir tmp;
    make_xy(tmp / "d.csv", 50, 23);
    REQUIRE(run_cli({"fit", tmp / "d.csv", "--method", "tf", "-k", "3", "--lambda", "0.002",
                     "--output", tmp / "fit.csv", "--summary", tmp / "fit.json"}) == 0);
    std::string h;
    auto fitted = read_numeric_csv(tmp / "fit.csv", h);
    double a = fitted.front()[0], b = fitted.back()[0];
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> ux(a, b);
    std::ostringstream qs;
    qs << "x\n";
    qs.precision(17);
    for (int t = 0; t < 1000; ++t) qs << ux(rng) << "\n";
    write_file(tmp / "q.csv", qs.str());
    REQUIRE(run_cli({"interp", tmp / "fit.json", tmp / "q.csv", "--mode", "explicit",
                     "--output", tmp / "ve.csv"}) == 0);
    REQUIRE(run_cli({"interp", tmp / "fit.json", tmp / "q.csv", "--mode", "implicit",
                     "--output", tmp / "vi.csv"}) == 0);
    auto ve = read_numeric_csv(tmp / "ve.csv", h);
    auto vi = read_numeric_csv(tmp / "vi.csv", h);
    for (size_t r = 0; r < ve.size(); ++r)
        CHECK(std::abs(ve[r][1] - vi[r][1]) <= 1e-8 * std::max(1.0, std::abs(ve[r][1])));
}

TEST_CASE("bench-cond emits one row per size and route, deterministically") {
    TempDir tmp;
    std::string out1 = tmp / "c1.csv", out2 = tmp / "c2.csv";
    REQUIRE(run_cli({"bench-cond", "--n-list", "60,80", "--design", "even", "--reps", "3",
                     "--seed", "7", "--output", out1}) == 0);
    REQUIRE(run_cli({"bench-cond", "--n-list", "60,80", "--design", "even", "--reps", "3",
                     "--seed", "7", "--output", out2}) == 0);
    std::ifstream f1(out1), f2(out2);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());
    // header + 2 sizes x 3 routes
    int lines = 0;
    std::string line;
    std::stringstream s3(s1.str());
    while (std::getline(s3, line))
        if (!line.empty()) lines++;
    CHECK(lines == 1 + 2 * 3);
}

TEST_CASE("basis command tabulates the requested family") {
    TempDir tmp;
    make_xy(tmp / "d.csv", 16, 31);
    REQUIRE(run_cli({"basis", tmp / "d.csv", "-k", "2", "--type", "db", "--mesh", "40",
                     "--output", tmp / "b.csv"}) == 0);
    std::string header;
    auto rows = read_numeric_csv(tmp / "b.csv", header);
    CHECK(rows.size() == 40);
    CHECK(rows[0].size() == 17);  // x plus 16 members
}

TEST_CASE("csv round trip keeps 15 significant digits") {
    TempDir tmp;
    std::ostringstream os;
    os << "x,y\n";
    os.precision(17);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    std::vector<double> xs;
    for (int i = 0; i < 20; ++i) xs.push_back(ux(rng));
    std::sort(xs.begin(), xs.end());
    for (double x : xs) os << x << "," << std::sin(x) << "\n";
    write_file(tmp / "d.csv", os.str());
    REQUIRE(run_cli({"fit", tmp / "d.csv", "--lambda", "0", "--output", tmp / "o.csv"}) == 0);
    std::string h;
    auto rows = read_numeric_csv(tmp / "o.csv", h);
    for (size_t r = 0; r < rows.size(); ++r) {
        CHECK(std::abs(rows[r][0] - xs[r]) <= 1e-15 * std::abs(xs[r]));
        CHECK(std::abs(rows[r][1] - std::sin(xs[r])) <= 1e-15);
    }
}

TEST_CASE("check command: individual suites pass") {
    CHECK(run_cli({"check", "identities"}) == 0);
    CHECK(run_cli({"check", "interpolation"}) == 0);
}
