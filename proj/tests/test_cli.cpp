#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "json.hpp"

#include "hill/cli.hpp"

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = hill::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) v.push_back(l);
    return v;
}

std::vector<std::string> cells(const std::string& line) {
    std::vector<std::string> v;
    std::istringstream is(line);
    for (std::string c; std::getline(is, c, ',');) v.push_back(c);
    return v;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("hill_cli_" + name)).string();
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

TEST_CASE("eig csv for the model potential") {
    auto r = run({"eig", "--kind", "dirichlet", "--x0", "0", "--count", "4", "--potential", "model:K=1"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find('\r') == std::string::npos);
    auto ls = lines(r.out);
    REQUIRE(ls.size() == 5);
    CHECK(ls[0] == "kind,index,re,im,mult,residual");
    for (int j = 1; j <= 4; ++j) {
        auto c = cells(ls[j]);
        REQUIRE(c.size() == 6);
        CHECK(c[0] == "dirichlet");
        CHECK(std::stoi(c[1]) == j);
        const double re = std::stod(c[2]);
        CHECK(re > j * j - 0.5);
        CHECK(re < j * j);
        CHECK(c[4] == "1");
    }
    // 12 significant digits
    CHECK(cells(ls[1])[2] == "0.599950184557");
}

TEST_CASE("trace and verify examples") {
    auto t = run({"trace", "--kind", "dirichlet", "--x", "0", "--terms", "20", "--potential", "model:K=0"});
    REQUIRE(t.code == 0);
    auto ls = lines(t.out);
    REQUIRE(ls.size() == 21);
    CHECK(ls[0] == "x,m,S_re,S_im,err");
    CHECK(cells(ls[20])[1] == "20");
    CHECK(std::stod(cells(ls[20])[4]) == 0.0);

    auto v = run({"verify", "--suite", "signs", "--K", "0.5", "--n", "5", "--out", "json"});
    REQUIRE(v.code == 0);
    auto j = nlohmann::json::parse(v.out);
    CHECK(j["passed"] == true);
    CHECK(j["checks"].size() == 27);
    for (const auto& c : j["checks"]) CHECK(c["passed"] == true);

    auto loc = run({"verify", "--suite", "localization", "--K", "0.4", "--n", "4"});
    REQUIRE(loc.code == 0);
    auto lj = nlohmann::json::parse(loc.out);
    CHECK(lj["clauses"]["viii"]["passed"] == true);
    CHECK(lj["clauses"]["iii"]["checked"] == false);
    CHECK_FALSE(lj.contains("M1"));
    CHECK(run({"verify", "--suite", "signs", "--K", "0.5", "--out", "csv"}).code == 2);
}

TEST_CASE("trace grid in json") {
    auto r = run({"trace", "--kind", "neumann", "--grid", "3", "--terms", "4", "--potential", "{\"coeffs\":[{\"n\":0,\"re\":0.5,\"im\":0}]}", "--out", "json"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    REQUIRE(j["reports"].size() == 3);
    CHECK(j["reports"][1]["x"].get<double>() == doctest::Approx(3.14159265358979 / 3));
    CHECK(j["reports"][2]["final_error"].get<double>() < 1e-12);
}

TEST_CASE("json numbers carry 17 significant digits") {
    auto r = run({"floquet", "eval", "--lambda-re", "2.5", "--potential", "model:K=1"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\"x1\":3.1415926535897931") != std::string::npos);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["s"]["re"].get<double>() == doctest::Approx(-0.726285043782475314484).epsilon(1e-9));
    CHECK(j["wronskian"]["re"].get<double>() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_FALSE(j.contains("dlambda"));
    auto d = nlohmann::json::parse(run({"floquet", "eval", "--lambda-re", "2.5", "--lambda-im", "0.5", "--with-dlambda",
                                        "--potential", "model:K=1"}).out);
    CHECK(d.contains("dlambda"));

    auto s = run({"specfun", "eval", "--nu-re", "0.5", "--u-re", "1"});
    REQUIRE(s.code == 0);
    auto sj = nlohmann::json::parse(s.out);
    CHECK(sj["J"]["re"].get<double>() == doctest::Approx(0.67139670714180309).epsilon(1e-14));
    CHECK(sj.contains("Y"));
}

TEST_CASE("model shorthand equals the json form") {
    auto a = run({"eig", "--kind", "neumann", "--x0", "0.4", "--count", "3", "--potential", "model:K=0.5+0.2i"});
    auto b = run({"eig", "--kind", "neumann", "--x0", "0.4", "--count", "3", "--potential",
                  "{\"coeffs\":[{\"n\":1,\"re\":0.5,\"im\":0.2}]}"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("output does not depend on the thread count") {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"eig", "--kind", "periodic", "--count", "7", "--potential", "model:K=0.8", "--out", "json"},
             {"trace", "--kind", "dirichlet", "--grid", "4", "--terms", "5", "--potential", "model:K=1"},
             {"bands", "--region", "-1,6,-2,2", "--step", "0.2", "--potential", "model:K=1"}}) {
        auto one = args, many = args;
        one.insert(one.end(), {"--threads", "1"});
        many.insert(many.end(), {"--threads", "3"});
        auto r1 = run(one), r3 = run(many);
        REQUIRE(r1.code == 0);
        CHECK(r1.out == r3.out);
    }
}

TEST_CASE("config file and precedence") {
    const std::string cfg = temp_path("config.json");
    {
        std::ofstream f(cfg);
        f << R"({"potential": "model:K=1", "tol": 1e-3, "out": "json"})";
    }
    // config tol is out of range unless the flag overrides it
    auto bad = run({"eig", "--kind", "dirichlet", "--count", "2", "--config", cfg});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("--tol") != std::string::npos);
    auto ok = run({"eig", "--kind", "dirichlet", "--count", "2", "--config", cfg, "--tol", "1e-10"});
    REQUIRE(ok.code == 0);
    CHECK(nlohmann::json::parse(ok.out)["eigenvalues"].size() == 2);
    auto flag = run({"eig", "--kind", "dirichlet", "--count", "2", "--config", cfg, "--tol", "1e-10", "--out", "csv",
                     "--potential", "{\"coeffs\":[]}"});
    REQUIRE(flag.code == 0);
    CHECK(lines(flag.out)[1] == "dirichlet,1,1,0,1,0");

    {
        std::ofstream f(cfg);
        f << R"({"potential": {"coeffs": [{"n": 1, "re": 1, "im": 0}]}, "colour": 3})";
    }
    auto unknown = run({"eig", "--kind", "dirichlet", "--count", "2", "--config", cfg});
    CHECK(unknown.code == 2);
    CHECK(unknown.err.find("colour") != std::string::npos);
    std::remove(cfg.c_str());
}

TEST_CASE("output file") {
    const std::string path = temp_path("eig.csv");
    auto r = run({"eig", "--kind", "dirichlet", "--count", "2", "--potential", "model:K=0", "--output", path});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    CHECK(slurp(path) == "kind,index,re,im,mult,residual\ndirichlet,1,1,0,1,0\ndirichlet,2,4,0,1,0\n");
    std::remove(path.c_str());
}

TEST_CASE("usage errors name the flag and exit with 2") {
    const std::vector<std::pair<std::vector<std::string>, std::string>> cases{
        {{"eig", "--kind", "sideways", "--count", "2", "--potential", "model:K=1"}, "--kind"},
        {{"eig", "--kind", "dirichlet", "--potential", "model:K=1"}, "--count"},
        {{"eig", "--kind", "dirichlet", "--count", "2", "--potential", "model:K=1", "--tol", "1"}, "--tol"},
        {{"eig", "--kind", "dirichlet", "--count", "2", "--potential", "model:K=1", "--threads", "0"}, "--threads"},
        {{"eig", "--kind", "dirichlet", "--count", "2", "--potential", "model:K=1", "--out", "xml"}, "--out"},
        {{"eig", "--kind", "dirichlet", "--count", "2", "--potential", "{\"coeffs\": 3}"}, "--potential"},
        {{"eig", "--kind", "dirichlet", "--count", "2"}, "--potential"},
        {{"bands", "--region", "0,1,2", "--potential", "model:K=1"}, "--region"},
        {{"bands", "--region", "0,1,-1,1", "--step", "-1", "--potential", "model:K=1"}, "--step"},
        {{"trace", "--kind", "dirichlet", "--terms", "3", "--potential", "model:K=1"}, "--grid"},
        {{"trace", "--kind", "dirichlet", "--x", "0", "--grid", "3", "--terms", "3", "--potential", "model:K=1"}, "--x"},
        {{"verify", "--suite", "everything", "--K", "1"}, "--suite"},
        {{"floquet", "eval", "--potential", "model:K=1"}, "--lambda-re"},
        {{"eig", "--kind", "dirichlet", "--count", "2", "--config", "/nonexistent/hill.json"}, "--config"},
    };
    for (const auto& [args, flag] : cases) {
        auto r = run(args);
        INFO(args[0], " ", flag, ": ", r.err);
        CHECK(r.code == 2);
        CHECK(r.err.find(flag) != std::string::npos);
    }
    CHECK(run({}).code == 2);
    CHECK(run({"dance"}).code == 2);
    CHECK(run({"verify", "--suite", "multiplicity", "--K", "2"}).code == 2);
}

TEST_CASE("computational failures exit with 1") {
    auto r = run({"specfun", "eval", "--nu-re", "0.5", "--u-re", "400"});
    CHECK(r.code == 1);
    CHECK(r.err.find("converge") != std::string::npos);
    auto help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("eig") != std::string::npos);
}
