#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include <json.hpp>

#include "dunits/cli.hpp"

namespace {

struct Run {
    int rc;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int rc = dunits::cli::run_cli(std::move(args), out, err);
    return {rc, out.str(), err.str()};
}

}  // namespace

TEST_CASE("order prints the closed-form orders") {
    auto r = cli({"order", "--p", "3", "--m", "1", "--n", "1"});
    CHECK(r.rc == 0);
    CHECK(r.out == "|U| = 12, |U_*| = 12\n");

    r = cli({"order", "--p", "3", "--m", "2", "--n", "1", "--json"});
    CHECK(r.rc == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["unit_group_order"] == "42336");
    CHECK(j["unitary_group_order"] == "6048");
}

TEST_CASE("decompose prints the image of an expression") {
    auto r = cli({"decompose", "--p", "3", "--m", "1", "--n", "1", "--element", "a"});
    CHECK(r.rc == 0);
    CHECK(r.out == "scalar 1, block [[0,1],[1,1]]\n");

    r = cli({"decompose", "--p", "3", "--m", "1", "--n", "1", "--element", "a", "--json"});
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["scalar"] == "1");
    CHECK(j["blocks"][0]["entries"] == std::vector<std::string>{"0", "1", "1", "1"});
}

TEST_CASE("tower json round-trips the documented schema") {
    auto r = cli({"tower", "--p", "3", "--m", "2", "--n", "1", "--json"});
    CHECK(r.rc == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["d"] == 2);
    CHECK(j["o"] == std::vector<std::uint64_t>{2, 6});
    CHECK(j["q"] == std::vector<std::string>{"2", "8"});
    CHECK(j["jump"] == 1);
}

TEST_CASE("verify passes on sound parameters") {
    auto r = cli({"verify", "--p", "5", "--m", "1", "--n", "1"});
    CHECK(r.rc == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(r.out.find("ok   tower recurrence") != std::string::npos);
}

TEST_CASE("sweep reports agreement and exits 0") {
    auto r = cli({"sweep", "--p", "3", "--m", "1", "--n", "1"});
    CHECK(r.rc == 0);
    CHECK(r.out.find("units 12 (formula 12) OK") != std::string::npos);
    CHECK(r.out.find("unitary 12 (formula 12) OK") != std::string::npos);
    CHECK(r.err.find("elapsed") != std::string::npos);  // timing goes to stderr only
}

TEST_CASE("closure and generators") {
    auto r = cli({"closure", "--p", "3", "--m", "1", "--n", "1"});
    CHECK(r.rc == 0);
    CHECK(r.out == "|<B>| = 6\n");

    r = cli({"closure", "--p", "5", "--m", "1", "--n", "1", "--cap", "3"});
    CHECK(r.rc == 1);
    CHECK(r.err.find("closure cap exceeded") != std::string::npos);

    r = cli({"generators", "--p", "5", "--m", "1", "--n", "1"});
    CHECK(r.rc == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 10);

    r = cli({"generators", "--p", "3", "--m", "1", "--n", "1", "--json"});
    auto j = nlohmann::json::parse(r.out);
    REQUIRE(j.size() == 3);
    CHECK(j[0]["element"]["rot"] == std::vector<std::string>{"1", "1", "1"});
}

TEST_CASE("report prints the factorization") {
    auto r = cli({"report", "--p", "3", "--m", "1", "--n", "2"});
    CHECK(r.rc == 0);
    CHECK(r.out.find("|U|        = 2160") != std::string::npos);
    CHECK(r.out.find("|U_*|      = 240") != std::string::npos);
    CHECK(r.out.find("U = U_* x W x <x>") != std::string::npos);
    CHECK(r.out.find("B = SL2(GF(4))") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
    CHECK(cli({"order", "--m", "1", "--n", "1"}).rc == 2);          // missing --p
    CHECK(cli({"nonsense"}).rc == 2);                               // unknown subcommand
    CHECK(cli({}).rc == 2);                                         // no subcommand
    CHECK(cli({"order", "--p", "4", "--m", "1", "--n", "1"}).rc == 2);  // p not an odd prime

    auto r = cli({"decompose", "--p", "3", "--m", "1", "--n", "1", "--element", "a + $"});
    CHECK(r.rc == 2);
    CHECK(r.err.find("column 5") != std::string::npos);
}

TEST_CASE("guard violations name the guard and exit 2") {
    auto r = cli({"sweep", "--p", "3", "--m", "2", "--n", "2"});
    CHECK(r.rc == 2);
    CHECK(r.err.find("2*n*p^m <= 20") != std::string::npos);

    r = cli({"decompose", "--p", "3", "--m", "3", "--n", "8", "--element", "a"});
    CHECK(r.rc == 2);
    CHECK(r.err.find("n*o_r <= 63") != std::string::npos);
}

TEST_CASE("identical flags produce byte-identical output") {
    for (auto args : {std::vector<std::string>{"order", "--p", "7", "--m", "1", "--n", "1"},
                      {"tower", "--p", "3", "--m", "2", "--n", "1", "--json"},
                      {"sweep", "--p", "3", "--m", "1", "--n", "2", "--json"},
                      {"verify", "--p", "3", "--m", "1", "--n", "1", "--seed", "5"},
                      {"report", "--p", "5", "--m", "1", "--n", "1", "--json"}}) {
        auto a = cli(args), b = cli(args);
        CHECK(a.rc == b.rc);
        CHECK(a.out == b.out);
    }
}

TEST_CASE("help exits 0") {
    CHECK(cli({"--help"}).rc == 0);
}
