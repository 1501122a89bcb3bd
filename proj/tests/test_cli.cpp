#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string bin() {
#ifdef HCLAB_BIN
    return HCLAB_BIN;
#else
    const char* b = std::getenv("HCLAB_BIN");
    REQUIRE(b != nullptr);
    return b;
#endif
}

fs::path workdir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "hclab_cli_tests";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args) {
    std::string cmd = bin() + " " + args + " >/dev/null 2>/dev/null";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path toy_instance() {
    static fs::path p = [] {
        fs::path path = workdir() / "toy.json";
        REQUIRE(run("gen-instance --kind agnostic-toy --d 2 --seed 3 --out " + path.string()) ==
                0);
        return path;
    }();
    return p;
}

}  // namespace

TEST_CASE("exit codes") {
    CHECK(run("--no-such-flag") == 2);
    CHECK(run("eval --beta -3 --instance " + toy_instance().string()) == 2);
    fs::path bad = workdir() / "bad.json";
    std::ofstream(bad) << "{\"dim\": 1, \"images\": [], \"classifiers\": [], \"oops\": 1}\n";
    CHECK(run("eval --instance " + bad.string()) == 3);
    CHECK(run("eval --instance " + workdir().string() + "/missing.json") == 3);
    CHECK(run("eval --ell 40 --cap 10 --instance " + toy_instance().string()) == 4);
    CHECK(run("eval --instance " + toy_instance().string()) == 0);
}

TEST_CASE("reports are byte-identical across reruns and thread counts") {
    fs::path a = workdir() / "a.json", b = workdir() / "b.json", c = workdir() / "c.json";
    std::string base = "eval --beta 4 --ell 2 --mode mc --samples 20000 --seed 11 --instance " +
                       toy_instance().string();
    CHECK(run(base + " --threads 1 --out " + a.string()) == 0);
    CHECK(run(base + " --threads 1 --out " + b.string()) == 0);
    CHECK(run(base + " --threads 4 --out " + c.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) == slurp(c));
    CHECK(slurp(a).find("wall") == std::string::npos);  // timing never lands in the report
}

TEST_CASE("generation is deterministic in the seed") {
    fs::path a = workdir() / "gen_a.json", b = workdir() / "gen_b.json", c = workdir() / "gen_c.json";
    std::string base = "gen-instance --kind realizable-balanced --d 2 --clusters 4 --nonclean 2";
    CHECK(run(base + " --seed 5 --out " + a.string()) == 0);
    CHECK(run(base + " --seed 5 --out " + b.string()) == 0);
    CHECK(run(base + " --seed 6 --out " + c.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) != slurp(c));
}

TEST_CASE("csv output carries the flat header") {
    fs::path out = workdir() / "eval.csv";
    CHECK(run("eval --beta 2 --format csv --instance " + toy_instance().string() + " --out " +
              out.string()) == 0);
    std::string text = slurp(out);
    CHECK(text.rfind("key,value\n", 0) == 0);
    CHECK(text.find("results.total") != std::string::npos);
}

TEST_CASE("subcommand smoke with stable outputs") {
    fs::path k1 = workdir() / "k1.json", k2 = workdir() / "k2.json";
    CHECK(run("kernel-audit --d 4 --out " + k1.string()) == 0);
    CHECK(run("kernel-audit --d 4 --out " + k2.string()) == 0);
    CHECK(slurp(k1) == slurp(k2));
    CHECK(slurp(k1).find("\"match\": true") != std::string::npos);

    CHECK(run("blur-trace --d 3 --steps 8 --start point --beta 6 --out " +
              (workdir() / "bt.json").string()) == 0);
    CHECK(run("agnostic-cert --beta 8 --ell 16 --instance " + toy_instance().string() +
              " --out " + (workdir() / "cert.json").string()) == 0);
    CHECK(slurp(workdir() / "cert.json").find("\"verdict\": \"improved\"") != std::string::npos);
    fs::path rb = workdir() / "rb.json";
    CHECK(run("gen-instance --kind realizable-balanced --d 2 --clusters 4 --nonclean 2 --seed 4 "
              "--out " + rb.string()) == 0);
    CHECK(run("verify-minimizer --beta 6 --ell 2 --budget 100000 --instance " + rb.string() +
              " --out " + (workdir() / "vm.json").string()) == 0);
    CHECK(slurp(workdir() / "vm.json").find("\"pass\": true") != std::string::npos);
}
