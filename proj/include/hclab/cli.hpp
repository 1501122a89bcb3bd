#ifndef HCLAB_CLI_HPP
#define HCLAB_CLI_HPP

#include <cstdint>
#include <string>

#include "hclab/loss.hpp"

namespace hclab {

inline constexpr const char* kToolVersion = "hclab 1.0.0";

// Exit codes shared by the CLI and the test harness.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInstance = 3;
inline constexpr int kExitCap = 4;
inline constexpr int kExitFinding = 5;

struct RunConfig {
    std::string command;
    std::string instance_path;
    double beta = 1.0;
    int ell = 1;
    double rho = 1.0;
    std::uint64_t seed = 0;
    std::uint64_t budget = 1'000'000;
    std::uint64_t cap = kDefaultTermCap;
    std::string format = "json";  // json | csv
    std::string out;              // empty = stdout
    int threads = 1;

    // command-specific knobs
    int d = 4;
    int dmin = 4, dmax = 8;
    int steps = 16;
    std::string start = "point";   // blur-trace start distribution
    std::string mode = "exact";    // eval: exact | mc
    std::uint64_t samples = 100000;
    std::string rep;               // comma-separated classifier indices
    std::string task;              // '+'/'-' per cluster
    bool weighted = false;
    double const_c = 4.0;
    std::string kind;              // gen-instance kind
    int clusters = 4, naturals = 1, augs = 1, nonclean = 0, k = 1;
};

// Dispatches the configured command, writes the report (file or stdout), and
// returns the exit code. Reports are byte-identical across reruns with the
// same config, instance, and seed; timing goes to stderr only.
int run(const RunConfig& cfg);

// Full argv front end (CLI11 parsing + run).
int cli_main(int argc, char** argv);

}  // namespace hclab

#endif
