#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tractalign {

// Resolved run configuration; written verbatim to the output directory of
// every command as provenance.
struct RunConfig {
    std::string subcommand;
    std::vector<std::string> inputs;
    std::string template_path;
    std::string output;
    int samples = 100;          // grid size T
    int fibers = 50;            // fibers per bundle M
    int basis = 20;             // coefficient count K
    std::string transport = "exact";  // "exact" or "stepwise:<k>"
    bool paper_rescale = false;
    bool raw_basis = false;
    std::uint64_t seed = 0;
    int jobs = 1;
    int max_iters = 50;
    double tol = 1e-6;
    // synth-only knobs
    std::string backbone = "arc";
    double displacement = 0.08;
    double warp = 0.5;
    double rotation = 0.08;
    double scale = 1.0;
    bool profiles = false;
    double profile_noise = 0.01;
    bool emit_tck = false;
};

// Batch front end. Exit codes: 0 success, 1 runtime failure, 2 usage
// error. Data goes to files under --out; logs go to stderr.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);

}  // namespace tractalign
