#pragma once

#include "spectral3/inverse.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace spectral3::cli {

struct RunConfig {
    int grid = 512;
    std::vector<int> big_n;
    int n_max = 12;
    double newton_tol = 1e-12;
    double pair_tol = 1e-8;
    std::filesystem::path coeffs, data, rec, out, diag;
    std::string mode = "spectral";
    double model_jitter = 0.0;
    bool force = false;
    std::vector<std::string> perturb;
    std::vector<double> deltas;
    int threads = 1;

    void validate() const;
};

void cmd_forward(const RunConfig& cfg, std::ostream& log);
void cmd_inverse(const RunConfig& cfg, std::ostream& log);
void cmd_roundtrip(const RunConfig& cfg, std::ostream& log);
void cmd_stability(const RunConfig& cfg, std::ostream& log);
void cmd_verify(const RunConfig& cfg, std::ostream& log);

// Parses the command line, dispatches, and maps failures onto exit codes.
int run(int argc, const char* const* argv);

}  // namespace spectral3::cli
