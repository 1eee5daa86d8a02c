#pragma once

#include <iosfwd>
#include <string>

namespace crn {

/// One CLI invocation. `network` is a file path or a preset name; `init` is a
/// comma-separated positive vector, "preset" for the preset's documented
/// start, or empty (which also means the preset default).
struct RunConfig {
    std::string command;          // check | simulate | equilibrate | rate | compare
    std::string network;
    std::string init;
    double t_end = 50.0;
    double step = 1e-3;
    double tol = 1e-10;
    int max_iter = 100000;
    int quadrature_steps = 10000;
    int samples = 100;
    unsigned seed = 12345;
    std::string out_csv;          // path, or prefix for commands with two CSVs
    std::string out_json;         // report path; stdout when empty
    std::string descent = "potential";  // potential | simultaneous
};

/// Exit codes: 0 success, 1 input/numeric error, 2 negative mathematical
/// verdict. Reports go to `out`, diagnostics to `err`; never throws.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace crn
