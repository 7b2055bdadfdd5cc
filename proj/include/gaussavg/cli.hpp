#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gaussavg::cli {

enum class Command { Capacity, Mmse, Moment, McCheck, Sweep };

struct RunConfig {
    Command command = Command::Capacity;
    std::vector<double> eigenvalues;  // from --eigs; empty when a matrix
    std::string matrix_path;          // file supplies the spectrum (run()
                                      // resolves it via load_matrix)
    double snr = 1.0;
    int m = 1;                          // moment order
    std::string mc_function = "capacity";  // mc-check / sweep: which f
    std::uint64_t samples = 100000;
    std::uint64_t seed = 12345;
    double snr_min = 0.0;  // sweep grid
    double snr_max = 0.0;
    double snr_step = 0.0;
    std::string format = "json";  // json | csv
    bool bits = false;            // report capacity in bits instead of nats
    double quad_tol = 1e-11;
};

struct RunResult {
    int exit_code = 0;
    std::string output;  // stdout payload (report)
    std::string error;   // single-line "ERROR <code>: <detail>" when nonzero
};

// Parses and validates argv tokens (no program name). Throws UsageError
// with the offending flag named; --help throws HelpRequested carrying the
// help text.
RunConfig parse_args(const std::vector<std::string>& args);

struct HelpRequested {
    std::string text;
};

// Reads a Hermitian matrix file and returns its eigenvalues, ascending.
// CSV of reals is read as real-symmetric; .json files hold an array of
// rows, each row an array of {"re": x, "im": y} objects. The matrix must
// be Hermitian and positive definite.
std::vector<double> load_matrix(const std::string& path);

// Executes a validated config; never throws. Errors are mapped to exit
// code 1 (domain) or 2 (numerical) with a machine-parsable message.
RunResult run(const RunConfig& config);

// parse + run + print; the program's main.
int main_entry(const std::vector<std::string>& args);

}  // namespace gaussavg::cli
