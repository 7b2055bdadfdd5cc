#include "gaussavg/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gaussavg/engine.hpp"
#include "gaussavg/errors.hpp"
#include "gaussavg/mc_oracle.hpp"

namespace gaussavg::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trimmed(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

// Strict full-token double parse; returns false on trailing garbage.
bool parse_double(const std::string& tok, double& out) {
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

std::vector<double> parse_eigs(const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = text.find(',', start);
        const std::string tok = trimmed(
            comma == std::string::npos ? text.substr(start)
                                       : text.substr(start, comma - start));
        if (tok.empty()) throw UsageError("--eigs: empty entry in eigenvalue list");
        double v = 0.0;
        if (!parse_double(tok, v))
            throw UsageError("--eigs: cannot parse eigenvalue '" + tok + "'");
        if (!std::isfinite(v) || v <= 0.0)
            throw UsageError("--eigs: eigenvalue " + tok + " must be positive");
        out.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

const char* command_name(Command c) {
    switch (c) {
        case Command::Capacity: return "capacity";
        case Command::Mmse: return "mmse";
        case Command::Moment: return "moment";
        case Command::McCheck: return "mc-check";
        case Command::Sweep: return "sweep";
    }
    return "?";
}

// Shortest-exact formatting for CSV cells; %.17g round-trips any double.
std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open matrix file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ComplexMatrix matrix_from_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (trimmed(line).empty()) continue;
        const std::size_t row_no = rows.size() + 1;
        std::vector<double> row;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            const std::string cell = trimmed(
                comma == std::string::npos ? line.substr(start)
                                           : line.substr(start, comma - start));
            const std::size_t col_no = row.size() + 1;
            double v = 0.0;
            if (cell.empty())
                throw DomainError("matrix parse error at row " + std::to_string(row_no) +
                                  ", column " + std::to_string(col_no) + ": empty cell");
            if (!parse_double(cell, v))
                throw DomainError("matrix parse error at row " + std::to_string(row_no) +
                                  ", column " + std::to_string(col_no) + ": '" + cell + "'");
            row.push_back(v);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DomainError("matrix file holds no rows");
    const std::size_t n = rows.size();
    for (std::size_t r = 0; r < n; ++r) {
        if (rows[r].size() != n)
            throw DomainError("matrix row " + std::to_string(r + 1) + " has " +
                              std::to_string(rows[r].size()) + " columns, expected " +
                              std::to_string(n) + " (square matrix required)");
    }
    ComplexMatrix m(static_cast<int>(n));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            m.at(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
    return m;
}

ComplexMatrix matrix_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DomainError(std::string("matrix JSON parse error: ") + e.what());
    }
    if (!j.is_array() || j.empty())
        throw DomainError("matrix JSON must be a non-empty array of rows");
    const std::size_t n = j.size();
    ComplexMatrix m(static_cast<int>(n));
    for (std::size_t r = 0; r < n; ++r) {
        const auto& row = j[r];
        if (!row.is_array())
            throw DomainError("matrix JSON row " + std::to_string(r + 1) +
                              " is not an array");
        if (row.size() != n)
            throw DomainError("matrix JSON row " + std::to_string(r + 1) + " has " +
                              std::to_string(row.size()) + " entries, expected " +
                              std::to_string(n) + " (square matrix required)");
        for (std::size_t c = 0; c < n; ++c) {
            const auto& cell = row[c];
            if (!cell.is_object() || !cell.contains("re") || !cell.contains("im") ||
                !cell["re"].is_number() || !cell["im"].is_number())
                throw DomainError("matrix JSON entry at row " + std::to_string(r + 1) +
                                  ", column " + std::to_string(c + 1) +
                                  " must be an object {\"re\": x, \"im\": y}");
            m.at(static_cast<int>(r), static_cast<int>(c)) = {
                cell["re"].get<double>(), cell["im"].get<double>()};
        }
    }
    return m;
}

ordered_json diagnostics_json(const Diagnostics& d, Method method) {
    ordered_json out;
    out["min_rel_gap"] = d.min_rel_gap;
    out["quad_nodes"] = d.quad_nodes;
    out["runtime_ms"] = 0.0;  // patched with the measured time before dumping
    out["log_condition"] = d.log_condition;
    if (method == Method::PerturbedLimit) out["extrap_residual"] = d.extrap_residual;
    if (d.degenerate_routed)
        out["warning"] = "degenerate spectrum routed to the perturbed-limit path";
    return out;
}

RunResult failure(int exit_code, const char* code, const std::string& detail) {
    return RunResult{exit_code, "", std::string("ERROR ") + code + ": " + detail};
}

}  // namespace

RunConfig parse_args(const std::vector<std::string>& args) {
    CLI::App app{"Exact Gaussian-ensemble trace averages: MIMO ergodic capacity, "
                 "MMSE, and integer moments for a coupling matrix given by its "
                 "eigenvalues or as a Hermitian matrix file.",
                 "gaussavg"};
    app.require_subcommand(1);

    std::string eigs_text;
    std::string matrix_path;
    std::string format = "json";
    std::string f_name = "capacity";
    double quad_tol = 1e-11;
    double snr = 1.0;
    int m = 1;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 12345;
    double snr_min = 0.0;
    double snr_max = 0.0;
    double snr_step = 0.0;
    bool bits = false;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--eigs", eigs_text,
                        "Comma-separated positive eigenvalues of the coupling matrix");
        sub->add_option("--matrix", matrix_path,
                        "Hermitian matrix file (CSV of reals, or JSON of {\"re\",\"im\"} rows)");
        sub->add_option("--quad-tol", quad_tol,
                        "Relative quadrature tolerance in (0, 0.1]")
            ->envname("GAUSSAVG_QUAD_TOL");
        sub->add_option("--format", format, "Output format: json or csv");
    };

    CLI::App* cap = app.add_subcommand(
        "capacity", "Ergodic capacity E[log det(I + snr H*AH)]");
    add_common(cap);
    cap->add_option("--snr", snr, "Signal-to-noise ratio (positive real)");
    cap->add_flag("--bits", bits, "Report capacity in bits instead of nats");

    CLI::App* mm = app.add_subcommand(
        "mmse", "Average MMSE E[Tr (I + snr H*AH)^{-1}]");
    add_common(mm);
    mm->add_option("--snr", snr, "Signal-to-noise ratio (positive real)");

    CLI::App* mo = app.add_subcommand("moment", "Integer moment E[Tr (H*AH)^m]");
    add_common(mo);
    mo->add_option("--m", m, "Moment order (positive integer)")->required();

    CLI::App* mc = app.add_subcommand(
        "mc-check", "Engine value cross-checked against a Monte Carlo estimate");
    add_common(mc);
    mc->add_option("--f", f_name, "Function to check: capacity, mmse, or moment");
    mc->add_option("--snr", snr, "Signal-to-noise ratio for capacity/mmse");
    mc->add_option("--m", m, "Moment order when --f moment");
    mc->add_option("--samples", samples, "Monte Carlo sample count");
    mc->add_option("--seed", seed, "Monte Carlo seed");
    mc->add_flag("--bits", bits, "Report capacity in bits instead of nats");

    CLI::App* sw = app.add_subcommand(
        "sweep", "Evaluate capacity or MMSE over an snr grid");
    add_common(sw);
    sw->add_option("--f", f_name, "Function to sweep: capacity or mmse");
    sw->add_option("--snr-min", snr_min, "Grid start (positive)")->required();
    sw->add_option("--snr-max", snr_max, "Grid end (>= --snr-min)")->required();
    sw->add_option("--snr-step", snr_step, "Grid step (positive)")->required();
    sw->add_flag("--bits", bits, "Report capacity in bits instead of nats");

    try {
        // CLI11's token-vector entry point consumes a reversed list.
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::Success&) {
        for (CLI::App* sub : app.get_subcommands()) throw HelpRequested{sub->help()};
        throw HelpRequested{app.help()};
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    RunConfig cfg;
    CLI::App* active = app.get_subcommands().front();
    if (active == cap) cfg.command = Command::Capacity;
    else if (active == mm) cfg.command = Command::Mmse;
    else if (active == mo) cfg.command = Command::Moment;
    else if (active == mc) cfg.command = Command::McCheck;
    else cfg.command = Command::Sweep;

    if (active->count("--eigs") + active->count("--matrix") != 1)
        throw UsageError("exactly one of --eigs or --matrix is required");
    if (active->count("--eigs")) cfg.eigenvalues = parse_eigs(eigs_text);
    else cfg.matrix_path = matrix_path;

    if (format != "json" && format != "csv")
        throw UsageError("--format: expected json or csv, got '" + format + "'");
    cfg.format = format;

    if (!(quad_tol > 0.0) || quad_tol > 0.1 || !std::isfinite(quad_tol))
        throw UsageError("--quad-tol: tolerance must lie in (0, 0.1], got " +
                         fmt17(quad_tol));
    cfg.quad_tol = quad_tol;

    const bool wants_snr = cfg.command == Command::Capacity ||
                           cfg.command == Command::Mmse ||
                           cfg.command == Command::McCheck;
    if (wants_snr && (!std::isfinite(snr) || snr <= 0.0))
        throw UsageError("--snr: must be a positive real, got " + fmt17(snr));
    cfg.snr = snr;

    if ((cfg.command == Command::Moment || cfg.command == Command::McCheck) && m < 1)
        throw UsageError("--m: moment order must be a positive integer, got " +
                         std::to_string(m));
    cfg.m = m;

    if (cfg.command == Command::McCheck) {
        if (f_name != "capacity" && f_name != "mmse" && f_name != "moment")
            throw UsageError("--f: expected capacity, mmse, or moment, got '" +
                             f_name + "'");
    }
    if (cfg.command == Command::Sweep) {
        if (f_name != "capacity" && f_name != "mmse")
            throw UsageError("--f: sweep supports capacity or mmse, got '" +
                             f_name + "'");
        if (!std::isfinite(snr_min) || snr_min <= 0.0)
            throw UsageError("--snr-min: must be a positive real, got " + fmt17(snr_min));
        if (!std::isfinite(snr_step) || snr_step <= 0.0)
            throw UsageError("--snr-step: must be a positive real, got " + fmt17(snr_step));
        if (!std::isfinite(snr_max) || snr_max < snr_min)
            throw UsageError("--snr-max: must be >= --snr-min, got " + fmt17(snr_max));
        cfg.snr_min = snr_min;
        cfg.snr_max = snr_max;
        cfg.snr_step = snr_step;
    }
    cfg.mc_function = f_name;

    if (bits) {
        const bool capacity_context =
            cfg.command == Command::Capacity ||
            ((cfg.command == Command::McCheck || cfg.command == Command::Sweep) &&
             f_name == "capacity");
        if (!capacity_context)
            throw UsageError("--bits: only applies to capacity output");
        cfg.bits = true;
    }

    cfg.samples = samples;
    cfg.seed = seed;
    return cfg;
}

std::vector<double> load_matrix(const std::string& path) {
    const std::string text = read_file(path);
    const std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw DomainError("matrix file is empty: " + path);

    const bool json_like = text[first] == '[' || path.ends_with(".json");
    const ComplexMatrix m = json_like ? matrix_from_json(text) : matrix_from_csv(text);
    std::vector<double> eigs = hermitian_eigenvalues(m);
    if (eigs.front() <= 0.0) throw NonPositiveDefinite(eigs.front());
    return eigs;
}

RunResult run(const RunConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto runtime_ms = [&t0]() {
        return std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - t0)
            .count();
    };
    try {
        RunConfig cfg = config;
        if (!cfg.matrix_path.empty()) {
            if (!cfg.eigenvalues.empty())
                throw UsageError("exactly one of --eigs or --matrix is required");
            cfg.eigenvalues = load_matrix(cfg.matrix_path);
        }
        if (cfg.eigenvalues.empty())
            throw UsageError("no spectrum given: provide --eigs or --matrix");

        const Spectrum spectrum(cfg.eigenvalues);
        EvalOptions opts;
        opts.quad_rel_tol = cfg.quad_tol;
        const double unit = cfg.bits ? std::numbers::ln2 : 1.0;

        ordered_json report;
        report["command"] = command_name(cfg.command);
        report["n"] = spectrum.n();
        report["eigenvalues"] = cfg.eigenvalues;
        std::string csv;

        switch (cfg.command) {
            case Command::Capacity:
            case Command::Mmse: {
                const bool is_cap = cfg.command == Command::Capacity;
                const AverageResult r = is_cap ? capacity(spectrum, cfg.snr, opts)
                                               : mmse(spectrum, cfg.snr, opts);
                const double value = r.value / unit;
                ordered_json params;
                params["snr"] = cfg.snr;
                if (is_cap) params["units"] = cfg.bits ? "bits" : "nats";
                report["parameters"] = params;
                report["value"] = value;
                report["method"] = method_name(r.method);
                report["diagnostics"] = diagnostics_json(r.diagnostics, r.method);
                csv = "command,n,snr,value,method\n";
                csv += std::string(command_name(cfg.command)) + "," +
                       std::to_string(spectrum.n()) + "," + fmt17(cfg.snr) + "," +
                       fmt17(value) + "," + method_name(r.method) + "\n";
                break;
            }
            case Command::Moment: {
                const AverageResult r = trace_moment(spectrum, cfg.m, opts);
                report["parameters"] = ordered_json{{"m", cfg.m}};
                report["value"] = r.value;
                report["method"] = method_name(r.method);
                report["diagnostics"] = diagnostics_json(r.diagnostics, r.method);
                csv = "command,n,m,value,method\n";
                csv += std::string("moment,") + std::to_string(spectrum.n()) + "," +
                       std::to_string(cfg.m) + "," + fmt17(r.value) + "," +
                       method_name(r.method) + "\n";
                break;
            }
            case Command::McCheck: {
                AverageResult r;
                ScalarFunction f = ScalarFunction::monomial(1);
                ordered_json params;
                params["f"] = cfg.mc_function;
                if (cfg.mc_function == "capacity") {
                    r = capacity(spectrum, cfg.snr, opts);
                    f = ScalarFunction::capacity(cfg.snr);
                    params["snr"] = cfg.snr;
                    params["units"] = cfg.bits ? "bits" : "nats";
                } else if (cfg.mc_function == "mmse") {
                    r = mmse(spectrum, cfg.snr, opts);
                    f = ScalarFunction::mmse(cfg.snr);
                    params["snr"] = cfg.snr;
                } else {
                    r = trace_moment(spectrum, cfg.m, opts);
                    f = ScalarFunction::monomial(cfg.m);
                    params["m"] = cfg.m;
                }
                const MCEstimate mc =
                    mc_expected_trace_f(spectrum, f, cfg.samples, cfg.seed);
                const double diff = std::abs(r.value - mc.mean);
                const double sigma =
                    mc.std_error > 0.0
                        ? diff / mc.std_error
                        : (diff == 0.0 ? 0.0
                                       : std::numeric_limits<double>::infinity());
                report["parameters"] = params;
                report["value"] = r.value / unit;
                report["method"] = method_name(r.method);
                report["mc_mean"] = mc.mean / unit;
                report["mc_std_error"] = mc.std_error / unit;
                report["samples"] = mc.samples;
                report["seed"] = mc.seed;
                report["agreement_sigma"] = sigma;
                report["diagnostics"] = diagnostics_json(r.diagnostics, r.method);
                csv = "command,n,f,value,mc_mean,mc_std_error,samples,seed,"
                      "agreement_sigma,method\n";
                csv += std::string("mc-check,") + std::to_string(spectrum.n()) + "," +
                       cfg.mc_function + "," + fmt17(r.value / unit) + "," +
                       fmt17(mc.mean / unit) + "," + fmt17(mc.std_error / unit) + "," +
                       std::to_string(mc.samples) + "," + std::to_string(mc.seed) +
                       "," + fmt17(sigma) + "," + method_name(r.method) + "\n";
                break;
            }
            case Command::Sweep: {
                const bool is_cap = cfg.mc_function == "capacity";
                // Integer stepping avoids accumulated float drift across the grid.
                const long long steps = static_cast<long long>(
                    std::floor((cfg.snr_max - cfg.snr_min) / cfg.snr_step + 1e-9));
                ordered_json params;
                params["f"] = cfg.mc_function;
                params["snr_min"] = cfg.snr_min;
                params["snr_max"] = cfg.snr_max;
                params["snr_step"] = cfg.snr_step;
                if (is_cap) params["units"] = cfg.bits ? "bits" : "nats";
                report["parameters"] = params;
                ordered_json points = ordered_json::array();
                csv = "snr,value,method\n";
                Diagnostics agg;
                agg.min_rel_gap = spectrum.min_rel_gap();
                Method last_method = Method::Determinant;
                for (long long k = 0; k <= steps; ++k) {
                    const double s = cfg.snr_min + static_cast<double>(k) * cfg.snr_step;
                    const AverageResult r = is_cap ? capacity(spectrum, s, opts)
                                                   : mmse(spectrum, s, opts);
                    const double value = r.value / unit;
                    points.push_back(ordered_json{{"snr", s},
                                                  {"value", value},
                                                  {"method", method_name(r.method)}});
                    csv += fmt17(s) + "," + fmt17(value) + "," +
                           method_name(r.method) + "\n";
                    agg.quad_nodes = std::max(agg.quad_nodes, r.diagnostics.quad_nodes);
                    agg.log_condition =
                        std::max(agg.log_condition, r.diagnostics.log_condition);
                    agg.extrap_residual =
                        std::max(agg.extrap_residual, r.diagnostics.extrap_residual);
                    agg.degenerate_routed |= r.diagnostics.degenerate_routed;
                    last_method = r.method;
                }
                report["points"] = points;
                report["diagnostics"] = diagnostics_json(agg, last_method);
                break;
            }
        }

        if (cfg.format == "csv") return RunResult{0, csv, ""};
        report["diagnostics"]["runtime_ms"] = runtime_ms();
        return RunResult{0, report.dump(2) + "\n", ""};
    } catch (const UsageError& e) {
        return failure(1, "USAGE", e.what());
    } catch (const NotHermitian& e) {
        return failure(1, "NOT_HERMITIAN", e.what());
    } catch (const NonPositiveDefinite& e) {
        return failure(1, "NOT_POSITIVE_DEFINITE", e.what());
    } catch (const DegenerateSpectrum& e) {
        return failure(1, "DEGENERATE_SPECTRUM", e.what());
    } catch (const DomainError& e) {
        return failure(1, "DOMAIN", e.what());
    } catch (const ToleranceNotMet& e) {
        return failure(2, "TOLERANCE_NOT_MET", e.what());
    } catch (const NoConvergence& e) {
        return failure(2, "NO_CONVERGENCE", e.what());
    } catch (const ExtrapolationUnstable& e) {
        return failure(2, "EXTRAPOLATION_UNSTABLE", e.what());
    } catch (const NumericalFailure& e) {
        return failure(2, "NUMERICAL_FAILURE", e.what());
    } catch (const Error& e) {
        return failure(2, "INTERNAL", e.what());
    } catch (const std::exception& e) {
        return failure(2, "INTERNAL", e.what());
    }
}

int main_entry(const std::vector<std::string>& args) {
    RunConfig cfg;
    try {
        cfg = parse_args(args);
    } catch (const HelpRequested& help) {
        std::cout << help.text;
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "ERROR USAGE: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "ERROR USAGE: " << e.what() << '\n';
        return 1;
    }
    const RunResult result = run(cfg);
    if (!result.output.empty()) std::cout << result.output;
    if (!result.error.empty()) std::cerr << result.error << '\n';
    return result.exit_code;
}

}  // namespace gaussavg::cli
