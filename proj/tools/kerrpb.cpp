#include "commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace kerrpb;
using namespace kerrpb::cli;

struct RawOptions {
    std::string k_range;
    std::string eps_range;
    std::string t_range;
    std::string x_range;
    std::string p_range;
    std::string omega_range;
    std::vector<std::string> offdiag;
    std::string method = "null_space";
    std::string format = "csv";
    std::string out;
    long long dim = 15;
    long long pad = -1;
    long long unitary_dim = 100;
    long long n0 = 0;
};

void finish_config(RunConfig& cfg, const RawOptions& raw) {
    cfg.params.dim = static_cast<Eigen::Index>(raw.dim);
    cfg.pad = static_cast<Eigen::Index>(raw.pad);
    cfg.unitary_dim = static_cast<Eigen::Index>(raw.unitary_dim);
    cfg.n0 = static_cast<Eigen::Index>(raw.n0);
    if (!raw.k_range.empty()) {
        cfg.k_range = parse_range(raw.k_range);
    }
    if (!raw.eps_range.empty()) {
        cfg.eps_range = parse_range(raw.eps_range);
    }
    if (!raw.t_range.empty()) {
        cfg.t_range = parse_range(raw.t_range);
    }
    if (!raw.x_range.empty()) {
        cfg.x_range = parse_range(raw.x_range);
    }
    if (!raw.p_range.empty()) {
        cfg.p_range = parse_range(raw.p_range);
    }
    if (!raw.omega_range.empty()) {
        cfg.spectrum.omega = parse_range(raw.omega_range);
    }
    if (!raw.offdiag.empty()) {
        cfg.offdiag.clear();
        for (const std::string& s : raw.offdiag) {
            cfg.offdiag.push_back(parse_pair(s));
        }
    }
    if (cfg.n0 < 0 || cfg.n0 >= cfg.params.dim) {
        throw InvalidArgument("initial Fock state outside the truncation");
    }
    cfg.method = raw.method == "inverse_power" ? SteadyStateMethod::inverse_power
                                               : SteadyStateMethod::null_space;
    if (cfg.jobs == 0) {
        cfg.jobs = default_jobs();
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Photon blockade in a driven Kerr cavity: steady states, dynamics, "
                 "Wigner functions and spectra of squeezing."};
    app.set_config("--config", "", "key = value configuration file; flags override it");
    app.require_subcommand(1, 1);
    app.fallthrough();

    RunConfig cfg;
    cfg.jobs = 0;
    RawOptions raw;

    app.add_option("--chi", cfg.params.chi, "Kerr nonlinearity (units of gamma)")->capture_default_str();
    app.add_option("--eps", cfg.params.eps, "drive strength")->capture_default_str();
    app.add_option("--gamma", cfg.params.gamma, "damping constant; 0 selects unitary evolution")
        ->capture_default_str();
    app.add_option("--nth", cfg.params.n_th, "mean thermal photon number")->capture_default_str();
    app.add_option("--dim", raw.dim, "Fock-space truncation")->capture_default_str();
    app.add_option("--k", cfg.k, "tuning parameter")->capture_default_str();
    app.add_option("--k-range", raw.k_range, "tuning sweep A:B:STEP");
    app.add_option("--k-values", cfg.k_values, "explicit tuning values")->delimiter(',');
    app.add_option("--eps-values", cfg.eps_values, "drive strengths: swept in scan-k, paired with k values otherwise")->delimiter(',');
    app.add_option("--nth-values", cfg.nth_values, "thermal photon numbers (scan-k)")->delimiter(',');
    app.add_option("--eps-range", raw.eps_range, "drive sweep A:B:STEP (scan-eps)");
    app.add_option("--t-range", raw.t_range, "output times A:B:STEP (evolve)");
    app.add_option("--initial", raw.n0, "initial Fock state (evolve)")->capture_default_str();
    app.add_flag("--normalize-coherence", cfg.normalize_coherence,
                 "report C / (1 - 1/dim) instead of C (scan-k)");
    app.add_flag("--analytic", cfg.analytic, "add perturbative populations (evolve)");
    app.add_option("--x-range", raw.x_range, "Wigner grid in x, A:B:STEP");
    app.add_option("--p-range", raw.p_range, "Wigner grid in p, A:B:STEP");
    app.add_option("--pad", raw.pad, "Wigner zero padding (default 2 dim)");
    app.add_option("--theta", cfg.thetas, "quadrature phases (spectrum)")->delimiter(',');
    app.add_option("--tau-max", cfg.spectrum.tau_max, "initial lag window, 1/gamma")->capture_default_str();
    app.add_option("--dtau", cfg.spectrum.dtau, "lag step, 1/gamma")->capture_default_str();
    app.add_option("--omega-range", raw.omega_range, "spectrum frequencies A:B:STEP");
    app.add_option("--offdiag", raw.offdiag, "density-matrix elements N-M (scan-k)")->delimiter(',');
    app.add_option("--method", raw.method, "steady-state solver")
        ->check(CLI::IsMember({"null_space", "inverse_power"}))
        ->capture_default_str();
    app.add_option("--delta", cfg.delta, "gamma/eps for steady-state oracles (compare)")->capture_default_str();
    app.add_option("--d", cfg.d, "eps^2/(gamma chi) for steady-state oracles (compare)")->capture_default_str();
    app.add_option("--delta-unitary", cfg.delta_unitary, "eps/chi for dissipation-free oracles (compare)")
        ->capture_default_str();
    app.add_option("--unitary-dim", raw.unitary_dim, "reference truncation (compare)")->capture_default_str();
    app.add_flag("--self-check", cfg.self_check, "compare each oracle with itself (compare)");
    app.add_option("--out", raw.out, "output path (default stdout)");
    app.add_option("--format", raw.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--jobs", cfg.jobs, "worker threads (default: processors)");

    auto* cmd_scan_k = app.add_subcommand("scan-k", "steady-state observables versus k");
    auto* cmd_scan_eps = app.add_subcommand("scan-eps", "steady-state populations versus eps");
    auto* cmd_evolve = app.add_subcommand("evolve", "time evolution from a Fock state");
    auto* cmd_wigner = app.add_subcommand("wigner", "steady-state Wigner function grid");
    auto* cmd_spectrum = app.add_subcommand("spectrum", "spectra of squeezing");
    auto* cmd_compare = app.add_subcommand("compare", "perturbative formulas versus numerics");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    CommandResult result;
    try {
        finish_config(cfg, raw);
        if (cmd_scan_k->parsed()) {
            result = scan_k(cfg);
        } else if (cmd_scan_eps->parsed()) {
            result = scan_eps(cfg);
        } else if (cmd_evolve->parsed()) {
            result = evolve(cfg);
        } else if (cmd_wigner->parsed()) {
            result = wigner(cfg);
        } else if (cmd_spectrum->parsed()) {
            result = spectrum(cfg);
        } else if (cmd_compare->parsed()) {
            result = compare(cfg);
        }
    } catch (const InvalidParameter& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const InvalidDimension& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const kerrpb::Error& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolverFailure;
    }

    const Format fmt = raw.format == "json" ? Format::json : Format::csv;
    if (raw.out.empty()) {
        write_table(std::cout, result.table, fmt);
    } else {
        std::ofstream os(raw.out, std::ios::binary);
        if (!os) {
            std::cerr << "error: cannot open " << raw.out << '\n';
            return kUsage;
        }
        write_table(os, result.table, fmt);
        if (!os) {
            std::cerr << "error: write to " << raw.out << " failed\n";
            return kSolverFailure;
        }
    }
    if (result.exit_code == kSolverFailure) {
        std::cerr << "solver failure on one or more points; see the error column\n";
    } else if (result.exit_code == kOracleMismatch) {
        std::cerr << "oracle mismatch: one or more residuals exceed their bounds\n";
    }
    return result.exit_code;
}
