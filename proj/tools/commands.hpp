#pragma once

// Subcommand implementations. Each turns a RunConfig into a Table plus an
// exit status; argument parsing lives in main.

#include "table.hpp"

#include <kerrpb/sweeps.hpp>
#include <kerrpb/validation.hpp>

#include <charconv>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

namespace kerrpb::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kSolverFailure = 2, kOracleMismatch = 3 };

struct RunConfig {
    SystemParams params;
    double k = 1.0;
    std::optional<Range> k_range;
    std::vector<double> k_values;
    std::vector<double> eps_values;  // paired with k_values, or broadcast when single
    std::vector<double> nth_values;  // scan-k only
    Range eps_range{0.5, 20.0, 0.1};
    Range t_range{0.0, 10.0, 0.01};
    Range x_range{-3.0, 3.0, 0.05};
    Range p_range{-3.0, 3.0, 0.05};
    Eigen::Index pad = -1;  // -1: default padding
    std::vector<double> thetas{0.0, std::numbers::pi / 2.0};
    SpectrumOptions spectrum;
    std::vector<std::pair<int, int>> offdiag{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    SteadyStateMethod method = SteadyStateMethod::null_space;
    bool normalize_coherence = false;  // scan-k: report C / (1 - 1/dim)
    bool analytic = false;  // evolve: add perturbative columns
    Eigen::Index n0 = 0;    // evolve: initial Fock state
    // compare
    double delta = 0.1;
    double d = 1.0;
    double delta_unitary = 1.0 / 6.0;
    Eigen::Index unitary_dim = 100;
    bool self_check = false;
    unsigned jobs = 1;
};

struct CommandResult {
    Table table;
    int exit_code = kOk;
};

// ---- argument helpers ------------------------------------------------------

inline double parse_double(std::string_view s) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw InvalidArgument("not a number: '" + std::string(s) + "'");
    }
    return v;
}

/// "A:B:STEP" with STEP > 0 and B >= A.
inline Range parse_range(std::string_view s) {
    const auto c1 = s.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : s.find(':', c1 + 1);
    if (c2 == std::string_view::npos || s.find(':', c2 + 1) != std::string_view::npos) {
        throw InvalidArgument("range must look like A:B:STEP, got '" + std::string(s) + "'");
    }
    Range r{parse_double(s.substr(0, c1)), parse_double(s.substr(c1 + 1, c2 - c1 - 1)),
            parse_double(s.substr(c2 + 1))};
    if (!(r.step > 0.0) || !(r.hi >= r.lo) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
        throw InvalidArgument("range needs STEP > 0 and B >= A, got '" + std::string(s) + "'");
    }
    return r;
}

/// "n-m" pairs such as "0-1".
inline std::pair<int, int> parse_pair(std::string_view s) {
    const auto dash = s.find('-');
    if (dash == std::string_view::npos || dash == 0) {
        throw InvalidArgument("element must look like N-M, got '" + std::string(s) + "'");
    }
    const double n = parse_double(s.substr(0, dash));
    const double m = parse_double(s.substr(dash + 1));
    if (n < 0 || m < 0 || n != std::floor(n) || m != std::floor(m)) {
        throw InvalidArgument("element indices must be non-negative integers: '" + std::string(s) + "'");
    }
    return {static_cast<int>(n), static_cast<int>(m)};
}

inline unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Tuning points for scan-k: k-range, else k-values, else the single k.
inline std::vector<double> tuning_values(const RunConfig& cfg) {
    if (cfg.k_range) {
        return cfg.k_range->values();
    }
    if (!cfg.k_values.empty()) {
        return cfg.k_values;
    }
    return {cfg.k};
}

/// (k, eps) panels for wigner and spectrum.
inline std::vector<std::pair<double, double>> panels(const RunConfig& cfg) {
    const std::vector<double> ks = tuning_values(cfg);
    std::vector<std::pair<double, double>> out;
    if (cfg.eps_values.size() > 1 && cfg.eps_values.size() != ks.size()) {
        throw InvalidArgument("eps-values must have one entry or one per k value");
    }
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const double eps = cfg.eps_values.empty()       ? cfg.params.eps
                           : cfg.eps_values.size() == 1 ? cfg.eps_values[0]
                                                        : cfg.eps_values[i];
        out.emplace_back(ks[i], eps);
    }
    return out;
}

// ---- scan-k ----------------------------------------------------------------

inline std::vector<std::string> scan_k_columns(const RunConfig& cfg) {
    std::vector<std::string> cols{"nth", "eps", "k"};
    for (int n = 0; n <= 5; ++n) {
        cols.push_back("P" + std::to_string(n));
    }
    for (const char* c : {"F1", "F2", "F3", "mean_n", "fano", "purity", "vn_entropy",
                          "linear_entropy", "coherence", "thermalization"}) {
        cols.emplace_back(c);
    }
    for (const auto& [n, m] : cfg.offdiag) {
        cols.push_back("abs_rho_" + std::to_string(n) + "_" + std::to_string(m));
    }
    for (const char* c : {"residual", "dim_adequate", "error"}) {
        cols.emplace_back(c);
    }
    return cols;
}

inline std::vector<Cell> scan_k_row(const RunConfig& cfg, double nth, const SteadyPoint& pt) {
    std::vector<Cell> row{nth, pt.eps, pt.k};
    for (Eigen::Index n = 0; n <= 5; ++n) {
        row.emplace_back(prob_or_nan(pt, n));
    }
    const DensityMatrix* rho = pt.rho ? &*pt.rho : nullptr;
    for (Eigen::Index m = 1; m <= 3; ++m) {
        row.emplace_back(fidelity_or_nan(rho, m));
    }
    if (rho != nullptr) {
        row.emplace_back(mean_photon_number(*rho));
        row.emplace_back(value_or_nan(fano(*rho)));
        const CoherenceReport rep = coherence_report(*rho);
        row.emplace_back(rep.purity);
        row.emplace_back(rep.vn_entropy);
        row.emplace_back(rep.linear_entropy);
        row.emplace_back(cfg.normalize_coherence ? coherence_normalized(*rho) : rep.coherence);
        row.emplace_back(value_or_nan(rep.thermalization));
        for (const auto& [n, m] : cfg.offdiag) {
            row.emplace_back(n < rho->dim() && m < rho->dim() && n != m ? std::abs(offdiag(*rho, n, m))
                                                                        : kNaN);
        }
    } else {
        for (std::size_t i = 0; i < 7 + cfg.offdiag.size(); ++i) {
            row.emplace_back(kNaN);
        }
    }
    row.emplace_back(pt.residual);
    row.emplace_back(pt.dim_adequate ? 1.0 : 0.0);
    row.emplace_back(pt.error);
    return row;
}

inline CommandResult scan_k(const RunConfig& cfg) {
    cfg.params.validate();
    const std::vector<double> nths =
        cfg.nth_values.empty() ? std::vector<double>{cfg.params.n_th} : cfg.nth_values;
    const std::vector<double> epss =
        cfg.eps_values.empty() ? std::vector<double>{cfg.params.eps} : cfg.eps_values;
    const std::vector<double> ks = tuning_values(cfg);
    struct Point {
        double nth, eps, k;
    };
    std::vector<Point> points;
    for (double nth : nths) {
        for (double eps : epss) {
            for (double k : ks) {
                points.push_back({nth, eps, k});
            }
        }
    }
    const auto solved = parallel_map(points.size(), cfg.jobs, [&](std::size_t i) {
        SystemParams p = cfg.params;
        p.n_th = points[i].nth;
        p.eps = points[i].eps;
        return steady_point(p, points[i].k, cfg.method);
    });
    CommandResult res;
    res.table.columns = scan_k_columns(cfg);
    for (std::size_t i = 0; i < points.size(); ++i) {
        res.table.add_row(scan_k_row(cfg, points[i].nth, solved[i]));
        if (!solved[i].error.empty()) {
            res.exit_code = kSolverFailure;
        }
    }
    return res;
}

// ---- scan-eps --------------------------------------------------------------

inline CommandResult scan_eps(const RunConfig& cfg) {
    cfg.params.validate();
    const std::vector<double> ks = cfg.k_values.empty() ? std::vector<double>{cfg.k} : cfg.k_values;
    const std::vector<double> epss = cfg.eps_range.values();
    std::vector<std::pair<double, double>> points;
    for (double k : ks) {
        for (double eps : epss) {
            points.emplace_back(k, eps);
        }
    }
    const auto solved = parallel_map(points.size(), cfg.jobs, [&](std::size_t i) {
        SystemParams p = cfg.params;
        p.eps = points[i].second;
        return steady_point(p, points[i].first, cfg.method);
    });
    CommandResult res;
    res.table.columns = {"k", "eps", "P0", "P1", "P2", "P3", "F1", "F2", "F3",
                         "fano", "residual", "error"};
    for (const SteadyPoint& pt : solved) {
        const DensityMatrix* rho = pt.rho ? &*pt.rho : nullptr;
        std::vector<Cell> row{pt.k, pt.eps};
        for (Eigen::Index n = 0; n <= 3; ++n) {
            row.emplace_back(prob_or_nan(pt, n));
        }
        for (Eigen::Index m = 1; m <= 3; ++m) {
            row.emplace_back(fidelity_or_nan(rho, m));
        }
        row.emplace_back(rho ? value_or_nan(fano(*rho)) : kNaN);
        row.emplace_back(pt.residual);
        row.emplace_back(pt.error);
        res.table.add_row(std::move(row));
        if (!pt.error.empty()) {
            res.exit_code = kSolverFailure;
        }
    }
    return res;
}

// ---- evolve ----------------------------------------------------------------

inline CommandResult evolve(const RunConfig& cfg) {
    const std::vector<double> times = cfg.t_range.values();
    const auto points = evolve_populations(cfg.params, cfg.k, times, cfg.n0);

    const bool want_analytic = cfg.analytic;
    const bool k1 = cfg.k == 1.0;
    const bool k2 = cfg.k == 2.0;
    if (want_analytic && (cfg.params.gamma != 0.0 || !(k1 || k2))) {
        throw InvalidArgument("evolve --analytic needs gamma = 0 and k = 1 or 2");
    }
    if (want_analytic && cfg.n0 != 0) {
        throw InvalidArgument("evolve --analytic starts from the vacuum");
    }
    std::optional<analytic::Trunc2Eigensystem> eig2;
    if (want_analytic && k2) {
        eig2 = analytic::trunc2_eigensystem(cfg.params.chi, cfg.params.eps / cfg.params.chi);
    }

    CommandResult res;
    res.table.columns = {"t", "P0", "P1", "P2", "P3", "P4", "F1", "F2", "F3", "norm"};
    if (want_analytic) {
        for (int n = 0; n <= 3; ++n) {
            res.table.columns.push_back("P" + std::to_string(n) + "_approx");
        }
    }
    for (const EvolutionPoint& ev : points) {
        std::vector<Cell> row{ev.t};
        for (Eigen::Index n = 0; n <= 4; ++n) {
            row.emplace_back(n < ev.probs.size() ? ev.probs(n) : 0.0);
        }
        for (Eigen::Index m = 1; m <= 3; ++m) {
            row.emplace_back(m < ev.probs.size() ? ev.probs.head(m + 1).sum() : kNaN);
        }
        row.emplace_back(ev.norm);
        if (want_analytic) {
            const CVector psi = eig2 ? analytic::psi2_evolution(*eig2, ev.t)
                                     : analytic::psi1_evolution(cfg.params.eps, ev.t);
            for (Eigen::Index n = 0; n <= 3; ++n) {
                row.emplace_back(n < psi.size() ? std::norm(psi(n)) : 0.0);
            }
        }
        res.table.add_row(std::move(row));
    }
    return res;
}

// ---- wigner ----------------------------------------------------------------

inline CommandResult wigner(const RunConfig& cfg) {
    const auto pans = panels(cfg);
    const std::vector<double> xs = cfg.x_range.values();
    const std::vector<double> ps = cfg.p_range.values();
    CommandResult res;
    res.table.columns = {"k", "eps", "x", "p", "W"};
    for (const auto& [k, eps] : pans) {
        SystemParams p = cfg.params;
        p.eps = eps;
        const SteadyPoint pt = steady_point(p, k, cfg.method);
        if (!pt.rho) {
            throw SolverError("wigner: steady state at k = " + format_number(k) + ": " + pt.error,
                              pt.residual);
        }
        const Eigen::Index pad = cfg.pad < 0 ? default_wigner_pad(pt.rho->dim()) : cfg.pad;
        const WignerEvaluator eval(*pt.rho, pad);
        const auto rows = parallel_map(ps.size(), cfg.jobs, [&](std::size_t i) {
            std::vector<double> line(xs.size());
            for (std::size_t j = 0; j < xs.size(); ++j) {
                line[j] = eval(Complex(xs[j], ps[i])).value;
            }
            return line;
        });
        for (std::size_t i = 0; i < ps.size(); ++i) {
            for (std::size_t j = 0; j < xs.size(); ++j) {
                res.table.add_row({k, eps, xs[j], ps[i], rows[i][j]});
            }
        }
    }
    return res;
}

// ---- spectrum --------------------------------------------------------------

inline CommandResult spectrum(const RunConfig& cfg) {
    const auto pans = panels(cfg);
    const auto runs = parallel_map(pans.size(), cfg.jobs, [&](std::size_t i) {
        SystemParams p = cfg.params;
        p.eps = pans[i].second;
        return steady_state_spectra(p, pans[i].first, cfg.thetas, cfg.spectrum);
    });
    CommandResult res;
    res.table.columns = {"k", "eps", "theta", "omega", "S"};
    for (std::size_t i = 0; i < pans.size(); ++i) {
        for (const SpectrumResult& s : runs[i].spectra) {
            for (std::size_t j = 0; j < s.omegas.size(); ++j) {
                res.table.add_row({pans[i].first, pans[i].second, s.theta, s.omegas[j], s.values[j]});
            }
        }
    }
    return res;
}

// ---- compare ---------------------------------------------------------------

inline std::vector<validation::Check> oracle_checks(const RunConfig& cfg) {
    using validation::Check;
    std::vector<Check> checks;
    const analytic::PerturbationParams pp{cfg.delta, cfg.d};
    const double chi = cfg.params.chi;
    const double du = cfg.delta_unitary;

    if (cfg.self_check) {
        // Each oracle against itself: exercises the reporting path with exact input.
        const CMatrix s2 = analytic::steady2_approx(pp);
        const CMatrix s1 = analytic::steady1_approx(pp, analytic::Order::delta2);
        checks.push_back({"steady2", validation::max_abs_diff(s2, s2), 5.0 * pp.delta * pp.delta});
        checks.push_back({"steady1", validation::max_abs_diff(s1, s1), 5.0 * std::pow(pp.delta, 3)});
        return checks;
    }

    checks.push_back(validation::steady2_check(pp));
    checks.push_back(validation::steady1_check(pp));

    const validation::EigenComparison eig = validation::compare_trunc2_eigensystem(chi, du);
    checks.push_back({"trunc2_eigenvalues", eig.max_lambda_error, 5.0 * chi * std::pow(du, 3)});
    checks.push_back({"trunc2_eigenvector_overlap_defect", 1.0 - eig.min_overlap, 10.0 * std::pow(du, 4)});
    checks.push_back({"trunc2_eigenvalue_sum", eig.sum_error, 10.0 * chi * du * du});

    const std::vector<double> times = linspace_step(0.0, 50.0 / chi, 0.01 / chi);
    const validation::Psi2Comparison psi2 =
        validation::compare_psi2(chi, du, cfg.unitary_dim, times);
    checks.push_back({"psi2_probabilities", psi2.max_prob_error, 0.02});
    checks.push_back({"psi1_rabi", validation::compare_psi1(chi, du, times), 3.0 * du * du});
    return checks;
}

inline CommandResult compare(const RunConfig& cfg) {
    CommandResult res;
    res.table.columns = {"check", "residual", "bound", "pass"};
    for (const validation::Check& c : oracle_checks(cfg)) {
        res.table.add_row({c.name, c.residual, c.bound, c.passed() ? 1.0 : 0.0});
        if (!c.passed()) {
            res.exit_code = kOracleMismatch;
        }
    }
    return res;
}

}  // namespace kerrpb::cli
