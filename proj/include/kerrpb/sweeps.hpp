#pragma once

// Parameter sweeps over the Kerr cavity model: per-point observable records,
// a deterministic worker pool, and spectrum runs with automatic lag windows.

#include <kerrpb/correlations.hpp>
#include <kerrpb/model.hpp>
#include <kerrpb/observables.hpp>
#include <kerrpb/phase_space.hpp>
#include <kerrpb/solvers.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

namespace kerrpb {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// f(0..n-1) on `jobs` threads; results in index order. The exception of the
/// lowest failing index is rethrown after all workers finish.
template <class F>
auto parallel_map(std::size_t n, unsigned jobs, F&& f) {
    using R = std::invoke_result_t<F&, std::size_t>;
    std::vector<std::optional<R>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i].emplace(f(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned count = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    if (count <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(count);
        for (unsigned t = 0; t < count; ++t) {
            pool.emplace_back(worker);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i]) {
            std::rethrow_exception(errors[i]);
        }
    }
    std::vector<R> out;
    out.reserve(n);
    for (auto& s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

/// Inclusive range lo, lo + step, ..., hi.
struct Range {
    double lo = 0.0;
    double hi = 0.0;
    double step = 1.0;

    std::vector<double> values() const { return linspace_step(lo, hi, step); }
};

/// Steady-state observables at one tuning point.
struct SteadyPoint {
    double k = 0.0;
    double eps = 0.0;
    std::optional<DensityMatrix> rho;  // empty when the solve failed
    double residual = kNaN;
    bool dim_adequate = false;
    std::string error;
};

inline SteadyPoint steady_point(const SystemParams& params, double k,
                                SteadyStateMethod method = SteadyStateMethod::null_space) {
    SteadyPoint pt;
    pt.k = k;
    pt.eps = params.eps;
    try {
        const SuperOp l =
            build_liouvillian(hamiltonian_rot(params, resonant(k)), params.gamma, params.n_th);
        SteadyStateResult r = steady_state(l, method);
        pt.residual = r.residual;
        pt.dim_adequate = r.dim_adequate;
        pt.rho.emplace(std::move(r.rho_ss));
    } catch (const SolverError& e) {
        pt.residual = e.residual();
        pt.error = e.what();
    } catch (const Error& e) {
        pt.error = e.what();
    }
    return pt;
}

/// Probability P_n, zero above the truncation, NaN when no state.
inline double prob_or_nan(const SteadyPoint& pt, Eigen::Index n) {
    if (!pt.rho) {
        return kNaN;
    }
    return n < pt.rho->dim() ? photon_probs(*pt.rho)(n) : 0.0;
}

inline double fidelity_or_nan(const DensityMatrix* rho, Eigen::Index m) {
    if (rho == nullptr || m >= rho->dim()) {
        return kNaN;
    }
    return truncation_fidelity(*rho, m);
}

inline double value_or_nan(const std::optional<double>& v) { return v.value_or(kNaN); }

// ---- time evolution --------------------------------------------------------

struct EvolutionPoint {
    double t = 0.0;
    RVector probs;
    double norm = 0.0;  // ||psi||^2 or tr rho
};

/// Evolution from |n0> at the requested times: unitary when gamma = 0,
/// master equation otherwise.
inline std::vector<EvolutionPoint> evolve_populations(const SystemParams& params, double k,
                                                      std::span<const double> times,
                                                      Eigen::Index n0 = 0) {
    params.validate();
    const CMatrix h = hamiltonian_rot(params, resonant(k));
    std::vector<EvolutionPoint> out;
    out.reserve(times.size());
    if (params.gamma == 0.0) {
        const auto traj = evolve_unitary(h, fock_state(params.dim, n0), times);
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            const CVector& psi = traj.states[i];
            out.push_back({traj.times[i], psi.cwiseAbs2(), psi.squaredNorm()});
        }
        return out;
    }
    const SuperOp l = build_liouvillian(h, params.gamma, params.n_th);
    const auto traj = evolve_master(l, DensityMatrix::fock(params.dim, n0), times);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const DensityMatrix& rho = traj.states[i];
        out.push_back({traj.times[i], photon_probs(rho), rho.matrix().trace().real()});
    }
    return out;
}

// ---- spectra ---------------------------------------------------------------

struct SpectrumOptions {
    double tau_max = 20.0;    // initial lag window, in 1/gamma
    double dtau = 0.01;       // in 1/gamma
    double tau_cap = 640.0;   // window is doubled until decay or this cap
    Range omega{-40.0, 40.0, 0.05};
};

struct SpectrumRun {
    std::vector<CovarianceSeries> covariances;
    std::vector<SpectrumResult> spectra;
    double tau_window = 0.0;
};

/// Spectra of squeezing of the steady state at tuning k, one per theta.
/// The lag window starts at tau_max and doubles until every covariance has
/// decayed below the spectrum threshold.
inline SpectrumRun steady_state_spectra(const SystemParams& params, double k,
                                        std::span<const double> thetas,
                                        const SpectrumOptions& opts = {}) {
    params.validate();
    if (!(params.gamma > 0.0)) {
        throw InvalidParameter("spectrum: needs gamma > 0");
    }
    const SuperOp l =
        build_liouvillian(hamiltonian_rot(params, resonant(k)), params.gamma, params.n_th);
    const SteadyStateResult ss = steady_state(l);
    const std::vector<double> omegas = opts.omega.values();
    const double unit = 1.0 / params.gamma;

    for (double window = opts.tau_max;; window *= 2.0) {
        const std::vector<double> taus = lag_grid(window * unit, opts.dtau * unit);
        const RegressionCorrelators corr = regression_correlators(l, ss.rho_ss, taus);
        SpectrumRun run;
        run.tau_window = window * unit;
        try {
            for (double theta : thetas) {
                run.covariances.push_back(corr.covariance(theta));
                run.spectra.push_back(squeezing_spectrum(run.covariances.back(), omegas));
            }
            return run;
        } catch (const WindowTooShort&) {
            if (window * 2.0 > opts.tau_cap) {
                throw;
            }
        }
    }
}

}  // namespace kerrpb
