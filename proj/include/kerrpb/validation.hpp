#pragma once

// Residuals between the closed-form perturbative solutions and the numerical
// solvers, each paired with the bound it is expected to meet.

#include <kerrpb/analytic.hpp>
#include <kerrpb/model.hpp>
#include <kerrpb/solvers.hpp>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace kerrpb::validation {

struct Check {
    std::string name;
    double residual = 0.0;
    double bound = 0.0;

    bool passed() const { return std::isfinite(residual) && residual <= bound; }
};

/// Largest elementwise modulus of a - b.
inline double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError("max_abs_diff: shapes differ");
    }
    return a.rows() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

/// Numerical steady state of the resonant Hamiltonian truncated to trunc_dim
/// levels, at the physical point of (delta, d) with gamma = 1 and no thermal
/// photons.
inline CMatrix truncated_steady_state(const analytic::PerturbationParams& p, int k,
                                      Eigen::Index trunc_dim) {
    SystemParams sp;
    sp.gamma = 1.0;
    sp.n_th = 0.0;
    sp.eps = p.eps(sp.gamma);
    sp.chi = p.chi(sp.gamma);
    const SuperOp l = build_liouvillian(hamiltonian_trunc(sp, k, trunc_dim), sp.gamma, 0.0);
    return steady_state(l).rho_ss.matrix();
}

/// Four-level k = 2 steady state against its first-order formula; bound 5 delta^2.
inline Check steady2_check(const analytic::PerturbationParams& p) {
    const double r = max_abs_diff(truncated_steady_state(p, 2, 4), analytic::steady2_approx(p));
    return {"steady2", r, 5.0 * p.delta * p.delta};
}

/// Three-level k = 1 steady state against its second-order formula; bound 5 delta^3.
inline Check steady1_check(const analytic::PerturbationParams& p) {
    const double r = max_abs_diff(truncated_steady_state(p, 1, 3),
                                  analytic::steady1_approx(p, analytic::Order::delta2));
    return {"steady1", r, 5.0 * std::pow(p.delta, 3)};
}

struct EigenComparison {
    double max_lambda_error = 0.0;  // max_i |lambda_i approx - exact|
    double min_overlap = 1.0;       // min_i |<approx_i|exact_i>|
    double sum_error = 0.0;         // |sum lambda approx - 2 chi|
};

/// Perturbative four-level eigensystem against the exact eigensolve of the
/// truncated k = 2 Hamiltonian with eps = delta chi.
inline EigenComparison compare_trunc2_eigensystem(double chi, double delta) {
    SystemParams sp;
    sp.chi = chi;
    sp.eps = delta * chi;
    sp.gamma = 0.0;
    const EigenSystem exact = hermitian_eig(hamiltonian_trunc(sp, 2, 4));
    const analytic::Trunc2Eigensystem approx = analytic::trunc2_eigensystem(chi, delta);
    EigenComparison c;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < 4; ++i) {
        const auto j = static_cast<std::size_t>(i);
        sum += approx.lambdas[j];
        c.max_lambda_error =
            std::max(c.max_lambda_error, std::abs(approx.lambdas[j] - exact.values(i)));
        c.min_overlap =
            std::min(c.min_overlap, std::abs(exact.vectors.col(i).dot(approx.vectors[j])));
    }
    c.sum_error = std::abs(sum - 2.0 * chi);
    return c;
}

struct Psi2Comparison {
    double max_prob_error = 0.0;  // max over t and n <= 3 of |P_n approx - P_n full|
    double min_f2 = 1.0;          // of the full evolution
    double max_p3 = 0.0;          // of the full evolution
};

/// Dissipation-free k = 2 dynamics from |0>: perturbative four-level state
/// against unitary evolution in `dim` levels, with eps = delta chi.
inline Psi2Comparison compare_psi2(double chi, double delta, Eigen::Index dim,
                                   std::span<const double> times) {
    SystemParams sp;
    sp.chi = chi;
    sp.eps = delta * chi;
    sp.gamma = 0.0;
    sp.dim = dim;
    if (dim < 4) {
        throw InvalidDimension("compare_psi2: need at least four levels");
    }
    const auto full = evolve_unitary(hamiltonian_rot(sp, resonant(2.0)), fock_state(dim, 0), times);
    const analytic::Trunc2Eigensystem eig = analytic::trunc2_eigensystem(chi, delta);
    Psi2Comparison c;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const RVector pf = full.states[i].cwiseAbs2();
        const RVector pa = analytic::psi2_evolution(eig, times[i]).cwiseAbs2();
        for (Eigen::Index n = 0; n < 4; ++n) {
            c.max_prob_error = std::max(c.max_prob_error, std::abs(pa(n) - pf(n)));
        }
        c.min_f2 = std::min(c.min_f2, pf.head(3).sum());
        c.max_p3 = std::max(c.max_p3, pf(3));
    }
    return c;
}

/// max_t |P_1(t) - sin^2(eps t)| for the three-level k = 1 Hamiltonian with
/// eps = delta chi and no dissipation.
inline double compare_psi1(double chi, double delta, std::span<const double> times) {
    SystemParams sp;
    sp.chi = chi;
    sp.eps = delta * chi;
    sp.gamma = 0.0;
    const auto traj = evolve_unitary(hamiltonian_trunc(sp, 1, 3), fock_state(3, 0), times);
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double p1 = std::norm(traj.states[i](1));
        const double s = std::sin(sp.eps * times[i]);
        worst = std::max(worst, std::abs(p1 - s * s));
    }
    return worst;
}

}  // namespace kerrpb::validation
