#pragma once

// Driven Kerr cavity in the frame rotating at the drive frequency:
//   H = Delta_k n + chi n (n - k) + eps (a + a^dagger)      (hbar = 1)
// All rates are in units of the damping constant gamma.

#include <kerrpb/fock.hpp>

#include <cmath>
#include <string>

namespace kerrpb {

struct SystemParams {
    double chi = 30.0;    // Kerr nonlinearity
    double eps = 5.0;     // drive strength
    double gamma = 1.0;   // damping constant; 0 selects dissipation-free dynamics
    double n_th = 0.01;   // mean thermal photon number
    Eigen::Index dim = 15;

    void validate() const {
        if (!(chi > 0.0) || !std::isfinite(chi)) {
            throw InvalidParameter("chi must be positive and finite");
        }
        if (!(eps >= 0.0) || !std::isfinite(eps)) {
            throw InvalidParameter("eps must be non-negative and finite");
        }
        if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
            throw InvalidParameter("gamma must be non-negative and finite");
        }
        if (!(n_th >= 0.0) || !std::isfinite(n_th)) {
            throw InvalidParameter("n_th must be non-negative and finite");
        }
        if (dim < 2) {
            throw InvalidDimension("Fock truncation must be >= 2, got " + std::to_string(dim));
        }
    }

    /// gamma << eps << chi, read as factors of three. Diagnostic only.
    bool well_resolved() const { return gamma < eps / 3.0 && eps < chi / 3.0; }
};

struct DriveSpec {
    double omega0 = 0.0;   // cavity resonance
    double omega_d = 0.0;  // drive frequency
};

struct TuningPoint {
    double k = 1.0;
    double delta_k = 0.0;
};

/// On-resonance point for tuning parameter k (Delta_k = 0).
inline TuningPoint resonant(double k) { return {k, 0.0}; }

/// Tuning parameter for which the drive sits on resonance: k = (w_d - w_0)/chi + 1.
inline TuningPoint k_from_frequencies(const DriveSpec& drive, double chi) {
    if (!(chi > 0.0)) {
        throw InvalidParameter("k_from_frequencies: chi must be positive");
    }
    if (!std::isfinite(drive.omega0) || !std::isfinite(drive.omega_d)) {
        throw InvalidParameter("k_from_frequencies: frequencies must be finite");
    }
    return {(drive.omega_d - drive.omega0) / chi + 1.0, 0.0};
}

/// Detuning Delta_k = w_0 + chi (k - 1) - w_d for an arbitrary choice of k.
inline double detuning(const DriveSpec& drive, double chi, double k) {
    return drive.omega0 + chi * (k - 1.0) - drive.omega_d;
}

namespace detail {

inline CMatrix kerr_hamiltonian(double chi, double eps, double k, double delta_k,
                                Eigen::Index dim) {
    CMatrix h = CMatrix::Zero(dim, dim);
    for (Eigen::Index n = 0; n < dim; ++n) {
        const double nd = static_cast<double>(n);
        h(n, n) = delta_k * nd + chi * nd * (nd - k);
        if (n + 1 < dim) {
            const double off = eps * std::sqrt(nd + 1.0);
            h(n, n + 1) = off;
            h(n + 1, n) = off;
        }
    }
    return h;
}

}  // namespace detail

inline CMatrix hamiltonian_rot(const SystemParams& params, const TuningPoint& point) {
    params.validate();
    if (!std::isfinite(point.k) || !std::isfinite(point.delta_k)) {
        throw InvalidParameter("hamiltonian_rot: tuning point must be finite");
    }
    return detail::kerr_hamiltonian(params.chi, params.eps, point.k, point.delta_k, params.dim);
}

/// Resonant Hamiltonian for integer k restricted to the lowest trunc_dim levels.
inline CMatrix hamiltonian_trunc(const SystemParams& params, int k, Eigen::Index trunc_dim) {
    if (trunc_dim <= k) {
        throw InvalidDimension("hamiltonian_trunc: truncation " + std::to_string(trunc_dim) +
                               " must exceed k = " + std::to_string(k));
    }
    SystemParams p = params;
    p.dim = trunc_dim;
    p.validate();
    return detail::kerr_hamiltonian(p.chi, p.eps, static_cast<double>(k), 0.0, trunc_dim);
}

}  // namespace kerrpb
