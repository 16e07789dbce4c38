#pragma once

#include <kerrpb/liouvillian.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kerrpb {

/// P_n = <n|rho|n>, clamped to [0, 1].
inline RVector photon_probs(const DensityMatrix& rho) {
    RVector p = rho.matrix().diagonal().real();
    return p.cwiseMax(0.0).cwiseMin(1.0);
}

/// F_m = sum_{n <= m} P_n.
inline double truncation_fidelity(const DensityMatrix& rho, Eigen::Index m) {
    if (m < 0 || m >= rho.dim()) {
        throw InvalidArgument("truncation_fidelity: m = " + std::to_string(m) +
                              " outside 0.." + std::to_string(rho.dim() - 1));
    }
    return photon_probs(rho).head(m + 1).sum();
}

inline double mean_photon_number(const DensityMatrix& rho) {
    const RVector p = photon_probs(rho);
    double mean = 0.0;
    for (Eigen::Index n = 0; n < p.size(); ++n) {
        mean += static_cast<double>(n) * p(n);
    }
    return mean;
}

/// Fano factor (<n^2> - <n>^2) / <n>; empty when <n> <= 1e-12 (vacuum).
inline std::optional<double> fano(const DensityMatrix& rho) {
    const RVector p = photon_probs(rho);
    double m1 = 0.0;
    double m2 = 0.0;
    for (Eigen::Index n = 0; n < p.size(); ++n) {
        const double nd = static_cast<double>(n);
        m1 += nd * p(n);
        m2 += nd * nd * p(n);
    }
    if (m1 <= 1e-12) {
        return std::nullopt;
    }
    return (m2 - m1 * m1) / m1;
}

inline double purity(const DensityMatrix& rho) {
    // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return rho.matrix().squaredNorm();
}

inline double linear_entropy(const DensityMatrix& rho) { return 1.0 - purity(rho); }

/// -tr(rho ln rho) with eigenvalues clamped to [0, 1] and 0 ln 0 = 0.
inline double vn_entropy(const DensityMatrix& rho) {
    const RVector lambda = hermitian_eig(rho.matrix()).values;
    double s = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        const double l = std::clamp(lambda(i), 0.0, 1.0);
        if (l > 0.0) {
            s -= l * std::log(l);
        }
    }
    return s;
}

/// C = sum_{n != m} |rho_nm|^2, evaluated as mu(rho) - mu(diag rho).
inline double coherence_param(const DensityMatrix& rho) {
    const double diag_purity = rho.matrix().diagonal().squaredNorm();
    return std::max(0.0, purity(rho) - diag_purity);
}

/// C / (1 - 1/dim).
inline double coherence_normalized(const DensityMatrix& rho) {
    const double d = static_cast<double>(rho.dim());
    return coherence_param(rho) / (1.0 - 1.0 / d);
}

/// Uppermost populated Fock level: largest n with P_n > 1e-6.
inline Eigen::Index n_max(const DensityMatrix& rho) {
    const RVector p = photon_probs(rho);
    for (Eigen::Index n = p.size() - 1; n > 0; --n) {
        if (p(n) > 1e-6) {
            return n;
        }
    }
    return 0;
}

/// T = S_L / sqrt((1 + mu - 2 p_0)(1 + mu - 2 p_max)); empty when the
/// denominator is below 1e-12.
inline std::optional<double> thermalization(const DensityMatrix& rho) {
    const double mu = purity(rho);
    const RVector p = photon_probs(rho);
    const double p0 = p(0);
    const double pmax = p(n_max(rho));
    const double denom_sq = (1.0 + mu - 2.0 * p0) * (1.0 + mu - 2.0 * pmax);
    if (!(denom_sq > 0.0)) {
        return std::nullopt;
    }
    const double denom = std::sqrt(denom_sq);
    if (denom <= 1e-12) {
        return std::nullopt;
    }
    return (1.0 - mu) / denom;
}

inline Complex offdiag(const DensityMatrix& rho, Eigen::Index n, Eigen::Index m) {
    if (n < 0 || m < 0 || n >= rho.dim() || m >= rho.dim()) {
        throw InvalidArgument("offdiag: index out of range");
    }
    if (n == m) {
        throw InvalidArgument("offdiag: n and m must differ");
    }
    return rho(n, m);
}

struct PhotonStats {
    RVector probs;
    double mean_n = 0.0;
    std::optional<double> fano;  // empty for the vacuum
};

inline PhotonStats photon_stats(const DensityMatrix& rho) {
    return {photon_probs(rho), mean_photon_number(rho), fano(rho)};
}

struct CoherenceReport {
    double purity = 0.0;
    double vn_entropy = 0.0;
    double linear_entropy = 0.0;
    double coherence = 0.0;
    std::optional<double> thermalization;
    std::map<std::pair<int, int>, Complex> offdiag;
};

/// All mixedness measures plus the requested off-diagonal elements.
inline CoherenceReport coherence_report(const DensityMatrix& rho,
                                        const std::vector<std::pair<int, int>>& elements = {}) {
    CoherenceReport r;
    r.purity = purity(rho);
    r.vn_entropy = vn_entropy(rho);
    r.linear_entropy = 1.0 - r.purity;
    r.coherence = coherence_param(rho);
    r.thermalization = thermalization(rho);
    for (const auto& [n, m] : elements) {
        r.offdiag[{n, m}] = offdiag(rho, n, m);
    }
    return r;
}

}  // namespace kerrpb
