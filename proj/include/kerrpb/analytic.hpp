#pragma once

// Closed-form perturbative solutions for the truncated Kerr cavity, used as
// independent oracles for the numerical solvers.
//
// Two small parameters appear and are kept apart by name:
//   dissipative: delta = gamma / eps, with eps / chi = d * delta
//   unitary:     delta = eps / chi (d = 1, gamma = 0)

#include <kerrpb/fock.hpp>

#include <array>
#include <cmath>
#include <string>

namespace kerrpb::analytic {

struct PerturbationParams {
    double delta = 0.0;  // gamma / eps
    double d = 0.0;      // eps^2 / (gamma chi)

    static PerturbationParams from_physical(double gamma, double eps, double chi) {
        if (!(gamma > 0.0) || !(eps > 0.0) || !(chi > 0.0)) {
            throw InvalidParameter("PerturbationParams: gamma, eps, chi must be positive");
        }
        return {gamma / eps, eps * eps / (gamma * chi)};
    }

    /// delta << 1 and d delta << 1, read as both below 0.3.
    bool valid() const { return delta > 0.0 && d > 0.0 && delta < 0.3 && d * delta < 0.3; }

    /// Physical parameters reproducing (delta, d) at a given gamma.
    double eps(double gamma = 1.0) const { return gamma / delta; }
    double chi(double gamma = 1.0) const { return eps(gamma) / (d * delta); }
};

enum class Order { delta1, delta2 };

namespace detail {

inline void require_valid(const PerturbationParams& p, const char* who) {
    if (!(p.delta > 0.0) || !(p.d > 0.0)) {
        throw InvalidParameter(std::string(who) + ": delta and d must be positive");
    }
}

}  // namespace detail

/// Two-photon blockade (k = 2) steady state on four levels, first order in delta.
/// Not positive semidefinite beyond first order, hence a plain matrix.
inline CMatrix steady2_approx(const PerturbationParams& p) {
    detail::require_valid(p, "steady2_approx");
    const double d = p.d;
    const double dl = p.delta;
    const double s2 = std::sqrt(2.0);
    const double s3 = std::sqrt(3.0);
    const Complex x = Complex(-2.0 * d * d * d + d, -2.0 * d * d);
    const Complex y = -s2 * d * d * Complex(2.0 * d, 1.0);
    const Complex z = Complex(0.0, std::sqrt(6.0) * d * d / 3.0);
    const double r23 = -2.0 / 3.0 * s3 * d * d * d * dl;

    CMatrix m = CMatrix::Zero(4, 4);
    m(0, 0) = 1.0 + 2.0 * d * d;
    m(1, 1) = 4.0 * d * d;
    m(2, 2) = 2.0 * d * d;
    m(0, 1) = std::conj(x) * dl;
    m(1, 0) = x * dl;
    m(0, 2) = Complex(0.0, d * s2);
    m(2, 0) = Complex(0.0, -d * s2);
    m(0, 3) = std::conj(z) * dl;
    m(3, 0) = z * dl;
    m(1, 2) = std::conj(y) * dl;
    m(2, 1) = y * dl;
    m(2, 3) = r23;
    m(3, 2) = r23;
    return m / (1.0 + 8.0 * d * d);
}

/// Single-photon blockade (k = 1) steady state on three levels.
inline CMatrix steady1_approx(const PerturbationParams& p, Order order) {
    detail::require_valid(p, "steady1_approx");
    const double d = p.d;
    const double dl = p.delta;
    const double s2 = std::sqrt(2.0);
    CMatrix m = CMatrix::Zero(3, 3);
    if (order == Order::delta1) {
        m(0, 0) = 0.5;
        m(1, 1) = 0.5;
        m(0, 1) = -0.5 * Complex(d, -0.5) * dl;
        m(1, 0) = -0.5 * Complex(d, 0.5) * dl;
        m(1, 2) = -0.25 * d * s2 * dl;
        m(2, 1) = m(1, 2);
        return m;
    }
    const Complex x = -0.25 * Complex(2.0 * d, 1.0);
    const Complex y = s2 / 8.0 * d * Complex(d, 1.0);
    m(0, 0) = 0.5 + (1.0 - 4.0 * d * d) * dl * dl / 16.0;
    m(1, 1) = 0.5 - dl * dl / 16.0;
    m(2, 2) = d * d * dl * dl / 4.0;
    m(0, 1) = std::conj(x) * dl;
    m(1, 0) = x * dl;
    m(0, 2) = std::conj(y) * dl * dl;
    m(2, 0) = y * dl * dl;
    m(1, 2) = -0.25 * s2 * d * dl;
    m(2, 1) = m(1, 2);
    return m;
}

struct Trunc2Eigensystem {
    std::array<double, 4> lambdas{};
    std::array<CVector, 4> vectors;  // unit norm
    /// |v| N for each closed-form vector v and closed-form constant N; 1 when the
    /// closed-form normalization matches the vector exactly.
    std::array<double, 4> closed_form_norm_ratio{};
};

/// Eigenpairs of the four-level k = 2 Hamiltonian to second order in
/// delta = eps / chi. The pairing normalizations are N_{+-}^{-2} =
/// 6 [3 + (5 +- 2 sqrt 2) delta^2].
inline Trunc2Eigensystem trunc2_eigensystem(double chi, double delta) {
    if (!(chi > 0.0) || !(delta >= 0.0)) {
        throw InvalidParameter("trunc2_eigensystem: need chi > 0 and delta >= 0");
    }
    const double d2 = delta * delta;
    const double s2 = std::sqrt(2.0);
    const double s3 = std::sqrt(3.0);
    const double xm = 1.0 - s2;
    const double xp = 1.0 + s2;

    Trunc2Eigensystem out;
    out.lambdas = {-chi * (3.0 * d2 + 1.0), chi * d2 * xm, chi * d2 * xp, chi * (d2 + 3.0)};

    auto vec4 = [](double c0, double c1, double c2, double c3) {
        CVector v(4);
        v << c0, c1, c2, c3;
        return v;
    };
    const std::array<CVector, 4> raw = {
        vec4(2.0 * s2 * delta, -2.0 * s2 * (3.0 * d2 + 1.0), 4.0 * delta, -s3 * d2),
        vec4(d2 + 3.0, 3.0 * xm * delta, xm * d2 - 3.0, s3 * delta),
        vec4(d2 + 3.0, 3.0 * xp * delta, -(xp * d2 - 3.0), -s3 * delta),
        vec4(0.0, d2, 2.0 * s2 * delta, 2.0 * std::sqrt(6.0)),
    };
    const std::array<double, 4> inv_norm_sq = {
        8.0 * (1.0 + 9.0 * d2),
        6.0 * (3.0 + (5.0 - 2.0 * s2) * d2),
        6.0 * (3.0 + (5.0 + 2.0 * s2) * d2),
        8.0 * (3.0 + d2),
    };
    for (std::size_t j = 0; j < 4; ++j) {
        const double stated = 1.0 / std::sqrt(inv_norm_sq[j]);
        out.closed_form_norm_ratio[j] = raw[j].norm() * stated;
        out.vectors[j] = raw[j] / raw[j].norm();
    }
    return out;
}

/// Dissipation-free k = 2 evolution from |0> keeping the three eigenstates
/// that overlap the vacuum at low order.
inline CVector psi2_evolution(const Trunc2Eigensystem& eig, double t) {
    CVector psi = CVector::Zero(4);
    for (std::size_t j = 0; j < 3; ++j) {
        const Complex overlap = std::conj(eig.vectors[j](0));  // <lambda_j|0>
        psi += std::polar(1.0, -eig.lambdas[j] * t) * overlap * eig.vectors[j];
    }
    return psi;
}

inline CVector psi2_evolution(double chi, double delta, double t) {
    return psi2_evolution(trunc2_eigensystem(chi, delta), t);
}

/// Single-photon Rabi oscillation cos(eps t)|0> - i sin(eps t)|1>.
inline CVector psi1_evolution(double eps, double t) {
    CVector psi = CVector::Zero(3);
    psi(0) = std::cos(eps * t);
    psi(1) = Complex(0.0, -std::sin(eps * t));
    return psi;
}

}  // namespace kerrpb::analytic
