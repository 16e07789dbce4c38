#pragma once

// Two-time quadrature covariance via the quantum regression theorem and the
// spectrum of squeezing.
//
// For X_theta = a e^{-i theta} + a^dag e^{i theta}, the normally and time
// ordered correlation at lag tau >= 0 is
//   <a^dag(tau) a(0)> + <a^dag(0) a(tau)>
//   + e^{-2i theta} <a(tau) a(0)> + e^{2i theta} <a^dag(0) a^dag(tau)>,
// and the covariance subtracts <X_theta>^2. Each two-time average is a trace
// against a propagated operator: e.g. <a^dag(tau) a(0)> = tr[a^dag e^{L tau}(a rho)].
//
// Stationarity gives Cov(-tau) = conj(Cov(tau)), so the spectrum is evaluated
// one-sided as S(omega) = 2 Re int_0^inf e^{-i omega tau} Cov(tau) d tau.

#include <kerrpb/solvers.hpp>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace kerrpb {

struct CovarianceSeries {
    double theta = 0.0;
    std::vector<double> taus;     // ascending, taus[0] = 0
    std::vector<Complex> values;  // Cov_theta(tau)
};

struct SpectrumResult {
    double theta = 0.0;
    std::vector<double> omegas;
    std::vector<double> values;
    double imag_residual = 0.0;  // max |Im| of the explicit two-sided transform
};

/// X_theta = a e^{-i theta} + a^dag e^{i theta}.
inline CMatrix quadrature(Eigen::Index dim, double theta) {
    const CMatrix a = annihilation(dim);
    return a * std::polar(1.0, -theta) + a.adjoint() * std::polar(1.0, theta);
}

namespace detail {

/// Row r with r . vec(X) = tr(A X).
inline Eigen::RowVectorXcd trace_against(const CMatrix& a) {
    return vectorize(CMatrix(a.transpose())).transpose();
}

inline void require_lag_grid(std::span<const double> taus, const char* who) {
    if (taus.empty() || taus.front() != 0.0) {
        throw InvalidArgument(std::string(who) + ": lag grid must start at 0");
    }
    for (std::size_t i = 1; i < taus.size(); ++i) {
        if (!(taus[i] > taus[i - 1])) {
            throw InvalidArgument(std::string(who) + ": lags must be strictly ascending");
        }
    }
}

}  // namespace detail

/// The four regression correlators and the stationary mean, for one lag grid.
struct RegressionCorrelators {
    std::vector<double> taus;
    std::vector<Complex> ad_tau_a0;   // <a^dag(tau) a(0)>
    std::vector<Complex> ad0_a_tau;   // <a^dag(0) a(tau)>
    std::vector<Complex> a_tau_a0;    // <a(tau) a(0)>
    std::vector<Complex> ad0_ad_tau;  // <a^dag(0) a^dag(tau)>
    Complex mean_a = 0.0;             // <a>

    /// Cov_theta(tau) assembled from the correlators.
    CovarianceSeries covariance(double theta) const {
        const Complex ph2m = std::polar(1.0, -2.0 * theta);
        const Complex ph2p = std::conj(ph2m);
        const Complex mean_x = mean_a * std::polar(1.0, -theta) +
                               std::conj(mean_a) * std::polar(1.0, theta);
        CovarianceSeries s;
        s.theta = theta;
        s.taus = taus;
        s.values.resize(taus.size());
        for (std::size_t i = 0; i < taus.size(); ++i) {
            s.values[i] = ad_tau_a0[i] + ad0_a_tau[i] + ph2m * a_tau_a0[i] +
                          ph2p * ad0_ad_tau[i] - mean_x * mean_x;
        }
        return s;
    }
};

inline RegressionCorrelators regression_correlators(const SuperOp& l,
                                                    const DensityMatrix& rho_ss,
                                                    std::span<const double> taus) {
    if (rho_ss.dim() != l.dim) {
        throw ShapeError("two_time_covariance: state dimension does not match the Liouvillian");
    }
    detail::require_lag_grid(taus, "two_time_covariance");
    const double residual = (l.matrix * vectorize(rho_ss)).norm();
    if (residual > 1e-6) {
        throw StaleSteadyState("two_time_covariance: rho_ss residual " + std::to_string(residual) +
                               " exceeds 1e-6");
    }
    const CMatrix a = annihilation(l.dim);
    const CMatrix ad = a.adjoint();
    const CMatrix& rho = rho_ss.matrix();
    const Eigen::RowVectorXcd tr_a = detail::trace_against(a);
    const Eigen::RowVectorXcd tr_ad = detail::trace_against(ad);

    CVector left = vectorize(CMatrix(a * rho));    // a rho
    CVector right = vectorize(CMatrix(rho * ad));  // rho a^dag

    RegressionCorrelators c;
    c.taus.assign(taus.begin(), taus.end());
    c.mean_a = (a * rho).trace();
    const std::size_t n = taus.size();
    c.ad_tau_a0.resize(n);
    c.ad0_a_tau.resize(n);
    c.a_tau_a0.resize(n);
    c.ad0_ad_tau.resize(n);

    Rk4Propagator prop(l);
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = taus[i] - prev;
        if (dt > 0.0) {
            const CMatrix& step = prop.interval_map(dt);
            left = step * left;
            right = step * right;
        }
        prev = taus[i];
        c.ad_tau_a0[i] = (tr_ad * left).value();
        c.a_tau_a0[i] = (tr_a * left).value();
        c.ad0_a_tau[i] = (tr_a * right).value();
        c.ad0_ad_tau[i] = (tr_ad * right).value();
    }
    return c;
}

inline CovarianceSeries two_time_covariance(const SuperOp& l, const DensityMatrix& rho_ss,
                                            double theta, std::span<const double> taus) {
    return regression_correlators(l, rho_ss, taus).covariance(theta);
}

/// Normally ordered static variance <:X_theta^2:> - <X_theta>^2.
inline double static_normal_variance(const DensityMatrix& rho, double theta) {
    const CMatrix a = annihilation(rho.dim());
    const CMatrix ad = a.adjoint();
    const CMatrix& r = rho.matrix();
    const Complex n = (ad * a * r).trace();
    const Complex aa = (a * a * r).trace();
    const Complex mean_a = (a * r).trace();
    const Complex mean_x = mean_a * std::polar(1.0, -theta) + std::conj(mean_a) * std::polar(1.0, theta);
    const Complex v = 2.0 * n + std::polar(1.0, -2.0 * theta) * aa +
                      std::polar(1.0, 2.0 * theta) * std::conj(aa) - mean_x * mean_x;
    return v.real();
}

/// Default lag grid 0..tau_max with step dtau.
inline std::vector<double> lag_grid(double tau_max, double dtau) {
    if (!(dtau > 0.0) || !(tau_max > 0.0)) {
        throw InvalidArgument("lag_grid: need positive tau_max and step");
    }
    const auto n = static_cast<std::size_t>(std::llround(tau_max / dtau));
    std::vector<double> out(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        out[i] = static_cast<double>(i) * dtau;
    }
    return out;
}

inline SpectrumResult squeezing_spectrum(const CovarianceSeries& series,
                                         std::span<const double> omegas) {
    detail::require_lag_grid(series.taus, "squeezing_spectrum");
    if (series.values.size() != series.taus.size()) {
        throw ShapeError("squeezing_spectrum: lags and values differ in length");
    }
    const std::size_t n = series.taus.size();
    const double c0 = std::abs(series.values.front());
    const double tail = std::abs(series.values.back());
    if (n < 2 || tail > 1e-6 * c0 + 1e-15) {
        throw WindowTooShort("squeezing_spectrum: |Cov| at the last lag is " +
                             std::to_string(tail) + ", above 1e-6 |Cov(0)|");
    }
    // trapezoid weights on a possibly non-uniform grid
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = series.taus[i + 1] - series.taus[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }

    SpectrumResult out;
    out.theta = series.theta;
    out.omegas.assign(omegas.begin(), omegas.end());
    out.values.resize(omegas.size());
    for (std::size_t k = 0; k < omegas.size(); ++k) {
        const double om = omegas[k];
        Complex one_sided = 0.0;
        // on (-T, T) the tau = 0 sample is interior and carries weight 2 w[0]
        Complex two_sided = 2.0 * w[0] * series.values[0];
        for (std::size_t i = 0; i < n; ++i) {
            const Complex ph = std::polar(1.0, -om * series.taus[i]);
            const Complex term = w[i] * ph * series.values[i];
            one_sided += term;
            if (i > 0) {
                two_sided += term + w[i] * std::conj(ph) * std::conj(series.values[i]);
            }
        }
        out.values[k] = 2.0 * one_sided.real();
        out.imag_residual = std::max(out.imag_residual, std::abs(two_sided.imag()));
    }
    return out;
}

}  // namespace kerrpb
