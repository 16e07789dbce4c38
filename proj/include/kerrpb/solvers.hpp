#pragma once

// Steady states of L vec(rho) = 0 and time propagation.
//
// Two independent steady-state routes are provided: a bordered linear solve
// (one redundant row of L replaced by the trace condition) and shifted inverse
// power iteration. Time propagation is fixed-step classical RK4. Because L is
// time independent, one RK4 step is the matrix polynomial
//   R(hL) = I + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24,
// so m steps are evaluated as R(hL)^m by binary powering. This is the same
// map as stepping m times, at a cost logarithmic in m.

#include <kerrpb/liouvillian.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace kerrpb {

enum class SteadyStateMethod { null_space, inverse_power };

inline const char* to_string(SteadyStateMethod m) {
    return m == SteadyStateMethod::null_space ? "null_space" : "inverse_power";
}

struct SteadyStateResult {
    DensityMatrix rho_ss;
    double residual = 0.0;  // ||L vec(rho_ss)||_2
    SteadyStateMethod method = SteadyStateMethod::null_space;
    bool dim_adequate = false;
    int iterations = 0;  // inverse power only
};

template <class State>
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
};

struct SteadyStateOptions {
    SteadyStateMethod method = SteadyStateMethod::null_space;
    double rank_threshold = 1e-10;  // relative pivot threshold for null-space rank
    double max_residual = 1e-8;
    double power_tolerance = 1e-10;
    int power_max_iterations = 100;
    double power_shift_factor = 1e-6;  // sigma = factor * ||L||_1
};

/// Half the trace norm of rho - sigma.
inline double trace_distance(const CMatrix& rho, const CMatrix& sigma) {
    require_same_dim(rho, sigma);
    return 0.5 * hermitian_eig(rho - sigma).values.cwiseAbs().sum();
}

inline double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    return trace_distance(rho.matrix(), sigma.matrix());
}

/// Truncation is adequate when the two highest Fock levels are empty.
inline bool dimension_adequate(const DensityMatrix& rho) {
    const Eigen::Index n = rho.dim();
    if (n < 2) {
        return false;
    }
    return rho(n - 1, n - 1).real() < 1e-10 && rho(n - 2, n - 2).real() < 1e-8;
}

/// Row vector t with t . vec(X) = tr(X).
inline Eigen::RowVectorXcd trace_row(Eigen::Index dim) {
    Eigen::RowVectorXcd t = Eigen::RowVectorXcd::Zero(dim * dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        t(i * dim + i) = 1.0;
    }
    return t;
}

namespace detail {

inline Complex vec_trace(const CVector& v, Eigen::Index dim) {
    Complex tr = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) {
        tr += v(i * dim + i);
    }
    return tr;
}

inline CVector null_space_solve(const SuperOp& l, const SteadyStateOptions& opts) {
    Eigen::FullPivLU<CMatrix> rank_probe(l.matrix);
    rank_probe.setThreshold(opts.rank_threshold);
    const auto kernel = rank_probe.dimensionOfKernel();
    if (kernel > 1) {
        throw AmbiguityError("steady_state: null space of L has dimension " +
                             std::to_string(kernel));
    }
    // Row 0 is the (0,0) population equation, which is redundant given trace
    // preservation.
    CMatrix bordered = l.matrix;
    bordered.row(0) = trace_row(l.dim);
    CVector rhs = CVector::Zero(l.matrix.rows());
    rhs(0) = 1.0;
    return bordered.partialPivLu().solve(rhs);
}

inline std::pair<CVector, int> inverse_power_solve(const SuperOp& l,
                                                   const SteadyStateOptions& opts) {
    const Eigen::Index n2 = l.matrix.rows();
    const double norm1 = l.matrix.cwiseAbs().colwise().sum().maxCoeff();
    const double shift = opts.power_shift_factor * norm1;
    const Eigen::PartialPivLU<CMatrix> lu(l.matrix - shift * CMatrix::Identity(n2, n2));

    CVector x = vectorize(CMatrix(CMatrix::Identity(l.dim, l.dim) / static_cast<double>(l.dim)));
    double residual = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= opts.power_max_iterations; ++it) {
        x = lu.solve(x);
        const Complex tr = vec_trace(x, l.dim);
        if (!(std::abs(tr) > 0.0) || !x.allFinite()) {
            throw SolverError("inverse power iteration lost the trace", residual);
        }
        x /= tr;
        residual = (l.matrix * x).norm();
        if (residual < opts.power_tolerance) {
            return {x, it};
        }
    }
    throw SolverError("inverse power iteration did not converge", residual);
}

}  // namespace detail

inline SteadyStateResult steady_state(const SuperOp& l, const SteadyStateOptions& opts = {}) {
    if (l.dim < 1 || l.matrix.rows() != l.dim * l.dim || l.matrix.cols() != l.dim * l.dim) {
        throw ShapeError("steady_state: malformed superoperator");
    }
    CVector x;
    int iterations = 0;
    if (opts.method == SteadyStateMethod::null_space) {
        x = detail::null_space_solve(l, opts);
    } else {
        std::tie(x, iterations) = detail::inverse_power_solve(l, opts);
    }
    if (!x.allFinite()) {
        throw SolverError("steady_state: non-finite solution", std::numeric_limits<double>::infinity());
    }
    const CMatrix raw = unvectorize(x, l.dim);
    const CMatrix herm = 0.5 * (raw + raw.adjoint());
    const CMatrix normalized = herm / herm.trace().real();
    const double residual = (l.matrix * vectorize(normalized)).norm();
    if (residual > opts.max_residual) {
        throw SolverError("steady_state: residual above tolerance", residual);
    }
    std::optional<DensityMatrix> rho;
    try {
        rho.emplace(normalized);
    } catch (const ContractViolation& e) {
        throw SolverError(std::string("steady_state: solution is not a valid state: ") + e.what(),
                          residual);
    }
    const bool adequate = dimension_adequate(*rho);
    return {std::move(*rho), residual, opts.method, adequate, iterations};
}

inline SteadyStateResult steady_state(const SuperOp& l, SteadyStateMethod method) {
    SteadyStateOptions opts;
    opts.method = method;
    return steady_state(l, opts);
}

/// |psi(t)> = V exp(-i Lambda t) V^dagger |psi0> for each requested time.
inline Trajectory<CVector> evolve_unitary(const CMatrix& h, const CVector& psi0,
                                          std::span<const double> times) {
    if (psi0.size() != h.rows()) {
        throw ShapeError("evolve_unitary: state and Hamiltonian dimensions differ");
    }
    if (std::abs(psi0.norm() - 1.0) > 1e-8) {
        throw InvalidArgument("evolve_unitary: initial state is not normalized");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] >= times[i - 1])) {
            throw InvalidArgument("evolve_unitary: times must be ascending");
        }
    }
    const EigenSystem eig = hermitian_eig(h);
    const CVector coeffs = eig.vectors.adjoint() * psi0;

    Trajectory<CVector> out;
    out.times.assign(times.begin(), times.end());
    out.states.reserve(times.size());
    for (double t : times) {
        CVector phased(coeffs.size());
        for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
            phased(j) = coeffs(j) * std::polar(1.0, -eig.values(j) * t);
        }
        out.states.push_back(eig.vectors * phased);
    }
    return out;
}

/// Fixed-step RK4 propagator for d/dt v = L v.
///
/// The step never exceeds 0.01 / rate_scale; an interval dt is covered by
/// m = ceil(dt / h_max) equal steps. Interval maps are cached by length.
class Rk4Propagator {
public:
    explicit Rk4Propagator(const SuperOp& l) : l_(&l) {
        if (!(l.rate_scale > 0.0) || !std::isfinite(l.rate_scale)) {
            throw InvalidArgument("Rk4Propagator: superoperator has no usable rate scale");
        }
        h_max_ = 0.01 / l.rate_scale;
        if (!(h_max_ > std::numeric_limits<double>::min())) {
            throw NumericError("Rk4Propagator: step size underflow");
        }
    }

    double max_step() const noexcept { return h_max_; }

    std::uint64_t steps_for(double dt) const {
        const double m = std::ceil(dt / h_max_ - 1e-9);
        if (!(m < 1e15)) {
            throw NumericError("Rk4Propagator: step size underflow for interval " +
                               std::to_string(dt));
        }
        return static_cast<std::uint64_t>(std::max(1.0, m));
    }

    /// Map advancing a vector by dt.
    const CMatrix& interval_map(double dt) {
        if (!(dt >= 0.0) || !std::isfinite(dt)) {
            throw InvalidArgument("Rk4Propagator: interval must be finite and non-negative");
        }
        auto it = cache_.find(dt);
        if (it != cache_.end()) {
            return it->second;
        }
        const Eigen::Index n2 = l_->matrix.rows();
        CMatrix result = CMatrix::Identity(n2, n2);
        if (dt > 0.0) {
            const std::uint64_t m = steps_for(dt);
            const double h = dt / static_cast<double>(m);
            result += power_deviation(step_deviation(h), m);
        }
        if (!result.allFinite()) {
            throw NumericError("Rk4Propagator: non-finite propagator");
        }
        return cache_.emplace(dt, std::move(result)).first->second;
    }

    CVector advance(const CVector& v, double dt) { return interval_map(dt) * v; }

private:
    // Step map minus the identity, R(hL) - I. Keeping the identity out of the
    // products avoids the rounding of I + O(h) entries during powering.
    CMatrix step_deviation(double h) const {
        const Eigen::Index n2 = l_->matrix.rows();
        const CMatrix id = CMatrix::Identity(n2, n2);
        const CMatrix hl = h * l_->matrix;
        CMatrix r = id + hl / 4.0;
        r = id + (hl / 3.0) * r;
        r = id + (hl / 2.0) * r;
        return hl * r;
    }

    // (I + e)^m - I by binary powering on deviations:
    // (I + a)(I + b) - I = a + b + a b.
    static CMatrix power_deviation(CMatrix e, std::uint64_t m) {
        CMatrix acc = CMatrix::Zero(e.rows(), e.cols());
        while (m > 0) {
            if (m & 1u) {
                acc = CMatrix(acc + e + acc * e);
            }
            m >>= 1u;
            if (m > 0) {
                e = CMatrix(2.0 * e + e * e);
            }
        }
        return acc;
    }

    const SuperOp* l_;
    double h_max_;
    std::map<double, CMatrix> cache_;
};

/// rho(t) for t in `times` (ascending, >= 0), starting from rho0 at t = 0.
inline Trajectory<DensityMatrix> evolve_master(const SuperOp& l, const DensityMatrix& rho0,
                                               std::span<const double> times) {
    if (rho0.dim() != l.dim) {
        throw ShapeError("evolve_master: state dimension does not match the Liouvillian");
    }
    Rk4Propagator prop(l);
    Trajectory<DensityMatrix> out;
    out.times.assign(times.begin(), times.end());
    out.states.reserve(times.size());
    CVector v = vectorize(rho0);
    double t_prev = 0.0;
    for (double t : times) {
        if (!(t >= t_prev)) {
            throw InvalidArgument("evolve_master: times must be ascending and non-negative");
        }
        v = prop.advance(v, t - t_prev);
        if (!v.allFinite()) {
            throw NumericError("evolve_master: non-finite state at t = " + std::to_string(t));
        }
        try {
            out.states.emplace_back(unvectorize(v, l.dim));
        } catch (const ContractViolation& e) {
            throw NumericError("evolve_master: state left the density-matrix set at t = " +
                               std::to_string(t) + ": " + e.what());
        }
        t_prev = t;
    }
    return out;
}

/// exp(L tau) applied to a vectorized operator, by the evolve_master stepper.
inline CVector propagate(const SuperOp& l, const CVector& op_vec, double tau) {
    if (!(tau >= 0.0)) {
        throw InvalidArgument("propagate: tau must be non-negative");
    }
    if (op_vec.size() != l.matrix.rows()) {
        throw ShapeError("propagate: vector length does not match the Liouvillian");
    }
    if (tau == 0.0) {
        return op_vec;
    }
    Rk4Propagator prop(l);
    return prop.advance(op_vec, tau);
}

}  // namespace kerrpb
