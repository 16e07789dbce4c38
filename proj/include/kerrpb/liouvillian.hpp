#pragma once

// Lindblad generator for a cavity coupled to a thermal bath:
//   drho/dt = -i[H, rho]
//             + (gamma/2) n_th     (2 a^dag rho a - a a^dag rho - rho a a^dag)
//             + (gamma/2)(n_th+1)  (2 a rho a^dag - a^dag a rho - rho a^dag a)
//
// Vectorization is column stacking everywhere in the library:
//   vec(rho)[i*N + j] = rho(j, i),   vec(A rho B) = (B^T kron A) vec(rho).
// This is Eigen's native column-major storage order.

#include <kerrpb/fock.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace kerrpb {

class DensityMatrix {
public:
    static constexpr double kHermitianTol = 1e-10;
    static constexpr double kTraceTol = 1e-10;
    static constexpr double kPositivityTol = 1e-8;

    /// Validates Hermiticity, unit trace and positivity.
    explicit DensityMatrix(CMatrix mat) : mat_(std::move(mat)) {
        detail::require_square(mat_, "DensityMatrix");
        detail::require_finite(mat_, "DensityMatrix");
        if (hermiticity_defect(mat_) > kHermitianTol) {
            throw ContractViolation("DensityMatrix: not Hermitian (defect " +
                                    std::to_string(hermiticity_defect(mat_)) + ")");
        }
        const Complex tr = mat_.trace();
        if (std::abs(tr - 1.0) > kTraceTol) {
            throw ContractViolation("DensityMatrix: trace is " + std::to_string(tr.real()) +
                                    (tr.imag() != 0.0 ? " + i" + std::to_string(tr.imag()) : ""));
        }
        const double lowest = hermitian_eig(mat_).values(0);
        if (lowest < -kPositivityTol) {
            throw ContractViolation("DensityMatrix: negative eigenvalue " +
                                    std::to_string(lowest));
        }
    }

    static DensityMatrix pure(const CVector& psi) {
        const double norm = psi.norm();
        if (!(norm > 0.0)) {
            throw InvalidArgument("DensityMatrix::pure: zero vector");
        }
        const CVector u = psi / norm;
        return DensityMatrix(u * u.adjoint());
    }

    static DensityMatrix fock(Eigen::Index dim, Eigen::Index n) {
        return pure(fock_state(dim, n));
    }

    static DensityMatrix diagonal(const RVector& probs) {
        return DensityMatrix(probs.cast<Complex>().asDiagonal());
    }

    /// Thermal state with p_n proportional to (n_th / (1 + n_th))^n on dim levels.
    static DensityMatrix thermal(Eigen::Index dim, double n_th) {
        detail::require_dim(dim);
        if (!(n_th >= 0.0)) {
            throw InvalidParameter("thermal: n_th must be non-negative");
        }
        RVector p(dim);
        const double ratio = n_th / (1.0 + n_th);
        double w = 1.0;
        for (Eigen::Index n = 0; n < dim; ++n) {
            p(n) = w;
            w *= ratio;
        }
        return diagonal(p / p.sum());
    }

    /// Hermitizes, renormalizes the trace and then validates.
    static DensityMatrix normalized(const CMatrix& m) {
        detail::require_square(m, "DensityMatrix::normalized");
        CMatrix h = 0.5 * (m + m.adjoint());
        const double tr = h.trace().real();
        if (!(std::abs(tr) > 0.0) || !std::isfinite(tr)) {
            throw NumericError("DensityMatrix::normalized: trace vanishes");
        }
        return DensityMatrix(h / tr);
    }

    const CMatrix& matrix() const noexcept { return mat_; }
    Eigen::Index dim() const noexcept { return mat_.rows(); }
    Complex operator()(Eigen::Index n, Eigen::Index m) const { return mat_(n, m); }

private:
    CMatrix mat_;
};

struct SuperOp {
    Eigen::Index dim = 0;  // Fock dimension N; matrix is N^2 x N^2
    CMatrix matrix;
    /// Fastest rate in the generator, max(gamma (n_th+1) N, ||H||_2). Sets the
    /// explicit integrator step bound.
    double rate_scale = 0.0;
};

inline CVector vectorize(const CMatrix& m) {
    detail::require_square(m, "vectorize");
    return Eigen::Map<const CVector>(m.data(), m.size());
}

inline CVector vectorize(const DensityMatrix& rho) { return vectorize(rho.matrix()); }

inline CMatrix unvectorize(const CVector& v, Eigen::Index dim) {
    detail::require_dim(dim);
    if (v.size() != dim * dim) {
        throw ShapeError("unvectorize: length " + std::to_string(v.size()) + " is not " +
                         std::to_string(dim) + "^2");
    }
    return Eigen::Map<const CMatrix>(v.data(), dim, dim);
}

/// Wraps an arbitrary N^2 x N^2 generator; rate_scale falls back to ||L||_1.
inline SuperOp make_superop(CMatrix matrix) {
    const auto n2 = matrix.rows();
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n2))));
    if (matrix.cols() != n2 || n * n != n2 || n < 1) {
        throw ShapeError("make_superop: matrix must be N^2 x N^2");
    }
    const double norm1 = matrix.cwiseAbs().colwise().sum().maxCoeff();
    return {n, std::move(matrix), norm1};
}

inline CMatrix build_liouvillian_matrix(const CMatrix& h, double gamma, double n_th) {
    const Eigen::Index n = h.rows();
    const CMatrix id = CMatrix::Identity(n, n);
    const CMatrix a = annihilation(n);
    const CMatrix ad = a.adjoint();

    // A rho B  ->  B^T kron A
    CMatrix l = -kI * (kron(id, h) - kron(h.transpose(), id));

    auto add_dissipator = [&](const CMatrix& jump, double rate) {
        if (rate == 0.0) {
            return;
        }
        const CMatrix jdj = jump.adjoint() * jump;
        l += (0.5 * rate) * (2.0 * kron(jump.conjugate(), jump) - kron(id, jdj) -
                             kron(jdj.transpose(), id));
    };
    add_dissipator(a, gamma * (n_th + 1.0));
    add_dissipator(ad, gamma * n_th);
    return l;
}

inline SuperOp build_liouvillian(const CMatrix& h, double gamma, double n_th) {
    detail::require_square(h, "build_liouvillian");
    detail::require_finite(h, "build_liouvillian");
    if (!is_hermitian(h)) {
        throw ContractViolation("build_liouvillian: Hamiltonian is not Hermitian");
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw InvalidParameter("build_liouvillian: gamma must be positive");
    }
    if (!(n_th >= 0.0) || !std::isfinite(n_th)) {
        throw InvalidParameter("build_liouvillian: n_th must be non-negative");
    }
    const Eigen::Index n = h.rows();
    const auto spectrum = hermitian_eig(h).values;
    const double h_norm = std::max(std::abs(spectrum(0)), std::abs(spectrum(n - 1)));
    const double damping = gamma * (n_th + 1.0) * static_cast<double>(n);
    return {n, build_liouvillian_matrix(h, gamma, n_th), std::max(damping, h_norm)};
}

inline CMatrix apply(const SuperOp& l, const CMatrix& rho) {
    if (rho.rows() != l.dim || rho.cols() != l.dim) {
        throw ShapeError("apply: state dimension does not match the Liouvillian");
    }
    return unvectorize(l.matrix * vectorize(rho), l.dim);
}

inline CMatrix apply(const SuperOp& l, const DensityMatrix& rho) { return apply(l, rho.matrix()); }

/// Right-hand side of the master equation evaluated with matrix products only,
/// independent of the superoperator assembly.
inline CMatrix lindblad_rhs(const CMatrix& h, double gamma, double n_th, const CMatrix& rho) {
    require_same_dim(h, rho);
    const Eigen::Index n = h.rows();
    const CMatrix a = annihilation(n);
    const CMatrix ad = a.adjoint();
    CMatrix out = -kI * (h * rho - rho * h);
    out += 0.5 * gamma * n_th * (2.0 * ad * rho * a - a * ad * rho - rho * a * ad);
    out += 0.5 * gamma * (n_th + 1.0) * (2.0 * a * rho * ad - ad * a * rho - rho * ad * a);
    return out;
}

}  // namespace kerrpb
