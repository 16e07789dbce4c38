#pragma once

// Dense complex matrices on a truncated Fock space and the bosonic operators
// built on it. Fock index n runs over 0..dim-1; operators are exact on that
// basis, so identities like [a, a^dagger] = 1 fail only on the top level.

#include <kerrpb/errors.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>

namespace kerrpb {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

namespace detail {

inline void require_dim(Eigen::Index dim) {
    if (dim < 1) {
        throw InvalidDimension("Fock dimension must be >= 1, got " + std::to_string(dim));
    }
}

inline void require_square(const CMatrix& m, const char* who) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw ShapeError(std::string(who) + ": expected a non-empty square matrix");
    }
}

inline void require_finite(const CMatrix& m, const char* who) {
    if (!m.allFinite()) {
        throw NumericError(std::string(who) + ": matrix has non-finite entries");
    }
}

}  // namespace detail

inline void require_same_dim(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError("operand dimensions differ: " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
    }
}

/// Product with a dimension check that survives release builds.
inline CMatrix checked_product(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matrix product: inner dimensions differ");
    }
    return a * b;
}

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) {
    require_same_dim(a, b);
    return a * b - b * a;
}

inline CMatrix identity(Eigen::Index dim) {
    detail::require_dim(dim);
    return CMatrix::Identity(dim, dim);
}

/// Lowering operator: <n-1|a|n> = sqrt(n).
inline CMatrix annihilation(Eigen::Index dim) {
    detail::require_dim(dim);
    CMatrix a = CMatrix::Zero(dim, dim);
    for (Eigen::Index n = 1; n < dim; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

inline CMatrix creation(Eigen::Index dim) { return annihilation(dim).adjoint(); }

inline CMatrix number(Eigen::Index dim) {
    detail::require_dim(dim);
    CMatrix n = CMatrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        n(i, i) = static_cast<double>(i);
    }
    return n;
}

inline CMatrix parity(Eigen::Index dim) {
    detail::require_dim(dim);
    CMatrix p = CMatrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        p(i, i) = (i % 2 == 0) ? 1.0 : -1.0;
    }
    return p;
}

inline CVector fock_state(Eigen::Index dim, Eigen::Index n) {
    detail::require_dim(dim);
    if (n < 0 || n >= dim) {
        throw InvalidArgument("Fock index " + std::to_string(n) + " outside 0.." +
                              std::to_string(dim - 1));
    }
    CVector v = CVector::Zero(dim);
    v(n) = 1.0;
    return v;
}

/// Zero-extends a square matrix into a larger space (upper-left block).
inline CMatrix embed(const CMatrix& m, Eigen::Index dim) {
    detail::require_square(m, "embed");
    if (dim < m.rows()) {
        throw InvalidDimension("embed: target dimension smaller than source");
    }
    CMatrix out = CMatrix::Zero(dim, dim);
    out.topLeftCorner(m.rows(), m.cols()) = m;
    return out;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline double hermiticity_defect(const CMatrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const CMatrix& m, double tol = 1e-10) {
    if (m.rows() != m.cols()) {
        return false;
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return hermiticity_defect(m) <= tol * scale;
}

/// Matrix exponential by scaling and squaring with the degree-13 Pade
/// approximant (Higham 2005 coefficients; backward error below unit roundoff).
inline CMatrix expm(const CMatrix& m) {
    detail::require_square(m, "expm");
    detail::require_finite(m, "expm");

    static constexpr std::array<double, 14> b = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
        129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
        1323241920.0,        40840800.0,          960960.0,           16380.0,
        182.0,               1.0};
    constexpr double theta13 = 5.371920351148152;

    const Eigen::Index n = m.rows();
    const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    }
    const CMatrix a = m / std::ldexp(1.0, squarings);
    const CMatrix id = CMatrix::Identity(n, n);
    const CMatrix a2 = a * a;
    const CMatrix a4 = a2 * a2;
    const CMatrix a6 = a4 * a2;

    const CMatrix u_inner =
        a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
    const CMatrix u = a * u_inner;
    const CMatrix v =
        a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;

    CMatrix r = (v - u).partialPivLu().solve(v + u);
    for (int s = 0; s < squarings; ++s) {
        r = r * r;
    }
    detail::require_finite(r, "expm");
    return r;
}

struct EigenSystem {
    RVector values;   // ascending
    CMatrix vectors;  // columns are eigenvectors
};

/// Spectral decomposition m = V diag(values) V^dagger of a Hermitian matrix.
/// The input is symmetrized before decomposition; a defect above 1e-10 (relative
/// to max(1, max|m_ij|)) is rejected.
inline EigenSystem hermitian_eig(const CMatrix& m) {
    detail::require_square(m, "hermitian_eig");
    detail::require_finite(m, "hermitian_eig");
    if (!is_hermitian(m)) {
        throw ContractViolation("hermitian_eig: matrix is not Hermitian (defect " +
                                std::to_string(hermiticity_defect(m)) + ")");
    }
    const CMatrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericError("hermitian_eig: eigen decomposition failed");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// D(alpha) = exp(alpha a^dagger - conj(alpha) a) on the truncated space.
inline CMatrix displacement(Eigen::Index dim, Complex alpha) {
    detail::require_dim(dim);
    const CMatrix a = annihilation(dim);
    return expm(alpha * a.adjoint() - std::conj(alpha) * a);
}

/// Displacements for many alpha on one truncated space.
///
/// With alpha = r e^{i phi}, the generator is r U (a^dagger - a) U^dagger where
/// U = exp(i phi n). Diagonalizing the Hermitian quadrature Q = i(a^dagger - a)
/// once gives D(alpha) = U V exp(-i r Lambda) V^dagger U^dagger, the exact
/// exponential of the truncated generator for every alpha.
class DisplacementGenerator {
public:
    explicit DisplacementGenerator(Eigen::Index dim) : dim_(dim) {
        detail::require_dim(dim);
        const CMatrix a = annihilation(dim);
        const CMatrix q = kI * (a.adjoint() - a);
        auto eig = hermitian_eig(q);
        values_ = std::move(eig.values);
        vectors_ = std::move(eig.vectors);
    }

    Eigen::Index dim() const noexcept { return dim_; }

    CMatrix operator()(Complex alpha) const { return top_rows(alpha, dim_); }

    /// First `rows` rows of D(alpha); enough to evaluate D^dagger rho D for a
    /// rho supported on the lowest `rows` Fock levels.
    CMatrix top_rows(Complex alpha, Eigen::Index rows) const {
        if (rows < 1 || rows > dim_) {
            throw InvalidDimension("DisplacementGenerator: row count out of range");
        }
        const double r = std::abs(alpha);
        const double phi = std::arg(alpha);
        // (U V)_{n j} = e^{i phi n} V_{n j}
        CMatrix left = vectors_.topRows(rows);
        for (Eigen::Index n = 0; n < rows; ++n) {
            left.row(n) *= std::polar(1.0, phi * static_cast<double>(n));
        }
        for (Eigen::Index j = 0; j < dim_; ++j) {
            left.col(j) *= std::polar(1.0, -r * values_(j));
        }
        // V^dagger U^dagger: column n picks up e^{-i phi n}
        CMatrix right = vectors_.adjoint();
        for (Eigen::Index n = 0; n < dim_; ++n) {
            right.col(n) *= std::polar(1.0, -phi * static_cast<double>(n));
        }
        return left * right;
    }

private:
    Eigen::Index dim_;
    RVector values_;
    CMatrix vectors_;
};

}  // namespace kerrpb
