#pragma once

// Wigner function as a displaced-parity expectation,
//   W(alpha) = (2/pi) tr[ D(-alpha) rho D(alpha) P ],
// evaluated on a zero-padded Fock space so that truncation artefacts of the
// displacement stay above the populated levels.

#include <kerrpb/liouvillian.hpp>

#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace kerrpb {

struct WignerValue {
    double value = 0.0;
    double imag_residue = 0.0;
    bool truncation_warning = false;  // |alpha|^2 > (dim + pad) / 2
};

struct WignerGrid {
    std::vector<double> xs;
    std::vector<double> ps;
    /// values[i][j] = W(xs[j] + i ps[i]); rows follow p, columns follow x.
    std::vector<std::vector<double>> values;
    double max_imag_residue = 0.0;
    bool truncation_warning = false;

    double at(std::size_t ip, std::size_t ix) const { return values[ip][ix]; }
};

/// Default padding: twice the state dimension.
inline Eigen::Index default_wigner_pad(Eigen::Index dim) { return 2 * dim; }

/// Reusable evaluator: diagonalizes the padded displacement generator once.
class WignerEvaluator {
public:
    static constexpr double kImagTolerance = 1e-10;

    WignerEvaluator(const DensityMatrix& rho, Eigen::Index pad)
        : rho_(rho.matrix()), padded_dim_(rho.dim() + check_pad(pad)), gen_(padded_dim_) {}

    Eigen::Index padded_dim() const noexcept { return padded_dim_; }

    WignerValue operator()(Complex alpha) const {
        const Eigen::Index dim = rho_.rows();
        // Only the first dim rows of D(alpha) meet the zero-extended rho.
        const CMatrix d_top = gen_.top_rows(alpha, dim);
        const CMatrix rd = rho_ * d_top;
        Complex acc = 0.0;
        for (Eigen::Index n = 0; n < padded_dim_; ++n) {
            const Complex diag = d_top.col(n).dot(rd.col(n));  // conj(D_in) (rho D)_in
            acc += (n % 2 == 0) ? diag : -diag;
        }
        acc *= 2.0 / kPi;
        if (std::abs(acc.imag()) > kImagTolerance) {
            throw NumericError("wigner: imaginary residue " + std::to_string(acc.imag()) +
                               " exceeds tolerance");
        }
        return {acc.real(), std::abs(acc.imag()),
                std::norm(alpha) > static_cast<double>(padded_dim_) / 2.0};
    }

private:
    static Eigen::Index check_pad(Eigen::Index pad) {
        if (pad < 0) {
            throw InvalidArgument("wigner: pad must be non-negative");
        }
        return pad;
    }

    CMatrix rho_;
    Eigen::Index padded_dim_;
    DisplacementGenerator gen_;
};

inline WignerValue wigner_point(const DensityMatrix& rho, Complex alpha, Eigen::Index pad) {
    return WignerEvaluator(rho, pad)(alpha);
}

inline WignerValue wigner_point(const DensityMatrix& rho, Complex alpha) {
    return wigner_point(rho, alpha, default_wigner_pad(rho.dim()));
}

/// (2/pi) tr(rho P): the Wigner function at the origin without displacement.
inline double wigner_origin(const DensityMatrix& rho) {
    double acc = 0.0;
    for (Eigen::Index n = 0; n < rho.dim(); ++n) {
        acc += (n % 2 == 0 ? 1.0 : -1.0) * rho(n, n).real();
    }
    return 2.0 / kPi * acc;
}

inline WignerGrid wigner_grid(const DensityMatrix& rho, std::span<const double> xs,
                              std::span<const double> ps, Eigen::Index pad) {
    const WignerEvaluator eval(rho, pad);
    WignerGrid grid;
    grid.xs.assign(xs.begin(), xs.end());
    grid.ps.assign(ps.begin(), ps.end());
    grid.values.assign(ps.size(), std::vector<double>(xs.size(), 0.0));
    for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t j = 0; j < xs.size(); ++j) {
            const WignerValue w = eval(Complex(xs[j], ps[i]));
            grid.values[i][j] = w.value;
            grid.max_imag_residue = std::max(grid.max_imag_residue, w.imag_residue);
            grid.truncation_warning = grid.truncation_warning || w.truncation_warning;
        }
    }
    return grid;
}

/// Evenly spaced points from lo to hi inclusive.
inline std::vector<double> linspace_step(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) {
        throw InvalidArgument("linspace_step: need step > 0 and hi >= lo");
    }
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = lo + static_cast<double>(i) * step;
    }
    return out;
}

/// Riemann sum of W over the grid cells (uniform spacing assumed), restricted
/// to |alpha| <= radius when a radius is given.
inline double wigner_integral(const WignerGrid& grid,
                              double radius = std::numeric_limits<double>::infinity()) {
    if (grid.xs.size() < 2 || grid.ps.size() < 2) {
        throw InvalidArgument("wigner_integral: grid needs at least 2x2 points");
    }
    const double dx = grid.xs[1] - grid.xs[0];
    const double dp = grid.ps[1] - grid.ps[0];
    double sum = 0.0;
    for (std::size_t i = 0; i < grid.ps.size(); ++i) {
        for (std::size_t j = 0; j < grid.xs.size(); ++j) {
            const double r2 = grid.xs[j] * grid.xs[j] + grid.ps[i] * grid.ps[i];
            if (r2 <= radius * radius * (1.0 + 1e-12)) {
                sum += grid.values[i][j];
            }
        }
    }
    return sum * dx * dp;
}

struct ExtremaCount {
    int peaks = 0;
    int dips = 0;
};

/// Strict interior local extrema under 8-neighbour comparison. Grid ripple is
/// rejected by a prominence test: a peak must rise at least `threshold` above
/// the lowest value, and a dip must lie at least `threshold` below the highest
/// value, within `window` (phase-space distance) of the point. Peaks must also
/// reach `threshold` in absolute value.
inline ExtremaCount count_extrema(const WignerGrid& grid, double threshold = 0.01 * 2.0 / kPi,
                                  double window = 0.5) {
    ExtremaCount c;
    const std::size_t rows = grid.values.size();
    if (rows < 3 || grid.xs.size() < 3) {
        return c;
    }
    const std::size_t cols = grid.values[0].size();
    const double dx = grid.xs[1] - grid.xs[0];
    const double dp = grid.ps[1] - grid.ps[0];
    const auto wx = static_cast<std::ptrdiff_t>(std::ceil(window / dx - 1e-9));
    const auto wp = static_cast<std::ptrdiff_t>(std::ceil(window / dp - 1e-9));

    auto window_range = [&](std::size_t i, std::size_t j) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        const auto i0 = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(i) - wp);
        const auto i1 = std::min<std::ptrdiff_t>(rows - 1, static_cast<std::ptrdiff_t>(i) + wp);
        const auto j0 = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(j) - wx);
        const auto j1 = std::min<std::ptrdiff_t>(cols - 1, static_cast<std::ptrdiff_t>(j) + wx);
        for (auto a = i0; a <= i1; ++a) {
            for (auto b = j0; b <= j1; ++b) {
                const double ddx = (b - static_cast<std::ptrdiff_t>(j)) * dx;
                const double ddp = (a - static_cast<std::ptrdiff_t>(i)) * dp;
                if (ddx * ddx + ddp * ddp > window * window + 1e-12) {
                    continue;
                }
                lo = std::min(lo, grid.values[a][b]);
                hi = std::max(hi, grid.values[a][b]);
            }
        }
        return std::pair{lo, hi};
    };

    for (std::size_t i = 1; i + 1 < rows; ++i) {
        for (std::size_t j = 1; j + 1 < cols; ++j) {
            const double v = grid.values[i][j];
            bool is_max = true;
            bool is_min = true;
            for (int di = -1; di <= 1; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) {
                        continue;
                    }
                    const double nb = grid.values[i + di][j + dj];
                    is_max = is_max && v > nb;
                    is_min = is_min && v < nb;
                }
            }
            if (!is_max && !is_min) {
                continue;
            }
            const auto [lo, hi] = window_range(i, j);
            if (is_max && v >= threshold && v - lo >= threshold) {
                ++c.peaks;
            }
            if (is_min && hi - v >= threshold) {
                ++c.dips;
            }
        }
    }
    return c;
}

}  // namespace kerrpb
