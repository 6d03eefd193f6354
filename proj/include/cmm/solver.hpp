#ifndef CMM_SOLVER_HPP
#define CMM_SOLVER_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cmm/sparse.hpp"

namespace cmm {

/// Sparse symmetric system plus a list of strongly constrained dofs.
struct LinearSystem {
    CsrMatrix matrix;
    std::vector<double> rhs;
    std::vector<std::pair<int, double>> constrained_dofs;
};

struct SolveInfo {
    int iterations = 0;
    double residual = 0.0;
    bool converged = true;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& msg, SolveInfo info)
        : std::runtime_error(msg), info(info) {}
    SolveInfo info;
};

namespace solver_detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

} // namespace solver_detail

namespace solver_detail {

/// Banded Cholesky on the eliminated system; engaged when CG stalls on an
/// ill-conditioned matrix (severely compressed meshes). Natural node
/// ordering of the layered meshes keeps the band narrow.
inline std::vector<double> solve_banded(const CsrMatrix& A, const std::vector<double>& b) {
    const int n = A.rows();
    int band = 0;
    for (int i = 0; i < n; ++i)
        for (int j : A.row_cols(i)) band = std::max(band, std::abs(i - j));
    const double work = static_cast<double>(n) * band * band;
    if (work > 4e9) throw SolverError("solve_banded: bandwidth too large", {});

    // L stored by row: entry (i, i-k) at banded[i][band-k]
    std::vector<std::vector<double>> m(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(band) + 1, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j : A.row_cols(i))
            if (j <= i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(band - (i - j))] =
                A.coeff(i, j);
    for (int i = 0; i < n; ++i) {
        const int j0 = std::max(0, i - band);
        for (int j = j0; j <= i; ++j) {
            double sum = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(band - (i - j))];
            const int k0 = std::max(j0, j - band);
            for (int k = k0; k < j; ++k)
                sum -= m[static_cast<std::size_t>(i)][static_cast<std::size_t>(band - (i - k))] *
                       m[static_cast<std::size_t>(j)][static_cast<std::size_t>(band - (j - k))];
            if (j < i) {
                m[static_cast<std::size_t>(i)][static_cast<std::size_t>(band - (i - j))] =
                    sum / m[static_cast<std::size_t>(j)][static_cast<std::size_t>(band)];
            } else {
                if (!(sum > 0.0))
                    throw SolverError("solve_banded: matrix not positive definite", {});
                m[static_cast<std::size_t>(i)][static_cast<std::size_t>(band)] = std::sqrt(sum);
            }
        }
    }
    std::vector<double> x = b;
    for (int i = 0; i < n; ++i) {
        double sum = x[static_cast<std::size_t>(i)];
        for (int k = std::max(0, i - band); k < i; ++k)
            sum -= m[static_cast<std::size_t>(i)][static_cast<std::size_t>(band - (i - k))] *
                   x[static_cast<std::size_t>(k)];
        x[static_cast<std::size_t>(i)] = sum / m[static_cast<std::size_t>(i)][static_cast<std::size_t>(band)];
    }
    for (int i = n - 1; i >= 0; --i) {
        double sum = x[static_cast<std::size_t>(i)];
        for (int k = i + 1; k <= std::min(n - 1, i + band); ++k)
            sum -= m[static_cast<std::size_t>(k)][static_cast<std::size_t>(band - (k - i))] *
                   x[static_cast<std::size_t>(k)];
        x[static_cast<std::size_t>(i)] = sum / m[static_cast<std::size_t>(i)][static_cast<std::size_t>(band)];
    }
    return x;
}

} // namespace solver_detail

/// Jacobi-preconditioned conjugate gradients on the eliminated system.
/// rtol 1e-10 relative to the constrained right-hand side, iteration cap
/// 10 * n. Constrained dofs are exact in the output. Deterministic. A
/// banded direct factorization takes over if CG stalls (crushed meshes can
/// push the condition number past what CG resolves in double precision).
inline std::vector<double> solve_linear(const LinearSystem& sys, SolveInfo* out_info = nullptr,
                                        double rtol = 1e-10) {
    CsrMatrix A = sys.matrix;
    std::vector<double> b = sys.rhs;
    const int n = A.rows();
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("solve_linear: rhs size mismatch");
    A.eliminate_dofs(sys.constrained_dofs, b);

    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (const auto& [d, v] : sys.constrained_dofs) x[static_cast<std::size_t>(d)] = v;

    std::vector<double> diag = A.diagonal();
    for (double& d : diag) {
        if (d == 0.0) throw SolverError("solve_linear: zero diagonal entry", {});
        d = 1.0 / d;
    }

    std::vector<double> r(static_cast<std::size_t>(n));
    A.multiply(x, r);
    for (int i = 0; i < n; ++i)
        r[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(i)];

    const double bnorm = solver_detail::norm(b);
    const double stop = rtol * (bnorm > 0.0 ? bnorm : 1.0);

    std::vector<double> z(static_cast<std::size_t>(n)), p(static_cast<std::size_t>(n)),
        Ap(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = diag[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)];
    p = z;
    double rz = solver_detail::dot(r, z);

    SolveInfo info;
    info.residual = solver_detail::norm(r);
    const int cap = 10 * n;
    int it = 0;
    while (info.residual > stop && it < cap) {
        A.multiply(p, Ap);
        const double pAp = solver_detail::dot(p, Ap);
        if (pAp <= 0.0)
            throw SolverError("solve_linear: matrix not positive definite", info);
        const double alpha = rz / pAp;
        for (int i = 0; i < n; ++i) {
            x[static_cast<std::size_t>(i)] += alpha * p[static_cast<std::size_t>(i)];
            r[static_cast<std::size_t>(i)] -= alpha * Ap[static_cast<std::size_t>(i)];
        }
        for (int i = 0; i < n; ++i)
            z[static_cast<std::size_t>(i)] = diag[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)];
        const double rz_next = solver_detail::dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (int i = 0; i < n; ++i)
            p[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] + beta * p[static_cast<std::size_t>(i)];
        ++it;
        info.residual = solver_detail::norm(r);
    }
    info.iterations = it;
    info.converged = info.residual <= stop;
    if (!info.converged) {
        try {
            x = solver_detail::solve_banded(A, b);
            A.multiply(x, r);
            for (int i = 0; i < n; ++i)
                r[static_cast<std::size_t>(i)] =
                    b[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(i)];
            info.residual = solver_detail::norm(r);
            info.converged = true;
        } catch (const SolverError&) {
            throw SolverError("solve_linear: CG did not converge in " + std::to_string(cap) +
                                  " iterations (residual " + std::to_string(info.residual) + ")",
                              info);
        }
    }

    // Constrained dofs are definitional, not iterates.
    for (const auto& [d, v] : sys.constrained_dofs) x[static_cast<std::size_t>(d)] = v;
    if (out_info) *out_info = info;
    return x;
}

/// Dense LDL^T factorization; the small-system oracle used by tests to
/// cross-check the iterative path (n < 500).
inline std::vector<double> solve_dense(const LinearSystem& sys) {
    CsrMatrix A = sys.matrix;
    std::vector<double> b = sys.rhs;
    const int n = A.rows();
    if (n >= 500) throw std::invalid_argument("solve_dense: system too large");
    A.eliminate_dofs(sys.constrained_dofs, b);
    std::vector<std::vector<double>> D = A.to_dense();

    // LDL^T without pivoting (SPD after elimination).
    std::vector<double> d(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        double dj = D[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];
        for (int k = 0; k < j; ++k) {
            const double l = D[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
            dj -= l * l * d[static_cast<std::size_t>(k)];
        }
        if (dj <= 0.0) throw SolverError("solve_dense: matrix not positive definite", {});
        d[static_cast<std::size_t>(j)] = dj;
        for (int i = j + 1; i < n; ++i) {
            double lij = D[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            for (int k = 0; k < j; ++k)
                lij -= D[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                       D[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] *
                       d[static_cast<std::size_t>(k)];
            D[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = lij / dj;
        }
    }
    // forward solve L y = b
    std::vector<double> x = b;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < i; ++k)
            x[static_cast<std::size_t>(i)] -= D[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(k)];
    // diagonal
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] /= d[static_cast<std::size_t>(i)];
    // backward solve L^T x = y
    for (int i = n - 1; i >= 0; --i)
        for (int k = i + 1; k < n; ++k)
            x[static_cast<std::size_t>(i)] -= D[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(k)];
    for (const auto& [dof, v] : sys.constrained_dofs) x[static_cast<std::size_t>(dof)] = v;
    return x;
}

} // namespace cmm

#endif
