#ifndef CMM_SPARSE_HPP
#define CMM_SPARSE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cmm {

/// Compressed-sparse-row matrix assembled from (i,j,v) triplets; duplicate
/// entries are summed. Column indices within a row are sorted, so assembly
/// order does not affect where values land.
class CsrMatrix {
public:
    CsrMatrix() = default;

    struct Triplet {
        int i, j;
        double v;
    };

    static CsrMatrix from_triplets(int n, std::vector<Triplet> trips) {
        for (const Triplet& t : trips)
            if (t.i < 0 || t.i >= n || t.j < 0 || t.j >= n)
                throw std::invalid_argument("triplet index out of range");
        CsrMatrix A;
        A.n_ = n;
        std::sort(trips.begin(), trips.end(), [](const Triplet& a, const Triplet& b) {
            return a.i != b.i ? a.i < b.i : a.j < b.j;
        });
        A.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
        std::size_t k = 0;
        while (k < trips.size()) {
            std::size_t e = k + 1;
            double sum = trips[k].v;
            while (e < trips.size() && trips[e].i == trips[k].i && trips[e].j == trips[k].j)
                sum += trips[e++].v;
            A.cols_.push_back(trips[k].j);
            A.vals_.push_back(sum);
            A.row_ptr_[static_cast<std::size_t>(trips[k].i) + 1]++;
            k = e;
        }
        for (std::size_t r = 0; r < static_cast<std::size_t>(n); ++r)
            A.row_ptr_[r + 1] += A.row_ptr_[r];
        return A;
    }

    int rows() const { return n_; }
    std::size_t nonzeros() const { return vals_.size(); }

    void multiply(const std::vector<double>& x, std::vector<double>& y) const {
        y.assign(static_cast<std::size_t>(n_), 0.0);
        for (int r = 0; r < n_; ++r) {
            double acc = 0.0;
            for (std::size_t k = row_ptr_[static_cast<std::size_t>(r)];
                 k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k)
                acc += vals_[k] * x[static_cast<std::size_t>(cols_[k])];
            y[static_cast<std::size_t>(r)] = acc;
        }
    }

    std::vector<double> multiply(const std::vector<double>& x) const {
        std::vector<double> y;
        multiply(x, y);
        return y;
    }

    std::vector<int> row_cols(int i) const {
        return {cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[static_cast<std::size_t>(i)]),
                cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[static_cast<std::size_t>(i) + 1])};
    }

    double coeff(int i, int j) const {
        for (std::size_t k = row_ptr_[static_cast<std::size_t>(i)];
             k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
            if (cols_[k] == j) return vals_[k];
        return 0.0;
    }

    std::vector<double> diagonal() const {
        std::vector<double> d(static_cast<std::size_t>(n_), 0.0);
        for (int i = 0; i < n_; ++i)
            for (std::size_t k = row_ptr_[static_cast<std::size_t>(i)];
                 k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
                if (cols_[k] == i) d[static_cast<std::size_t>(i)] = vals_[k];
        return d;
    }

    double row_sum(int i) const {
        double s = 0.0;
        for (std::size_t k = row_ptr_[static_cast<std::size_t>(i)];
             k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
            s += vals_[k];
        return s;
    }

    /// Max |A - A^T| entry. Quadratic in row length; intended for assertions
    /// on small matrices.
    double asymmetry() const {
        double worst = 0.0;
        for (int i = 0; i < n_; ++i)
            for (std::size_t k = row_ptr_[static_cast<std::size_t>(i)];
                 k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
                worst = std::max(worst, std::abs(vals_[k] - coeff(cols_[k], i)));
        return worst;
    }

    std::vector<std::vector<double>> to_dense() const {
        std::vector<std::vector<double>> D(
            static_cast<std::size_t>(n_),
            std::vector<double>(static_cast<std::size_t>(n_), 0.0));
        for (int i = 0; i < n_; ++i)
            for (std::size_t k = row_ptr_[static_cast<std::size_t>(i)];
                 k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
                D[static_cast<std::size_t>(i)][static_cast<std::size_t>(cols_[k])] = vals_[k];
        return D;
    }

    /// Symmetric elimination of constrained dofs in one pass: zero the rows
    /// and columns, unit diagonal, and fold the column contributions into the
    /// right-hand side. Keeps an SPD matrix SPD.
    void eliminate_dofs(const std::vector<std::pair<int, double>>& constraints,
                        std::vector<double>& rhs) {
        std::vector<char> constrained(static_cast<std::size_t>(n_), 0);
        std::vector<double> value(static_cast<std::size_t>(n_), 0.0);
        for (const auto& [d, v] : constraints) {
            if (d < 0 || d >= n_) throw std::invalid_argument("constraint index out of range");
            constrained[static_cast<std::size_t>(d)] = 1;
            value[static_cast<std::size_t>(d)] = v;
        }
        for (int i = 0; i < n_; ++i) {
            const bool row_c = constrained[static_cast<std::size_t>(i)] != 0;
            for (std::size_t k = row_ptr_[static_cast<std::size_t>(i)];
                 k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k) {
                const int j = cols_[k];
                if (row_c) {
                    vals_[k] = (j == i) ? 1.0 : 0.0;
                } else if (constrained[static_cast<std::size_t>(j)]) {
                    rhs[static_cast<std::size_t>(i)] -= vals_[k] * value[static_cast<std::size_t>(j)];
                    vals_[k] = 0.0;
                }
            }
        }
        for (const auto& [d, v] : constraints) rhs[static_cast<std::size_t>(d)] = v;
    }

private:
    int n_ = 0;
    std::vector<std::size_t> row_ptr_;
    std::vector<int> cols_;
    std::vector<double> vals_;
};

} // namespace cmm

#endif
