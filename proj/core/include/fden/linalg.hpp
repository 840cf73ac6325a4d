#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace fden {

/// Dense row-major real matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill)
    {
    }

    static Matrix identity(std::size_t n);
    static Matrix diagonal(const std::vector<double>& d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return a_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    double* row(std::size_t i) { return a_.data() + i * cols_; }
    const double* row(std::size_t i) const { return a_.data() + i * cols_; }
    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }

    std::vector<double> column(std::size_t j) const;
    Matrix transpose() const;
    double max_abs() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> a_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);
/// aᵀ b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// aᵀ diag(w) a
Matrix congruence_diag(const Matrix& a, const std::vector<double>& w);
/// Frobenius norm of a − aᵀ.
double asymmetry(const Matrix& a);
void symmetrize(Matrix& a);

/// Symmetric tridiagonal matrix: diagonal d (size n), off-diagonal e (size n-1).
struct SymTridiag {
    std::vector<double> d;
    std::vector<double> e;

    std::size_t size() const noexcept { return d.size(); }
    Matrix dense() const;
    double max_abs() const;
};

/// Ascending eigenvalues; eigenvectors as matrix columns (may be empty).
struct EigenPairs {
    std::vector<double> values;
    Matrix vectors;
};

/// Householder tridiagonalization followed by implicit-shift QL.
EigenPairs sym_eigen(const Matrix& a, bool want_vectors = true);

/// Implicit-shift QL on a tridiagonal matrix.
EigenPairs tridiag_eigen(const SymTridiag& t, bool want_vectors = true);

/// Number of eigenvalues strictly below x (Sturm sequence).
std::size_t sturm_count(const SymTridiag& t, double x);

/// Eigenvalues in (lo, hi) by bisection, ascending, at most max_count of them.
std::vector<double> tridiag_eigenvalues_between(const SymTridiag& t, double lo, double hi,
                                                std::size_t max_count = static_cast<std::size_t>(-1));

/// Eigenvectors for the given (accurate) eigenvalues by inverse iteration; columns.
Matrix tridiag_inverse_iteration(const SymTridiag& t, const std::vector<double>& values);

/// V f(Λ) Vᵀ for a full eigendecomposition.
Matrix spectral_function(const EigenPairs& eig, const std::function<double(double)>& f);

double min_eigenvalue(const Matrix& a);
double max_eigenvalue(const Matrix& a);

/// max |A v − λ v| over the retained pairs of a dense matrix.
double max_residual(const Matrix& a, const EigenPairs& eig);
/// max |VᵀV − I|
double orthonormality_defect(const Matrix& vectors);

}  // namespace fden
