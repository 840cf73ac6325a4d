#include "fden/linalg.hpp"

#include "fden/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <limits>
#include <numeric>

namespace fden {

Matrix Matrix::identity(std::size_t n)
{
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(const std::vector<double>& d)
{
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

std::vector<double> Matrix::column(std::size_t j) const
{
    std::vector<double> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

Matrix Matrix::transpose() const
{
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Matrix::max_abs() const
{
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

static void check_same_shape(const Matrix& a, const Matrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error(ErrorKind::dimension,
                    fmt::format("shape mismatch {}x{} vs {}x{}", a.rows(), a.cols(), b.rows(), b.cols()));
}

Matrix operator+(const Matrix& a, const Matrix& b)
{
    check_same_shape(a, b);
    Matrix c = a;
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) c.data()[i] += b.data()[i];
    return c;
}

Matrix operator-(const Matrix& a, const Matrix& b)
{
    check_same_shape(a, b);
    Matrix c = a;
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) c.data()[i] -= b.data()[i];
    return c;
}

Matrix operator*(double s, const Matrix& a)
{
    Matrix c = a;
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) c.data()[i] *= s;
    return c;
}

Matrix matmul(const Matrix& a, const Matrix& b)
{
    if (a.cols() != b.rows())
        throw Error(ErrorKind::dimension, fmt::format("matmul {}x{} by {}x{}", a.rows(), a.cols(), b.rows(), b.cols()));
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* ci = c.row(i);
        const double* ai = a.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b)
{
    if (a.rows() != b.rows())
        throw Error(ErrorKind::dimension, fmt::format("matmul_tn {}x{} by {}x{}", a.rows(), a.cols(), b.rows(), b.cols()));
    Matrix c(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* ak = a.row(k);
        const double* bk = b.row(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = ak[i];
            if (aki == 0.0) continue;
            double* ci = c.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aki * bk[j];
        }
    }
    return c;
}

Matrix congruence_diag(const Matrix& a, const std::vector<double>& w)
{
    if (w.size() != a.rows()) throw Error(ErrorKind::dimension, "congruence_diag weight size");
    Matrix wa = a;
    for (std::size_t k = 0; k < a.rows(); ++k) {
        double* r = wa.row(k);
        for (std::size_t j = 0; j < a.cols(); ++j) r[j] *= w[k];
    }
    Matrix c = matmul_tn(a, wa);
    symmetrize(c);
    return c;
}

double asymmetry(const Matrix& a)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) {
            const double d = a(i, j) - a(j, i);
            s += 2.0 * d * d;
        }
    return std::sqrt(s);
}

void symmetrize(Matrix& a)
{
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) {
            const double m = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = m;
            a(j, i) = m;
        }
}

Matrix SymTridiag::dense() const
{
    const std::size_t n = d.size();
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = d[i];
        if (i + 1 < n) {
            m(i, i + 1) = e[i];
            m(i + 1, i) = e[i];
        }
    }
    return m;
}

double SymTridiag::max_abs() const
{
    double m = 0.0;
    for (double v : d) m = std::max(m, std::abs(v));
    for (double v : e) m = std::max(m, std::abs(v));
    return m;
}

namespace {

// Householder reduction of v (symmetric, overwritten by the orthogonal
// transform) to tridiagonal form with diagonal d and sub-diagonal e[1..n-1].
void tred2(std::size_t n, Matrix& v, std::vector<double>& d, std::vector<double>& e)
{
    for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

    for (std::size_t i = n - 1; i > 0; --i) {
        double scale = 0.0;
        double h = 0.0;
        for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (std::size_t j = 0; j < i; ++j) {
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
                v(j, i) = 0.0;
            }
        } else {
            for (std::size_t k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0) g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                v(j, i) = f;
                g = e[j] + v(j, j) * f;
                for (std::size_t k = j + 1; k + 1 <= i; ++k) {
                    g += v(k, j) * d[k];
                    e[k] += v(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (std::size_t k = j; k + 1 <= i; ++k) v(k, j) -= (f * e[k] + g * d[k]);
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    for (std::size_t i = 0; i + 1 < n; ++i) {
        v(n - 1, i) = v(i, i);
        v(i, i) = 1.0;
        const double h = d[i + 1];
        if (h != 0.0) {
            for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
            for (std::size_t j = 0; j <= i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
                for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
            }
        }
        for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
    }
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = v(n - 1, j);
        v(n - 1, j) = 0.0;
    }
    v(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

// Implicit QL on (d, e) with e[i] the coupling of i-1 and i. w holds the
// accumulated transform transposed (row k is eigenvector k) when non-null.
void tql2(std::size_t n, std::vector<double>& d, std::vector<double>& e, Matrix* w)
{
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    double f = 0.0;
    double tst1 = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    constexpr int max_iter = 60;

    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n) {
            if (std::abs(e[m]) <= eps * tst1) break;
            ++m;
        }
        if (m == n) m = n - 1;

        if (m > l) {
            int iter = 0;
            std::vector<double> shifts;
            do {
                if (++iter > max_iter)
                    throw Error(ErrorKind::solver,
                                fmt::format("QL did not converge for matrix of size {} at index {}; last shifts {}",
                                            n, l, fmt::join(shifts.end() - std::min<std::ptrdiff_t>(5, shifts.size()), shifts.end(), ", ")));
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                shifts.push_back(d[l]);
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0, c2 = c, c3 = c;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (std::size_t ii = m; ii-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[ii];
                    h = c * p;
                    r = std::hypot(p, e[ii]);
                    e[ii + 1] = s * r;
                    s = e[ii] / r;
                    c = p / r;
                    p = c * d[ii] - s * g;
                    d[ii + 1] = h + s * (c * g + s * d[ii]);
                    if (w) {
                        double* wa = w->row(ii + 1);
                        double* wb = w->row(ii);
                        for (std::size_t k = 0; k < n; ++k) {
                            const double t = wa[k];
                            wa[k] = s * wb[k] + c * t;
                            wb[k] = c * wb[k] - s * t;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

EigenPairs sorted_pairs(std::vector<double>& d, const Matrix* wt, std::size_t n)
{
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    EigenPairs out;
    out.values.resize(n);
    for (std::size_t k = 0; k < n; ++k) out.values[k] = d[idx[k]];
    if (wt) {
        out.vectors = Matrix(n, n);
        for (std::size_t k = 0; k < n; ++k) {
            const double* src = wt->row(idx[k]);
            for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = src[i];
        }
    }
    return out;
}

}  // namespace

EigenPairs sym_eigen(const Matrix& a, bool want_vectors)
{
    const std::size_t n = a.rows();
    if (a.cols() != n) throw Error(ErrorKind::dimension, "sym_eigen needs a square matrix");
    if (n == 0) return {};
    if (n == 1) {
        EigenPairs out;
        out.values = {a(0, 0)};
        if (want_vectors) out.vectors = Matrix::identity(1);
        return out;
    }
    Matrix v = a;
    std::vector<double> d(n), e(n);
    tred2(n, v, d, e);
    if (!want_vectors) {
        tql2(n, d, e, nullptr);
        return sorted_pairs(d, nullptr, n);
    }
    Matrix wt = v.transpose();
    tql2(n, d, e, &wt);
    return sorted_pairs(d, &wt, n);
}

EigenPairs tridiag_eigen(const SymTridiag& t, bool want_vectors)
{
    const std::size_t n = t.size();
    if (n == 0) return {};
    if (t.e.size() + 1 != n) throw Error(ErrorKind::dimension, "tridiagonal off-diagonal size");
    std::vector<double> d = t.d;
    std::vector<double> e(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) e[i] = t.e[i - 1];
    if (!want_vectors) {
        tql2(n, d, e, nullptr);
        return sorted_pairs(d, nullptr, n);
    }
    Matrix wt = Matrix::identity(n);
    tql2(n, d, e, &wt);
    return sorted_pairs(d, &wt, n);
}

std::size_t sturm_count(const SymTridiag& t, double x)
{
    const std::size_t n = t.size();
    const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    std::size_t count = 0;
    double q = t.d[0] - x;
    if (q < 0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
        if (q == 0.0) q = -tiny;
        q = (t.d[i] - x) - t.e[i - 1] * t.e[i - 1] / q;
        if (q < 0) ++count;
    }
    return count;
}

std::vector<double> tridiag_eigenvalues_between(const SymTridiag& t, double lo, double hi, std::size_t max_count)
{
    if (!(lo < hi)) throw Error(ErrorKind::parameter, "empty bisection window");
    // Clamp to the Gershgorin interval so wide windows still converge in 200 halvings.
    double g_lo = 0.0, g_hi = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double rad = (i > 0 ? std::abs(t.e[i - 1]) : 0.0) + (i + 1 < t.size() ? std::abs(t.e[i]) : 0.0);
        g_lo = i == 0 ? t.d[i] - rad : std::min(g_lo, t.d[i] - rad);
        g_hi = i == 0 ? t.d[i] + rad : std::max(g_hi, t.d[i] + rad);
    }
    const double pad = 1e-12 * std::max(std::abs(g_lo), std::abs(g_hi)) + 1e-300;
    lo = std::max(lo, g_lo - pad);
    hi = std::min(hi, g_hi + pad);
    if (!(lo < hi)) return {};
    const std::size_t c_lo = sturm_count(t, lo);
    const std::size_t c_hi = sturm_count(t, hi);
    const std::size_t count = std::min(c_hi - c_lo, max_count);
    std::vector<double> out;
    out.reserve(count);
    const double eps = std::numeric_limits<double>::epsilon();
    double left = lo;
    for (std::size_t k = 0; k < count; ++k) {
        // the (c_lo + k)-th eigenvalue lies in [left, hi)
        const std::size_t target = c_lo + k + 1;
        double a = left, b = hi;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;
            if (b - a <= 2.0 * eps * std::max(std::abs(a), std::abs(b))) break;
            if (sturm_count(t, mid) >= target)
                b = mid;
            else
                a = mid;
        }
        const double lam = 0.5 * (a + b);
        out.push_back(lam);
        left = a;
    }
    return out;
}

namespace {

// LU with partial pivoting of a shifted tridiagonal matrix, then solve.
struct TridiagLU {
    std::vector<double> u0, u1, u2, l;
    std::vector<char> swapped;
};

TridiagLU factor_shifted(const SymTridiag& t, double mu)
{
    const std::size_t n = t.size();
    TridiagLU f;
    f.u0.assign(n, 0.0);
    f.u1.assign(n, 0.0);
    f.u2.assign(n, 0.0);
    f.l.assign(n, 0.0);
    f.swapped.assign(n, 0);

    double diag = t.d[0] - mu;
    double sup = n > 1 ? t.e[0] : 0.0;
    double sup2 = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double sub = t.e[i];
        const double nd = t.d[i + 1] - mu;
        const double ns = (i + 2 < n) ? t.e[i + 1] : 0.0;
        if (std::abs(diag) >= std::abs(sub)) {
            const double m = (diag == 0.0) ? 0.0 : sub / diag;
            f.u0[i] = diag;
            f.u1[i] = sup;
            f.u2[i] = sup2;
            f.l[i] = m;
            diag = nd - m * sup;
            sup = ns;
            sup2 = 0.0;
        } else {
            const double m = diag / sub;
            f.swapped[i] = 1;
            f.u0[i] = sub;
            f.u1[i] = nd;
            f.u2[i] = ns;
            f.l[i] = m;
            diag = sup - m * nd;
            sup = -m * ns;
            sup2 = 0.0;
        }
    }
    f.u0[n - 1] = diag;
    const double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t i = 0; i < n; ++i) {
        double local = std::abs(t.d[i] - mu);
        if (i > 0) local += std::abs(t.e[i - 1]);
        if (i + 1 < n) local += std::abs(t.e[i]);
        local = eps * local + std::numeric_limits<double>::min();
        double& u = f.u0[i];
        if (std::abs(u) < local) u = (u < 0 ? -local : local);
    }
    return f;
}

void solve_factored(const TridiagLU& f, std::vector<double>& x)
{
    const std::size_t n = x.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (f.swapped[i]) std::swap(x[i], x[i + 1]);
        x[i + 1] -= f.l[i] * x[i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        if (ii + 1 < n) s -= f.u1[ii] * x[ii + 1];
        if (ii + 2 < n) s -= f.u2[ii] * x[ii + 2];
        x[ii] = s / f.u0[ii];
    }
}

double norm2(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

Matrix tridiag_inverse_iteration(const SymTridiag& t, const std::vector<double>& values)
{
    const std::size_t n = t.size();
    Matrix out(n, values.size());
    std::vector<std::vector<double>> done;
    done.reserve(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        const TridiagLU f = factor_shifted(t, values[k]);
        std::vector<double> x(n);
        // deterministic, non-degenerate start vector
        std::uint64_t s = 0x9E3779B97F4A7C15ull + k;
        for (std::size_t i = 0; i < n; ++i) {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            x[i] = 0.5 + static_cast<double>(s >> 11) * 0x1.0p-53;
        }
        for (int it = 0; it < 4; ++it) {
            solve_factored(f, x);
            for (const auto& prev : done) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += prev[i] * x[i];
                for (std::size_t i = 0; i < n; ++i) x[i] -= dot * prev[i];
            }
            const double nrm = norm2(x);
            if (nrm == 0.0) throw Error(ErrorKind::solver, fmt::format("inverse iteration collapsed at index {}", k));
            for (double& v : x) v /= nrm;
        }
        // sign convention: largest component positive
        std::size_t imax = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::abs(x[i]) > std::abs(x[imax])) imax = i;
        if (x[imax] < 0)
            for (double& v : x) v = -v;
        for (std::size_t i = 0; i < n; ++i) out(i, k) = x[i];
        done.push_back(std::move(x));
    }
    return out;
}

Matrix spectral_function(const EigenPairs& eig, const std::function<double(double)>& f)
{
    const std::size_t n = eig.vectors.rows();
    const std::size_t m = eig.values.size();
    Matrix scaled = eig.vectors;
    for (std::size_t k = 0; k < m; ++k) {
        const double fk = f(eig.values[k]);
        for (std::size_t i = 0; i < n; ++i) scaled(i, k) *= fk;
    }
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* si = scaled.row(i);
        double* oi = out.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            const double* vj = eig.vectors.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < m; ++k) s += si[k] * vj[k];
            oi[j] = s;
        }
    }
    symmetrize(out);
    return out;
}

double min_eigenvalue(const Matrix& a)
{
    const auto e = sym_eigen(a, false);
    return e.values.front();
}

double max_eigenvalue(const Matrix& a)
{
    const auto e = sym_eigen(a, false);
    return e.values.back();
}

double max_residual(const Matrix& a, const EigenPairs& eig)
{
    double worst = 0.0;
    const std::size_t n = a.rows();
    for (std::size_t k = 0; k < eig.values.size(); ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double av = 0.0;
            const double* ai = a.row(i);
            for (std::size_t j = 0; j < n; ++j) av += ai[j] * eig.vectors(j, k);
            const double r = av - eig.values[k] * eig.vectors(i, k);
            s += r * r;
        }
        worst = std::max(worst, std::sqrt(s));
    }
    return worst;
}

double orthonormality_defect(const Matrix& v)
{
    const Matrix g = matmul_tn(v, v);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) worst = std::max(worst, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
    return worst;
}

}  // namespace fden
