#include "fden/operator_bounds.hpp"

#include "fden/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace fden {

namespace {

double spectral_radius(const std::vector<double>& d)
{
    double m = 0.0;
    for (double x : d) m = std::max(m, std::abs(x));
    return m;
}

Matrix dense_sum(const SymTridiag& t, const std::vector<double>& diag_shift)
{
    Matrix m = t.dense();
    for (std::size_t i = 0; i < diag_shift.size(); ++i) m(i, i) += diag_shift[i];
    return m;
}

// Block-diagonal spectral function of two tridiagonals.
Matrix block_function(const SymTridiag& a, const SymTridiag& b, const std::function<double(double)>& f)
{
    const std::size_t n = a.size();
    const Matrix fa = spectral_function(tridiag_eigen(a, true), f);
    const Matrix fb = spectral_function(tridiag_eigen(b, true), f);
    Matrix out(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            out(i, j) = fa(i, j);
            out(n + i, n + j) = fb(i, j);
        }
    return out;
}

// Interleaved Dirac order to block order (all f⁺, then all f⁻).
Matrix to_block_order(const Matrix& m)
{
    const std::size_t n2 = m.rows();
    const std::size_t n = n2 / 2;
    auto perm = [n](std::size_t k) { return k < n ? 2 * k : 2 * (k - n) + 1; };
    Matrix out(n2, n2);
    for (std::size_t i = 0; i < n2; ++i)
        for (std::size_t j = 0; j < n2; ++j) out(i, j) = m(perm(i), perm(j));
    return out;
}

}  // namespace

InequalityCheck hardy_component_check(const Channel& channel, bool upper, const RadialGrid& grid)
{
    const int ell = upper ? channel.ell : channel.ell_lower();
    const SymTridiag t = radial_laplacian(ell, grid);
    const double c = (ell + 0.5) * (ell + 0.5);
    std::vector<double> w(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) w[i] = -c / (grid.nodes[i] * grid.nodes[i]);
    InequalityCheck chk;
    chk.name = fmt::format("hardy kappa={} {} ell={}", channel.kappa, upper ? "upper" : "lower", ell);
    chk.eigmin = min_eigenvalue(dense_sum(t, w));
    chk.scale = spectral_radius(w);
    return chk;
}

InequalityCheck hardy_channel_check(const Channel& channel, const RadialGrid& grid)
{
    SymTridiag t = radial_laplacian(channel.ell, grid);
    const double k2 = static_cast<double>(channel.kappa) * channel.kappa;
    for (double& d : t.d) d *= 2.0 / k2;
    for (double& e : t.e) e *= 2.0 / k2;
    std::vector<double> w(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) w[i] = -1.0 / (grid.nodes[i] * grid.nodes[i]);
    InequalityCheck chk;
    chk.name = fmt::format("hardy 2/kappa^2 kappa={}", channel.kappa);
    chk.eigmin = min_eigenvalue(dense_sum(t, w));
    chk.scale = spectral_radius(w);
    return chk;
}

double hardy_ratio(int ell, const RadialGrid& grid)
{
    // W^{-1/2} T W^{-1/2} with W = (ℓ+½)²/r² stays tridiagonal.
    SymTridiag t = radial_laplacian(ell, grid);
    const double c = (ell + 0.5) * (ell + 0.5);
    std::vector<double> s(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) s[i] = grid.nodes[i] / std::sqrt(c);
    for (std::size_t i = 0; i < t.d.size(); ++i) t.d[i] *= s[i] * s[i];
    for (std::size_t i = 0; i < t.e.size(); ++i) t.e[i] *= s[i] * s[i + 1];
    const auto v = tridiag_eigenvalues_between(t, -1e300, 1e300, 1);
    return v.front();
}

SymTridiag free_momentum_upper(const Channel& channel, const RadialGrid& grid)
{
    const Matrix l = dirac_lower_block(channel, grid);
    const std::size_t n = grid.size();
    SymTridiag t;
    t.d.resize(n);
    t.e.resize(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        const double a = l(j, j);
        const double b_prev = j > 0 ? l(j - 1, j) : 0.0;
        t.d[j] = a * a + b_prev * b_prev;
        if (j + 1 < n) t.e[j] = a * l(j, j + 1);
    }
    return t;
}

SymTridiag free_momentum_lower(const Channel& channel, const RadialGrid& grid)
{
    const Matrix l = dirac_lower_block(channel, grid);
    const std::size_t n = grid.size();
    SymTridiag t;
    t.d.resize(n);
    t.e.resize(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = l(i, i);
        const double b = i + 1 < n ? l(i, i + 1) : 0.0;
        t.d[i] = a * a + b * b;
        if (i + 1 < n) t.e[i] = b * l(i + 1, i + 1);
    }
    return t;
}

InequalityCheck kinetic_lemma_check(const Channel& channel, const RadialGrid& grid, double a)
{
    const double k2 = static_cast<double>(channel.kappa) * channel.kappa;
    if (!(a > 0.0) || a > k2)
        throw Error(ErrorKind::parameter, fmt::format("kinetic lemma needs 0 < a <= kappa^2 (a = {})", a));
    const double shift = a / k2;
    const ChannelOperator d0 = build_dirac_channel(make_coupling(0.0), channel, grid, {}, "free");
    const EigenPairs eig = tridiag_eigen(*d0.tri, true);
    // p² = D₀² − 1, so √(p²+1) = |D₀| and both sides share eigenvectors.
    const Matrix lhs = spectral_function(eig, [&](double e) { return (e - 1.0 + shift) * (e - 1.0 + shift); });
    const Matrix rhs =
        spectral_function(eig, [&](double e) { return (std::abs(e) - 1.0 + shift) * (std::abs(e) - 1.0 + shift); });
    Matrix diff = lhs - rhs;
    symmetrize(diff);
    InequalityCheck chk;
    chk.name = fmt::format("kinetic kappa={} a={}", channel.kappa, a);
    chk.eigmin = min_eigenvalue(diff);
    chk.scale = std::max(lhs.max_abs(), 1.0);
    return chk;
}

InequalityCheck kinetic_lemma_scalar_check(const Channel& channel, const RadialGrid& grid, double a)
{
    const double k2 = static_cast<double>(channel.kappa) * channel.kappa;
    if (!(a > 0.0) || a > k2)
        throw Error(ErrorKind::parameter, fmt::format("kinetic lemma needs 0 < a <= kappa^2 (a = {})", a));
    const double shift = a / k2;
    const ChannelOperator d0 = build_dirac_channel(make_coupling(0.0), channel, grid, {}, "free");
    const Matrix lhs = to_block_order(
        spectral_function(tridiag_eigen(*d0.tri, true), [&](double e) { return (e - 1.0 + shift) * (e - 1.0 + shift); }));
    const Matrix rhs = block_function(radial_laplacian(channel.ell, grid), radial_laplacian(channel.ell_lower(), grid),
                                      [&](double t) {
                                          const double c = std::sqrt(std::max(t, 0.0) + 1.0) - 1.0 + shift;
                                          return c * c;
                                      });
    Matrix diff = lhs - rhs;
    symmetrize(diff);
    InequalityCheck chk;
    chk.name = fmt::format("kinetic scalar kappa={} a={}", channel.kappa, a);
    chk.eigmin = min_eigenvalue(diff);
    chk.scale = std::max(lhs.max_abs(), 1.0);
    return chk;
}

double domination_constant(const Coupling& coupling, const Channel& channel, const RadialGrid& grid, double s)
{
    if (!(s > 0.0 && s < std::min(1.5 - coupling.sigma_gamma, 1.0)))
        throw Error(ErrorKind::parameter, fmt::format("s = {} outside (0, min(3/2 - sigma, 1))", s));
    const ChannelOperator op = build_dirac_channel(coupling, channel, grid);
    const EigenPairs eig = tridiag_eigen(*op.tri, true);
    const std::size_t n = grid.size();
    std::vector<std::size_t> pos;
    for (std::size_t k = 0; k < eig.values.size(); ++k)
        if (eig.values[k] > 0.0) pos.push_back(k);
    const std::size_t m = pos.size();
    if (m == 0) throw Error(ErrorKind::degenerate_discretization, "no positive spectrum");

    auto pow_s = [s](double x) { return std::pow(std::max(x, 0.0), s); };
    const Matrix pu = spectral_function(tridiag_eigen(free_momentum_upper(channel, grid), true), pow_s);
    const Matrix pl = spectral_function(tridiag_eigen(free_momentum_lower(channel, grid), true), pow_s);
    Matrix xu(n, m), xl(n, m);
    for (std::size_t j = 0; j < m; ++j) {
        const double scale = std::pow(eig.values[pos[j]], -s);
        for (std::size_t i = 0; i < n; ++i) {
            xu(i, j) = eig.vectors(2 * i, pos[j]) * scale;
            xl(i, j) = eig.vectors(2 * i + 1, pos[j]) * scale;
        }
    }
    Matrix q = matmul_tn(xu, matmul(pu, xu)) + matmul_tn(xl, matmul(pl, xl));
    symmetrize(q);
    return max_eigenvalue(q);
}

SandwichReport sandwich_check(const std::vector<double>& a_diag, const Matrix& b, double s, double s_prime, double c)
{
    if (!(std::max(s_prime, 0.5) < s && s < 1.0))
        throw Error(ErrorKind::parameter, fmt::format("need max(s', 1/2) < s < 1 (s = {}, s' = {})", s, s_prime));
    const std::size_t n = a_diag.size();
    if (b.rows() != n || b.cols() != n) throw Error(ErrorKind::dimension, "A and B sizes differ");
    for (double x : a_diag)
        if (!(x > 0.0)) throw Error(ErrorKind::parameter, "A must be positive");

    const EigenPairs be = sym_eigen(b, true);
    const double bmin = be.values.front(), bmax = be.values.back();
    const double tol = 1e-12 * std::max(std::abs(bmin), std::abs(bmax));
    if (bmin < -tol && bmax > tol) throw Error(ErrorKind::parameter, "B must be semidefinite");

    SandwichReport rep;
    rep.s = s;
    rep.s_prime = s_prime;
    Matrix bs = spectral_function(be, [s](double x) { return std::pow(std::abs(x), s); });
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) bs(i, j) *= std::pow(a_diag[j], -s_prime);
    // Operator norm as the square root of λ_max(XᵀX).
    rep.norm = std::sqrt(std::max(max_eigenvalue(matmul_tn(bs, bs)), 0.0));
    rep.m = std::pow(rep.norm / c, 1.0 / (s - s_prime));

    std::vector<double> am(n);
    for (std::size_t i = 0; i < n; ++i) am[i] = std::pow(a_diag[i] + rep.m, 2.0 * s);
    Matrix abm = b;
    for (std::size_t i = 0; i < n; ++i) abm(i, i) += a_diag[i] + rep.m;
    const EigenPairs ae = sym_eigen(abm, true);
    if (ae.values.front() <= 0.0) throw Error(ErrorKind::coupling_too_large, "A + B + M not positive");
    const Matrix lhs = spectral_function(ae, [s](double x) { return std::pow(x, 2.0 * s); });

    Matrix lo = lhs, up = (-1.0) * lhs;
    for (std::size_t i = 0; i < n; ++i) {
        lo(i, i) -= 0.5 * am[i];
        up(i, i) += 2.0 * am[i];
    }
    symmetrize(lo);
    symmetrize(up);
    const double scale = *std::max_element(am.begin(), am.end());
    rep.lower = {"sandwich lower", min_eigenvalue(lo), scale, 1e-8};
    rep.upper = {"sandwich upper", min_eigenvalue(up), scale, 1e-8};
    return rep;
}

}  // namespace fden
