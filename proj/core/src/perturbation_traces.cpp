#include "fden/perturbation_traces.hpp"

#include "fden/errors.hpp"
#include "fden/hydrogenic_density.hpp"
#include "fden/parallel.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/polygamma.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace fden {

namespace {

// ζ(k, a) = Σ_{m≥0} (m + a)^{−k}
double hurwitz_zeta(int k, double a)
{
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return sign * boost::math::polygamma(k - 1, a) / boost::math::factorial<double>(static_cast<unsigned>(k - 1));
}

// 1 − λ for X = N − δ, written without cancellation.
double one_minus_lambda(double gamma, double x)
{
    const double root = std::sqrt(x * x + gamma * gamma);
    return gamma * gamma / (root * (root + x));
}

constexpr int kDirectTerms = 400;

struct NSums {
    double dirac = 0.0;  ///< Σ (1 − λ)
    double bohr = 0.0;   ///< Σ γ²/(2N²)
    double bracket = 0.0;
};

NSums n_sums(double gamma, int kappa)
{
    if (kappa == 0) throw Error(ErrorKind::invalid_channel, "kappa must be nonzero");
    if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorKind::subcriticality, fmt::format("gamma {} outside (0, 1)", gamma));
    const double a = std::abs(kappa);
    const double delta = a - std::sqrt(a * a - gamma * gamma);
    const int n0 = kappa < 0 ? 1 : 0;
    const double g2 = gamma * gamma;
    NSums s;
    const int n_end = n0 + kDirectTerms;
    for (int n = n0; n < n_end; ++n) {
        const double big_n = n + a;
        const double d = one_minus_lambda(gamma, big_n - delta);
        const double b = 0.5 * g2 / (big_n * big_n);
        s.dirac += d;
        s.bohr += b;
        s.bracket += d - b;
    }
    // tail over N ≥ n_end + a
    static const double coeff[] = {0.5, -0.375, 0.3125, -0.2734375, 0.24609375};
    const double q = n_end + a;
    double dirac_tail = 0.0;
    double gp = 1.0;
    for (int j = 0; j < 5; ++j) {
        gp *= g2;
        dirac_tail += coeff[j] * gp * hurwitz_zeta(2 * (j + 1), q - delta);
    }
    const double bohr_tail = 0.5 * g2 * hurwitz_zeta(2, q);
    const double diff_leading = 0.5 * g2 * (hurwitz_zeta(2, q - delta) - hurwitz_zeta(2, q));
    s.dirac += dirac_tail;
    s.bohr += bohr_tail;
    s.bracket += diff_leading + (dirac_tail - 0.5 * g2 * hurwitz_zeta(2, q - delta));
    return s;
}

EigenSystem low_energy_basis(const Coupling& coupling, const Channel& channel, const RadialGrid& grid, double e_cut)
{
    const ChannelOperator op = build_dirac_channel(coupling, channel, grid);
    return eigensolve_window(op, 0.0, 1.0 + e_cut);
}

Matrix furry_with(const EigenSystem& eig, const RadialGrid& grid, const RadialFunction& shift)
{
    Matrix basis(eig.vectors.rows(), eig.count());
    for (std::size_t i = 0; i < basis.rows(); ++i)
        for (std::size_t j = 0; j < basis.cols(); ++j) basis(i, j) = eig.vectors(i, j);
    Matrix m = shift ? project_potential(basis, grid, shift) : Matrix(eig.count(), eig.count());
    for (std::size_t j = 0; j < eig.count(); ++j) m(j, j) += eig.values[j] - 1.0;
    return m;
}

Matrix basis_of(const EigenSystem& eig)
{
    Matrix basis(eig.vectors.rows(), eig.count());
    for (std::size_t i = 0; i < basis.rows(); ++i)
        for (std::size_t j = 0; j < basis.cols(); ++j) basis(i, j) = eig.vectors(i, j);
    return basis;
}

// Σ over negative eigenpairs of ⟨w, P w⟩
double negative_expectation(const Matrix& m, const Matrix& p)
{
    const EigenPairs eig = sym_eigen(m, true);
    const std::size_t n = m.rows();
    double total = 0.0;
    for (std::size_t k = 0; k < n && eig.values[k] < 0.0; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) row += p(i, j) * eig.vectors(j, k);
            acc += eig.vectors(i, k) * row;
        }
        total += acc;
    }
    return total;
}

}  // namespace

double negative_part_trace(const Matrix& m)
{
    const EigenPairs eig = sym_eigen(m, false);
    double total = 0.0;
    for (double v : eig.values)
        if (v < 0.0) total -= v;
    return total;
}

double negative_trace(const ChannelOperator& furry_op, double lambda, const Matrix& projected_u)
{
    if (furry_op.kind != OperatorKind::furry || !furry_op.basis)
        throw Error(ErrorKind::parameter, "negative_trace needs a Furry restriction");
    Matrix m = furry_op.dense_matrix;
    if (lambda != 0.0) {
        if (projected_u.rows() != m.rows() || projected_u.cols() != m.cols())
            throw Error(ErrorKind::dimension, "projected potential does not match the restriction");
        m = m - lambda * projected_u;
    }
    const EigenPairs eig = sym_eigen(m, false);
    if (!eig.values.empty() && eig.values.front() < -1.0)
        throw Error(ErrorKind::coupling_too_large,
                    fmt::format("restricted operator reaches {} below the gap at lambda = {}; "
                                "the perturbation is only form-bounded for small coupling",
                                eig.values.front(), lambda));
    double total = 0.0;
    for (double v : eig.values)
        if (v < 0.0) total -= v;
    return total;
}

double negative_trace(const ChannelOperator& furry_op, double lambda, const RadialFunction& u)
{
    if (!furry_op.basis) throw Error(ErrorKind::parameter, "negative_trace needs a Furry restriction");
    if (!u || lambda == 0.0) return negative_trace(furry_op, 0.0, Matrix{});
    return negative_trace(furry_op, lambda, project_potential(*furry_op.basis, furry_op.grid, u));
}

TraceCurve trace_curve(const ChannelOperator& furry_op, const RadialFunction& u, const std::vector<double>& lambdas,
                       const std::string& tag)
{
    if (!furry_op.basis) throw Error(ErrorKind::parameter, "trace_curve needs a Furry restriction");
    TraceCurve curve;
    curve.channel = furry_op.channel;
    curve.potential_tag = tag;
    curve.lambdas = lambdas;
    std::sort(curve.lambdas.begin(), curve.lambdas.end());
    curve.values.assign(curve.lambdas.size(), 0.0);
    const Matrix p = u ? project_potential(*furry_op.basis, furry_op.grid, u) : Matrix{};
    parallel_for(curve.lambdas.size(), [&](std::size_t i) {
        curve.values[i] = u ? negative_trace(furry_op, curve.lambdas[i], p) : negative_trace(furry_op, 0.0, p);
    });
    return curve;
}

FHReport feynman_hellmann_check(const Coupling& coupling, const Channel& channel, const RadialFunction& u,
                                double lambda_step, const RadialGrid& grid)
{
    if (!(lambda_step > 0.0)) throw Error(ErrorKind::parameter, "lambda_step must be positive");
    const ChannelOperator dirac = build_dirac_channel(coupling, channel, grid);
    const EigenSystem eig = eigensolve(dirac);
    const ChannelOperator furry = furry_restriction(eig, grid, {}, 0.0, "fh");
    const Matrix p = u ? project_potential(*furry.basis, grid, u) : Matrix(furry.size(), furry.size());

    FHReport rep;
    rep.channel = channel;
    rep.lambda_step = lambda_step;
    const double deg = 2.0 * std::abs(channel.kappa);

    const double h = lambda_step;
    double s[5];
    const double steps[5] = {-h, -0.5 * h, 0.0, 0.5 * h, h};
    for (int i = 0; i < 5; ++i) s[i] = deg * negative_trace(furry, steps[i], p);

    rep.central = (s[4] - s[0]) / (2.0 * h);
    rep.central_half = (s[3] - s[1]) / h;
    rep.richardson = (4.0 * rep.central_half - rep.central) / 3.0;
    rep.residual = std::abs(rep.richardson - rep.central_half);
    const double right_h = (s[4] - s[2]) / h;
    const double right_half = (s[3] - s[2]) / (0.5 * h);
    const double left_h = (s[2] - s[0]) / h;
    const double left_half = (s[2] - s[1]) / (0.5 * h);
    rep.right = 2.0 * right_half - right_h;
    rep.left = 2.0 * left_half - left_h;

    double integral = 0.0;
    for (std::size_t k = 0; k < furry.basis_values.size(); ++k) {
        if (furry.basis_values[k] >= 1.0) break;
        ++rep.bound_states;
        integral += p(k, k);
    }
    rep.density_integral = deg * integral;
    const double scale = std::max(std::abs(rep.density_integral), 1e-300);
    rep.relative_gap = std::abs(rep.richardson - rep.density_integral) / scale;
    if (rep.density_integral == 0.0 && rep.richardson == 0.0) rep.relative_gap = 0.0;
    return rep;
}

double coulomb_channel_trace(double gamma, int kappa) { return n_sums(gamma, kappa).dirac; }

double shift_bracket(double gamma, int kappa) { return 2.0 * std::abs(kappa) * n_sums(gamma, kappa).bracket; }

SpectralShiftResult spectral_shift(double gamma, int kappa_max)
{
    if (kappa_max < 6) throw Error(ErrorKind::parameter, "kappa_max must be at least 6");
    SpectralShiftResult res;
    res.gamma = gamma;
    res.kappa_max = kappa_max;
    res.kappa_partials.assign(static_cast<std::size_t>(kappa_max), 0.0);
    const double g2 = gamma * gamma;
    parallel_for(res.kappa_partials.size(), [&](std::size_t i) {
        const int a = static_cast<int>(i) + 1;
        res.kappa_partials[i] = (shift_bracket(gamma, a) + shift_bracket(gamma, -a)) / g2;
    });
    double sum = 0.0;
    for (double p : res.kappa_partials) sum += p;

    for (int a = 4; a <= kappa_max; ++a) {
        const double prev = res.kappa_partials[static_cast<std::size_t>(a - 2)];
        const double cur = res.kappa_partials[static_cast<std::size_t>(a - 1)];
        if (!(cur < prev) || !(cur > 0.0))
            throw Error(ErrorKind::convergence,
                        fmt::format("kappa increments not decaying at |kappa| = {} ({} after {})", a, cur, prev));
    }
    // P(a) ≈ A/a² + B/a³ fitted on the last two partials
    const double a1 = kappa_max - 1, a2 = kappa_max;
    const double p1 = res.kappa_partials[static_cast<std::size_t>(kappa_max - 2)];
    const double p2 = res.kappa_partials[static_cast<std::size_t>(kappa_max - 1)];
    const double det = 1.0 / (a1 * a1 * a2 * a2 * a2) - 1.0 / (a1 * a1 * a1 * a2 * a2);
    const double coef_a = (p1 / (a2 * a2 * a2) - p2 / (a1 * a1 * a1)) / det;
    const double coef_b = (p2 / (a1 * a1) - p1 / (a2 * a2)) / det;
    const double tail = coef_a * hurwitz_zeta(2, a2 + 1.0) + coef_b * hurwitz_zeta(3, a2 + 1.0);
    res.value = sum + tail;
    res.tail_estimate = std::abs(tail);
    return res;
}

DecayReport channel_shift_decay(const Coupling& coupling, const RadialFunction& v, const RadialFunction& u,
                                double lambda, int kappa_lo, int kappa_hi, const RadialGrid& grid)
{
    if (kappa_lo < 1 || kappa_hi < kappa_lo + 2)
        throw Error(ErrorKind::parameter, "kappa range needs at least three values of |kappa| >= 1");
    if (!v) throw Error(ErrorKind::parameter, "decay check needs V");
    const double g = coupling.gamma;
    for (double r : grid.nodes) {
        const double val = v(r);
        if (!std::isfinite(val) || val < -1e-14 || val > g / r * (1.0 + 1e-12))
            throw Error(ErrorKind::parameter, fmt::format("V({}) = {} is outside [0, gamma/r]", r, val));
    }
    const RadialFunction shift = [&](double r) { return g / r - v(r); };  // F₀(V) = D_γ + γ/r − V − 1

    boost::math::quadrature::gauss<double, 8> gl;
    const auto& xs = gl.abscissa();
    const auto& ws = gl.weights();
    std::vector<double> nodes, weights;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (double sgn : {-1.0, 1.0}) {
            if (xs[i] == 0.0 && sgn > 0.0) continue;
            nodes.push_back(0.5 * lambda * (1.0 + sgn * xs[i]));
            weights.push_back(0.5 * lambda * ws[i]);
        }
    }

    DecayReport rep;
    rep.lambda = lambda;
    for (int a = kappa_lo; a <= kappa_hi; ++a) rep.abs_kappas.push_back(a);
    std::vector<double> per(2 * rep.abs_kappas.size(), 0.0);
    parallel_for(per.size(), [&](std::size_t idx) {
        const int a = rep.abs_kappas[idx / 2];
        const Channel ch = channel_numbers(idx % 2 ? a : -a);
        const EigenSystem eig = low_energy_basis(coupling, ch, grid, 0.25);
        if (eig.count() == 0) return;
        const Matrix f0 = furry_with(eig, grid, shift);
        const Matrix pu = u ? project_potential(basis_of(eig), grid, u) : Matrix(eig.count(), eig.count());
        double acc = 0.0;
        for (std::size_t q = 0; q < nodes.size(); ++q) acc += weights[q] * negative_expectation(f0 - nodes[q] * pu, pu);
        per[idx] = 2.0 * a * acc;
    });
    for (std::size_t i = 0; i < rep.abs_kappas.size(); ++i) rep.shifts.push_back(per[2 * i] + per[2 * i + 1]);
    for (std::size_t i = 0; i < rep.shifts.size(); ++i)
        if (lambda > 0.0 && rep.shifts[i] < -1e-14)
            throw Error(ErrorKind::internal_consistency,
                        fmt::format("negative channel shift {} at |kappa| = {}", rep.shifts[i], rep.abs_kappas[i]));

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < rep.shifts.size(); ++i) {
        if (!(rep.shifts[i] > 0.0)) continue;
        const double x = std::log(static_cast<double>(rep.abs_kappas[i]));
        const double y = std::log(rep.shifts[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 2) {
        rep.slope = 0.0;
        return rep;
    }
    rep.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return rep;
}

ScottReport scott_energy_decomposition(const Coupling& coupling, const TFSolution& unit_tf, int L,
                                       const RadialGrid& grid)
{
    if (!coupling.z) throw Error(ErrorKind::parameter, "Scott probe needs the nuclear charge Z");
    const double Z = *coupling.z;
    if (L < 1) throw Error(ErrorKind::range, "L must be at least 1");
    const int k_hi = static_cast<int>(std::floor(Z / 2.0));
    if (L > k_hi) throw Error(ErrorKind::range, fmt::format("L = {} exceeds Z/2 = {}", L, Z / 2.0));

    ScottReport rep;
    rep.Z = Z;
    rep.gamma = coupling.gamma;
    rep.c = Z / coupling.gamma;
    rep.L = L;
    const double c = rep.c;
    const double c2 = c * c;

    for (int a = 1; a < L; ++a)
        rep.unscreened += c2 * 2.0 * a * (coulomb_channel_trace(coupling.gamma, a) + coulomb_channel_trace(coupling.gamma, -a));

    const TFSolution tf = tf_for_charge(unit_tf, Z);
    const ScreeningTable chi = make_screening_table(tf, grid.r_min / c, grid.r_max / c, 240);
    const RadialFunction raise = [&](double rp) { return chi(rp / c) / c2; };

    for (int a = L; a <= k_hi; ++a) rep.kappas.push_back(a);
    std::vector<double> screened(2 * rep.kappas.size(), 0.0);
    parallel_for(screened.size(), [&](std::size_t idx) {
        const int a = rep.kappas[idx / 2];
        const Channel ch = channel_numbers(idx % 2 ? a : -a);
        const EigenSystem eig = low_energy_basis(coupling, ch, grid, 0.25);
        if (eig.count() == 0) return;
        screened[idx] = c2 * 2.0 * a * negative_part_trace(furry_with(eig, grid, raise));
    });
    for (std::size_t i = 0; i < rep.kappas.size(); ++i) {
        const int a = rep.kappas[i];
        const double s = screened[2 * i] + screened[2 * i + 1];
        const double b = c2 * 2.0 * a * (coulomb_channel_trace(coupling.gamma, a) + coulomb_channel_trace(coupling.gamma, -a));
        rep.screened_channels.push_back(s);
        rep.bare_channels.push_back(b);
        rep.screened += s;
        rep.screened_bare += b;
    }
    rep.coulomb_energy = tf_coulomb_energy(tf);
    rep.total = -rep.unscreened - rep.screened - rep.coulomb_energy;
    rep.reference = tf_energy(tf) + (0.5 - spectral_shift(coupling.gamma).value) * Z * Z;
    return rep;
}

}  // namespace fden
