#include "fden/thomas_fermi.hpp"

#include "fden/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace fden {

namespace {

using State = std::array<double, 2>;
namespace odeint = boost::numeric::odeint;

constexpr double kX0 = 1e-8;
constexpr double kXEnd = 60.0;
constexpr double kXShoot = 1e4;
const double kTailExp = 0.5 * (std::sqrt(73.0) - 7.0);
constexpr int kTailTerms = 60;

// φ = 144x⁻³(1 + v(z)), z = a·x^{-kTailExp}.  Coefficients of v from the
// ODE in t = ln x, normalized so the linear term is z.
const std::array<double, kTailTerms + 1>& tail_coeffs()
{
    static const auto c = [] {
        std::array<double, kTailTerms + 1> c{};
        std::array<double, kTailTerms + 1> p{};  // (1+v)^{3/2}
        const double mu = -kTailExp;
        c[0] = 1.0;
        c[1] = 1.0;
        p[0] = 1.0;
        p[1] = 1.5;
        for (int n = 2; n <= kTailTerms; ++n) {
            double r = 0.0;
            for (int k = 1; k < n; ++k) r += (2.5 * k - n) * c[k] * p[n - k];
            r /= n;
            c[n] = 12.0 * r / (n * n * mu * mu - 7.0 * n * mu - 6.0);
            p[n] = 1.5 * c[n] + r;
        }
        return c;
    }();
    return c;
}

// v(z) and z·v′(z)
double tail_series(double z, double* zdv)
{
    const auto& c = tail_coeffs();
    double v = 0.0, d = 0.0, zp = 1.0;
    for (int n = 1; n <= kTailTerms; ++n) {
        zp *= z;
        v += c[n] * zp;
        d += n * c[n] * zp;
    }
    if (zdv) *zdv = d;
    return v;
}

void tf_rhs(const State& y, State& dy, double x)
{
    const double p = std::max(y[0], 0.0);
    dy[0] = y[1];
    dy[1] = p * std::sqrt(p) / std::sqrt(x);
}

State series_start(double s)
{
    return {1.0 + s * kX0 + (4.0 / 3.0) * kX0 * std::sqrt(kX0), s + 2.0 * std::sqrt(kX0)};
}

enum class Shot { crossed, turned, reached };

Shot shoot(double s)
{
    auto stepper = odeint::make_controlled(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>());
    State y = series_start(s);
    double x = kX0, dx = 1e-9;
    while (x < kXShoot) {
        if (x + dx > kXShoot) dx = kXShoot - x;
        if (stepper.try_step(tf_rhs, y, x, dx) == odeint::fail) continue;
        if (y[0] < 0.0) return Shot::crossed;
        if (y[1] > 0.0) return Shot::turned;
    }
    return Shot::reached;
}

std::vector<State> trajectory(double s, const std::vector<double>& xs)
{
    std::vector<State> out;
    out.reserve(xs.size());
    State y = series_start(s);
    auto stepper = odeint::make_controlled(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>());
    odeint::integrate_times(stepper, tf_rhs, y, xs.begin(), xs.end(), 1e-9,
                            [&](const State& st, double) { out.push_back(st); });
    return out;
}

double hermite(double x0, double x1, double f0, double f1, double d0, double d1, double x, double* deriv)
{
    const double h = x1 - x0;
    const double t = (x - x0) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    if (deriv) {
        const double g00 = (6 * t2 - 6 * t) / h, g10 = 3 * t2 - 4 * t + 1, g01 = (-6 * t2 + 6 * t) / h, g11 = 3 * t2 - 2 * t;
        *deriv = g00 * f0 + g10 * d0 + g01 * f1 + g11 * d1;
    }
    return h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1;
}

// ∫_lo^hi f with t = lo + (hi−lo)u² to absorb a √ endpoint singularity at lo.
template <class F>
double integrate_sqrt(F f, double lo, double hi)
{
    if (!(hi > lo)) return 0.0;
    const double w = hi - lo;
    auto g = [&](double u) { return 2.0 * w * u * f(lo + w * u * u); };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, 0.0, 1.0, 12, 1e-10);
}

void fill_density(TFSolution& tf)
{
    const double zs = std::cbrt(tf.Z);
    tf.grid = build_grid(GridKind::logarithmic, 1e-7 / zs, 1e5 / zs, 4000);
    tf.density.resize(tf.grid.size());
    for (std::size_t i = 0; i < tf.grid.size(); ++i) tf.density[i] = tf.rho(tf.grid.nodes[i]);
}

constexpr double four_pi = 4.0 * std::numbers::pi;

}  // namespace

double tf_length_unit() { return 0.5 * std::pow(3.0 * std::numbers::pi / 4.0, 2.0 / 3.0); }

double TFSolution::phi(double x) const
{
    if (x <= 0.0) return 1.0;
    if (x < xs.front()) return 1.0 + slope0 * x + (4.0 / 3.0) * x * std::sqrt(x);
    if (x >= x_match) return 144.0 / (x * x * x) * (1.0 + tail_series(tail_f * std::pow(x, -kTailExp), nullptr));
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - xs.begin()) - 1;
    return hermite(xs[j], xs[j + 1], phis[j], phis[j + 1], dphis[j], dphis[j + 1], x, nullptr);
}

double TFSolution::dphi(double x) const
{
    if (x <= 0.0) return slope0;
    if (x < xs.front()) return slope0 + 2.0 * std::sqrt(x);
    if (x >= x_match) {
        double zdv = 0.0;
        const double v = tail_series(tail_f * std::pow(x, -kTailExp), &zdv);
        return 144.0 * std::pow(x, -4.0) * (-3.0 * (1.0 + v) - kTailExp * zdv);
    }
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - xs.begin()) - 1;
    double d = 0.0;
    hermite(xs[j], xs[j + 1], phis[j], phis[j + 1], dphis[j], dphis[j + 1], x, &d);
    return d;
}

double TFSolution::x_of_r(double r) const { return std::cbrt(Z) * r / tf_length_unit(); }

double TFSolution::rho(double r) const
{
    const double b = tf_length_unit();
    const double x = x_of_r(r);
    const double q = std::max(phi(x), 0.0) / x;
    return Z * Z / (four_pi * b * b * b) * q * std::sqrt(q);
}

double TFSolution::mass_within(double r) const
{
    if (r <= 0.0) return 0.0;
    const double x = x_of_r(r);
    return Z * (1.0 - phi(x) + x * dphi(x));
}

double TFSolution::outer_moment(double r) const
{
    return -std::pow(Z, 4.0 / 3.0) * dphi(x_of_r(r)) / tf_length_unit();
}

double TFSolution::radius_enclosing(double q) const
{
    if (!(q > 0.0 && q < Z)) throw Error(ErrorKind::range, fmt::format("charge {} outside (0, {})", q, Z));
    double lo = std::log(1e-14), hi = std::log(1e8);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::abs(hi) + 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mass_within(std::exp(mid)) < q)
            lo = mid;
        else
            hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

TFSolution solve_tf(double tol)
{
    double s_lo = -1.7, s_hi = -1.5;  // crosses zero / turns upward
    if (shoot(s_lo) != Shot::crossed || shoot(s_hi) != Shot::turned)
        throw Error(ErrorKind::solver, fmt::format("TF shooting bracket [{}, {}] invalid", s_lo, s_hi));
    std::vector<std::array<double, 2>> history;
    for (int it = 0; it < 200 && s_hi - s_lo > tol * std::abs(s_lo); ++it) {
        const double mid = 0.5 * (s_lo + s_hi);
        if (mid <= s_lo || mid >= s_hi) break;
        const Shot r = shoot(mid);
        if (r == Shot::crossed)
            s_lo = mid;
        else if (r == Shot::turned)
            s_hi = mid;
        else
            break;
        history.push_back({s_lo, s_hi});
    }
    if (s_hi - s_lo > 1e3 * tol * std::abs(s_lo))
        throw Error(ErrorKind::solver,
                    fmt::format("TF shooting stalled after {} steps at [{}, {}]", history.size(), s_lo, s_hi));

    TFSolution tf;
    tf.slope0 = 0.5 * (s_lo + s_hi);
    const std::size_t n = 8000;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i)
        grid[i] = kX0 * std::pow(kXEnd / kX0, static_cast<double>(i) / static_cast<double>(n - 1));
    const auto mid = trajectory(tf.slope0, grid);
    const auto lo = trajectory(s_lo, grid);
    const auto hi = trajectory(s_hi, grid);
    // Match where the bracketing shots separate by 1e-6 relative.
    std::size_t m = n - 1;
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(hi[i][0] - lo[i][0]) > 1e-6 * std::abs(mid[i][0]) || mid[i][0] <= 0.0 || mid[i][1] >= 0.0) {
            m = i - 1;
            break;
        }
    }
    tf.xs.assign(grid.begin(), grid.begin() + static_cast<std::ptrdiff_t>(m + 1));
    for (std::size_t i = 0; i <= m; ++i) {
        tf.phis.push_back(mid[i][0]);
        tf.dphis.push_back(mid[i][1]);
    }
    tf.x_match = tf.xs.back();
    const double xm = tf.x_match;
    const double target = tf.phis.back() * xm * xm * xm / 144.0 - 1.0;
    // The series is trusted for |z| ≤ 2; loose shooting tolerances can put
    // the matching point closer in, where the amplitude is clamped.
    constexpr double kZMax = 2.0;
    double zm = -kZMax;
    if (tail_series(-kZMax, nullptr) < target) {
        const auto [zlo, zhi] = boost::math::tools::bisect(
            [&](double z) { return tail_series(z, nullptr) - target; }, -kZMax, 0.0,
            boost::math::tools::eps_tolerance<double>(52));
        zm = 0.5 * (zlo + zhi);
    }
    tf.tail_f = zm * std::pow(xm, kTailExp);
    fill_density(tf);
    return tf;
}

TFSolution tf_for_charge(const TFSolution& unit, double Z)
{
    if (!(Z > 0.0)) throw Error(ErrorKind::parameter, "Z must be positive");
    TFSolution tf = unit;
    tf.Z = Z;
    fill_density(tf);
    return tf;
}

double tf_energy(const TFSolution& tf) { return 3.0 * tf.slope0 / (7.0 * tf_length_unit()) * std::pow(tf.Z, 7.0 / 3.0); }

double tf_small_r_slope(const TFSolution& tf, double lo, double hi)
{
    const double zs = std::cbrt(tf.Z);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int m = 200;
    for (int i = 0; i < m; ++i) {
        const double r = lo / zs * std::pow(hi / lo, i / (m - 1.0));
        const double x = std::log(r), y = std::log(tf.rho(r));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

double ball_mass(const TFSolution& tf, double a, double radius)
{
    if (radius <= 0.0) return 0.0;
    if (a <= 1e-5 * radius) return tf.mass_within(radius);
    const double inner = radius > a ? tf.mass_within(radius - a) : 0.0;
    auto f = [&](double t) {
        const double d = a - t;
        return std::numbers::pi * t / a * (radius * radius - d * d) * tf.rho(t);
    };
    return inner + integrate_sqrt(f, std::abs(a - radius), a + radius);
}

double half_radius(const TFSolution& tf, double a)
{
    if (tf.Z < 0.5) throw Error(ErrorKind::domain_too_small, "total charge below 1/2");
    const double r_half = tf.radius_enclosing(0.5);
    double hi = a + r_half;
    auto g = [&](double r) { return ball_mass(tf, a, r) - 0.5; };
    boost::math::tools::eps_tolerance<double> tol(45);
    std::uintmax_t iters = 200;
    const auto [lo_r, hi_r] = boost::math::tools::toms748_solve(g, 0.0, hi, -0.5, g(hi), tol, iters);
    return 0.5 * (lo_r + hi_r);
}

double screening_potential(const TFSolution& tf, double a, double radius)
{
    if (a <= 1e-5 * radius) return tf.outer_moment(radius);
    const double inner = radius < a ? tf.mass_within(a - radius) / a : 0.0;
    auto f = [&](double t) { return 2.0 * std::numbers::pi * t / a * (a + t - radius) * tf.rho(t); };
    const double shell = integrate_sqrt(f, std::abs(a - radius), a + radius);
    return inner + shell + tf.outer_moment(a + radius);
}

double screening_potential(const TFSolution& tf, double a) { return screening_potential(tf, a, half_radius(tf, a)); }

double tf_coulomb_potential(const TFSolution& tf, double a) { return tf.mass_within(a) / a + tf.outer_moment(a); }

double coulomb_energy(const RadialGrid& grid, const std::vector<double>& rho)
{
    if (rho.size() != grid.size()) throw Error(ErrorKind::dimension, "density and grid sizes differ");
    double d = 0.0, inside = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid.nodes[i];
        const double q = grid.weights[i] * four_pi * r * r * rho[i];
        d += q * (inside + 0.5 * q) / r;
        inside += q;
    }
    return d;
}

double tf_coulomb_energy(const TFSolution& tf)
{
    auto f = [&](double x) {
        const double p = std::max(tf.phi(x), 0.0);
        return p * std::sqrt(p) * (1.0 - p + x * tf.dphi(x)) / std::sqrt(x);
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    double d = 0.0;
    d += integrate_sqrt(f, 0.0, 1.0);
    d += GK::integrate(f, 1.0, tf.x_match, 15, 1e-11);
    d += GK::integrate(f, tf.x_match, std::numeric_limits<double>::infinity(), 15, 1e-11);
    return d / tf_length_unit() * std::pow(tf.Z, 7.0 / 3.0);
}

double ScreeningTable::operator()(double r) const
{
    const double lr = std::log(r);
    if (lr <= log_r.front()) return chi.front();
    if (lr >= log_r.back()) return chi.back() * std::exp(log_r.back() - lr);
    const auto it = std::upper_bound(log_r.begin(), log_r.end(), lr);
    const std::size_t j = static_cast<std::size_t>(it - log_r.begin()) - 1;
    const double t = (lr - log_r[j]) / (log_r[j + 1] - log_r[j]);
    return (1.0 - t) * chi[j] + t * chi[j + 1];
}

ScreeningTable make_screening_table(const TFSolution& tf, double r_lo, double r_hi, std::size_t n)
{
    if (n < 2 || !(r_hi > r_lo) || !(r_lo > 0)) throw Error(ErrorKind::parameter, "bad screening table range");
    ScreeningTable t;
    t.Z = tf.Z;
    for (std::size_t i = 0; i < n; ++i) {
        const double lr = std::log(r_lo) + (std::log(r_hi) - std::log(r_lo)) * static_cast<double>(i) / (n - 1.0);
        t.log_r.push_back(lr);
        t.chi.push_back(screening_potential(tf, std::exp(lr)));
    }
    return t;
}

MMSReport mms_probe(const TFSolution& unit, int electrons, std::size_t draws, std::uint64_t seed)
{
    if (electrons < 1) throw Error(ErrorKind::parameter, "need at least one electron");
    const TFSolution tf = tf_for_charge(unit, electrons);
    const double zs = std::cbrt(tf.Z);
    const ScreeningTable chi = make_screening_table(tf, 1e-5 / zs, 1e3 / zs, 600);
    MMSReport rep;
    rep.electrons = electrons;
    rep.draws = draws;
    rep.coulomb_energy = tf_coulomb_energy(tf);
    rep.min_margin = std::numeric_limits<double>::infinity();

    // Inverse CDF of the radial charge on a log table.
    const std::size_t nt = 2000;
    std::vector<double> cdf(nt), rad(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        rad[i] = 1e-8 / zs * std::pow(1e12, static_cast<double>(i) / (nt - 1.0));
        cdf[i] = tf.mass_within(rad[i]) / tf.Z;
    }
    auto sample_radius = [&](double u) {
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.begin()) return rad.front();
        if (it == cdf.end()) return rad.back();
        const std::size_t j = static_cast<std::size_t>(it - cdf.begin());
        const double t = (u - cdf[j - 1]) / (cdf[j] - cdf[j - 1]);
        return std::exp((1.0 - t) * std::log(rad[j - 1]) + t * std::log(rad[j]));
    };

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<std::array<double, 3>> pos(static_cast<std::size_t>(electrons));
    for (std::size_t d = 0; d < draws; ++d) {
        double rhs = -rep.coulomb_energy;
        for (auto& p : pos) {
            const double r = sample_radius(uni(rng));
            const double ct = 2.0 * uni(rng) - 1.0;
            const double az = 2.0 * std::numbers::pi * uni(rng);
            const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            p = {r * st * std::cos(az), r * st * std::sin(az), r * ct};
            rhs += chi(r);
        }
        double lhs = 0.0;
        for (std::size_t i = 0; i < pos.size(); ++i)
            for (std::size_t j = i + 1; j < pos.size(); ++j) {
                const double dx = pos[i][0] - pos[j][0], dy = pos[i][1] - pos[j][1], dz = pos[i][2] - pos[j][2];
                lhs += 1.0 / std::sqrt(dx * dx + dy * dy + dz * dz);
            }
        const double margin = lhs - rhs;
        rep.min_margin = std::min(rep.min_margin, margin);
        if (margin < 0.0) ++rep.violations;
    }
    return rep;
}

}  // namespace fden
