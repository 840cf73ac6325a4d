#include "fden/hydrogenic_density.hpp"

#include "fden/errors.hpp"
#include "fden/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fden {

namespace {

void check_state(int n, int kappa, double gamma)
{
    if (kappa == 0) throw Error(ErrorKind::invalid_channel, "kappa must be nonzero");
    if (n < 0 || (kappa < 0 && n == 0))
        throw Error(ErrorKind::invalid_state, fmt::format("no bound state n = {} in channel kappa = {}", n, kappa));
    if (gamma >= std::abs(kappa))
        throw Error(ErrorKind::subcriticality, fmt::format("gamma = {} not below |kappa| = {}", gamma, std::abs(kappa)));
}

constexpr double four_pi = 4.0 * std::numbers::pi;

}  // namespace

double sommerfeld_eigenvalue(const Coupling& coupling, int n, int kappa)
{
    const double g = coupling.gamma;
    check_state(n, kappa, g);
    const double d = n + std::sqrt(static_cast<double>(kappa) * kappa - g * g);
    return 1.0 / std::sqrt(1.0 + g * g / (d * d));
}

double sommerfeld_binding(double gamma, int n, int kappa)
{
    check_state(n, kappa, gamma);
    const double d = n + std::sqrt(static_cast<double>(kappa) * kappa - gamma * gamma);
    const double q = std::sqrt(d * d + gamma * gamma);
    return gamma * gamma / (q * (q + d));
}

double sommerfeld_gamma_derivative(double gamma, int n, int kappa)
{
    check_state(n, kappa, gamma);
    const double root = std::sqrt(static_cast<double>(kappa) * kappa - gamma * gamma);
    const double d = n + root;
    const double q2 = d * d + gamma * gamma;
    // λ = d / √(d² + γ²), dd/dγ = −γ/root
    const double dd = -gamma / root;
    return (dd * gamma * gamma - d * gamma) / (q2 * std::sqrt(q2));
}

EigenSystem channel_states(const Coupling& coupling, const Channel& channel, int n_max, const RadialGrid& grid)
{
    if (n_max < channel.n_first())
        throw Error(ErrorKind::parameter, fmt::format("n_max = {} below first state of kappa = {}", n_max, channel.kappa));
    const std::size_t count = static_cast<std::size_t>(n_max - channel.n_first() + 1);
    EigenSystem e = bound_states(coupling, channel, grid, count);
    if (e.count() < count)
        throw Error(ErrorKind::domain_too_small,
                    fmt::format("grid holds {} of {} requested states for kappa = {} (raise r_max)", e.count(), count,
                                channel.kappa));
    return e;
}

DensityTable channel_density(const EigenSystem& states, const RadialGrid& grid, double gamma, int n_max)
{
    const std::size_t n = grid.size();
    const Channel& ch = states.channel;
    DensityTable t;
    t.grid = grid;
    t.channel = ch;
    t.n_max = n_max;
    t.gamma = gamma;
    t.values.assign(n, 0.0);
    t.truncation_estimate.assign(n, 0.0);
    std::vector<double> last(n, 0.0);
    for (std::size_t k = 0; k < states.count(); ++k) {
        const RadialSpinor s = radial_components(grid, states.vectors, k);
        const std::vector<double> fm = half_to_nodes(s.f_minus);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = grid.nodes[i];
            last[i] = ch.degeneracy * (s.f_plus[i] * s.f_plus[i] + fm[i] * fm[i]) / (four_pi * r * r);
            t.values[i] += last[i];
        }
    }
    // Σ_{n>N} n⁻³ ≈ N/2 · N⁻³
    const double tail_factor = 0.5 * std::max(1, n_max + std::abs(ch.kappa));
    for (std::size_t i = 0; i < n; ++i) t.truncation_estimate[i] = tail_factor * last[i];
    return t;
}

DensityTable channel_density(const Coupling& coupling, const Channel& channel, int n_max, const RadialGrid& grid)
{
    const EigenSystem states = channel_states(coupling, channel, n_max, grid);
    return channel_density(states, grid, coupling.gamma, n_max);
}

double channel_bound_shape(double r, int kappa, double s)
{
    const double k = std::abs(kappa);
    const double x = r / k;
    double bracket;
    if (r <= k)
        bracket = std::pow(x, 2.0 * s - 1.0);
    else if (r <= k * k)
        bracket = std::pow(x, 4.0 * s - 1.0);
    else
        bracket = std::pow(k, 4.0 * s - 1.0);
    return std::pow(k, 1.0 - 4.0 * s) * bracket / (r * r);
}

bool channel_bound_admissible(double s, double gamma)
{
    if (!(gamma > 0.0 && gamma < 1.0)) return false;
    if (gamma < std::sqrt(15.0) / 4.0) return s > 0.5 && s <= 0.75;
    return s > 0.5 && s < 1.5 - sigma_of(gamma);
}

DensityTable total_density(const Coupling& coupling, int kappa_max, int n_max, const RadialGrid& grid,
                           std::vector<DensityTable>* channels)
{
    if (kappa_max < 1) throw Error(ErrorKind::parameter, "kappa_max must be at least 1");
    std::vector<int> kappas;
    for (int k = 1; k <= kappa_max; ++k) {
        kappas.push_back(-k);
        kappas.push_back(k);
    }
    std::vector<DensityTable> parts(kappas.size());
    parallel_for(kappas.size(), [&](std::size_t j) {
        parts[j] = channel_density(coupling, channel_numbers(kappas[j]), n_max, grid);
    });

    const std::size_t n = grid.size();
    DensityTable t;
    t.grid = grid;
    t.n_max = n_max;
    t.kappa_max = kappa_max;
    t.gamma = coupling.gamma;
    t.values.assign(n, 0.0);
    t.truncation_estimate.assign(n, 0.0);
    for (const auto& p : parts)
        for (std::size_t i = 0; i < n; ++i) {
            t.values[i] += p.values[i];
            t.truncation_estimate[i] += p.truncation_estimate[i];
        }

    // κ-tail: constant fitted on the outermost pair, shape summed beyond the cutoff.
    const double s = 0.75;
    double a = 0.0;
    for (std::size_t j = parts.size() - 2; j < parts.size(); ++j)
        for (std::size_t i = 0; i < n; ++i)
            a = std::max(a, parts[j].values[i] / channel_bound_shape(grid.nodes[i], kappas[j], s));
    for (std::size_t i = 0; i < n; ++i) {
        double tail = 0.0;
        for (int k = kappa_max + 1; k <= kappa_max + 400; ++k) tail += 2.0 * channel_bound_shape(grid.nodes[i], k, s);
        t.truncation_estimate[i] += a * tail;
    }
    if (channels) *channels = std::move(parts);
    return t;
}

double density_charge(const DensityTable& table)
{
    double q = 0.0;
    for (std::size_t i = 0; i < table.grid.size(); ++i) {
        const double r = table.grid.nodes[i];
        q += table.grid.weights[i] * four_pi * r * r * table.values[i];
    }
    return q;
}

double loglog_slope(const DensityTable& table, double r_lo, double r_hi)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < table.grid.size(); ++i) {
        const double r = table.grid.nodes[i];
        if (r < r_lo || r > r_hi) continue;
        if (!(table.values[i] > 0))
            throw Error(ErrorKind::evaluation, fmt::format("density not positive at r = {}", r));
        const double x = std::log(r), y = std::log(table.values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 3) throw Error(ErrorKind::domain_too_small, fmt::format("only {} nodes in [{}, {}]", m, r_lo, r_hi));
    const double dm = static_cast<double>(m);
    return (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
}

BoundReport verify_channel_bound(const std::vector<DensityTable>& channels, double s, double gamma)
{
    if (!channel_bound_admissible(s, gamma))
        throw Error(ErrorKind::parameter,
                    fmt::format("s = {} outside the admissible range for gamma = {} "
                                "(1/2 < s <= 3/4 below sqrt(15)/4, 1/2 < s < 3/2 - sigma above)",
                                s, gamma));
    BoundReport rep;
    rep.s = s;
    rep.gamma = gamma;
    for (const auto& t : channels) {
        if (t.is_total()) throw Error(ErrorKind::parameter, "channel bound needs per-channel tables");
        double best = 0.0, best_r = 0.0;
        for (std::size_t i = 0; i < t.grid.size(); ++i) {
            const double r = t.grid.nodes[i];
            const double q = t.values[i] / channel_bound_shape(r, t.channel->kappa, s);
            if (q > best) {
                best = q;
                best_r = r;
            }
        }
        rep.kappas.push_back(t.channel->kappa);
        rep.channel_constants.push_back(best);
        if (best > rep.constant) {
            rep.constant = best;
            rep.argmax_kappa = t.channel->kappa;
            rep.argmax_r = best_r;
        }
    }
    return rep;
}

double potential_moment(const EigenSystem& states, std::size_t column, const RadialGrid& grid, double gamma)
{
    const RadialSpinor s = radial_components(grid, states.vectors, column);
    double m = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        m += grid.weights[i] * s.f_plus[i] * s.f_plus[i] / grid.nodes[i];
        m += grid.half_weights[i] * s.f_minus[i] * s.f_minus[i] / grid.half_nodes[i];
    }
    return gamma * m;
}

double potential_moment(const Coupling& coupling, int n, int kappa, const RadialGrid& grid)
{
    check_state(n, kappa, coupling.gamma);
    const Channel ch = channel_numbers(kappa);
    const EigenSystem e = channel_states(coupling, ch, n, grid);
    return potential_moment(e, static_cast<std::size_t>(n - ch.n_first()), grid, coupling.gamma);
}

RadialGrid density_grid_far(double gamma, std::size_t n_points)
{
    (void)gamma;
    return build_grid(GridKind::loglinear, 1e-8, 2e4, n_points, 100.0);
}

RadialGrid density_grid_near(double gamma, std::size_t n_points)
{
    // The inner wall perturbs the singular ground state for about three decades above r_min.
    (void)gamma;
    return build_grid(GridKind::loglinear, 1e-9, 4000.0, n_points, 50.0);
}

}  // namespace fden
