#pragma once

#include "fden/grid.hpp"
#include "fden/partial_waves.hpp"
#include "fden/radial_discretization.hpp"

#include <optional>
#include <vector>

namespace fden {

/// λ_{n,κ} in units of c².
double sommerfeld_eigenvalue(const Coupling& coupling, int n, int kappa);
/// 1 − λ_{n,κ} without cancellation.
double sommerfeld_binding(double gamma, int n, int kappa);
/// ∂λ_{n,κ}/∂γ.
double sommerfeld_gamma_derivative(double gamma, int n, int kappa);

/// Radial density samples on the integer nodes of `grid`.
struct DensityTable {
    RadialGrid grid;
    std::vector<double> values;
    std::vector<double> truncation_estimate;
    std::optional<Channel> channel;  ///< empty for the total density
    int n_max = 0;
    std::optional<int> kappa_max;
    double gamma = 0.0;

    bool is_total() const noexcept { return !channel.has_value(); }
};

/// Normalized bound states n = θ(−κ) … n_max of one channel.
EigenSystem channel_states(const Coupling& coupling, const Channel& channel, int n_max, const RadialGrid& grid);

/// ρ_κ^H(r) = 2|κ|/(4πr²) Σ_n (f⁺_n² + f⁻_n²), f⁻ moved to integer nodes.
DensityTable channel_density(const Coupling& coupling, const Channel& channel, int n_max, const RadialGrid& grid);
DensityTable channel_density(const EigenSystem& states, const RadialGrid& grid, double gamma, int n_max);

/// Σ_{0<|κ|≤kappa_max} ρ_κ^H plus a κ-tail estimate from the channel bound.
DensityTable total_density(const Coupling& coupling, int kappa_max, int n_max, const RadialGrid& grid,
                           std::vector<DensityTable>* channels = nullptr);

/// ∫ ρ 4πr² dr with the grid weights.
double density_charge(const DensityTable& table);

/// Least-squares slope of log ρ against log r over nodes in [r_lo, r_hi].
double loglog_slope(const DensityTable& table, double r_lo, double r_hi);

/// Right-hand side of the channel bound without its constant.
double channel_bound_shape(double r, int kappa, double s);

/// Admissible s for the channel bound at this γ.
bool channel_bound_admissible(double s, double gamma);

struct BoundReport {
    double s = 0.0;
    double gamma = 0.0;
    double constant = 0.0;  ///< sup over channels and nodes of ρ_κ/B
    int argmax_kappa = 0;
    double argmax_r = 0.0;
    std::vector<int> kappas;
    std::vector<double> channel_constants;
};

BoundReport verify_channel_bound(const std::vector<DensityTable>& channels, double s, double gamma);

/// ⟨ψ_{n,κ}, (γ/r) ψ_{n,κ}⟩ by quadrature of the discrete eigenvector.
double potential_moment(const Coupling& coupling, int n, int kappa, const RadialGrid& grid);
double potential_moment(const EigenSystem& states, std::size_t column, const RadialGrid& grid, double gamma);

/// Loglinear grids tuned for density work.
RadialGrid density_grid_far(double gamma, std::size_t n_points);
RadialGrid density_grid_near(double gamma, std::size_t n_points);

}  // namespace fden
