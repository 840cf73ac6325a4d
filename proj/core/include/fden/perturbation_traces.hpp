#pragma once

#include "fden/grid.hpp"
#include "fden/partial_waves.hpp"
#include "fden/radial_discretization.hpp"
#include "fden/thomas_fermi.hpp"

#include <string>
#include <vector>

namespace fden {

// Radial traces count each radial eigenvalue once.  Callers multiply by the
// degeneracy 2|κ| wherever a trace over the whole channel subspace is meant;
// reports below state which convention they use.

/// Σ |negative eigenvalues| of a symmetric matrix.
double negative_part_trace(const Matrix& m);

/// tr(f(0) − λ U)_− for a Furry restriction built at λ = 0 (radial convention).
double negative_trace(const ChannelOperator& furry_op, double lambda, const RadialFunction& u);
double negative_trace(const ChannelOperator& furry_op, double lambda, const Matrix& projected_u);

struct TraceCurve {
    std::vector<double> lambdas;
    std::vector<double> values;
    Channel channel;
    std::string potential_tag;
};

TraceCurve trace_curve(const ChannelOperator& furry_op, const RadialFunction& u, const std::vector<double>& lambdas,
                       const std::string& tag = "");

/// Derivative of the channel trace at λ = 0 against the density integral (both with the 2|κ| factor).
struct FHReport {
    Channel channel;
    double lambda_step = 0.0;
    std::size_t bound_states = 0;
    double central = 0.0;       ///< (S(λ) − S(−λ)) / 2λ
    double central_half = 0.0;  ///< same at λ/2
    double richardson = 0.0;
    double right = 0.0;  ///< one-sided, Richardson-extrapolated
    double left = 0.0;
    double residual = 0.0;  ///< |richardson − central_half|
    double density_integral = 0.0;
    double relative_gap = 0.0;
};

FHReport feynman_hellmann_check(const Coupling& coupling, const Channel& channel, const RadialFunction& u,
                                double lambda_step, const RadialGrid& grid);

/// Σ_{n≥θ(−κ)} (1 − λ_{n,κ}) with the n-tail summed through Hurwitz zeta values.
double coulomb_channel_trace(double gamma, int kappa);

/// One channel's bracket in the spectral shift: 2|κ| Σ_n [(1 − λ_{n,κ}) − γ²/(2N²)], N = n + |κ|, n ≥ θ(−κ).
double shift_bracket(double gamma, int kappa);

struct SpectralShiftResult {
    double gamma = 0.0;
    int kappa_max = 0;
    std::vector<double> kappa_partials;  ///< per |κ|: bracket(κ) + bracket(−κ), divided by γ²
    double value = 0.0;                  ///< includes the fitted κ-tail
    double tail_estimate = 0.0;
};

SpectralShiftResult spectral_shift(double gamma, int kappa_max = 60);

struct DecayReport {
    std::vector<int> abs_kappas;
    std::vector<double> shifts;  ///< s_κ,λ summed over ±κ, with degeneracy
    double slope = 0.0;
    double lambda = 0.0;
};

/// s_κ,λ = tr_κ F₀(V + λU)_− − tr_κ F₀(V)_− with Λ from the γ-Coulomb operator,
/// integrated in λ by Gauss–Legendre over Hellmann–Feynman derivatives.
DecayReport channel_shift_decay(const Coupling& coupling, const RadialFunction& v, const RadialFunction& u,
                                double lambda, int kappa_lo, int kappa_hi, const RadialGrid& grid);

struct ScottReport {
    double Z = 0.0;
    double gamma = 0.0;
    double c = 0.0;
    int L = 0;
    double unscreened = 0.0;  ///< Σ_{|κ|<L} tr_κ(F_{c,Z})_−
    double screened = 0.0;    ///< Σ_{L≤|κ|≤Z/2} tr_κ F_{c,Z}(−χ_Z)_−
    double screened_bare = 0.0;  ///< same channels without χ_Z, closed form
    std::vector<int> kappas;
    std::vector<double> screened_channels;
    std::vector<double> bare_channels;
    double coulomb_energy = 0.0;
    double total = 0.0;      ///< −unscreened − screened − D
    double reference = 0.0;  ///< E^TF + (½ − s(γ)) Z²
};

/// Energy probe in Hartree-like units (c = Z/γ).
ScottReport scott_energy_decomposition(const Coupling& coupling, const TFSolution& unit_tf, int L,
                                       const RadialGrid& grid);

}  // namespace fden
