#pragma once

#include "fden/grid.hpp"
#include "fden/linalg.hpp"
#include "fden/partial_waves.hpp"
#include "fden/radial_discretization.hpp"

#include <string>

namespace fden {

/// Outcome of an operator inequality X ≥ Y tested as eigmin(X − Y) ≥ −tol·scale.
struct InequalityCheck {
    std::string name;
    double eigmin = 0.0;
    double scale = 1.0;
    double tolerance = 1e-8;

    bool holds() const noexcept { return eigmin >= -tolerance * scale; }
};

/// T_ℓ − (ℓ+½)²/r² on the channel's upper (ℓ_κ) or lower (ℓ_κ + sgn κ) orbital number.
/// Scale is the spectral radius of the comparison term.
InequalityCheck hardy_component_check(const Channel& channel, bool upper, const RadialGrid& grid);

/// 2T_{ℓ_κ}/κ² − 1/r² on the upper component.
InequalityCheck hardy_channel_check(const Channel& channel, const RadialGrid& grid);

/// Smallest generalized eigenvalue of (T_ℓ, (ℓ+½)²/r²); the sharp constant is 1.
double hardy_ratio(int ell, const RadialGrid& grid);

/// Bidiagonal pieces of the free channel operator: D₀² − 1 = diag(LᵀL, LLᵀ).
SymTridiag free_momentum_upper(const Channel& channel, const RadialGrid& grid);
SymTridiag free_momentum_lower(const Channel& channel, const RadialGrid& grid);

/// (D₀ − 1 + aκ⁻²)² − (√(p²+1) − 1 + aκ⁻²)² with p² = D₀² − 1 on the channel.
InequalityCheck kinetic_lemma_check(const Channel& channel, const RadialGrid& grid, double a);
/// Same with p² replaced by the scalar Laplacians diag(T_ℓκ, T_ℓκ+sgnκ).
InequalityCheck kinetic_lemma_scalar_check(const Channel& channel, const RadialGrid& grid, double a);

/// λ_max of (F_γ+1)^{−s} Λ|p|^{2s}Λ (F_γ+1)^{−s} on the discrete positive subspace.
double domination_constant(const Coupling& coupling, const Channel& channel, const RadialGrid& grid, double s);

struct SandwichReport {
    double s = 0.0;
    double s_prime = 0.0;
    double norm = 0.0;  ///< ‖|B|^s A^{−s′}‖
    double m = 0.0;
    InequalityCheck lower;  ///< (A+B+M)^{2s} − ½(A+M)^{2s}
    InequalityCheck upper;  ///< 2(A+M)^{2s} − (A+B+M)^{2s}
};

/// Two-sided comparison for A > 0 diagonal and B semidefinite (sign fixed by the caller).
/// M is chosen so that ‖|B|^s A^{−s′}‖ = c·M^{s−s′}.
SandwichReport sandwich_check(const std::vector<double>& a_diag, const Matrix& b, double s, double s_prime, double c);

}  // namespace fden
