#pragma once

#include "fden/grid.hpp"

#include <cstdint>
#include <vector>

namespace fden {

/// Length unit of the universal equation: b = ½(3π/4)^{2/3}.
double tf_length_unit();

/// Neutral Thomas–Fermi atom.  φ solves φ″ = φ^{3/2}/√x, φ(0) = 1, φ(∞) = 0,
/// and ρ_Z(r) = Z²/(4πb³)·(φ(x)/x)^{3/2} with x = Z^{1/3} r / b.
struct TFSolution {
    double slope0 = 0.0;
    double Z = 1.0;
    double x_match = 0.0;  ///< beyond this the Sommerfeld tail is used
    double tail_f = 0.0;  ///< amplitude of the leading tail correction
    std::vector<double> xs, phis, dphis;
    RadialGrid grid;              ///< radii for the tabulated density
    std::vector<double> density;  ///< ρ_Z on grid.nodes

    double phi(double x) const;
    double dphi(double x) const;
    double x_of_r(double r) const;
    double rho(double r) const;
    /// Charge inside radius r.
    double mass_within(double r) const;
    /// ∫_r^∞ 4πtρ(t) dt
    double outer_moment(double r) const;
    /// Radius enclosing charge q ∈ (0, Z).
    double radius_enclosing(double q) const;
};

/// Shooting on φ′(0) to relative bracket width `tol`.
TFSolution solve_tf(double tol = 1e-14);

/// Same universal profile at nuclear charge Z (exact scaling).
TFSolution tf_for_charge(const TFSolution& unit, double Z);

/// E^TF(Z) = e_TF Z^{7/3} with e_TF = 3φ′(0)/(7b).
double tf_energy(const TFSolution& tf);

/// Log-log slope of ρ_Z on [lo, hi]·Z^{−1/3}.
double tf_small_r_slope(const TFSolution& tf, double lo = 1e-4, double hi = 1e-2);

/// Charge of ρ_Z inside the ball of radius R centred at distance a from the nucleus.
double ball_mass(const TFSolution& tf, double a, double radius);

/// R_Z(a): ball around a point at distance a holding charge ½.
double half_radius(const TFSolution& tf, double a);

/// χ_Z(a) = ∫_{|x−y| ≥ R_Z(x)} ρ(y)/|x−y| dy, |x| = a.
double screening_potential(const TFSolution& tf, double a);
double screening_potential(const TFSolution& tf, double a, double radius);

/// Full Coulomb potential of ρ_Z at distance a.
double tf_coulomb_potential(const TFSolution& tf, double a);

/// D[ρ] = ½∬ρ(x)ρ(y)/|x−y| for a radial density sampled on grid nodes (shell sum).
double coulomb_energy(const RadialGrid& grid, const std::vector<double>& rho);

/// D[ρ_Z^TF] from the profile by quadrature in x.
double tf_coulomb_energy(const TFSolution& tf);

/// χ_Z tabulated on a log grid in r and interpolated in log r.
struct ScreeningTable {
    double Z = 1.0;
    std::vector<double> log_r, chi;

    double operator()(double r) const;
};

ScreeningTable make_screening_table(const TFSolution& tf, double r_lo, double r_hi, std::size_t n);

struct MMSReport {
    int electrons = 0;
    std::size_t draws = 0;
    std::size_t violations = 0;
    double min_margin = 0.0;  ///< min over draws of lhs − rhs
    double coulomb_energy = 0.0;
};

/// Draws configurations from ρ_Z/Z at Z = N and tests the correlation inequality
/// Σ_{ν<μ}|x_ν−x_μ|⁻¹ ≥ Σ_ν χ_Z(x_ν) − D[ρ_Z].
MMSReport mms_probe(const TFSolution& unit, int electrons, std::size_t draws, std::uint64_t seed);

}  // namespace fden
