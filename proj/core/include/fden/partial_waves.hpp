#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace fden {

using cplx = std::complex<double>;

/// Spin-orbit channel. ell follows ℓ_κ = |κ| − θ(κ), so κ = +1 carries ℓ = 0.
struct Channel {
    int kappa = 1;
    int ell = 0;
    int j_twice = 1;
    int degeneracy = 2;

    int sign() const noexcept { return kappa > 0 ? 1 : -1; }
    int abs_kappa() const noexcept { return kappa > 0 ? kappa : -kappa; }
    /// Orbital number of the lower component, ℓ_κ + sgn κ.
    int ell_lower() const noexcept { return ell + sign(); }
    /// First radial quantum number, θ(−κ).
    int n_first() const noexcept { return kappa < 0 ? 1 : 0; }
};

Channel channel_numbers(int kappa);

/// Direction on S² as (colatitude, azimuth).
struct Direction {
    double theta = 0.0;
    double phi = 0.0;

    std::array<double, 3> unit_vector() const;
};

struct SpinorSample {
    std::array<cplx, 4> components{};
    Direction omega;
};

/// Y_{ℓ,m} with the Condon–Shortley phase; zero when |m| > ℓ.
cplx spherical_harmonic(int ell, int m, Direction omega);

/// Two-component spinor Ω_{ℓ,m,s}; m = m_twice/2, s = s_sign/2.
std::array<cplx, 2> spherical_spinor(int ell, int m_twice, int s_sign, Direction omega);

/// Four-component Φ^σ_{κ,m}; sigma = +1 (upper) or -1 (lower).
SpinorSample dirac_spinor(const Channel& channel, int m_twice, int sigma, Direction omega);

/// Gauss–Legendre in cos θ times trapezoid in φ.
struct SphereQuadrature {
    std::vector<Direction> points;
    std::vector<double> weights;

    std::size_t size() const noexcept { return points.size(); }
};

SphereQuadrature sphere_quadrature(std::size_t n_theta, std::size_t n_phi);

/// Four-spinor field sampled on S² quadrature points × radii; index (ir, iq, τ).
struct SpinorField {
    SphereQuadrature quad;
    std::vector<double> radii;
    std::vector<cplx> values;

    cplx& at(std::size_t ir, std::size_t iq, std::size_t tau) { return values[(ir * quad.size() + iq) * 4 + tau]; }
    cplx at(std::size_t ir, std::size_t iq, std::size_t tau) const { return values[(ir * quad.size() + iq) * 4 + tau]; }
};

SpinorField make_field(const SphereQuadrature& quad, const std::vector<double>& radii);

/// Radial coefficients r·⟨Φ^σ_{κ,m}, g(r·)⟩ for every m of the channel.
struct ChannelProjection {
    Channel channel;
    std::vector<int> m_twice;
    std::vector<std::vector<cplx>> f_plus;   ///< [m][r]
    std::vector<std::vector<cplx>> f_minus;  ///< [m][r]
};

ChannelProjection project_channel(const SpinorField& g, const Channel& channel);

/// Adds Σ_m r⁻¹(f⁺_m Φ⁺_{κ,m} + f⁻_m Φ⁻_{κ,m}) to the field.
void add_channel(SpinorField& g, const ChannelProjection& coefficients);

/// Σ_m |Φ^σ_{κ,m}(ω)|² for one σ.
double unsold_sum(const Channel& channel, int sigma, Direction omega);

}  // namespace fden
