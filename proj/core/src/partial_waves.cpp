#include "fden/partial_waves.hpp"

#include "fden/errors.hpp"

#include <boost/math/special_functions/legendre.hpp>
#include <boost/math/special_functions/spherical_harmonic.hpp>
#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace fden {

Channel channel_numbers(int kappa)
{
    if (kappa == 0) throw Error(ErrorKind::invalid_channel, "kappa must be nonzero");
    Channel c;
    c.kappa = kappa;
    const int a = kappa > 0 ? kappa : -kappa;
    c.ell = a - (kappa > 0 ? 1 : 0);
    c.j_twice = 2 * a - 1;
    c.degeneracy = 2 * a;
    return c;
}

std::array<double, 3> Direction::unit_vector() const
{
    const double st = std::sin(theta);
    return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

cplx spherical_harmonic(int ell, int m, Direction omega)
{
    if (ell < 0 || m > ell || m < -ell) return {0.0, 0.0};
    return boost::math::spherical_harmonic<double>(static_cast<unsigned>(ell), m, omega.theta, omega.phi);
}

std::array<cplx, 2> spherical_spinor(int ell, int m_twice, int s_sign, Direction omega)
{
    if (ell < 0 || (m_twice % 2) == 0 || std::abs(m_twice) > 2 * ell + 1 || (s_sign != 1 && s_sign != -1))
        throw Error(ErrorKind::invalid_quantum_number,
                    fmt::format("spinor needs ell >= 0, odd |2m| <= 2ell+1, s = ±1/2 (got ell={}, 2m={}, 2s={})", ell,
                                m_twice, s_sign));
    const double l = ell;
    const double m = 0.5 * m_twice;
    const double s = 0.5 * s_sign;
    const double den = 2.0 * l + 1.0;
    const double a = l + 0.5 + 2.0 * s * m;
    const double b = l + 0.5 - 2.0 * s * m;
    const int m_lo = (m_twice - 1) / 2;
    const int m_hi = (m_twice + 1) / 2;
    const double ca = a > 0 ? std::sqrt(a / den) : 0.0;
    const double cb = b > 0 ? std::sqrt(b / den) : 0.0;
    return {2.0 * s * ca * spherical_harmonic(ell, m_lo, omega), cb * spherical_harmonic(ell, m_hi, omega)};
}

SpinorSample dirac_spinor(const Channel& channel, int m_twice, int sigma, Direction omega)
{
    if ((m_twice % 2) == 0 || std::abs(m_twice) > channel.j_twice)
        throw Error(ErrorKind::invalid_quantum_number,
                    fmt::format("2m = {} outside ±2j = ±{} for kappa {}", m_twice, channel.j_twice, channel.kappa));
    SpinorSample out;
    out.omega = omega;
    const double sg = channel.sign();
    if (sigma > 0) {
        const auto om = spherical_spinor(channel.ell, m_twice, channel.sign(), omega);
        const cplx f(0.0, sg);
        out.components = {f * om[0], f * om[1], 0.0, 0.0};
    } else {
        const auto om = spherical_spinor(channel.ell_lower(), m_twice, -channel.sign(), omega);
        out.components = {0.0, 0.0, -sg * om[0], -sg * om[1]};
    }
    return out;
}

SphereQuadrature sphere_quadrature(std::size_t n_theta, std::size_t n_phi)
{
    if (n_theta < 1 || n_phi < 1) throw Error(ErrorKind::configuration, "sphere quadrature needs positive orders");
    const int n = static_cast<int>(n_theta);
    const auto zeros = boost::math::legendre_p_zeros<double>(n);
    std::vector<double> xs, ws;
    for (double z : zeros) {
        const double dp = boost::math::legendre_p_prime<double>(n, z);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        if (z == 0.0) {
            xs.push_back(0.0);
            ws.push_back(w);
        } else {
            xs.push_back(z);
            ws.push_back(w);
            xs.push_back(-z);
            ws.push_back(w);
        }
    }
    SphereQuadrature q;
    const double dphi = 2.0 * std::numbers::pi / static_cast<double>(n_phi);
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t k = 0; k < n_phi; ++k) {
            q.points.push_back({std::acos(xs[i]), dphi * static_cast<double>(k)});
            q.weights.push_back(ws[i] * dphi);
        }
    return q;
}

SpinorField make_field(const SphereQuadrature& quad, const std::vector<double>& radii)
{
    SpinorField g;
    g.quad = quad;
    g.radii = radii;
    g.values.assign(radii.size() * quad.size() * 4, cplx(0.0, 0.0));
    return g;
}

ChannelProjection project_channel(const SpinorField& g, const Channel& channel)
{
    const std::size_t nq = g.quad.size();
    if (g.values.size() != g.radii.size() * nq * 4)
        throw Error(ErrorKind::dimension, fmt::format("field has {} values, expected {}", g.values.size(), g.radii.size() * nq * 4));
    ChannelProjection p;
    p.channel = channel;
    for (int mt = -channel.j_twice; mt <= channel.j_twice; mt += 2) p.m_twice.push_back(mt);
    const std::size_t nm = p.m_twice.size();
    p.f_plus.assign(nm, std::vector<cplx>(g.radii.size()));
    p.f_minus.assign(nm, std::vector<cplx>(g.radii.size()));
    for (std::size_t im = 0; im < nm; ++im) {
        std::vector<SpinorSample> up(nq), lo(nq);
        for (std::size_t iq = 0; iq < nq; ++iq) {
            up[iq] = dirac_spinor(channel, p.m_twice[im], +1, g.quad.points[iq]);
            lo[iq] = dirac_spinor(channel, p.m_twice[im], -1, g.quad.points[iq]);
        }
        for (std::size_t ir = 0; ir < g.radii.size(); ++ir) {
            cplx sp = 0.0, sm = 0.0;
            for (std::size_t iq = 0; iq < nq; ++iq) {
                const double w = g.quad.weights[iq];
                for (std::size_t t = 0; t < 4; ++t) {
                    sp += w * std::conj(up[iq].components[t]) * g.at(ir, iq, t);
                    sm += w * std::conj(lo[iq].components[t]) * g.at(ir, iq, t);
                }
            }
            p.f_plus[im][ir] = g.radii[ir] * sp;
            p.f_minus[im][ir] = g.radii[ir] * sm;
        }
    }
    return p;
}

void add_channel(SpinorField& g, const ChannelProjection& c)
{
    const std::size_t nq = g.quad.size();
    for (std::size_t im = 0; im < c.m_twice.size(); ++im)
        for (std::size_t iq = 0; iq < nq; ++iq) {
            const auto up = dirac_spinor(c.channel, c.m_twice[im], +1, g.quad.points[iq]);
            const auto lo = dirac_spinor(c.channel, c.m_twice[im], -1, g.quad.points[iq]);
            for (std::size_t ir = 0; ir < g.radii.size(); ++ir) {
                const double inv_r = 1.0 / g.radii[ir];
                for (std::size_t t = 0; t < 4; ++t)
                    g.at(ir, iq, t) += inv_r * (c.f_plus[im][ir] * up.components[t] + c.f_minus[im][ir] * lo.components[t]);
            }
        }
}

double unsold_sum(const Channel& channel, int sigma, Direction omega)
{
    double s = 0.0;
    for (int mt = -channel.j_twice; mt <= channel.j_twice; mt += 2) {
        const auto v = dirac_spinor(channel, mt, sigma, omega);
        for (const auto& c : v.components) s += std::norm(c);
    }
    return s;
}

}  // namespace fden
