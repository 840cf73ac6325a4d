#pragma once

#include "fden/radial_discretization.hpp"

#include <limits>
#include <map>
#include <string>
#include <vector>

namespace fden {

enum class Singularity { none, coulomb, power };

const char* to_string(Singularity s);

struct TestPotential {
    std::string name;
    RadialFunction eval;
    Singularity singularity = Singularity::none;
    double singular_exponent = 0.0;  ///< α for Singularity::power
    double support_radius = std::numeric_limits<double>::infinity();
    std::vector<double> breakpoints;  ///< jump locations, used to split quadrature

    double operator()(double r) const { return eval(r); }
};

/// Built-ins: exp(a), power(alpha, r0), cutoff-coulomb(cap, radius), yukawa(mu),
/// indicator(a, b), example(alpha), zero.  Every built-in takes an amplitude "c" (default 1).
TestPotential make_builtin(const std::string& name, const std::map<std::string, double>& params = {});

TestPotential scaled(const TestPotential& u, double factor);
/// |U|^p
TestPotential abs_power(const TestPotential& u, double p);
/// U·1_{r ≤ cut} or U·1_{r > cut}
TestPotential restricted(const TestPotential& u, double cut, bool inner);

struct NormOptions {
    bool fine = false;   ///< 61-point Kronrod rule instead of 31
    double r_cap = 1e6;  ///< largest R in the supremum
};

struct NormValue {
    bool finite = true;
    double value = 0.0;
    double argmax = 1.0;  ///< R attaining the supremum (K_{s,δ} only)
    std::string diagnostic;
};

NormValue norm_k0(const TestPotential& u, double s, const NormOptions& opt = {});
NormValue norm_ksdelta(const TestPotential& u, double s, double delta, const NormOptions& opt = {});

/// The bracket of the K_{s,δ} norm at one R (without the R^δ factor).
NormValue ksdelta_bracket(const TestPotential& u, double s, double R, const NormOptions& opt = {});

struct Witness {
    bool found = false;
    double s = 0.0;
    double s_prime = 0.0;
};

struct Classification {
    bool coulomb_compact = false;  ///< U₁ = U·1_{r≤1} lies in r⁻¹L^∞_c
    bool whole_coulomb_compact = false;  ///< U itself lies in r⁻¹L^∞_c
    std::vector<std::pair<double, bool>> k0;  ///< U ∈ K_s^(0) per grid s
    Witness d_gamma0;  ///< U₂ = U·1_{r>1}
    Witness d;
};

/// s-grid of the witness search.
const std::vector<double>& classification_s_grid();

Classification classify(const TestPotential& u, const Coupling& coupling);

struct InclusionReport {
    std::size_t checks = 0;
    std::vector<std::string> counterexamples;

    bool ok() const noexcept { return counterexamples.empty(); }
};

/// Numerical spot checks of the three inclusion items; throws internal_consistency on a counterexample.
InclusionReport inclusion_spotchecks(const std::vector<TestPotential>& samples, double s, double s_prime, double delta);

}  // namespace fden
