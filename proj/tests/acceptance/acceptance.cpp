// Acceptance run: one PASS/FAIL line per criterion, with wall time against its limit.

#include "fden/errors.hpp"
#include "fden/hydrogenic_density.hpp"
#include "fden/operator_bounds.hpp"
#include "fden/partial_waves.hpp"
#include "fden/perturbation_traces.hpp"
#include "fden/radial_discretization.hpp"
#include "fden/test_function_spaces.hpp"
#include "fden/thomas_fermi.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/minima.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

using namespace fden;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

struct Criterion {
    int id;
    std::string name;
    double limit_s;
    std::function<Verdict()> body;
};

std::string g(double v) { return fmt::format("{:.4g}", v); }

RadialGrid eigen_grid(double gamma, std::size_t n)
{
    return build_grid(GridKind::loglinear, 1e-10, 360.0 / gamma, n, 20.0 / gamma);
}

RadialGrid fh_grid(std::size_t n = 400) { return build_grid(GridKind::loglinear, 1e-6, 120, n, 10); }

// ---------------------------------------------------------------------------

Verdict sommerfeld_anchor()
{
    Verdict v;
    double worst = 0.0, omin = 1e9, omax = -1e9;
    std::size_t states = 0, dropped = 0;
    for (double gm : {0.1, 0.5, 0.9}) {
        const Coupling cp = make_coupling(gm);
        for (int k = -3; k <= 3; ++k) {
            if (k == 0) continue;
            const Channel ch = channel_numbers(k);
            const EigenSystem coarse = bound_states(cp, ch, eigen_grid(gm, 2000), 6);
            const EigenSystem fine = bound_states(cp, ch, eigen_grid(gm, 4000), 6);
            const auto keep = filter_spurious(coarse.values, fine.values);
            dropped += std::min(coarse.count(), fine.count()) - keep.size();
            for (std::size_t i = 0; i < 3; ++i) {
                const bool kept = std::find(keep.begin(), keep.end(), i) != keep.end();
                v.require(kept, fmt::format("state {} of kappa={} gamma={} filtered", i, k, gm));
                const double exact = sommerfeld_eigenvalue(cp, ch.n_first() + int(i), k);
                const double e1 = std::abs(coarse.values[i] - exact), e2 = std::abs(fine.values[i] - exact);
                worst = std::max(worst, e2 / exact);
                const double order = std::log2(e1 / e2);
                omin = std::min(omin, order);
                omax = std::max(omax, order);
                ++states;
            }
        }
    }
    v.require(worst <= 1e-4, "relative error <= 1e-4");
    v.require(omin >= 1.7 && omax <= 2.3, "order in 2 +- 0.3");
    v.note(fmt::format("{} states, max rel error {} at N=4000, order [{}, {}], spurious dropped {}", states, g(worst),
                       g(omin), g(omax), dropped));
    return v;
}

Verdict ground_state()
{
    Verdict v;
    double worst = 0.0;
    for (double gm : {0.1, 0.5, 0.9, 0.97}) {
        const Coupling cp = make_coupling(gm);
        double lowest = 2.0;
        for (int k : {-3, -2, -1, 1, 2, 3}) {
            const EigenSystem e = bound_states(cp, channel_numbers(k), eigen_grid(gm, 4000), 1);
            lowest = std::min(lowest, e.values.at(0));
        }
        const double exact = std::sqrt(1.0 - gm * gm);
        worst = std::max(worst, std::abs(lowest - exact) / exact);
    }
    v.require(worst <= 1e-4, "lowest eigenvalue = sqrt(1-gamma^2)");
    v.note(fmt::format("gamma in {{0.1,0.5,0.9,0.97}}, max rel error {}", g(worst)));
    return v;
}

Verdict feynman_hellmann()
{
    Verdict v;
    const Coupling cp = make_coupling(0.5);
    double worst = 0.0;
    for (const char* name : {"rexp", "cutoff-coulomb"}) {
        const TestPotential u = make_builtin(name);
        for (int k : {-1, 1, 2}) {
            const FHReport r = feynman_hellmann_check(cp, channel_numbers(k), u.eval, 1e-3, fh_grid());
            worst = std::max(worst, r.relative_gap);
            v.require(r.relative_gap <= 1e-3, fmt::format("{} kappa={} gap {}", name, k, g(r.relative_gap)));
        }
    }
    v.note(fmt::format("U in {{r e^-r, cutoff Coulomb}}, kappa in {{-1,1,2}}, max relative gap {}", g(worst)));
    return v;
}

Verdict density_exponents()
{
    Verdict v;
    {
        const Coupling cp = make_coupling(0.5);
        const DensityTable tot = total_density(cp, 12, 25, density_grid_far(0.5, 2000));
        const double slope = loglog_slope(tot, 20.0, 100.0);
        v.require(std::abs(slope + 1.5) <= 0.1, "large-r slope");
        v.note(fmt::format("large-r slope {} on [20,100] (gamma 0.5)", g(slope)));
    }
    {
        const double gm = 0.97;
        const Coupling cp = make_coupling(gm);
        const RadialGrid grid = density_grid_near(gm, 2000);
        std::vector<DensityTable> parts;
        const DensityTable tot = total_density(cp, 3, 10, grid, &parts);
        const double slope = loglog_slope(tot, 1e-4, 1e-2);
        const double want = -2.0 * sigma_of(gm);
        v.require(std::abs(slope - want) <= 0.1, "small-r slope");
        v.note(fmt::format("small-r slope {} vs -2 sigma {} (gamma 0.97)", g(slope), g(want)));
        double min_inner = 1e9;
        for (const DensityTable& t : parts) {
            if (t.channel->abs_kappa() < 2) continue;
            const double s = loglog_slope(t, 1e-7, 1e-4);
            min_inner = std::min(min_inner, s);
            double near_max = 0.0;
            for (std::size_t i = 0; i < grid.size() && grid.nodes[i] < 1e-3; ++i)
                near_max = std::max(near_max, t.values[i]);
            v.require(std::isfinite(near_max) && s >= 0.0,
                      fmt::format("kappa={} bounded near 0 (slope {})", t.channel->kappa, g(s)));
        }
        v.note(fmt::format("|kappa|>=2 inner slopes >= {}", g(min_inner)));
    }
    return v;
}

Verdict channel_bound()
{
    Verdict v;
    const Coupling cp = make_coupling(0.5);
    std::vector<int> kappas;
    for (int a = 1; a <= 5; ++a) kappas.insert(kappas.end(), {-a, a});
    auto constant_on = [&](std::size_t n) {
        const RadialGrid grid = density_grid_far(0.5, n);
        std::vector<DensityTable> tables;
        for (int k : kappas) tables.push_back(channel_density(cp, channel_numbers(k), 25, grid));
        return verify_channel_bound(tables, 0.75, 0.5).constant;
    };
    const double a = constant_on(2000), b = constant_on(4000);
    const double drift = std::abs(b - a) / a;
    v.require(std::isfinite(a) && a > 0.0, "finite supremum");
    v.require(drift < 0.05, "grid stable within 5%");
    v.note(fmt::format("sup rho/B = {} (N=2000), {} (N=4000), drift {}", g(a), g(b), g(drift)));
    return v;
}

Verdict spectral_shift_check()
{
    Verdict v;
    std::vector<double> ratios;
    for (double gm : {0.05, 0.1, 0.2}) {
        const SpectralShiftResult r = spectral_shift(gm);
        v.require(r.value > 0.0, fmt::format("s({}) > 0", gm));
        // partial k holds |kappa| = k + 1
        for (std::size_t i = 3; i + 1 < r.kappa_partials.size(); ++i)
            if (!(r.kappa_partials[i + 1] < r.kappa_partials[i])) {
                v.require(false, fmt::format("increments decrease at |kappa|={}", i + 2));
                break;
            }
        ratios.push_back(r.value / (gm * gm));
    }
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    const double drift = (*hi - *lo) / *lo;
    v.require(drift < 0.1, "s/gamma^2 drift < 10%");
    v.note(fmt::format("s/gamma^2 = {}, {}, {}; drift {}", g(ratios[0]), g(ratios[1]), g(ratios[2]), g(drift)));
    return v;
}

Verdict decay()
{
    Verdict v;
    const double gm = 0.5;
    const Coupling cp = make_coupling(gm);
    const RadialFunction vv = [gm](double r) { return gm / r * (-std::expm1(-r)); };
    const RadialFunction u = [](double r) { return std::exp(-r); };
    const RadialGrid grid = build_grid(GridKind::loglinear, 1e-4, 800, 400, 20);
    const DecayReport r = channel_shift_decay(cp, vv, u, 1e-3, 4, 12, grid);
    v.require(r.slope <= -1.0, "slope <= -1");
    v.note(fmt::format("V = gamma(1-e^-r)/r, U = e^-r, lambda 1e-3: slope {} over |kappa| 4..12", g(r.slope)));
    return v;
}

Verdict operator_inequalities()
{
    Verdict v;
    std::size_t checks = 0;
    double worst_rel = 1e9;
    auto record = [&](const InequalityCheck& c, const std::string& where) {
        ++checks;
        worst_rel = std::min(worst_rel, c.eigmin / c.scale);
        v.require(c.holds(), where + " " + c.name + " eigmin " + g(c.eigmin));
    };
    double hardy_k1 = 0.0;
    for (std::size_t n : {200, 400}) {
        const RadialGrid grid = fh_grid(n);
        for (int k : {-3, -2, -1, 1, 2, 3}) {
            const Channel ch = channel_numbers(k);
            const std::string where = fmt::format("N={} kappa={}", n, k);
            if (k == 1) {
                // 2T_0 >= 1/r^2 is false (Hardy constant 1/4); the component form is what holds
                hardy_k1 = std::min(hardy_k1, hardy_channel_check(ch, grid).eigmin);
                record(hardy_component_check(ch, true, grid), where);
                record(hardy_component_check(ch, false, grid), where);
            } else {
                record(hardy_channel_check(ch, grid), where);
            }
            for (double a : {0.5, 1.0, double(k * k)}) record(kinetic_lemma_check(ch, grid, a), where);
        }
    }
    v.note(fmt::format("{} Hardy/kinetic checks, min eigmin/scale {}; 2/kappa^2 form at kappa=+1 has eigmin {}",
                       checks, g(worst_rel), g(hardy_k1)));

    std::size_t sandwiches = 0;
    const Coupling cp = make_coupling(0.5);
    const RadialGrid grid = fh_grid(300);
    for (int k : {-1, 1, 2}) {
        const EigenSystem eig = eigensolve(build_dirac_channel(cp, channel_numbers(k), grid));
        const ChannelOperator f = furry_restriction(eig, grid, {}, 0.0);
        for (const char* name : {"rexp", "cutoff-coulomb"}) {
            const Matrix b = project_potential(*f.basis, grid, make_builtin(name).eval);
            for (double sign : {1.0, -1.0})
                for (const auto [s, sp] : {std::pair{0.75, 0.55}, std::pair{0.9, 0.6}}) {
                    const SandwichReport r = sandwich_check(f.basis_values, sign * b, s, sp, 0.5);
                    const std::string where = fmt::format("kappa={} {} sign={} s={}", k, name, sign, s);
                    v.require(r.lower.holds(), where + " sandwich lower");
                    v.require(r.upper.holds(), where + " sandwich upper");
                    ++sandwiches;
                }
        }
    }
    v.note(fmt::format("{} sandwich pairs", sandwiches));

    double worst_drift = 0.0;
    for (double gm : {0.5, 0.9})
        for (double s : {0.6, 0.75})
            for (int k : {-1, 1}) {
                const Coupling c = make_coupling(gm);
                const double a = domination_constant(c, channel_numbers(k), fh_grid(200), s);
                const double b = domination_constant(c, channel_numbers(k), fh_grid(400), s);
                const double drift = std::abs(b - a) / a;
                worst_drift = std::max(worst_drift, drift);
                v.require(std::isfinite(a) && drift < 0.05,
                          fmt::format("domination gamma={} s={} kappa={} drift {}", gm, s, k, g(drift)));
            }
    v.note(fmt::format("domination constant drift <= {}", g(worst_drift)));
    return v;
}

double exp_bracket(double R)
{
    using boost::math::tgamma;
    using boost::math::tgamma_lower;
    return tgamma_lower(1.5, R) / std::sqrt(R) + (tgamma(3.0, R) - tgamma(3.0, R * R)) / (R * R) +
           R * R * std::exp(-R * R);
}

Verdict appendix_norms()
{
    Verdict v;
    double worst = 0.0;
    auto close = [&](double got, double want, const std::string& what) {
        const double rel = std::abs(got - want) / std::abs(want);
        worst = std::max(worst, rel);
        v.require(rel <= 1e-6, fmt::format("{}: {} vs {}", what, got, want));
    };
    close(norm_k0(make_builtin("indicator"), 0.75).value, 2.0 / 3.0, "K0 indicator");
    close(norm_k0(make_builtin("exp"), 0.75).value, boost::math::tgamma_lower(1.5, 1.0) + std::exp(-1.0), "K0 exp");
    close(norm_k0(make_builtin("power", {{"alpha", 1.5}}), 0.75).value, 2.0, "K0 r^-3/2 tail");
    close(norm_k0(make_builtin("rpow", {{"alpha", 0.5}}), 0.75).value, 1.0, "K0 r^-1/2 core");
    v.require(norm_k0(make_builtin("zero"), 0.75).value == 0.0, "K0 zero");
    v.require(!norm_k0(make_builtin("example", {{"alpha", 1.0}}), 0.75).finite, "K0 of 1/r infinite");

    const auto best = boost::math::tools::brent_find_minima([](double R) { return -exp_bracket(R); }, 1.0, 10.0, 50);
    close(norm_ksdelta(make_builtin("exp"), 0.75, 0.0).value, -best.second, "K_{3/4,0} exp");
    close(norm_ksdelta(make_builtin("indicator"), 0.75, 0.0).value, 2.0 / 3.0, "K_{3/4,0} indicator");
    v.require(norm_ksdelta(make_builtin("exp"), 0.75, 0.5).finite, "K_{3/4,1/2} exp finite");
    // r^{-3/2} 1_{r>1}: the middle and outer pieces grow like R at s = 3/4
    v.require(!norm_ksdelta(make_builtin("power", {{"alpha", 1.5}}), 0.75, 0.0).finite, "K_{3/4,0} r^-3/2 diverges");
    v.note(fmt::format("closed-form matches within {}", g(worst)));

    const Coupling cp = make_coupling(0.5);
    const Classification a = classify(make_builtin("example", {{"alpha", 1.2}}), cp);
    const Classification b = classify(make_builtin("example", {{"alpha", 1.6}}), cp);
    v.require(a.coulomb_compact && a.d_gamma0.found && !a.d.found, "alpha=1.2: D_gamma^(0) only");
    v.require(b.coulomb_compact && b.d_gamma0.found && b.d.found, "alpha=1.6: D_gamma^(0) and D");
    v.note(fmt::format("alpha=1.2 witness (s={}, s'={}), alpha=1.6 D witness (s={}, s'={})", a.d_gamma0.s,
                       a.d_gamma0.s_prime, b.d.s, g(b.d.s_prime)));
    return v;
}

Verdict thomas_fermi()
{
    Verdict v;
    const TFSolution unit = solve_tf(1e-14);
    const TFSolution oracle = solve_tf(1e-15);
    v.require(std::abs(unit.slope0 + 1.5880710) <= 1e-4, "slope0");
    v.require(std::abs(unit.slope0 - oracle.slope0) <= 1e-10, "slope0 vs tighter shooting");
    v.note(fmt::format("slope0 {:.10f}", unit.slope0));

    double worst_charge = 0.0, worst_scaling = 0.0;
    const double e1 = tf_energy(unit), d1 = tf_coulomb_energy(unit);
    for (double Z : {1.0, 20.0, 92.0}) {
        const TFSolution tf = tf_for_charge(unit, Z);
        // quadrature of 4πr²ρ, independent of the closed-form charge identity
        const RadialGrid qg = build_grid(GridKind::loglinear, 1e-12, 1e4, 6000, 10.0);
        const double q = qg.integrate([&](double r) { return 4.0 * std::numbers::pi * r * r * tf.rho(r); });
        worst_charge = std::max({worst_charge, std::abs(q - Z) / Z, std::abs(tf.mass_within(1e6) - Z) / Z});
        const double z13 = std::cbrt(Z);
        for (double r : {1e-3, 0.1, 1.0, 5.0})
            worst_scaling = std::max(worst_scaling, std::abs(tf.rho(r) / (Z * Z * unit.rho(z13 * r)) - 1.0));
        worst_scaling = std::max(worst_scaling, std::abs(tf_energy(tf) / (e1 * std::pow(Z, 7.0 / 3.0)) - 1.0));
        worst_scaling = std::max(worst_scaling, std::abs(tf_coulomb_energy(tf) / (d1 * std::pow(Z, 7.0 / 3.0)) - 1.0));
        worst_scaling = std::max(worst_scaling, std::abs(tf.radius_enclosing(0.5 * Z) * z13 / unit.radius_enclosing(0.5) - 1.0));
        const double slope = tf_small_r_slope(tf);
        v.require(std::abs(slope + 1.5) <= 0.05, fmt::format("small-r slope {} at Z={}", g(slope), Z));
    }
    v.require(worst_charge <= 1e-3, "charge");
    v.require(worst_scaling <= 1e-6, "Z scaling");
    v.note(fmt::format("charge error {}, scaling error {}, small-r slope {}", g(worst_charge), g(worst_scaling),
                       g(tf_small_r_slope(unit))));

    std::size_t violations = 0, draws = 0;
    for (int n : {2, 5}) {
        const MMSReport r = mms_probe(unit, n, 10000, 20261016 + n);
        violations += r.violations;
        draws += r.draws;
    }
    v.require(violations == 0, "MMS violations");
    v.note(fmt::format("MMS {} violations in {} draws (N=2,5)", violations, draws));
    return v;
}

Verdict unsold()
{
    Verdict v;
    const SphereQuadrature q = sphere_quadrature(14, 28);
    double worst_sum = 0.0, worst_inner = 0.0;
    std::vector<Channel> chans;
    for (int k = -5; k <= 5; ++k)
        if (k) chans.push_back(channel_numbers(k));
    for (const Channel& ch : chans)
        for (int sigma : {1, -1})
            for (std::size_t i = 0; i < q.size(); i += 7)
                worst_sum = std::max(worst_sum, std::abs(unsold_sum(ch, sigma, q.points[i]) -
                                                         2.0 * ch.abs_kappa() / (4.0 * std::numbers::pi)));
    for (const Channel& a : chans)
        for (const Channel& b : chans)
            for (int s1 : {1, -1})
                for (int s2 : {1, -1})
                    for (int m1 = -a.j_twice; m1 <= a.j_twice; m1 += 2)
                        for (int m2 = -b.j_twice; m2 <= b.j_twice; m2 += 2) {
                            if (m1 != m2 && (a.kappa != b.kappa || s1 != s2)) continue;  // orthogonal in φ
                            cplx acc = 0.0;
                            for (std::size_t i = 0; i < q.size(); ++i) {
                                const SpinorSample x = dirac_spinor(a, m1, s1, q.points[i]);
                                const SpinorSample y = dirac_spinor(b, m2, s2, q.points[i]);
                                for (int t = 0; t < 4; ++t) acc += q.weights[i] * std::conj(x.components[t]) * y.components[t];
                            }
                            const double want = (a.kappa == b.kappa && s1 == s2 && m1 == m2) ? 1.0 : 0.0;
                            worst_inner = std::max(worst_inner, std::abs(acc - want));
                        }
    v.require(worst_sum <= 1e-10, "Unsold sum");
    v.require(worst_inner <= 1e-10, "orthonormality");
    v.note(fmt::format("|kappa|<=5: Unsold defect {}, inner-product defect {}", g(worst_sum), g(worst_inner)));
    return v;
}

}  // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {1, "sommerfeld_anchor", 300, sommerfeld_anchor},
        {2, "ground_state", 60, ground_state},
        {3, "feynman_hellmann", 300, feynman_hellmann},
        {4, "density_exponents", 600, density_exponents},
        {5, "channel_bound", 600, channel_bound},
        {6, "spectral_shift", 120, spectral_shift_check},
        {7, "channel_shift_decay", 600, decay},
        {8, "operator_inequalities", 600, operator_inequalities},
        {9, "appendix_norms", 600, appendix_norms},
        {10, "thomas_fermi", 600, thomas_fermi},
        {11, "unsold_orthonormality", 60, unsold},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.body();
        } catch (const Error& e) {
            v.pass = false;
            v.detail = fmt::format("error ({}): {}", to_string(e.kind()), e.what());
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = fmt::format("error: {}", e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.limit_s) {
            v.pass = false;
            v.note(fmt::format("runtime {:.1f} s over limit", secs));
        }
        failed += v.pass ? 0 : 1;
        fmt::print("[{}] C{:<2} {:<22} {:7.1f} s / {:4.0f} s  {}\n", v.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                   c.limit_s, v.detail);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
    return failed ? 1 : 0;
}
