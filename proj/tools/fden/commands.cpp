#include "commands.hpp"

#include "fden/errors.hpp"
#include "fden/hydrogenic_density.hpp"
#include "fden/operator_bounds.hpp"
#include "fden/partial_waves.hpp"
#include "fden/perturbation_traces.hpp"
#include "fden/test_function_spaces.hpp"
#include "fden/thomas_fermi.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>

namespace fden::cli {

using nlohmann::json;

namespace {

struct Context {
    const RunConfig& cfg;
    std::string digest;
    std::ostream& out;
    Outcome outcome;

    std::string path(const std::string& ext) const
    {
        return (std::filesystem::path(cfg.out_dir) / (cfg.command + "." + ext)).string();
    }

    void check(const std::string& name, bool pass, const std::string& detail)
    {
        outcome.assertions.push_back({name, pass, detail});
        fmt::print(out, "  [{}] {}: {}\n", pass ? "pass" : "FAIL", name, detail);
    }
};

std::string g(double v) { return format_double(v); }

RadialGrid grid_or(const RunConfig& cfg, GridKind kind, double r_min, double r_max, std::size_t n, double b)
{
    const GridKind k = cfg.grid.kind ? grid_kind_from_string(*cfg.grid.kind) : kind;
    return build_grid(k, cfg.grid.r_min.value_or(r_min), cfg.grid.r_max.value_or(r_max), cfg.grid.n.value_or(n),
                      cfg.grid.b.value_or(b));
}

json grid_json(const RadialGrid& grid)
{
    return {{"kind", to_string(grid.kind)}, {"r_min", grid.r_min}, {"r_max", grid.r_max}, {"n", grid.n_points},
            {"b", grid.scale_b}, {"hash", fmt::format("{:016x}", grid.hash())}};
}

Coupling coupling_of(const RunConfig& cfg, double default_gamma)
{
    if (!cfg.gamma && !cfg.z && !cfg.c) return make_coupling(default_gamma);
    return make_coupling(cfg.gamma, cfg.z, cfg.c);
}

std::vector<int> kappas_or(const RunConfig& cfg, const std::string& fallback)
{
    std::vector<int> out;
    for (int k : parse_int_range(cfg.kappa.empty() ? fallback : cfg.kappa, "kappa"))
        if (k != 0) out.push_back(k);
    if (out.empty()) throw ConfigError("kappa", "no nonzero kappa in range");
    return out;
}

TestPotential potential_of(const RunConfig& cfg, const std::string& fallback,
                           const std::map<std::string, double>& fallback_params = {})
{
    const std::string name = cfg.potential.name.empty() ? fallback : cfg.potential.name;
    std::map<std::string, double> params = cfg.potential.name.empty() ? fallback_params : std::map<std::string, double>{};
    for (const auto& [k, v] : cfg.potential.params) params[k] = v;
    try {
        return make_builtin(name, params);
    } catch (const Error& e) {
        throw ConfigError("potential.name", e.what());
    }
}

// ---------------------------------------------------------------- eigenvalues

void cmd_eigenvalues(Context& ctx)
{
    const Coupling cp = coupling_of(ctx.cfg, 0.5);
    const double gm = cp.gamma;
    const RadialGrid grid = grid_or(ctx.cfg, GridKind::loglinear, 1e-10, 360.0 / gm, 4000, 20.0 / gm);
    const auto kappas = kappas_or(ctx.cfg, "-3..3");
    const auto ns = parse_int_range(ctx.cfg.n.empty() ? "0..2" : ctx.cfg.n, "n");
    const double tol = ctx.cfg.tolerance("eigenvalue", 1e-4);

    CsvWriter csv(ctx.path("csv"), ctx.digest,
                  {"kappa", "n", "sommerfeld", "discrete", "rel_error", "binding_rel_error"});
    double worst = 0.0, worst_binding = 0.0;
    json rows = json::array();
    for (int k : kappas) {
        const Channel ch = channel_numbers(k);
        int top = -1;
        for (int n : ns)
            if (n >= ch.n_first()) top = std::max(top, n);
        if (top < 0) continue;
        const EigenSystem e = bound_states(cp, ch, grid, static_cast<std::size_t>(top - ch.n_first() + 1));
        for (int n : ns) {
            if (n < ch.n_first()) continue;
            const std::size_t idx = static_cast<std::size_t>(n - ch.n_first());
            if (idx >= e.count()) throw AssertionFailure(fmt::format("state n={} kappa={} not resolved on grid", n, k));
            const double exact = sommerfeld_eigenvalue(cp, n, k);
            const double disc = e.values[idx];
            const double rel = std::abs(disc - exact) / exact;
            const double brel = std::abs(disc - exact) / sommerfeld_binding(gm, n, k);
            worst = std::max(worst, rel);
            worst_binding = std::max(worst_binding, brel);
            csv.cell(k).cell(n).cell(exact).cell(disc).cell(rel).cell(brel);
            csv.end_row();
            rows.push_back({{"kappa", k}, {"n", n}, {"sommerfeld", exact}, {"discrete", disc}, {"rel_error", rel}});
        }
    }
    ctx.outcome.report = {{"gamma", gm}, {"grid", grid_json(grid)}, {"states", rows},
                          {"max_rel_error", worst}, {"max_binding_rel_error", worst_binding}};
    fmt::print(ctx.out, "eigenvalues: gamma={} max rel error {} (binding {})\n", gm, g(worst), g(worst_binding));
    ctx.check("sommerfeld_match", worst <= tol, fmt::format("max rel error {} <= {}", g(worst), g(tol)));
}

// ---------------------------------------------------------------- density

void cmd_density(Context& ctx)
{
    const Coupling cp = coupling_of(ctx.cfg, 0.5);
    const RadialGrid grid = ctx.cfg.grid.kind || ctx.cfg.grid.n || ctx.cfg.grid.r_max || ctx.cfg.grid.r_min
                                ? grid_or(ctx.cfg, GridKind::loglinear, 1e-8, 2e4, 2000, 100.0)
                                : density_grid_far(cp.gamma, 2000);
    std::vector<DensityTable> channels;
    const DensityTable total = total_density(cp, ctx.cfg.kappa_max, ctx.cfg.n_max, grid, &channels);

    CsvWriter csv(ctx.path("csv"), ctx.digest, {"kappa", "r", "rho", "truncation_estimate"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        csv.cell(0).cell(grid.nodes[i]).cell(total.values[i]).cell(total.truncation_estimate[i]);
        csv.end_row();
    }
    json chans = json::array();
    double worst_charge = 0.0;
    for (const DensityTable& t : channels) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            csv.cell(t.channel->kappa).cell(grid.nodes[i]).cell(t.values[i]).cell(t.truncation_estimate[i]);
            csv.end_row();
        }
        const int count = t.n_max - t.channel->n_first() + 1;
        const double charge = density_charge(t);
        const double expect = 2.0 * t.channel->abs_kappa() * count;
        worst_charge = std::max(worst_charge, std::abs(charge - expect) / expect);
        chans.push_back({{"kappa", t.channel->kappa}, {"charge", charge}, {"expected", expect}});
    }
    ctx.outcome.report = {{"gamma", cp.gamma}, {"kappa_max", ctx.cfg.kappa_max}, {"n_max", ctx.cfg.n_max},
                          {"grid", grid_json(grid)}, {"channels", chans}, {"max_charge_rel_error", worst_charge}};
    fmt::print(ctx.out, "density: gamma={} kappa_max={} n_max={} channel charge error {}\n", cp.gamma,
               ctx.cfg.kappa_max, ctx.cfg.n_max, g(worst_charge));
    ctx.check("channel_charges", worst_charge <= ctx.cfg.tolerance("charge", 1e-4),
              fmt::format("max relative charge error {}", g(worst_charge)));
    if (ctx.cfg.fit_tail) {
        const double slope = loglog_slope(total, 20.0, 100.0);
        ctx.outcome.report["tail_slope"] = slope;
        ctx.check("tail_exponent", std::abs(slope + 1.5) <= ctx.cfg.tolerance("slope", 0.1),
                  fmt::format("slope on [20,100] = {}", g(slope)));
    }
}

// ---------------------------------------------------------------- bounds

void cmd_bounds(Context& ctx)
{
    const Coupling cp = coupling_of(ctx.cfg, 0.5);
    const int kmax = ctx.cfg.kappa.empty() ? 5 : 0;
    std::vector<int> kappas;
    if (kmax)
        for (int a = 1; a <= kmax; ++a) kappas.insert(kappas.end(), {-a, a});
    else
        kappas = kappas_or(ctx.cfg, "");
    const std::size_t n = ctx.cfg.grid.n.value_or(2000);
    auto constant_on = [&](std::size_t points) {
        RunConfig c2 = ctx.cfg;
        c2.grid.n = points;
        const RadialGrid grid = ctx.cfg.grid.kind || ctx.cfg.grid.r_max || ctx.cfg.grid.r_min
                                    ? grid_or(c2, GridKind::loglinear, 1e-8, 2e4, points, 100.0)
                                    : density_grid_far(cp.gamma, points);
        std::vector<DensityTable> tables(kappas.size());
        for (std::size_t i = 0; i < kappas.size(); ++i)
            tables[i] = channel_density(cp, channel_numbers(kappas[i]), ctx.cfg.n_max, grid);
        return std::make_pair(verify_channel_bound(tables, ctx.cfg.s, cp.gamma), grid);
    };
    const auto [coarse, grid] = constant_on(n);
    const auto [fine, grid2] = constant_on(2 * n);
    const double drift = std::abs(fine.constant - coarse.constant) / coarse.constant;

    CsvWriter csv(ctx.path("csv"), ctx.digest, {"kappa", "constant_n", "constant_2n"});
    for (std::size_t i = 0; i < coarse.kappas.size(); ++i) {
        csv.cell(coarse.kappas[i]).cell(coarse.channel_constants[i]).cell(fine.channel_constants[i]);
        csv.end_row();
    }
    ctx.outcome.report = {{"gamma", cp.gamma}, {"s", ctx.cfg.s}, {"grid", grid_json(grid)},
                          {"constant", coarse.constant}, {"constant_doubled", fine.constant},
                          {"argmax_kappa", coarse.argmax_kappa}, {"argmax_r", coarse.argmax_r}, {"drift", drift}};
    fmt::print(ctx.out, "bounds: s={} gamma={} sup rho/B = {} (doubled grid {})\n", ctx.cfg.s, cp.gamma,
               g(coarse.constant), g(fine.constant));
    ctx.check("finite_constant", std::isfinite(coarse.constant) && coarse.constant > 0.0, g(coarse.constant));
    ctx.check("grid_stable", drift <= ctx.cfg.tolerance("bound_stability", 0.05), fmt::format("drift {}", g(drift)));
}

// ---------------------------------------------------------------- fh-check

void cmd_fh(Context& ctx)
{
    const Coupling cp = coupling_of(ctx.cfg, 0.5);
    const RadialGrid grid = grid_or(ctx.cfg, GridKind::loglinear, 1e-6, 120.0, 400, 10.0);
    const TestPotential u = potential_of(ctx.cfg, "rexp");
    const double tol = ctx.cfg.tolerance("fh", 1e-3);
    CsvWriter csv(ctx.path("csv"), ctx.digest,
                  {"kappa", "bound_states", "central", "richardson", "left", "right", "density_integral",
                   "relative_gap"});
    json rows = json::array();
    double worst = 0.0;
    for (int k : kappas_or(ctx.cfg, "-1,1,2")) {
        const FHReport r = feynman_hellmann_check(cp, channel_numbers(k), u.eval, ctx.cfg.lambda_step, grid);
        csv.cell(k).cell(static_cast<long long>(r.bound_states)).cell(r.central).cell(r.richardson).cell(r.left)
            .cell(r.right).cell(r.density_integral).cell(r.relative_gap);
        csv.end_row();
        rows.push_back({{"kappa", k}, {"richardson", r.richardson}, {"density_integral", r.density_integral},
                        {"relative_gap", r.relative_gap}, {"residual", r.residual}});
        worst = std::max(worst, r.relative_gap);
    }
    ctx.outcome.report = {{"gamma", cp.gamma}, {"potential", u.name}, {"lambda_step", ctx.cfg.lambda_step},
                          {"grid", grid_json(grid)}, {"channels", rows}, {"max_relative_gap", worst}};
    fmt::print(ctx.out, "fh-check: potential {} max relative gap {}\n", u.name, g(worst));
    ctx.check("feynman_hellmann", worst <= tol, fmt::format("max gap {} <= {}", g(worst), g(tol)));
}

// ---------------------------------------------------------------- shift

void cmd_shift(Context& ctx)
{
    std::vector<double> gammas;
    if (ctx.cfg.gamma)
        gammas = {*ctx.cfg.gamma};
    else
        gammas = {0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9};
    const int kmax = std::max(ctx.cfg.kappa_max, 60);
    CsvWriter csv(ctx.path("csv"), ctx.digest, {"gamma", "abs_kappa", "partial"});
    json rows = json::array();
    std::map<double, double> values;
    for (double gm : gammas) {
        const SpectralShiftResult r = spectral_shift(gm, kmax);
        for (std::size_t i = 0; i < r.kappa_partials.size(); ++i) {
            csv.cell(gm).cell(static_cast<long long>(i + 1)).cell(r.kappa_partials[i]);
            csv.end_row();
        }
        rows.push_back({{"gamma", gm}, {"s", r.value}, {"s_over_gamma2", r.value / (gm * gm)},
                        {"tail_estimate", r.tail_estimate}, {"kappa_max", r.kappa_max}});
        values[gm] = r.value;
        fmt::print(ctx.out, "shift: gamma={} s={} s/gamma^2={} tail {}\n", gm, g(r.value), g(r.value / (gm * gm)),
                   g(r.tail_estimate));
        ctx.check(fmt::format("positive(gamma={})", gm), r.value > 0.0, g(r.value));
    }
    ctx.outcome.report = {{"results", rows}};
    if (values.count(0.05) && values.count(0.1) && values.count(0.2)) {
        double lo = 1e300, hi = 0.0;
        for (double gm : {0.05, 0.1, 0.2}) {
            const double q = values[gm] / (gm * gm);
            lo = std::min(lo, q);
            hi = std::max(hi, q);
        }
        const double drift = (hi - lo) / lo;
        ctx.outcome.report["small_gamma_drift"] = drift;
        ctx.check("small_gamma_limit", drift < ctx.cfg.tolerance("shift_drift", 0.1), fmt::format("drift {}", g(drift)));
    }
    if (values.size() > 1) {
        bool increasing = true;
        double prev = -1.0;
        for (const auto& [gm, v] : values) {
            increasing = increasing && v > prev;
            prev = v;
        }
        ctx.check("increasing_in_gamma", increasing, "s(gamma) monotone on the sweep");
    }
}

// ---------------------------------------------------------------- decay

void cmd_decay(Context& ctx)
{
    const Coupling cp = coupling_of(ctx.cfg, 0.5);
    const RadialGrid grid = grid_or(ctx.cfg, GridKind::loglinear, 1e-4, 800.0, 400, 20.0);
    const TestPotential u = potential_of(ctx.cfg, "exp");
    const double gm = cp.gamma;
    const RadialFunction v = [gm](double r) { return gm / r * (-std::expm1(-r)); };
    const auto ks = parse_int_range(ctx.cfg.kappa.empty() ? "4..12" : ctx.cfg.kappa, "kappa");
    const DecayReport r = channel_shift_decay(cp, v, u.eval, ctx.cfg.lambda, ks.front(), ks.back(), grid);
    CsvWriter csv(ctx.path("csv"), ctx.digest, {"abs_kappa", "shift"});
    for (std::size_t i = 0; i < r.abs_kappas.size(); ++i) {
        csv.cell(r.abs_kappas[i]).cell(r.shifts[i]);
        csv.end_row();
    }
    ctx.outcome.report = {{"gamma", gm}, {"lambda", r.lambda}, {"potential", u.name}, {"grid", grid_json(grid)},
                          {"slope", r.slope}, {"epsilon", -r.slope - 1.0}, {"shifts", r.shifts}};
    fmt::print(ctx.out, "decay: gamma={} lambda={} slope {} (epsilon {})\n", gm, r.lambda, g(r.slope), g(-r.slope - 1.0));
    ctx.check("decay_slope", r.slope <= -1.0, fmt::format("slope {} <= -1", g(r.slope)));
}

// ---------------------------------------------------------------- norms / classify

json norm_json(const NormValue& n)
{
    return {{"finite", n.finite}, {"value", n.finite ? json(n.value) : json("inf")}, {"argmax", n.argmax},
            {"diagnostic", n.diagnostic}};
}

void cmd_norms(Context& ctx)
{
    const TestPotential u = potential_of(ctx.cfg, "exp");
    const double s = ctx.cfg.s;
    CsvWriter csv(ctx.path("csv"), ctx.digest, {"norm", "s", "delta", "finite", "value", "argmax"});
    const NormValue k0 = norm_k0(u, s);
    const NormValue ksd = norm_ksdelta(u, s, ctx.cfg.delta);
    csv.cell("K0").cell(s).cell(0.0).cell(k0.finite ? 1 : 0).cell(k0.value).cell(1.0);
    csv.end_row();
    csv.cell("Ksdelta").cell(s).cell(ctx.cfg.delta).cell(ksd.finite ? 1 : 0).cell(ksd.value).cell(ksd.argmax);
    csv.end_row();
    ctx.outcome.report = {{"potential", u.name}, {"s", s}, {"delta", ctx.cfg.delta}, {"k0", norm_json(k0)},
                          {"ksdelta", norm_json(ksd)}};
    fmt::print(ctx.out, "norms: {} K0(s={}) = {}, K(s={}, delta={}) = {} at R={}\n", u.name, s, g(k0.value), s,
               ctx.cfg.delta, g(ksd.value), g(ksd.argmax));
    if (ctx.cfg.s_prime) {
        const NormValue kp = norm_k0(u, *ctx.cfg.s_prime);
        csv.cell("K0").cell(*ctx.cfg.s_prime).cell(0.0).cell(kp.finite ? 1 : 0).cell(kp.value).cell(1.0);
        csv.end_row();
        ctx.outcome.report["k0_s_prime"] = norm_json(kp);
        ctx.check("inclusion_k0", !kp.finite || k0.finite, "finite K_{s'}^(0) implies finite K_s^(0)");
    }
    ctx.check("inclusion_ksdelta", !ksd.finite || k0.finite, "finite K_{s,delta} implies finite K_s^(0)");
}

void cmd_classify(Context& ctx)
{
    const Coupling cp = coupling_of(ctx.cfg, 0.5);
    const TestPotential u = potential_of(ctx.cfg, "example", {{"alpha", 1.6}});
    const Classification c = classify(u, cp);
    CsvWriter csv(ctx.path("csv"), ctx.digest, {"space", "member", "s", "s_prime"});
    csv.cell("r^-1 Linf_c (r<=1 part)").cell(c.coulomb_compact ? 1 : 0).cell(0.0).cell(0.0);
    csv.end_row();
    csv.cell("r^-1 Linf_c").cell(c.whole_coulomb_compact ? 1 : 0).cell(0.0).cell(0.0);
    csv.end_row();
    json k0 = json::array();
    for (const auto& [s, in] : c.k0) {
        csv.cell("K0").cell(in ? 1 : 0).cell(s).cell(0.0);
        csv.end_row();
        k0.push_back({{"s", s}, {"member", in}});
    }
    csv.cell("D_gamma0").cell(c.d_gamma0.found ? 1 : 0).cell(c.d_gamma0.s).cell(c.d_gamma0.s_prime);
    csv.end_row();
    csv.cell("D").cell(c.d.found ? 1 : 0).cell(c.d.s).cell(c.d.s_prime);
    csv.end_row();
    auto witness = [](const Witness& w) {
        return w.found ? json{{"found", true}, {"s", w.s}, {"s_prime", w.s_prime}} : json{{"found", false}};
    };
    ctx.outcome.report = {{"potential", u.name},
                          {"gamma", cp.gamma},
                          {"coulomb_compact_inner", c.coulomb_compact},
                          {"coulomb_compact", c.whole_coulomb_compact},
                          {"k0", k0},
                          {"d_gamma0", witness(c.d_gamma0)},
                          {"d", witness(c.d)}};
    fmt::print(ctx.out, "classify: {} D_gamma^(0): {} D: {}\n", u.name,
               c.d_gamma0.found ? fmt::format("witness s={} s'={}", c.d_gamma0.s, c.d_gamma0.s_prime) : "no witness on grid",
               c.d.found ? fmt::format("witness s={} s'={}", c.d.s, c.d.s_prime) : "no witness on grid");
}

// ---------------------------------------------------------------- tf

void cmd_tf(Context& ctx)
{
    const double Z = ctx.cfg.z.value_or(1.0);
    const TFSolution unit = solve_tf();
    const TFSolution tf = tf_for_charge(unit, Z);
    const double e = tf_energy(tf);
    const double d = tf_coulomb_energy(tf);
    const double d_grid = coulomb_energy(tf.grid, tf.density);
    const double charge = tf.mass_within(tf.grid.r_max);
    const double slope = tf_small_r_slope(tf);
    CsvWriter csv(ctx.path("csv"), ctx.digest, {"r", "rho", "chi", "half_radius"});
    const double scale = std::cbrt(Z);
    for (int i = 0; i <= 30; ++i) {
        const double r = std::pow(10.0, -3.0 + 0.15 * i) / scale;
        csv.cell(r).cell(tf.rho(r)).cell(screening_potential(tf, r)).cell(half_radius(tf, r));
        csv.end_row();
    }
    const MMSReport mms = mms_probe(unit, ctx.cfg.electrons, ctx.cfg.draws, ctx.cfg.seed);
    ctx.outcome.report = {{"Z", Z},
                          {"slope0", unit.slope0},
                          {"x_match", unit.x_match},
                          {"energy", e},
                          {"e_tf", e / std::pow(Z, 7.0 / 3.0)},
                          {"coulomb_energy", d},
                          {"coulomb_energy_shells", d_grid},
                          {"charge", charge},
                          {"small_r_slope", slope},
                          {"mms", {{"electrons", mms.electrons}, {"draws", mms.draws}, {"violations", mms.violations},
                                   {"min_margin", mms.min_margin}, {"seed", ctx.cfg.seed}}}};
    fmt::print(ctx.out, "tf: Z={} phi'(0)={} E={} D={} charge={} small-r slope={}\n", Z, g(unit.slope0), g(e), g(d),
               g(charge), g(slope));
    ctx.check("slope0", std::abs(unit.slope0 + 1.5880710) <= ctx.cfg.tolerance("slope0", 1e-4), g(unit.slope0));
    ctx.check("charge", std::abs(charge - Z) <= ctx.cfg.tolerance("charge", 1e-3) * Z, g(charge));
    ctx.check("small_r_slope", std::abs(slope + 1.5) <= ctx.cfg.tolerance("slope", 0.05), g(slope));
    ctx.check("virial", std::abs(d + e / 3.0) <= ctx.cfg.tolerance("virial", 1e-4) * std::abs(e),
              fmt::format("D={} -E/3={}", g(d), g(-e / 3.0)));
    ctx.check("mms", mms.violations == 0,
              fmt::format("{} violations in {} draws, min margin {}", mms.violations, mms.draws, g(mms.min_margin)));
}

// ---------------------------------------------------------------- scott

void cmd_scott(Context& ctx)
{
    RunConfig c = ctx.cfg;
    if (!c.z) c.z = 20.0;
    if (!c.gamma && !c.c) c.gamma = 0.5;
    const Coupling cp = make_coupling(c.gamma, c.z, c.c);
    const TFSolution unit = solve_tf();
    const std::size_t n = ctx.cfg.grid.n.value_or(300);
    RunConfig c2 = ctx.cfg;
    c2.grid.n = 2 * n;
    const RadialGrid grid = grid_or(ctx.cfg, GridKind::loglinear, 1e-6, 2000.0, n, 50.0);
    const RadialGrid grid2 = grid_or(c2, GridKind::loglinear, 1e-6, 2000.0, 2 * n, 50.0);
    const ScottReport r = scott_energy_decomposition(cp, unit, ctx.cfg.L, grid);
    const ScottReport r2 = scott_energy_decomposition(cp, unit, ctx.cfg.L, grid2);
    const double disc = std::abs(r2.total - r.total);
    CsvWriter csv(ctx.path("csv"), ctx.digest, {"abs_kappa", "screened", "screened_doubled", "bare"});
    bool ordered = true;
    for (std::size_t i = 0; i < r.kappas.size(); ++i) {
        csv.cell(r.kappas[i]).cell(r.screened_channels[i]).cell(r2.screened_channels[i]).cell(r.bare_channels[i]);
        csv.end_row();
        ordered = ordered && r.screened_channels[i] <= r.bare_channels[i] * (1.0 + 1e-12);
    }
    ctx.outcome.report = {{"Z", r.Z},           {"gamma", r.gamma},         {"c", r.c},
                          {"L", r.L},           {"unscreened", r.unscreened}, {"screened", r.screened},
                          {"screened_bare", r.screened_bare}, {"coulomb_energy", r.coulomb_energy},
                          {"total", r.total},   {"total_doubled", r2.total}, {"discretization_error", disc},
                          {"reference", r.reference}, {"grid", grid_json(grid)}};
    fmt::print(ctx.out, "scott: Z={} gamma={} L={} total={} (doubled {}) reference E_TF+(1/2-s)Z^2={}\n", r.Z, r.gamma,
               r.L, g(r.total), g(r2.total), g(r.reference));
    ctx.check("finite", std::isfinite(r.total), g(r.total));
    ctx.check("grid_stable", disc <= ctx.cfg.tolerance("scott_stability", 0.01) * std::abs(r.total),
              fmt::format("|total(2N) - total(N)| = {}", g(disc)));
    ctx.check("screening_lowers_trace", ordered, "screened channel traces below bare ones");
}

// ---------------------------------------------------------------- verify

struct VerifyItem {
    std::string name;
    double value;
    double reference;
    double tolerance;
    bool relative;
};

void cmd_verify(Context& ctx)
{
    std::vector<VerifyItem> items;
    auto add = [&](std::string name, double v, double ref, double tol, bool rel) {
        items.push_back({std::move(name), v, ref, tol, rel});
    };
    {
        const Coupling cp = make_coupling(0.5);
        const RadialGrid grid = build_grid(GridKind::loglinear, 1e-10, 720.0, 4000, 2.0);
        const EigenSystem e = bound_states(cp, channel_numbers(1), grid, 2);
        add("ground_state", e.values[0], std::sqrt(1.0 - 0.25), 1e-4, true);
        add("first_excited", e.values[1], sommerfeld_eigenvalue(cp, 1, 1), 1e-4, true);
        const EigenSystem m = bound_states(cp, channel_numbers(-2), grid, 1);
        add("kappa_-2_ground", m.values[0], sommerfeld_eigenvalue(cp, 1, -2), 1e-4, true);
    }
    {
        const Coupling cp = make_coupling(0.5);
        const RadialGrid grid = build_grid(GridKind::loglinear, 1e-6, 120.0, 400, 10.0);
        const FHReport r = feynman_hellmann_check(cp, channel_numbers(1), make_builtin("rexp").eval, 1e-3, grid);
        add("feynman_hellmann", r.richardson, r.density_integral, 1e-3, true);
    }
    {
        const double q1 = spectral_shift(0.05).value / 0.0025, q2 = spectral_shift(0.2).value / 0.04;
        add("shift_small_gamma", q2, q1, 0.1, true);
    }
    {
        const RadialGrid grid = build_grid(GridKind::loglinear, 1e-4, 60.0, 200, 5.0);
        double worst = 0.0;
        for (int k : {-2, -1, 1, 2}) {
            const InequalityCheck h = hardy_component_check(channel_numbers(k), true, grid);
            worst = std::min(worst, h.eigmin / h.scale);
            const InequalityCheck kin = kinetic_lemma_check(channel_numbers(k), grid, 1.0);
            worst = std::min(worst, kin.eigmin / kin.scale);
        }
        add("operator_inequalities", worst, 0.0, 1e-8, false);
    }
    {
        const TFSolution tf = solve_tf();
        add("tf_slope0", tf.slope0, -1.5880710, 1e-4, false);
        add("tf_charge", tf.mass_within(tf.grid.r_max), 1.0, 1e-3, false);
    }
    {
        add("k0_indicator", norm_k0(make_builtin("indicator"), 0.75).value, 2.0 / 3.0, 1e-6, true);
        const Classification c = classify(make_builtin("example", {{"alpha", 1.6}}), make_coupling(0.5));
        add("classify_alpha_1.6", (c.d_gamma0.found && c.d.found) ? 1.0 : 0.0, 1.0, 0.5, false);
    }
    {
        const Channel ch = channel_numbers(-3);
        add("unsold", unsold_sum(ch, 1, {0.7, 1.1}), 2.0 * ch.abs_kappa() / (4.0 * std::numbers::pi), 1e-10, true);
    }

    CsvWriter csv(ctx.path("csv"), ctx.digest, {"check", "value", "reference", "tolerance", "pass"});
    json checks = json::array();
    for (const VerifyItem& it : items) {
        const double err = it.relative ? std::abs(it.value - it.reference) / std::abs(it.reference)
                                       : std::abs(it.value - it.reference);
        const bool pass = it.name == "operator_inequalities" ? it.value >= -it.tolerance : err <= it.tolerance;
        csv.cell(it.name).cell(it.value).cell(it.reference).cell(it.tolerance).cell(pass ? 1 : 0);
        csv.end_row();
        checks.push_back({{"name", it.name}, {"value", it.value}, {"reference", it.reference}, {"pass", pass}});
        ctx.check(it.name, pass, fmt::format("{} vs {}", g(it.value), g(it.reference)));
    }
    ctx.outcome.report = {{"checks", checks}};

    if (!ctx.cfg.against.empty()) {
        std::ifstream in(ctx.cfg.against);
        if (!in) throw ConfigError("against", fmt::format("cannot open '{}'", ctx.cfg.against));
        json prev;
        try {
            in >> prev;
        } catch (const json::exception& e) {
            throw ConfigError("against", e.what());
        }
        const std::string theirs = prev.value("config_digest", std::string{});
        if (theirs != ctx.digest)
            throw ConfigError("against", fmt::format("config digest {} does not match {}; refusing to compare",
                                                     theirs, ctx.digest));
        std::map<std::string, double> old;
        for (const json& c : prev.at("report").at("checks")) old[c.at("name").get<std::string>()] = c.at("value");
        for (const VerifyItem& it : items) {
            auto f = old.find(it.name);
            const bool same = f != old.end() && std::abs(f->second - it.value) <= 1e-9 * std::max(1.0, std::abs(it.value));
            ctx.check("reproduces:" + it.name, same, f == old.end() ? "missing in reference" : g(f->second));
        }
    }
}

const std::map<std::string, std::function<void(Context&)>>& table()
{
    static const std::map<std::string, std::function<void(Context&)>> t{
        {"eigenvalues", cmd_eigenvalues}, {"density", cmd_density}, {"bounds", cmd_bounds},
        {"fh-check", cmd_fh},            {"shift", cmd_shift},     {"decay", cmd_decay},
        {"norms", cmd_norms},            {"classify", cmd_classify}, {"tf", cmd_tf},
        {"scott", cmd_scott},            {"verify", cmd_verify}};
    return t;
}

bool is_config_kind(ErrorKind k)
{
    switch (k) {
    case ErrorKind::configuration:
    case ErrorKind::parameter:
    case ErrorKind::range:
    case ErrorKind::invalid_channel:
    case ErrorKind::invalid_state:
    case ErrorKind::invalid_quantum_number:
    case ErrorKind::subcriticality:
        return true;
    default:
        return false;
    }
}

}  // namespace

const std::vector<std::string>& command_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, f] : table()) v.push_back(k);
        return v;
    }();
    return names;
}

Outcome run(const RunConfig& cfg, std::ostream& summary)
{
    validate(cfg);
    auto it = table().find(cfg.command);
    if (it == table().end()) throw ConfigError("command", fmt::format("unknown command '{}'", cfg.command));
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    Context ctx{cfg, config_digest(cfg), summary, {}};
    try {
        it->second(ctx);
    } catch (const Error& e) {
        if (is_config_kind(e.kind())) throw ConfigError(to_string(e.kind()), e.what());
        throw;
    }
    json doc = {{"command", cfg.command}, {"config_digest", ctx.digest}, {"config", config_to_json(cfg)},
                {"report", ctx.outcome.report}};
    json asserts = json::array();
    for (const Assertion& a : ctx.outcome.assertions)
        asserts.push_back({{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
    doc["assertions"] = asserts;
    write_json(ctx.path("json"), doc);
    for (const Assertion& a : ctx.outcome.assertions)
        if (!a.pass) throw AssertionFailure(fmt::format("invariant '{}' failed: {}", a.name, a.detail));
    return ctx.outcome;
}

}  // namespace fden::cli
