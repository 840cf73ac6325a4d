#include "commands.hpp"
#include "config.hpp"

#include "fden/errors.hpp"

#include "CLI11.hpp"

#include <fmt/format.h>

#include <iostream>

namespace {

using fden::cli::ConfigError;
using fden::cli::RunConfig;

struct Flags {
    std::string config;
    double gamma = 0, z = 0, c = 0;
    std::string grid_kind;
    double r_min = 0, r_max = 0, grid_b = 0;
    std::size_t n_points = 0;
    std::string kappa, n;
    int n_max = 0, kappa_max = 0, L = 0;
    std::string potential;
    std::vector<std::string> params, tols;
    double lambda = 0, lambda_step = 0, s = 0, s_prime = 0, delta = 0;
    std::uint64_t seed = 0;
    std::size_t draws = 0;
    int electrons = 0;
    bool fit_tail = false;
    std::string out, against;

    std::map<std::string, CLI::Option*> opts;
};

void register_flags(CLI::App* sub, Flags& f)
{
    auto& o = f.opts;
    o["config"] = sub->add_option("--config", f.config, "JSON configuration file (flags override it)");
    o["gamma"] = sub->add_option("--gamma", f.gamma, "coupling gamma = Z/c");
    o["z"] = sub->add_option("--z", f.z, "nuclear charge");
    o["c"] = sub->add_option("--c", f.c, "speed of light");
    o["grid_kind"] = sub->add_option("--grid-kind", f.grid_kind, "uniform | logarithmic | loglinear");
    o["r_min"] = sub->add_option("--r-min", f.r_min);
    o["r_max"] = sub->add_option("--r-max", f.r_max);
    o["grid_b"] = sub->add_option("--grid-b", f.grid_b, "loglinear crossover radius");
    o["n_points"] = sub->add_option("--n-points", f.n_points);
    o["kappa"] = sub->add_option("--kappa", f.kappa, "range a..b, list a,b or value");
    o["n"] = sub->add_option("--n", f.n, "radial quantum numbers, range a..b");
    o["n_max"] = sub->add_option("--n-max", f.n_max);
    o["kappa_max"] = sub->add_option("--kappa-max", f.kappa_max);
    o["L"] = sub->add_option("--L", f.L, "first screened channel");
    o["potential"] = sub->add_option("--potential", f.potential, "built-in test potential");
    o["params"] = sub->add_option("--param", f.params, "potential parameter key=value");
    o["lambda"] = sub->add_option("--lambda", f.lambda);
    o["lambda_step"] = sub->add_option("--lambda-step", f.lambda_step);
    o["s"] = sub->add_option("--s", f.s);
    o["s_prime"] = sub->add_option("--s-prime", f.s_prime);
    o["delta"] = sub->add_option("--delta", f.delta);
    o["tols"] = sub->add_option("--tol", f.tols, "tolerance override key=value");
    o["seed"] = sub->add_option("--seed", f.seed);
    o["draws"] = sub->add_option("--draws", f.draws);
    o["electrons"] = sub->add_option("--electrons", f.electrons);
    o["fit_tail"] = sub->add_flag("--fit-tail", f.fit_tail, "fit the large-r exponent");
    o["out"] = sub->add_option("--out", f.out, "output directory");
    o["against"] = sub->add_option("--against", f.against, "earlier verify.json to reproduce");
}

std::pair<std::string, double> key_value(const std::string& text, const std::string& field)
{
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(field, fmt::format("expected key=value, got '{}'", text));
    try {
        std::size_t pos = 0;
        const std::string v = text.substr(eq + 1);
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return {text.substr(0, eq), d};
    } catch (const std::exception&) {
        throw ConfigError(field, fmt::format("'{}' has a non-numeric value", text));
    }
}

RunConfig merge(const std::string& command, const Flags& f)
{
    auto given = [&](const char* k) { return f.opts.at(k)->count() > 0; };
    RunConfig c = given("config") ? fden::cli::load_config(f.config) : RunConfig{};
    if (!c.command.empty() && c.command != command)
        throw ConfigError("command", fmt::format("config file is for '{}', not '{}'", c.command, command));
    c.command = command;
    if (given("gamma")) c.gamma = f.gamma;
    if (given("z")) c.z = f.z;
    if (given("c")) c.c = f.c;
    if (given("grid_kind")) c.grid.kind = f.grid_kind;
    if (given("r_min")) c.grid.r_min = f.r_min;
    if (given("r_max")) c.grid.r_max = f.r_max;
    if (given("grid_b")) c.grid.b = f.grid_b;
    if (given("n_points")) c.grid.n = f.n_points;
    if (given("kappa")) c.kappa = f.kappa;
    if (given("n")) c.n = f.n;
    if (given("n_max")) c.n_max = f.n_max;
    if (given("kappa_max")) c.kappa_max = f.kappa_max;
    if (given("L")) c.L = f.L;
    if (given("potential")) c.potential.name = f.potential;
    for (const auto& p : f.params) c.potential.params.insert_or_assign(key_value(p, "param").first, key_value(p, "param").second);
    if (given("lambda")) c.lambda = f.lambda;
    if (given("lambda_step")) c.lambda_step = f.lambda_step;
    if (given("s")) c.s = f.s;
    if (given("s_prime")) c.s_prime = f.s_prime;
    if (given("delta")) c.delta = f.delta;
    for (const auto& t : f.tols) {
        const auto [k, v] = key_value(t, "tol");
        c.tolerances[k] = v;
    }
    if (given("seed")) c.seed = f.seed;
    if (given("draws")) c.draws = f.draws;
    if (given("electrons")) c.electrons = f.electrons;
    if (given("fit_tail")) c.fit_tail = f.fit_tail;
    if (given("out")) c.out_dir = f.out;
    if (given("against")) c.against = f.against;
    if (!c.against.empty() && command != "verify") throw ConfigError("against", "only meaningful for verify");
    return c;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Dirac-Coulomb channel densities, trace functionals and screening checks"};
    app.require_subcommand(1);
    std::map<std::string, Flags> flags;
    std::map<std::string, CLI::App*> subs;
    static const std::map<std::string, std::string> help{
        {"eigenvalues", "discretized channel eigenvalues against the closed form"},
        {"density", "channel and total hydrogenic densities"},
        {"bounds", "channel density bound constant"},
        {"fh-check", "derivative of the negative trace against the density integral"},
        {"shift", "spectral shift s(gamma) with kappa partial sums"},
        {"decay", "decay of channel shifts in |kappa|"},
        {"norms", "K_s^(0) and K_{s,delta} norms of a test potential"},
        {"classify", "test-function space membership"},
        {"tf", "Thomas-Fermi profile, screening potential and MMS probe"},
        {"scott", "one-particle energy decomposition probe"},
        {"verify", "quick invariant suite"}};
    for (const std::string& name : fden::cli::command_names()) {
        subs[name] = app.add_subcommand(name, help.at(name));
        register_flags(subs[name], flags[name]);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    std::string command;
    for (const auto& [name, sub] : subs)
        if (sub->parsed()) command = name;
    try {
        const RunConfig cfg = merge(command, flags.at(command));
        fden::cli::run(cfg, std::cout);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const fden::cli::AssertionFailure& e) {
        std::cerr << "assertion failed: " << e.what() << '\n';
        return 1;
    } catch (const fden::Error& e) {
        std::cerr << "error (" << fden::to_string(e.kind()) << "): " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
