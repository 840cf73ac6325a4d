#include "fden/grid.hpp"

#include "fden/errors.hpp"

#include <fmt/format.h>

#include <cmath>

namespace fden {

const char* to_string(GridKind kind)
{
    switch (kind) {
    case GridKind::uniform: return "uniform";
    case GridKind::logarithmic: return "logarithmic";
    case GridKind::loglinear: return "loglinear";
    }
    return "unknown";
}

GridKind grid_kind_from_string(const std::string& name)
{
    if (name == "uniform") return GridKind::uniform;
    if (name == "logarithmic" || name == "log") return GridKind::logarithmic;
    if (name == "loglinear") return GridKind::loglinear;
    throw Error(ErrorKind::configuration, fmt::format("unknown grid kind '{}'", name));
}

double RadialGrid::r_of_x(double x) const
{
    switch (kind) {
    case GridKind::uniform: return x;
    case GridKind::logarithmic: return std::exp(x);
    case GridKind::loglinear: {
        // Newton in y = ln r from the right of the root; g is convex and increasing.
        double y = x;
        if (x > 0) y = std::min(x, std::log(std::max(1.0, scale_b * x)));
        for (int it = 0; it < 200; ++it) {
            const double er = std::exp(y);
            const double g = y + er / scale_b - x;
            const double step = g / (1.0 + er / scale_b);
            y -= step;
            if (std::abs(step) <= 1e-16 * (1.0 + std::abs(y))) break;
        }
        return std::exp(y);
    }
    }
    return x;
}

double RadialGrid::x_of_r(double r) const
{
    switch (kind) {
    case GridKind::uniform: return r;
    case GridKind::logarithmic: return std::log(r);
    case GridKind::loglinear: return std::log(r) + r / scale_b;
    }
    return r;
}

static double jacobian(GridKind kind, double r, double b)
{
    switch (kind) {
    case GridKind::uniform: return 1.0;
    case GridKind::logarithmic: return r;
    case GridKind::loglinear: return r * b / (r + b);
    }
    return 1.0;
}

std::uint64_t RadialGrid::hash() const
{
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](const void* p, std::size_t n) {
        const auto* c = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= c[i];
            h *= 1099511628211ull;
        }
    };
    const int k = static_cast<int>(kind);
    const std::uint64_t n = n_points;
    mix(&k, sizeof k);
    mix(&r_min, sizeof r_min);
    mix(&r_max, sizeof r_max);
    mix(&n, sizeof n);
    mix(&scale_b, sizeof scale_b);
    return h;
}

double RadialGrid::integrate(const std::function<double(double)>& g) const
{
    double s = 0.0;
    for (std::size_t i = 0; i < n_points; ++i) s += weights[i] * g(nodes[i]);
    return s;
}

RadialGrid build_grid(GridKind kind, double r_min, double r_max, std::size_t n_points, double scale_b)
{
    if (n_points < 16) throw Error(ErrorKind::configuration, fmt::format("n_points = {} < 16", n_points));
    if (!(r_max > r_min)) throw Error(ErrorKind::configuration, fmt::format("r_max = {} must exceed r_min = {}", r_max, r_min));
    if (kind == GridKind::uniform) {
        if (r_min < 0) throw Error(ErrorKind::configuration, "uniform grid needs r_min >= 0");
    } else if (!(r_min > 0)) {
        throw Error(ErrorKind::configuration, fmt::format("{} grid needs r_min > 0", to_string(kind)));
    }
    if (kind == GridKind::loglinear && !(scale_b > 0))
        throw Error(ErrorKind::configuration, "loglinear grid needs a positive crossover radius");

    RadialGrid g;
    g.kind = kind;
    g.r_min = r_min;
    g.r_max = r_max;
    g.n_points = n_points;
    g.scale_b = kind == GridKind::loglinear ? scale_b : 0.0;

    const double n = static_cast<double>(n_points);
    if (kind == GridKind::uniform) {
        g.dx = (r_max - r_min) / n;
        g.x0 = r_min + g.dx;
    } else {
        g.x0 = g.x_of_r(r_min);
        g.dx = (g.x_of_r(r_max) - g.x0) / (n - 1.0);
    }

    g.nodes.resize(n_points);
    g.jac.resize(n_points);
    g.weights.resize(n_points);
    g.half_nodes.resize(n_points);
    g.half_jac.resize(n_points);
    g.half_weights.resize(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double xi = g.x0 + static_cast<double>(i) * g.dx;
        const double xh = xi + 0.5 * g.dx;
        g.nodes[i] = g.r_of_x(xi);
        g.half_nodes[i] = g.r_of_x(xh);
        g.jac[i] = jacobian(kind, g.nodes[i], g.scale_b);
        g.half_jac[i] = jacobian(kind, g.half_nodes[i], g.scale_b);
        g.weights[i] = g.jac[i] * g.dx;
        g.half_weights[i] = g.half_jac[i] * g.dx;
    }
    if (kind != GridKind::uniform) {
        g.nodes.front() = r_min;
        g.nodes.back() = r_max;
    }
    for (std::size_t i = 1; i < n_points; ++i)
        if (!(g.nodes[i] > g.nodes[i - 1]))
            throw Error(ErrorKind::configuration, fmt::format("grid nodes not increasing at index {}", i));
    return g;
}

std::vector<double> sample(const RadialGrid& grid, const std::function<double(double)>& f)
{
    std::vector<double> v(grid.n_points);
    for (std::size_t i = 0; i < grid.n_points; ++i) v[i] = f(grid.nodes[i]);
    return v;
}

std::vector<double> sample_half(const RadialGrid& grid, const std::function<double(double)>& f)
{
    std::vector<double> v(grid.n_points);
    for (std::size_t i = 0; i < grid.n_points; ++i) v[i] = f(grid.half_nodes[i]);
    return v;
}

}  // namespace fden
