#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fden {

enum class GridKind { uniform, logarithmic, loglinear };

const char* to_string(GridKind kind);
GridKind grid_kind_from_string(const std::string& name);

/// Radial grid on (0, ∞) built from a uniform mesh in a mapped variable x(r).
///
/// Nodes r_i (i = 0..N-1) sit at x_0 + i·dx; virtual Dirichlet nodes sit at
/// i = -1 and i = N.  Half nodes r_{i+1/2} (i = 0..N-1) carry the lower Dirac
/// component.  Weights are J_i·dx with J = dr/dx.
///
///   uniform:      x = r,                 J = 1
///   logarithmic:  x = ln r,              J = r
///   loglinear:    x = ln r + r/b,        J = r b / (r + b)
struct RadialGrid {
    GridKind kind = GridKind::uniform;
    double r_min = 0.0;
    double r_max = 0.0;
    std::size_t n_points = 0;
    double scale_b = 0.0;  ///< loglinear crossover radius

    double x0 = 0.0;
    double dx = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> jac;
    std::vector<double> half_nodes;
    std::vector<double> half_jac;
    std::vector<double> half_weights;

    std::size_t size() const noexcept { return n_points; }
    double r_of_x(double x) const;
    double x_of_r(double r) const;
    /// FNV-1a digest of the defining parameters.
    std::uint64_t hash() const;
    /// Σ w_i g(r_i)
    double integrate(const std::function<double(double)>& g) const;
};

RadialGrid build_grid(GridKind kind, double r_min, double r_max, std::size_t n_points, double scale_b = 0.0);

/// Samples a radial function on integer nodes.
std::vector<double> sample(const RadialGrid& grid, const std::function<double(double)>& f);
std::vector<double> sample_half(const RadialGrid& grid, const std::function<double(double)>& f);

}  // namespace fden
