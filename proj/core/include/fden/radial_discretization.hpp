#pragma once

#include "fden/grid.hpp"
#include "fden/linalg.hpp"
#include "fden/partial_waves.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fden {

using RadialFunction = std::function<double(double)>;

struct Coupling {
    double gamma = 0.0;
    std::optional<double> z;
    std::optional<double> c;
    double sigma_gamma = 0.0;
};

Coupling make_coupling(double gamma);
/// Any two of (gamma, z, c), or gamma alone.
Coupling make_coupling(std::optional<double> gamma, std::optional<double> z, std::optional<double> c);
double sigma_of(double gamma);

enum class OperatorKind { dirac, chandrasekhar, momentum, laplacian, furry };

const char* to_string(OperatorKind kind);

/// Symmetric channel matrix.  Dirac operators are stored tridiagonal in the
/// interleaved order (f⁺_0, f⁻_{1/2}, f⁺_1, f⁻_{3/2}, …), which is a symmetric
/// permutation of the 2×2 block form.  Entries act on u = √(J dx)·f.
struct ChannelOperator {
    OperatorKind kind = OperatorKind::dirac;
    RadialGrid grid;
    Channel channel;
    std::string potential_tag;

    std::optional<SymTridiag> tri;
    Matrix dense_matrix;

    /// Furry restriction only: positive-energy basis (columns) and its eigenvalues.
    std::shared_ptr<const Matrix> basis;
    std::vector<double> basis_values;

    std::size_t size() const noexcept { return tri ? tri->size() : dense_matrix.rows(); }
    Matrix dense() const { return tri ? tri->dense() : dense_matrix; }
};

struct EigenSystem {
    std::vector<double> values;
    Matrix vectors;  ///< columns in the u representation
    OperatorKind kind = OperatorKind::dirac;
    Channel channel;
    double gamma = 0.0;
    std::uint64_t grid_hash = 0;
    std::string potential_tag;

    std::size_t count() const noexcept { return values.size(); }
};

/// Radial Dirac operator D_γ − V in units of c² (rest mass 1).
ChannelOperator build_dirac_channel(const Coupling& coupling, const Channel& channel, const RadialGrid& grid,
                                    const RadialFunction& extra_potential = {}, const std::string& tag = "coulomb");

/// Off-diagonal Dirac block L (N×N, row i+1/2, column j) for a free channel.
Matrix dirac_lower_block(const Channel& channel, const RadialGrid& grid);

/// Staggered derivative G ((N+1)×N): rows are half nodes −1/2 … N−1/2.
Matrix staggered_gradient(const RadialGrid& grid);

/// T = −d²/dr² + ℓ(ℓ+1)/r² with Dirichlet ends.
SymTridiag radial_laplacian(int ell, const RadialGrid& grid);

/// p_ℓ = √T, C_ℓ = √(T+1) − 1, or T itself, plus an optional diagonal shift.
ChannelOperator build_scalar_channel(OperatorKind kind, int ell, const RadialGrid& grid, double mass_shift = 0.0);

/// Full decomposition (Householder + QL, or tridiagonal QL).
EigenSystem eigensolve(const ChannelOperator& op);

/// Eigenpairs of a tridiagonal operator with values in (lo, hi): bisection + inverse iteration.
EigenSystem eigensolve_window(const ChannelOperator& op, double lo, double hi,
                              std::size_t max_count = static_cast<std::size_t>(-1), bool want_vectors = true);

/// Gap eigenpairs of the Dirac channel, ascending, at most `count`.
EigenSystem bound_states(const Coupling& coupling, const Channel& channel, const RadialGrid& grid, std::size_t count,
                         const RadialFunction& extra_potential = {});

/// Radial components of a Dirac eigenvector in the f representation.
struct RadialSpinor {
    std::vector<double> f_plus;   ///< integer nodes
    std::vector<double> f_minus;  ///< half nodes
};
RadialSpinor radial_components(const RadialGrid& grid, const Matrix& vectors, std::size_t column);

/// f⁻ moved from half nodes to integer nodes (linear in x, end extrapolated).
std::vector<double> half_to_nodes(const std::vector<double>& half_values);

/// Matrix of Λ(D_γ − 1 − λV)Λ on the positive eigenvectors of an unperturbed Dirac system.
ChannelOperator furry_restriction(const EigenSystem& dirac_eigs, const RadialGrid& grid, const RadialFunction& v_extra,
                                  double lambda, const std::string& tag = "");

/// Bᵀ diag(U) B with U on integer/half nodes matching the interleaved layout.
Matrix project_potential(const Matrix& basis, const RadialGrid& grid, const RadialFunction& u);

/// Spurious-mode filter: keeps gap modes whose shift under N → 2N stays below
/// `factor` times the median shift; returns kept indices of `fine`.
std::vector<std::size_t> filter_spurious(const std::vector<double>& coarse, const std::vector<double>& fine,
                                         double factor = 100.0);

/// Binary cache: magic "FDEN1\0\0\0", little-endian f64 payload.
void save_eigensystem(const std::string& path, const EigenSystem& eig);
EigenSystem load_eigensystem(const std::string& path);

}  // namespace fden
