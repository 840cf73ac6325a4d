#include "fden/radial_discretization.hpp"

#include "fden/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace fden {

double sigma_of(double gamma) { return 1.0 - std::sqrt(1.0 - gamma * gamma); }

Coupling make_coupling(double gamma)
{
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw Error(ErrorKind::configuration, fmt::format("gamma = {} outside [0, 1)", gamma));
    Coupling c;
    c.gamma = gamma;
    c.sigma_gamma = sigma_of(gamma);
    return c;
}

Coupling make_coupling(std::optional<double> gamma, std::optional<double> z, std::optional<double> c)
{
    const int given = (gamma ? 1 : 0) + (z ? 1 : 0) + (c ? 1 : 0);
    if (given == 0) throw Error(ErrorKind::configuration, "coupling needs gamma, or two of gamma/z/c");
    if (given == 1 && !gamma) throw Error(ErrorKind::configuration, "z or c alone does not fix the coupling");
    if ((z && !(*z > 0)) || (c && !(*c > 0))) throw Error(ErrorKind::configuration, "z and c must be positive");
    if (given == 3) {
        if (std::abs(*gamma - *z / *c) > 1e-12 * std::max(1.0, *gamma))
            throw Error(ErrorKind::configuration, fmt::format("gamma = {} inconsistent with z/c = {}", *gamma, *z / *c));
    }
    double g = gamma ? *gamma : *z / *c;
    Coupling out = make_coupling(g);
    if (z) out.z = *z;
    if (c) out.c = *c;
    if (gamma && z && !c) out.c = *z / *gamma;
    if (gamma && c && !z) out.z = *gamma * *c;
    return out;
}

const char* to_string(OperatorKind kind)
{
    switch (kind) {
    case OperatorKind::dirac: return "dirac";
    case OperatorKind::chandrasekhar: return "chandrasekhar";
    case OperatorKind::momentum: return "momentum";
    case OperatorKind::laplacian: return "laplacian";
    case OperatorKind::furry: return "furry";
    }
    return "unknown";
}

namespace {

double checked(const RadialFunction& v, double r)
{
    if (!v) return 0.0;
    const double x = v(r);
    if (!std::isfinite(x)) throw Error(ErrorKind::potential_evaluation, fmt::format("potential is {} at r = {}", x, r));
    return x;
}

// Jacobian at the half node left of node 0.
double left_half_jac(const RadialGrid& g, double* r_out = nullptr)
{
    const double r = g.r_of_x(g.x0 - 0.5 * g.dx);
    if (r_out) *r_out = r;
    switch (g.kind) {
    case GridKind::uniform: return 1.0;
    case GridKind::logarithmic: return r;
    case GridKind::loglinear: return r * g.scale_b / (r + g.scale_b);
    }
    return 1.0;
}

}  // namespace

ChannelOperator build_dirac_channel(const Coupling& coupling, const Channel& channel, const RadialGrid& grid,
                                    const RadialFunction& extra_potential, const std::string& tag)
{
    const std::size_t n = grid.size();
    const double gam = coupling.gamma;
    const double kap = channel.kappa;
    SymTridiag t;
    t.d.resize(2 * n);
    t.e.resize(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = grid.nodes[i];
        const double rh = grid.half_nodes[i];
        t.d[2 * i] = 1.0 - gam / r - checked(extra_potential, r);
        t.d[2 * i + 1] = -1.0 - gam / rh - checked(extra_potential, rh);
        const double jh = grid.half_jac[i];
        t.e[2 * i] = -1.0 / (grid.dx * std::sqrt(jh * grid.jac[i])) - kap / (2.0 * rh);
        if (i + 1 < n) t.e[2 * i + 1] = 1.0 / (grid.dx * std::sqrt(jh * grid.jac[i + 1])) - kap / (2.0 * rh);
    }
    ChannelOperator op;
    op.kind = OperatorKind::dirac;
    op.grid = grid;
    op.channel = channel;
    op.potential_tag = tag;
    op.tri = std::move(t);
    return op;
}

Matrix dirac_lower_block(const Channel& channel, const RadialGrid& grid)
{
    const std::size_t n = grid.size();
    Matrix l(n, n);
    const double kap = channel.kappa;
    for (std::size_t i = 0; i < n; ++i) {
        const double rh = grid.half_nodes[i];
        const double jh = grid.half_jac[i];
        l(i, i) = -1.0 / (grid.dx * std::sqrt(jh * grid.jac[i])) - kap / (2.0 * rh);
        if (i + 1 < n) l(i, i + 1) = 1.0 / (grid.dx * std::sqrt(jh * grid.jac[i + 1])) - kap / (2.0 * rh);
    }
    return l;
}

Matrix staggered_gradient(const RadialGrid& grid)
{
    const std::size_t n = grid.size();
    Matrix g(n + 1, n);
    const double j_left = left_half_jac(grid);
    for (std::size_t h = 0; h <= n; ++h) {
        const double jh = h == 0 ? j_left : grid.half_jac[h - 1];
        if (h >= 1) g(h, h - 1) = -1.0 / (grid.dx * std::sqrt(jh * grid.jac[h - 1]));
        if (h < n) g(h, h) = 1.0 / (grid.dx * std::sqrt(jh * grid.jac[h]));
    }
    return g;
}

SymTridiag radial_laplacian(int ell, const RadialGrid& grid)
{
    if (ell < 0) throw Error(ErrorKind::parameter, "ell must be nonnegative");
    const std::size_t n = grid.size();
    const double j_left = left_half_jac(grid);
    const double dx2 = grid.dx * grid.dx;
    const double centrifugal = static_cast<double>(ell) * (ell + 1.0);
    SymTridiag t;
    t.d.resize(n);
    t.e.resize(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double jl = i == 0 ? j_left : grid.half_jac[i - 1];
        const double jr = grid.half_jac[i];
        const double r = grid.nodes[i];
        t.d[i] = (1.0 / jl + 1.0 / jr) / (dx2 * grid.jac[i]) + centrifugal / (r * r);
        if (i + 1 < n) t.e[i] = -1.0 / (dx2 * jr * std::sqrt(grid.jac[i] * grid.jac[i + 1]));
    }
    return t;
}

ChannelOperator build_scalar_channel(OperatorKind kind, int ell, const RadialGrid& grid, double mass_shift)
{
    ChannelOperator op;
    op.kind = kind;
    op.grid = grid;
    op.channel = channel_numbers(ell + 1);
    op.potential_tag = fmt::format("ell={}", ell);
    SymTridiag t = radial_laplacian(ell, grid);
    if (kind == OperatorKind::laplacian) {
        for (double& d : t.d) d += mass_shift;
        op.tri = std::move(t);
        return op;
    }
    if (kind != OperatorKind::momentum && kind != OperatorKind::chandrasekhar)
        throw Error(ErrorKind::parameter, fmt::format("scalar channel cannot be of kind {}", to_string(kind)));
    const EigenPairs eig = tridiag_eigen(t, true);
    if (kind == OperatorKind::momentum)
        op.dense_matrix = spectral_function(eig, [&](double x) { return std::sqrt(std::max(x, 0.0)) + mass_shift; });
    else
        op.dense_matrix =
            spectral_function(eig, [&](double x) { return std::sqrt(std::max(x, 0.0) + 1.0) - 1.0 + mass_shift; });
    return op;
}

static EigenSystem wrap(EigenPairs&& p, const ChannelOperator& op)
{
    EigenSystem e;
    e.values = std::move(p.values);
    e.vectors = std::move(p.vectors);
    e.kind = op.kind;
    e.channel = op.channel;
    e.grid_hash = op.grid.hash();
    e.potential_tag = op.potential_tag;
    return e;
}

EigenSystem eigensolve(const ChannelOperator& op)
{
    if (op.tri) return wrap(tridiag_eigen(*op.tri, true), op);
    const double asym = asymmetry(op.dense_matrix);
    if (asym > 1e-12 * std::max(op.dense_matrix.max_abs(), 1e-300) * static_cast<double>(op.size()))
        throw Error(ErrorKind::parameter, fmt::format("matrix not symmetric (defect {})", asym));
    return wrap(sym_eigen(op.dense_matrix, true), op);
}

EigenSystem eigensolve_window(const ChannelOperator& op, double lo, double hi, std::size_t max_count, bool want_vectors)
{
    if (!op.tri) {
        EigenSystem full = eigensolve(op);
        EigenSystem out = full;
        out.values.clear();
        std::vector<std::size_t> keep;
        for (std::size_t k = 0; k < full.values.size() && keep.size() < max_count; ++k)
            if (full.values[k] > lo && full.values[k] < hi) keep.push_back(k);
        out.vectors = Matrix(full.vectors.rows(), want_vectors ? keep.size() : 0);
        for (std::size_t j = 0; j < keep.size(); ++j) {
            out.values.push_back(full.values[keep[j]]);
            if (want_vectors)
                for (std::size_t i = 0; i < full.vectors.rows(); ++i) out.vectors(i, j) = full.vectors(i, keep[j]);
        }
        return out;
    }
    EigenPairs p;
    p.values = tridiag_eigenvalues_between(*op.tri, lo, hi, max_count);
    if (want_vectors) p.vectors = tridiag_inverse_iteration(*op.tri, p.values);
    return wrap(std::move(p), op);
}

EigenSystem bound_states(const Coupling& coupling, const Channel& channel, const RadialGrid& grid, std::size_t count,
                         const RadialFunction& extra_potential)
{
    const ChannelOperator op = build_dirac_channel(coupling, channel, grid, extra_potential,
                                                   extra_potential ? "coulomb+extra" : "coulomb");
    EigenSystem e = eigensolve_window(op, -1.0 + 1e-9, 1.0, count, true);
    e.gamma = coupling.gamma;
    return e;
}

RadialSpinor radial_components(const RadialGrid& grid, const Matrix& vectors, std::size_t column)
{
    const std::size_t n = grid.size();
    if (vectors.rows() != 2 * n) throw Error(ErrorKind::dimension, "Dirac vector length must be 2N");
    RadialSpinor s;
    s.f_plus.resize(n);
    s.f_minus.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.f_plus[i] = vectors(2 * i, column) / std::sqrt(grid.weights[i]);
        s.f_minus[i] = vectors(2 * i + 1, column) / std::sqrt(grid.half_weights[i]);
    }
    return s;
}

std::vector<double> half_to_nodes(const std::vector<double>& h)
{
    const std::size_t n = h.size();
    std::vector<double> out(n);
    if (n == 0) return out;
    out[0] = n > 1 ? 1.5 * h[0] - 0.5 * h[1] : h[0];
    for (std::size_t i = 1; i < n; ++i) out[i] = 0.5 * (h[i - 1] + h[i]);
    return out;
}

Matrix project_potential(const Matrix& basis, const RadialGrid& grid, const RadialFunction& u)
{
    const std::size_t n = grid.size();
    if (basis.rows() != 2 * n) throw Error(ErrorKind::dimension, "basis rows must be 2N");
    std::vector<double> w(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        w[2 * i] = checked(u, grid.nodes[i]);
        w[2 * i + 1] = checked(u, grid.half_nodes[i]);
    }
    return congruence_diag(basis, w);
}

ChannelOperator furry_restriction(const EigenSystem& eigs, const RadialGrid& grid, const RadialFunction& v_extra,
                                  double lambda, const std::string& tag)
{
    if (eigs.vectors.empty()) throw Error(ErrorKind::parameter, "furry restriction needs eigenvectors");
    std::vector<std::size_t> pos;
    for (std::size_t k = 0; k < eigs.values.size(); ++k)
        if (eigs.values[k] > 0.0) pos.push_back(k);
    if (pos.empty()) throw Error(ErrorKind::degenerate_discretization, "no positive-energy eigenvectors");
    auto basis = std::make_shared<Matrix>(eigs.vectors.rows(), pos.size());
    std::vector<double> vals(pos.size());
    for (std::size_t j = 0; j < pos.size(); ++j) {
        vals[j] = eigs.values[pos[j]];
        for (std::size_t i = 0; i < eigs.vectors.rows(); ++i) (*basis)(i, j) = eigs.vectors(i, pos[j]);
    }
    ChannelOperator op;
    op.kind = OperatorKind::furry;
    op.grid = grid;
    op.channel = eigs.channel;
    op.potential_tag = tag;
    if (v_extra && lambda != 0.0)
        op.dense_matrix = (-lambda) * project_potential(*basis, grid, v_extra);
    else
        op.dense_matrix = Matrix(pos.size(), pos.size());
    for (std::size_t j = 0; j < pos.size(); ++j) op.dense_matrix(j, j) += vals[j] - 1.0;
    op.basis = std::move(basis);
    op.basis_values = std::move(vals);
    return op;
}

std::vector<std::size_t> filter_spurious(const std::vector<double>& coarse, const std::vector<double>& fine, double factor)
{
    const std::size_t m = std::min(coarse.size(), fine.size());
    std::vector<double> shifts(m);
    for (std::size_t k = 0; k < m; ++k) shifts[k] = std::abs(fine[k] - coarse[k]);
    std::vector<double> sorted = shifts;
    std::sort(sorted.begin(), sorted.end());
    const double median = m ? sorted[m / 2] : 0.0;
    const double limit = factor * std::max(median, 1e-14);
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < m; ++k)
        if (shifts[k] <= limit) keep.push_back(k);
    return keep;
}

namespace {

constexpr char kMagic[8] = {'F', 'D', 'E', 'N', '1', 0, 0, 0};
constexpr std::uint64_t kVersion = 1;

std::uint64_t to_le(std::uint64_t v)
{
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
        return r;
    }
    return v;
}

void put_u64(std::ostream& os, std::uint64_t v)
{
    v = to_le(v);
    os.write(reinterpret_cast<const char*>(&v), 8);
}

void put_f64(std::ostream& os, double d) { put_u64(os, std::bit_cast<std::uint64_t>(d)); }

std::uint64_t get_u64(std::istream& is)
{
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 8);
    if (!is) throw Error(ErrorKind::cache_format, "truncated cache file");
    return to_le(v);
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

void save_eigensystem(const std::string& path, const EigenSystem& eig)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::configuration, fmt::format("cannot write cache '{}'", path));
    os.write(kMagic, 8);
    put_u64(os, kVersion);
    put_u64(os, static_cast<std::uint64_t>(eig.kind));
    put_u64(os, static_cast<std::uint64_t>(static_cast<std::int64_t>(eig.channel.kappa)));
    put_f64(os, eig.gamma);
    put_u64(os, eig.grid_hash);
    put_u64(os, eig.values.size());
    put_u64(os, eig.vectors.rows());
    put_u64(os, eig.vectors.cols());
    put_u64(os, eig.potential_tag.size());
    os.write(eig.potential_tag.data(), static_cast<std::streamsize>(eig.potential_tag.size()));
    for (double v : eig.values) put_f64(os, v);
    for (std::size_t i = 0; i < eig.vectors.rows(); ++i)
        for (std::size_t j = 0; j < eig.vectors.cols(); ++j) put_f64(os, eig.vectors(i, j));
}

EigenSystem load_eigensystem(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::configuration, fmt::format("cannot read cache '{}'", path));
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0) throw Error(ErrorKind::cache_format, "bad magic");
    const std::uint64_t version = get_u64(is);
    if (version != kVersion) throw Error(ErrorKind::cache_format, fmt::format("unsupported version {}", version));
    EigenSystem e;
    e.kind = static_cast<OperatorKind>(get_u64(is));
    e.channel = channel_numbers(static_cast<int>(static_cast<std::int64_t>(get_u64(is))));
    e.gamma = get_f64(is);
    e.grid_hash = get_u64(is);
    const std::uint64_t nv = get_u64(is);
    const std::uint64_t rows = get_u64(is);
    const std::uint64_t cols = get_u64(is);
    const std::uint64_t tag_len = get_u64(is);
    if (tag_len > (1u << 20) || nv > (1ull << 32) || rows * cols > (1ull << 34))
        throw Error(ErrorKind::cache_format, "implausible sizes");
    e.potential_tag.resize(tag_len);
    is.read(e.potential_tag.data(), static_cast<std::streamsize>(tag_len));
    e.values.resize(nv);
    for (auto& v : e.values) v = get_f64(is);
    e.vectors = Matrix(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) e.vectors(i, j) = get_f64(is);
    return e;
}

}  // namespace fden
