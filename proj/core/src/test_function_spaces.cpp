#include "fden/test_function_spaces.hpp"

#include "fden/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace fden {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double param(const std::map<std::string, double>& p, const std::string& key, double fallback)
{
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

struct Sum {
    double value = 0.0;
    bool finite = true;
    std::string diagnostic;
};

// |f| on [a, b] split at breakpoints
double segment(const TestPotential& u, const std::function<double(double)>& weight, double a, double b, bool fine)
{
    if (!(b > a)) return 0.0;
    std::vector<double> cuts{a};
    for (double p : u.breakpoints)
        if (p > a && p < b) cuts.push_back(p);
    for (double p = std::exp2(std::floor(std::log2(a)) + 1.0); p < b; p *= 2.0) cuts.push_back(p);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    auto f = [&](double r) {
        const double v = u.eval(r);
        if (!std::isfinite(v)) throw Error(ErrorKind::evaluation, fmt::format("{}({}) is not finite", u.name, r));
        return std::abs(v) * weight(r);
    };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i] >= u.support_radius) break;
        const double hi = std::min(cuts[i + 1], u.support_radius);
        if (fine)
            total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[i], hi, 10, 1e-12);
        else
            total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, cuts[i], hi, 10, 1e-12);
    }
    return total;
}

constexpr int kMaxPieces = 80;
constexpr double kStallRatio = 0.999;

// Dyadic pieces with a geometric tail; divergence once three successive ratios stall near 1.
template <class Piece>
Sum dyadic(Piece&& piece)
{
    Sum s;
    std::vector<double> parts;
    for (int k = 0; k < kMaxPieces; ++k) {
        const double p = piece(k);
        parts.push_back(p);
        s.value += p;
        if (k >= 6 && p <= 1e-17 * s.value) return s;
        if (k >= 6 && s.value == 0.0 && p == 0.0) return s;
    }
    const std::size_t n = parts.size();
    double ratio = 0.0;
    int stalled = 0;
    for (std::size_t i = n - 3; i < n; ++i) {
        const double r = parts[i - 1] > 0.0 ? parts[i] / parts[i - 1] : 0.0;
        if (r >= kStallRatio) ++stalled;
        ratio = r;
    }
    if (stalled == 3) {
        s.finite = false;
        s.value = kInf;
        s.diagnostic = fmt::format("dyadic pieces stopped decaying (ratio {:.6f})", ratio);
        return s;
    }
    s.value += parts.back() * ratio / (1.0 - ratio);
    return s;
}

// Dyadic pieces ∫_{2^k}^{2^{k+1}} r^e |U| dr, cached, so that a sweep over R only adds partial segments.
class Weighted {
public:
    Weighted(const TestPotential& u, double e, bool fine) : u_(u), e_(e), fine_(fine) {}

    double piece(int k)
    {
        auto it = cache_.find(k);
        if (it != cache_.end()) return it->second;
        const double v = raw(std::ldexp(1.0, k), std::ldexp(1.0, k + 1));
        cache_.emplace(k, v);
        return v;
    }

    double between(double a, double b)
    {
        if (!(b > a)) return 0.0;
        const int ka = static_cast<int>(std::floor(std::log2(a)));
        const int kb = static_cast<int>(std::floor(std::log2(b)));
        if (ka == kb) return raw(a, b);
        double total = raw(a, std::ldexp(1.0, ka + 1));
        for (int k = ka + 1; k < kb; ++k) total += piece(k);
        return total + raw(std::ldexp(1.0, kb), b);
    }

    // ∫_0^{2^k}
    Sum from_zero(int k) { return dyadic([&](int j) { return piece(k - 1 - j); }); }

    // ∫_a^∞
    Sum tail(double a)
    {
        if (a >= u_.support_radius) return {};
        const int ka = static_cast<int>(std::floor(std::log2(a)));
        const double head = raw(a, std::ldexp(1.0, ka + 1));
        Sum rest = dyadic([&](int j) { return piece(ka + 1 + j); });
        if (rest.finite) rest.value += head;
        return rest;
    }

private:
    double raw(double a, double b)
    {
        const double e = e_;
        return segment(u_, [e](double r) { return e == 0.0 ? 1.0 : std::pow(r, e); }, a, b, fine_);
    }

    const TestPotential& u_;
    double e_;
    bool fine_;
    std::unordered_map<int, double> cache_;
};

struct BracketParts {
    Weighted w0, w1, w2;
    Sum zero1;
    double e1, e2;

    BracketParts(const TestPotential& u, double s, bool fine)
        : w0(u, 0.0, fine), w1(u, 2.0 * s - 1.0, fine), w2(u, 4.0 * s - 1.0, fine), e1(2.0 * s - 1.0), e2(4.0 * s - 1.0)
    {
        zero1 = w1.from_zero(0);
    }

    NormValue at(double R)
    {
        NormValue n;
        n.argmax = R;
        Sum third = w0.tail(R * R);
        if (!zero1.finite || !third.finite) {
            n.finite = false;
            n.value = kInf;
            n.diagnostic = !zero1.finite ? "near 0: " + zero1.diagnostic : "at infinity: " + third.diagnostic;
            return n;
        }
        const double first = (zero1.value + w1.between(1.0, R)) * std::pow(R, -e1);
        const double second = w2.between(R, R * R) * std::pow(R, -e2);
        n.value = first + second + std::pow(R, e2) * third.value;
        return n;
    }
};

void check_s(double s)
{
    if (!(s >= 0.5)) throw Error(ErrorKind::parameter, fmt::format("s = {} below 1/2", s));
}

}  // namespace

const char* to_string(Singularity s)
{
    switch (s) {
    case Singularity::none: return "none";
    case Singularity::coulomb: return "coulomb";
    case Singularity::power: return "power";
    }
    return "?";
}

TestPotential make_builtin(const std::string& name, const std::map<std::string, double>& p)
{
    const double c = param(p, "c", 1.0);
    TestPotential u;
    u.name = name;
    if (name == "zero") {
        u.eval = [](double) { return 0.0; };
    } else if (name == "exp") {
        const double a = param(p, "a", 1.0);
        u.eval = [c, a](double r) { return c * std::exp(-a * r); };
    } else if (name == "rexp") {
        const double a = param(p, "a", 1.0);
        u.eval = [c, a](double r) { return c * r * std::exp(-a * r); };
    } else if (name == "power") {
        const double alpha = param(p, "alpha", 1.5);
        const double r0 = param(p, "r0", 1.0);
        u.eval = [c, alpha, r0](double r) { return r > r0 ? c * std::pow(r, -alpha) : 0.0; };
        u.breakpoints = {r0};
    } else if (name == "cutoff-coulomb") {
        const double cap = param(p, "cap", 10.0);
        const double radius = param(p, "radius", 5.0);
        u.eval = [c, cap, radius](double r) { return r <= radius ? c * std::min(1.0 / r, cap) : 0.0; };
        u.singularity = Singularity::coulomb;
        u.support_radius = radius;
        u.breakpoints = {1.0 / cap, radius};
    } else if (name == "coulomb-compact") {
        const double radius = param(p, "radius", 5.0);
        u.eval = [c, radius](double r) { return r <= radius ? c / r : 0.0; };
        u.singularity = Singularity::coulomb;
        u.support_radius = radius;
        u.breakpoints = {radius};
    } else if (name == "yukawa") {
        const double mu = param(p, "mu", 1.0);
        u.eval = [c, mu](double r) { return c * std::exp(-mu * r) / r; };
        u.singularity = Singularity::coulomb;
    } else if (name == "indicator") {
        const double a = param(p, "a", 0.0);
        const double b = param(p, "b", 1.0);
        u.eval = [c, a, b](double r) { return (r >= a && r <= b) ? c : 0.0; };
        u.support_radius = b;
        u.breakpoints = {a, b};
    } else if (name == "example") {
        const double alpha = param(p, "alpha", 1.5);
        u.eval = [c, alpha](double r) { return r <= 1.0 ? c / r : c * std::pow(r, -alpha); };
        u.singularity = Singularity::coulomb;
        u.breakpoints = {1.0};
    } else if (name == "rpow") {
        const double alpha = param(p, "alpha", 0.5);
        const double radius = param(p, "radius", 1.0);
        u.eval = [c, alpha, radius](double r) { return r <= radius ? c * std::pow(r, -alpha) : 0.0; };
        u.singularity = Singularity::power;
        u.singular_exponent = alpha;
        u.support_radius = radius;
        u.breakpoints = {radius};
    } else {
        throw Error(ErrorKind::configuration, fmt::format("unknown potential '{}'", name));
    }
    return u;
}

TestPotential scaled(const TestPotential& u, double factor)
{
    TestPotential v = u;
    v.name = fmt::format("{}*{}", factor, u.name);
    auto f = u.eval;
    v.eval = [f, factor](double r) { return factor * f(r); };
    return v;
}

TestPotential abs_power(const TestPotential& u, double p)
{
    TestPotential v = u;
    v.name = fmt::format("|{}|^{}", u.name, p);
    auto f = u.eval;
    v.eval = [f, p](double r) { return std::pow(std::abs(f(r)), p); };
    if (u.singularity == Singularity::coulomb) {
        v.singularity = Singularity::power;
        v.singular_exponent = p;
    } else if (u.singularity == Singularity::power) {
        v.singular_exponent = u.singular_exponent * p;
    }
    return v;
}

TestPotential restricted(const TestPotential& u, double cut, bool inner)
{
    TestPotential v = u;
    v.name = fmt::format("{}|{}{}", u.name, inner ? "<=" : ">", cut);
    auto f = u.eval;
    if (inner) {
        v.eval = [f, cut](double r) { return r <= cut ? f(r) : 0.0; };
        v.support_radius = std::min(u.support_radius, cut);
    } else {
        v.eval = [f, cut](double r) { return r > cut ? f(r) : 0.0; };
        v.singularity = Singularity::none;
    }
    v.breakpoints.push_back(cut);
    return v;
}

NormValue norm_k0(const TestPotential& u, double s, const NormOptions& opt)
{
    check_s(s);
    Weighted inner_w(u, 2.0 * s - 1.0, opt.fine), outer_w(u, 0.0, opt.fine);
    const Sum inner = inner_w.from_zero(0);
    const Sum outer = outer_w.tail(1.0);
    NormValue n;
    n.finite = inner.finite && outer.finite;
    n.value = n.finite ? inner.value + outer.value : kInf;
    if (!inner.finite) n.diagnostic = "near 0: " + inner.diagnostic;
    if (!outer.finite) n.diagnostic += (n.diagnostic.empty() ? "" : "; ") + ("at infinity: " + outer.diagnostic);
    return n;
}

NormValue ksdelta_bracket(const TestPotential& u, double s, double R, const NormOptions& opt)
{
    check_s(s);
    if (!(R >= 1.0)) throw Error(ErrorKind::parameter, "R must be at least 1");
    BracketParts parts(u, s, opt.fine);
    return parts.at(R);
}

NormValue norm_ksdelta(const TestPotential& u, double s, double delta, const NormOptions& opt)
{
    check_s(s);
    if (delta < 0.0 || delta > 2.0 * s - 1.0 + 1e-12)
        throw Error(ErrorKind::parameter, fmt::format("delta = {} outside [0, 2s-1] for s = {}", delta, s));
    BracketParts parts(u, s, opt.fine);
    const auto at = [&](double R) {
        NormValue b = parts.at(R);
        if (b.finite) b.value *= std::pow(R, delta);
        return b;
    };
    constexpr int kPerDecade = 10;
    const int n = static_cast<int>(std::ceil(std::log10(opt.r_cap) * kPerDecade));
    std::vector<double> rs(n + 1), vals(n + 1);
    for (int i = 0; i <= n; ++i) {
        rs[i] = std::pow(opt.r_cap, static_cast<double>(i) / n);
        const NormValue b = at(rs[i]);
        if (!b.finite) return b;
        vals[i] = b.value;
    }
    // growth over the last two decades decides whether the cap hides a divergence
    const double v0 = vals[n - 2 * kPerDecade], v1 = vals[n - kPerDecade], v2 = vals[n];
    if (v2 > 0.0 && v1 > 0.0 && v0 > 0.0) {
        const double g1 = std::log(v1 / v0), g2 = std::log(v2 / v1);
        if (g2 > 1e-3 && g2 > 0.5 * g1) {
            NormValue inf;
            inf.finite = false;
            inf.value = kInf;
            inf.argmax = opt.r_cap;
            inf.diagnostic = fmt::format("bracket still growing at R = {:g} (log-growth {:.4f} per decade)", opt.r_cap, g2);
            return inf;
        }
    }
    const int best = static_cast<int>(std::max_element(vals.begin(), vals.end()) - vals.begin());
    NormValue out;
    out.value = vals[best];
    out.argmax = rs[best];
    if (best > 0 && best < n) {
        // golden section in log R between neighbours
        double a = std::log(rs[best - 1]), b = std::log(rs[best + 1]);
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - g * (b - a), x2 = a + g * (b - a);
        double f1 = at(std::exp(x1)).value, f2 = at(std::exp(x2)).value;
        for (int it = 0; it < 60 && b - a > 1e-10; ++it) {
            if (f1 > f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = at(std::exp(x1)).value;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = at(std::exp(x2)).value;
            }
        }
        const double xm = 0.5 * (a + b);
        const double fm = at(std::exp(xm)).value;
        if (fm > out.value) {
            out.value = fm;
            out.argmax = std::exp(xm);
        }
    }
    return out;
}

const std::vector<double>& classification_s_grid()
{
    static const std::vector<double> grid{0.52, 0.55, 0.6, 0.75, 1.0};
    return grid;
}

namespace {

// r|U(r)| sampled down to 1e-12·hi; bounded if it stops growing over the last three decades
bool coulomb_bounded(const TestPotential& u, double hi)
{
    double at_9 = 0.0, peak = 0.0;
    for (int k = 0; k <= 48; ++k) {
        const double r = hi * std::pow(10.0, -0.25 * k);
        const double v = std::abs(r * u.eval(r));
        if (!std::isfinite(v)) return false;
        peak = std::max(peak, v);
        if (k == 36) at_9 = v;
    }
    const double at_12 = std::abs(hi * 1e-12 * u.eval(hi * 1e-12));
    return at_12 <= 1.01 * at_9 + 1e-300 && std::isfinite(peak);
}

}  // namespace

Classification classify(const TestPotential& u, const Coupling& coupling)
{
    Classification c;
    c.coulomb_compact = coulomb_bounded(u, 1.0);
    c.whole_coulomb_compact = std::isfinite(u.support_radius) && coulomb_bounded(u, u.support_radius);

    for (double s : classification_s_grid()) c.k0.emplace_back(s, norm_k0(u, s).finite);

    const TestPotential u2 = restricted(u, 1.0, false);
    const double s_top = coupling.gamma < std::sqrt(3.0) / 2.0 ? 1.0 : 1.5 - coupling.sigma_gamma;
    const bool s_top_open = coupling.gamma >= std::sqrt(3.0) / 2.0;
    static const double frac_open[] = {0.1, 0.3, 0.5, 0.7, 0.9};
    static const double frac_closed[] = {0.0, 0.25, 0.5, 0.75, 0.9};

    for (double s : classification_s_grid()) {
        if (c.d_gamma0.found) break;
        if (s > s_top || (s_top_open && s >= s_top)) continue;
        if (!norm_k0(u2, s).finite) continue;
        const TestPotential w = abs_power(u2, 2.0 * s);
        for (double f : frac_open) {
            const double sp = 0.5 + f * (s - 0.5);
            if (norm_k0(w, sp).finite) {
                c.d_gamma0 = {true, s, sp};
                break;
            }
        }
    }
    for (double s : classification_s_grid()) {
        if (c.d.found) break;
        if (s > 0.75) continue;
        const double lo = 2.0 * s / 3.0 + 1.0 / 6.0;
        if (!(lo > 0.5)) continue;
        if (!norm_ksdelta(u2, s, 0.0).finite) continue;
        const TestPotential w = abs_power(u2, 2.0 * s);
        for (double f : frac_closed) {
            const double sp = lo + f * (s - lo);
            if (norm_ksdelta(w, sp, 4.0 * (s - sp)).finite) {
                c.d = {true, s, sp};
                break;
            }
        }
    }
    return c;
}

InclusionReport inclusion_spotchecks(const std::vector<TestPotential>& samples, double s, double s_prime, double delta)
{
    if (!(0.5 <= s_prime && s_prime < s)) throw Error(ErrorKind::parameter, "need 1/2 <= s' < s");
    if (delta < 0.0 || delta > 2.0 * s - 1.0 + 1e-12) throw Error(ErrorKind::parameter, "delta outside [0, 2s-1]");
    const bool third = 0.5 < 2.0 * s / 3.0 + 1.0 / 6.0 && 2.0 * s / 3.0 + 1.0 / 6.0 <= s_prime;

    InclusionReport rep;
    auto implies = [&](const std::string& what, const TestPotential& u, bool premise, bool conclusion) {
        ++rep.checks;
        if (premise && !conclusion) rep.counterexamples.push_back(fmt::format("{}: {}", u.name, what));
    };
    for (const TestPotential& u : samples) {
        const bool k0_sp = norm_k0(u, s_prime).finite;
        const bool k0_s = norm_k0(u, s).finite;
        const bool ks0 = norm_ksdelta(u, s, 0.0).finite;
        const bool ksd = delta > 0.0 ? norm_ksdelta(u, s, delta).finite : ks0;
        implies("K_{s'}^(0) in K_s^(0)", u, k0_sp, k0_s);
        implies("K_{s,delta} in K_{s,0}", u, ksd, ks0);
        implies("K_{s,0} in K_s^(0)", u, ks0, k0_s);
        if (third) {
            const double d3 = 4.0 * (s - s_prime);
            implies("K_{s',4(s-s')} in K_{s,0}", u, norm_ksdelta(u, s_prime, d3).finite, ks0);
        }
    }
    if (!rep.ok())
        throw Error(ErrorKind::internal_consistency, fmt::format("inclusion counterexample: {}", rep.counterexamples.front()));
    return rep;
}

}  // namespace fden
