#include "doctest.h"

#include "fden/errors.hpp"
#include "fden/thomas_fermi.hpp"

#include <cmath>
#include <numbers>

using namespace fden;

namespace {

const TFSolution& unit()
{
    static const TFSolution tf = solve_tf();
    return tf;
}

}  // namespace

TEST_CASE("initial slope")
{
    CHECK(unit().slope0 == doctest::Approx(-1.5880710).epsilon(1e-6));
    // a looser shooting tolerance lands nearby
    CHECK(solve_tf(1e-8).slope0 == doctest::Approx(unit().slope0).epsilon(1e-6));
    CHECK(unit().phi(0.0) == doctest::Approx(1.0));
    CHECK(unit().dphi(0.0) == doctest::Approx(unit().slope0));
}

TEST_CASE("profile is positive, decreasing, convex")
{
    const TFSolution& tf = unit();
    double prev = tf.phi(1e-3);
    for (double x = 0.01; x < 200.0; x *= 1.3) {
        const double p = tf.phi(x);
        CHECK(p > 0.0);
        CHECK(p < prev);
        CHECK(tf.dphi(x) < 0.0);
        prev = p;
    }
    // Sommerfeld's asymptote 144/x³
    CHECK(tf.phi(1e4) * 1e12 / 144.0 == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("charge")
{
    for (double Z : {1.0, 20.0}) {
        const TFSolution tf = tf_for_charge(unit(), Z);
        CHECK(tf.mass_within(1e6) == doctest::Approx(Z).epsilon(1e-3));
        const double r = tf.radius_enclosing(0.3 * Z);
        CHECK(tf.mass_within(r) == doctest::Approx(0.3 * Z).epsilon(1e-8));
    }
    CHECK_THROWS_AS(unit().radius_enclosing(2.0), Error);
}

TEST_CASE("Z scaling")
{
    const TFSolution& one = unit();
    const double e1 = tf_energy(one), d1 = tf_coulomb_energy(one);
    for (double Z : {2.0, 20.0, 92.0}) {
        const TFSolution tf = tf_for_charge(one, Z);
        const double z13 = std::cbrt(Z);
        for (double r : {1e-3, 0.1, 1.0, 5.0})
            CHECK(tf.rho(r) == doctest::Approx(Z * Z * one.rho(z13 * r)).epsilon(1e-10));
        CHECK(tf_energy(tf) == doctest::Approx(e1 * std::pow(Z, 7.0 / 3.0)).epsilon(1e-10));
        CHECK(tf_coulomb_energy(tf) == doctest::Approx(d1 * std::pow(Z, 7.0 / 3.0)).epsilon(1e-6));
        CHECK(tf.radius_enclosing(0.5 * Z) == doctest::Approx(one.radius_enclosing(0.5) / z13).epsilon(1e-8));
    }
    // E^TF = 3φ′(0)/(7b) Z^{7/3}
    CHECK(e1 == doctest::Approx(3.0 * one.slope0 / (7.0 * tf_length_unit())).epsilon(1e-12));
    // neutral atom: T : −V_ne : D = 3 : 7 : 1
    CHECK(d1 == doctest::Approx(-e1 / 3.0).epsilon(1e-4));
}

TEST_CASE("small-r slope")
{
    CHECK(tf_small_r_slope(unit()) == doctest::Approx(-1.5).epsilon(0.03));
    CHECK(tf_small_r_slope(tf_for_charge(unit(), 30.0)) == doctest::Approx(-1.5).epsilon(0.03));
}

TEST_CASE("shell-sum Coulomb energy matches the profile quadrature")
{
    const TFSolution tf = tf_for_charge(unit(), 10.0);
    const RadialGrid g = build_grid(GridKind::loglinear, 1e-7, 400, 3000, 2);
    std::vector<double> rho(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) rho[i] = tf.rho(g.nodes[i]);
    CHECK(coulomb_energy(g, rho) == doctest::Approx(tf_coulomb_energy(tf)).epsilon(1e-3));
    CHECK_THROWS_AS(coulomb_energy(g, std::vector<double>(3)), Error);
}

TEST_CASE("half-charge ball and screening potential")
{
    const TFSolution tf = tf_for_charge(unit(), 10.0);
    for (double a : {0.01, 0.3, 2.0}) {
        const double R = half_radius(tf, a);
        CHECK(ball_mass(tf, a, R) == doctest::Approx(0.5).epsilon(1e-7));
        const double chi = screening_potential(tf, a);
        CHECK(chi >= 0.0);
        CHECK(chi <= tf_coulomb_potential(tf, a));
    }
    // finite at the nucleus; approaches its limit like √a
    const double p6 = tf_coulomb_potential(tf, 1e-6), p5 = tf_coulomb_potential(tf, 1e-5), p4 = tf_coulomb_potential(tf, 1e-4);
    CHECK(p6 > p5);
    CHECK((p5 - p4) / (p6 - p5) == doctest::Approx(std::sqrt(10.0)).epsilon(0.05));
    const ScreeningTable t = make_screening_table(tf, 1e-3, 50.0, 200);
    for (double r : {2e-3, 0.07, 3.3}) CHECK(t(r) == doctest::Approx(screening_potential(tf, r)).epsilon(1e-3));
    CHECK_THROWS_AS(make_screening_table(tf, 1.0, 0.5, 10), Error);
}

TEST_CASE("MMS probe")
{
    const MMSReport r = mms_probe(unit(), 4, 500, 7);
    CHECK(r.draws == 500);
    CHECK(r.violations == 0);
    CHECK(r.min_margin >= 0.0);
    const MMSReport again = mms_probe(unit(), 4, 500, 7);
    CHECK(again.min_margin == r.min_margin);
    CHECK_THROWS_AS(mms_probe(unit(), 0, 10, 1), Error);
}
