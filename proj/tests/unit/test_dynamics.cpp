#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hypertree/dynamics.hpp"
#include "hypertree/errors.hpp"
#include "support.hpp"

using namespace hypertree;
using testing::rel;

namespace {

constexpr double kPi = std::numbers::pi;

// Two bodies on a Kepler orbit under V = -1/r with given eccentricity,
// starting at pericentre. Returns the system and the period.
std::pair<ParticleSystem, double> kepler(double m1, double m2, double a, double ecc) {
    const double M = m1 + m2;
    const double rp = a * (1 - ecc);
    const double vp = std::sqrt(M / a * (1 + ecc) / (1 - ecc));
    ParticleSystem s;
    s.masses = {m1, m2};
    s.positions = {{-m2 / M * rp, 0, 0}, {m1 / M * rp, 0, 0}};
    s.velocities = {{0, -m2 / M * vp, 0}, {0, m1 / M * vp, 0}};
    return {s, 2 * kPi * std::sqrt(a * a * a / M)};
}

}  // namespace

TEST_CASE("Kepler orbit conserves energy and momenta") {
    const auto [s, period] = kepler(1.0, 0.5, 1.0, 0.1);
    const Potential grav = Potential::pairwise(radial::coulomb(-s.masses[0] * s.masses[1]));
    const Trajectory t = integrate_nbody(s, grav, JacobiTree::sequential(2), {period / 1000, 10000, 10});
    CHECK(t.time.size() == 1001);
    for (std::size_t i = 1; i < t.time.size(); ++i) CHECK(t.time[i] > t.time[i - 1]);
    const Drift d = measure_drift(t);
    // Ten whole periods: the bounded O(dt^2) oscillation returns to its start.
    CHECK(d.energy_end_rel < 1e-8);
    CHECK(d.energy_rel < 1e-5);
    CHECK(d.p_cm_abs < 1e-12);
    CHECK(d.l_tot_rel < 1e-10);
    CHECK(d.lambda_sq_rel < 1e-10);

    // On a circular orbit the excursion itself stays below 1e-8.
    const auto [c, pc] = kepler(1.0, 0.5, 1.0, 0.0);
    const Trajectory tc = integrate_nbody(c, grav, JacobiTree::sequential(2), {pc / 1000, 10000, 10});
    CHECK(measure_drift(tc).energy_rel < 1e-8);
}

TEST_CASE("free motion is linear in time") {
    std::mt19937_64 rng(51);
    const ParticleSystem s = testing::random_system(4, rng);
    const Trajectory t = integrate_nbody(s, Potential::pairwise(radial::zero()), JacobiTree::sequential(4), {0.01, 500, 100});
    const ParticleSystem& end = t.snapshots.back();
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(norm(end.positions[i] - (s.positions[i] + s.velocities[i] * 5.0)) < 1e-12 * (1 + norm(s.positions[i])) * 10);
    CHECK(t.time.back() == doctest::Approx(5.0));
}

TEST_CASE("three-body pairwise run") {
    std::mt19937_64 rng(52);
    ParticleSystem s = testing::random_system(3, rng);
    for (auto& p : s.positions) p = p * 3.0;
    const Trajectory t = integrate_nbody(s, Potential::pairwise(radial::coulomb(0.5)), JacobiTree::sequential(3), {1e-3, 10000, 100});
    const Drift d = measure_drift(t);
    CHECK(d.energy_rel < 1e-8);
    CHECK(d.p_cm_abs < 1e-12 * (1 + std::abs(t.diagnostics.front().p_cm)) * 10);
    CHECK(d.l_tot_rel < 1e-10);
    for (const auto& x : t.diagnostics) CHECK(rel(x.decomp_total, x.lambda_sq) < 1e-9);
}

TEST_CASE("hyperradial runs conserve Lambda^2 and radial energy") {
    std::mt19937_64 rng(53);
    const ParticleSystem s = testing::random_system(4, rng);
    const JacobiTree tree = JacobiTree::parse("((1 2) (3 4))", 4);
    const Potential pot = Potential::hyperradial(radial::harmonic(2.0));
    const Trajectory t = integrate_nbody(s, pot, tree, {1e-3, 5000, 50});
    CHECK(measure_drift(t).lambda_sq_rel < 1e-10);
    const double mu = nbody_reduced_mass(s.masses);
    double first = 0.0;
    for (std::size_t i = 0; i < t.snapshots.size(); ++i) {
        const MassWeightedVector mw = to_mass_weighted(t.snapshots[i], tree);
        const double rho = norm(std::span<const double>(mw.rho_vec));
        const double rho_dot = dot(std::span<const double>(mw.rho_vec), std::span<const double>(mw.vel_vec)) / rho;
        const double e = radial_energy(mu, rho, rho_dot, t.diagnostics[i].lambda_sq, pot.of_rho(rho));
        if (i == 0) first = e;
        CHECK(rel(e, first) < 1e-5);
        // Internal energy: radial bookkeeping equals the full energy minus CM motion.
        const double vcm2 = dot(to_jacobi(t.snapshots[i], tree).v_cm, to_jacobi(t.snapshots[i], tree).v_cm);
        CHECK(rel(e + 0.5 * s.total_mass() * vcm2, t.diagnostics[i].energy) < 1e-12);
    }
}

TEST_CASE("collisions halt the integration") {
    ParticleSystem s;
    s.masses = {1, 1};
    s.positions = {{0, 0, 0}, {0, 0, 0}};
    s.velocities = {{0, 0, 0}, {0, 0, 0}};
    try {
        integrate_nbody(s, Potential::pairwise(radial::coulomb(-1.0)), JacobiTree::sequential(2), {1e-3, 10, 1});
        FAIL("expected IntegrationHalted");
    } catch (const IntegrationHalted& e) {
        CHECK(e.step() == 0);
        CHECK(e.last_state().size() == 2);
    }
    CHECK_THROWS_AS(integrate_nbody(s, Potential::averaged(radial::coulomb(1.0), JacobiTree::sequential(2), {1, 1}, 10, 1),
                                    JacobiTree::sequential(2), {1e-3, 10, 1}),
                    InvalidInput);
    s.positions[1] = {1, 0, 0};
    CHECK_THROWS_AS(integrate_nbody(s, Potential::pairwise(radial::zero()), JacobiTree::sequential(2), {0.0, 10, 1}), InvalidInput);
}

TEST_CASE("radial energy") {
    CHECK(radial_energy(2.0, 1.5, 0.5, 0.0, 0.0) == doctest::Approx(0.25));
    CHECK(radial_energy(2.0, 1.5, 0.0, 3.0, 0.1) == doctest::Approx(3.0 / (2 * 2.0 * 2.25) + 0.1));
    CHECK_THROWS_AS(radial_energy(1.0, 0.0, 1.0, 1.0, 0.0), DegenerateState);
    CHECK(radial_energy(1.0, 0.0, 1.0, 0.0, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("impact parameter") {
    CHECK(impact_parameter(VecN{1, 2, 3}, VecN{2, 4, 6}) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(impact_parameter(VecN{0, 3, 4}, VecN{1, 0, 0}) == doctest::Approx(5.0));
    CHECK_THROWS_AS(impact_parameter(VecN{1, 0, 0}, VecN{0, 0, 0}), InvalidInput);
    CHECK(lambda0_sq(1.0, 2.0, 0.0) == 0.0);
    CHECK(lambda0_sq(1.0, 2.0, 3.0) == 36.0);
}

TEST_CASE("hyperangular arc") {
    std::vector<VecN> quarter;
    for (int i = 0; i <= 10; ++i) {
        const double a = kPi / 2 * i / 10;
        quarter.push_back({2 * std::cos(a), 2 * std::sin(a), 0, 0});
    }
    CHECK(hyperangular_arc(quarter) == doctest::Approx(kPi / 2).epsilon(1e-14));
}
