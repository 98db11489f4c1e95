#include <doctest.h>

#include <cmath>

#include "hypertree/errors.hpp"
#include "hypertree/jacobi.hpp"
#include "support.hpp"

using namespace hypertree;
using testing::rel;

TEST_CASE("N-body reduced mass") {
    CHECK(nbody_reduced_mass(std::vector<double>{1, 1}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(nbody_reduced_mass(std::vector<double>{1, 2, 3}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(nbody_reduced_mass(std::vector<double>{2, 3, 6}) == doctest::Approx(std::sqrt(36.0 / 11.0)).epsilon(1e-15));
    CHECK_THROWS_AS(nbody_reduced_mass(std::vector<double>{1}), InvalidInput);
    CHECK_THROWS_AS(nbody_reduced_mass(std::vector<double>{}), InvalidInput);
    CHECK_THROWS_AS(nbody_reduced_mass(std::vector<double>{1, 0}), InvalidInput);
    CHECK_THROWS_AS(nbody_reduced_mass(std::vector<double>{1, -2}), InvalidInput);
    // Large N stays finite where the raw product would overflow.
    std::vector<double> big(400, 1e3);
    CHECK(std::isfinite(nbody_reduced_mass(big)));
}

TEST_CASE("sequential and parsed trees") {
    const JacobiTree t2 = JacobiTree::sequential(2);
    CHECK(t2.node_count() == 1);
    CHECK(t2.to_string() == "(1 2)");

    const JacobiTree t3 = JacobiTree::sequential(3);
    CHECK(t3.to_string() == "((1 2) 3)");
    CHECK(t3.node(0).label() == "1,2");
    CHECK(t3.node(1).label() == "12,3");
    CHECK(t3.node(1).left_child == 0);

    const JacobiTree t4 = JacobiTree::parse(" ( (1 2)(3 4) ) ", 4);
    CHECK(t4.to_string() == "((1 2) (3 4))");
    CHECK(t4.node(2).label() == "12,34");
    const auto nm = node_masses(t4, std::vector<double>{1, 1, 1, 1});
    CHECK(nm[0].reduced == 0.5);
    CHECK(nm[1].reduced == 0.5);
    CHECK(nm[2].reduced == 1.0);
    CHECK(nm[2].left == 2.0);

    CHECK_THROWS_AS(JacobiTree::sequential(1), InvalidInput);
    CHECK_THROWS_AS(JacobiTree::parse("((1 2) 2)", 3), InvalidInput);
    CHECK_THROWS_AS(JacobiTree::parse("((1 2) 4)", 3), InvalidInput);
    CHECK_THROWS_AS(JacobiTree::parse("(1 2)", 3), InvalidInput);
    CHECK_THROWS_AS(JacobiTree::parse("(1 x)", 2), InvalidInput);
    CHECK_THROWS_AS(JacobiTree::parse("(1 (2", 2), ParseError);
}

TEST_CASE("Jacobi vectors by hand") {
    ParticleSystem s;
    s.masses = {1, 1, 2};
    s.positions = {{0, 0, 0}, {2, 0, 0}, {1, 3, 0}};
    s.velocities.assign(3, Vec3{});
    const JacobiCoordinates jc = to_jacobi(s, JacobiTree::sequential(3));
    CHECK(norm(jc.rho[0] - Vec3{2, 0, 0}) < 1e-15);
    CHECK(norm(jc.rho[1] - Vec3{0, 3, 0}) < 1e-15);
    CHECK(norm(jc.r_cm - Vec3{1, 1.5, 0}) < 1e-15);

    ParticleSystem two;
    two.masses = {1, 1};
    two.positions = {{0, 0, 0}, {1, 0, 0}};
    two.velocities.assign(2, Vec3{});
    CHECK(norm(to_jacobi(two, JacobiTree::sequential(2)).rho[0] - Vec3{1, 0, 0}) < 1e-15);
}

TEST_CASE("two-body inverse by hand") {
    const std::vector<double> m{1.0, 3.0};
    JacobiCoordinates jc;
    jc.rho = {{4, 0, 0}};
    jc.rho_dot = {{0, 0, 0}};
    jc.r_cm = {1, 1, 1};
    const ParticleSystem s = from_jacobi(jc, JacobiTree::sequential(2), m);
    CHECK(norm(s.positions[0] - Vec3{1 - 3.0, 1, 1}) < 1e-15);
    CHECK(norm(s.positions[1] - Vec3{1 + 1.0, 1, 1}) < 1e-15);
}

TEST_CASE("mass weighting") {
    ParticleSystem s;
    s.masses = {1, 1, 2};
    s.positions = {{0, 0, 0}, {2, 0, 0}, {1, 3, 0}};
    s.velocities.assign(3, Vec3{});
    const MassWeightedVector mw = to_mass_weighted(s, JacobiTree::sequential(3));
    const double mu = std::sqrt(0.5);
    CHECK(mw.mu == doctest::Approx(mu).epsilon(1e-15));
    CHECK(mw.rho_vec.size() == 6);
    CHECK(mw.rho_vec[0] == doctest::Approx(2.0 * std::sqrt(0.5 / mu)).epsilon(1e-15));
    CHECK(mw.rho_vec[4] == doctest::Approx(3.0 * std::sqrt(1.0 / mu)).epsilon(1e-15));
}

TEST_CASE("round trip and kinetic energy identity on random trees") {
    std::mt19937_64 rng(12);
    for (int k = 0; k < 300; ++k) {
        const std::size_t n = 2 + k % 5;
        const ParticleSystem s = testing::random_system(n, rng);
        const JacobiTree tree = JacobiTree::parse(testing::random_tree_text(n, rng), n);
        const JacobiCoordinates jc = to_jacobi(s, tree);
        const ParticleSystem back = from_jacobi(jc, tree, s.masses);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(norm(back.positions[i] - s.positions[i]) < 1e-12 * (1 + norm(s.positions[i])));
            CHECK(norm(back.velocities[i] - s.velocities[i]) < 1e-12 * (1 + norm(s.velocities[i])));
        }
        const MassWeightedVector mw = mass_weight(jc, tree, s.masses);
        double ke = 0.0;
        for (std::size_t i = 0; i < n; ++i) ke += 0.5 * s.masses[i] * dot(s.velocities[i], s.velocities[i]);
        const double internal = 0.5 * mw.mu * dot(std::span<const double>(mw.vel_vec), std::span<const double>(mw.vel_vec));
        CHECK(rel(internal + 0.5 * s.total_mass() * dot(jc.v_cm, jc.v_cm), ke) < 1e-12);

        const auto nm = node_masses(tree, s.masses);
        double per_node = 0.0;
        for (std::size_t j = 0; j < nm.size(); ++j) per_node += nm[j].reduced * dot(jc.rho_dot[j], jc.rho_dot[j]);
        CHECK(rel(per_node, 2.0 * internal) < 1e-12);
        for (const auto& x : nm) CHECK(rel(x.reduced, x.left * x.right / (x.left + x.right)) < 1e-15);
    }
}

TEST_CASE("infinitely massive first particle") {
    std::mt19937_64 rng(3);
    ParticleSystem s = testing::random_system(4, rng);
    s.masses[0] = 1e12;
    const JacobiCoordinates jc = to_jacobi(s, JacobiTree::sequential(4));
    for (std::size_t j = 0; j < 3; ++j) {
        const Vec3 direct = s.positions[j + 1] - s.positions[0];
        CHECK(norm(jc.rho[j] - direct) <= 1e-9 * norm(direct));
    }
}

TEST_CASE("validation") {
    ParticleSystem s;
    s.masses = {1};
    s.positions = {{0, 0, 0}};
    s.velocities = {{0, 0, 0}};
    CHECK_THROWS_AS(validate(s), InvalidInput);
    s.masses = {1, 1};
    CHECK_THROWS_AS(validate(s), InvalidInput);
    s.positions.push_back({1, 0, 0});
    s.velocities.push_back({0, 0, 0});
    CHECK_NOTHROW(validate(s));
    s.masses[1] = std::nan("");
    CHECK_THROWS_AS(validate(s), InvalidInput);
    s.masses[1] = 1.0;
    CHECK_THROWS_AS(to_jacobi(s, JacobiTree::sequential(3)), InvalidInput);
    // Coincident particles are legal.
    s.positions[1] = s.positions[0];
    CHECK(norm(to_jacobi(s, JacobiTree::sequential(2)).rho[0]) == 0.0);
}
