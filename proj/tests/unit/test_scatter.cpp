#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "hypertree/errors.hpp"
#include "hypertree/scatter.hpp"
#include "support.hpp"

using namespace hypertree;
using testing::rel;

namespace {

constexpr double kPi = std::numbers::pi;

ScatterSpec spec(double b, Potential pot, double energy = 1.0) {
    ScatterSpec s;
    s.mu = 1.0;
    s.energy = energy;
    s.impact_parameter = b;
    s.potential = std::move(pot);
    s.rho_max = default_rho_max(b, std::max(b, 1.0)) * 10;
    return s;
}

}  // namespace

TEST_CASE("turning points") {
    const auto free = turning_point(spec(1.3, Potential::hyperradial(radial::zero())));
    CHECK(free.status == TurningStatus::ok);
    CHECK(rel(free.rho_min, 1.3) < 1e-14);

    for (double b : {0.0, 0.5, 2.0}) {
        const double k = 1.0, e = 2.0;
        const auto tp = turning_point(spec(b, Potential::hyperradial(radial::coulomb(k)), e));
        CHECK(rel(tp.rho_min, k / (2 * e) + std::sqrt(k * k / (4 * e * e) + b * b)) < 1e-14);
    }

    const auto head_on = turning_point(spec(0.0, Potential::hyperradial(radial::zero())));
    CHECK(head_on.status == TurningStatus::no_turning_point);

    ScatterSpec bad = spec(1.0, Potential::hyperradial(radial::zero()));
    bad.rho_max = 0.5;
    CHECK_THROWS_AS(turning_point(bad), InvalidSpec);
}

TEST_CASE("sweep closed forms") {
    const auto free = hyperangular_sweep(spec(2.0, Potential::hyperradial(radial::zero())));
    CHECK(std::abs(free.sweep - kPi) < 1e-6);
    CHECK(std::abs(free.deflection) < 1e-6);
    CHECK(free.tail > 0.0);

    for (double b : {0.5, 1.0, 2.0, 10.0}) {
        const auto r = hyperangular_sweep(spec(b, Potential::hyperradial(radial::coulomb(1.0))));
        CHECK(rel(r.deflection, 2 * std::atan(1 / (2 * b))) < 1e-6);
        CHECK(r.rho_min <= r.rho_max);
    }

    const double c = 0.3;
    for (double b : {0.8, 1.5}) {
        const auto r = hyperangular_sweep(spec(b, Potential::hyperradial(radial::inverse_square(-c))));
        CHECK(rel(r.sweep, kPi * b / std::sqrt(b * b - c)) < 1e-6);
        CHECK(r.deflection < 0.0);
    }
}

TEST_CASE("head-on cases") {
    const auto wall = hyperangular_sweep(spec(0.0, Potential::hyperradial(radial::coulomb(1.0))));
    CHECK(wall.sweep == 0.0);
    CHECK(wall.deflection == doctest::Approx(kPi));
    const auto through = hyperangular_sweep(spec(0.0, Potential::hyperradial(radial::zero())));
    CHECK(through.sweep == doctest::Approx(kPi));
    CHECK(deflection_two_body(spec(1.0, Potential::hyperradial(radial::zero()))) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("large impact parameter tail") {
    const auto lj = Potential::hyperradial(radial::lennard_jones(1.0, 1.0));
    const double c10 = hyperangular_sweep(spec(10.0, lj)).deflection;
    const double c100 = hyperangular_sweep(spec(100.0, lj)).deflection;
    CHECK(std::abs(c100) < std::abs(c10));
    CHECK(std::abs(c100) < 1e-9);
}

TEST_CASE("orbiting is flagged") {
    // V = -c/rho^2 with b^2 = c/E: F = 1 - (b^2 - c/E)/rho^2 never vanishes.
    ScatterSpec s = spec(1.0, Potential::hyperradial(radial::inverse_square(-1.0)));
    const auto r = hyperangular_sweep(s);
    CHECK(r.status != TurningStatus::ok);
    CHECK(std::isnan(r.sweep));

    // F(rho) = (1 - a/rho)^2 touches zero at rho = a.
    const double a = 2.0, b = 1.0, e = 1.0;
    RadialFunction touch{"touch", [=](double r) { return e * (2 * a / r - (a * a + b * b) / (r * r)); },
                         [=](double r) { return e * (-2 * a / (r * r) + 2 * (a * a + b * b) / (r * r * r)); }};
    const auto t = turning_point(spec(b, Potential::hyperradial(touch), e));
    CHECK(t.status == TurningStatus::orbiting);
    CHECK(std::abs(t.rho_min - a) < 1e-4);
    CHECK(std::string(to_string(t.status)) == "orbiting");
}

TEST_CASE("second-order check on a straight line") {
    // Free motion in D = 6: x(t) = a + t v with a perpendicular to v.
    const VecN a{1, 0, 0, 0, 0, 0}, v{0, 1, 0.5, 0, 0, 0};
    std::vector<VecN> samples;
    for (int i = 0; i < 1000; ++i) {
        const double t = 1.0 + 2e-4 * i * (1 + 0.002 * i);
        VecN x(6);
        for (std::size_t k = 0; k < 6; ++k) x[k] = a[k] + t * v[k];
        samples.push_back(x);
    }
    ScatterSpec s = spec(1.0, Potential::hyperradial(radial::zero()));
    const auto rep = second_order_check(HypersphericalTree::caterpillar(6), samples, s);
    CHECK(rep.points > 0);
    CHECK(rep.max_identity_residual < 1e-6);
    CHECK(rep.max_rhs_residual < 1e-5);

    std::vector<VecN> few(samples.begin(), samples.begin() + 2);
    CHECK_THROWS_AS(second_order_check(HypersphericalTree::caterpillar(6), few, s), InvalidInput);
}
