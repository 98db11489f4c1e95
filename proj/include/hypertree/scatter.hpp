#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "hypertree/hypersphere.hpp"
#include "hypertree/potential.hpp"

namespace hypertree {

/// Scattering setup in the mass-weighted (3N-3)-dimensional space.
struct ScatterSpec {
    double mu = 1.0;
    double energy = 1.0;
    double impact_parameter = 0.0;
    Potential potential = Potential::hyperradial(radial::zero());
    double rho_max = 0.0;   // outer radius; must exceed the impact parameter
    double rel_tol = 1e-9;  // quadrature tolerance
    /// Add the free-motion tail 2b/rho_max so the sweep approximates an
    /// asymptotic (rho_max -> infinity) event.
    bool asymptotic = true;
};

/// 1e6 * max(b, rho_min): the default outer radius for asymptotic sweeps.
double default_rho_max(double b, double rho_min);

enum class TurningStatus { ok, no_turning_point, orbiting };

const char* to_string(TurningStatus s);

struct TurningPoint {
    double rho_min = 0.0;
    TurningStatus status = TurningStatus::ok;
};

/// F(rho) = 1 - b^2/rho^2 - V(rho)/E.
double radial_factor(const ScatterSpec& spec, double rho);

/// Largest root of F in (0, rho_max]: geometric scan inward (ratio 0.99)
/// then bisection to machine precision. Throws InvalidSpec if F(rho_max) <= 0.
TurningPoint turning_point(const ScatterSpec& spec);

struct ScatterResult {
    double rho_min = 0.0;
    double rho_max = 0.0;
    TurningStatus status = TurningStatus::ok;
    double sweep = 0.0;       // Phi, total hyperangular arc (radians)
    double deflection = 0.0;  // pi - Phi
    double tail = 0.0;        // 2b/rho_max, added when asymptotic
    double quad_error = 0.0;
    std::size_t evaluations = 0;
    /// (rho, b / (rho^2 sqrt F)) on a geometric grid over the inbound leg.
    std::vector<std::pair<double, double>> samples;
};

/// Phi = 2 int_{rho_min}^{rho_max} b drho / (rho^2 sqrt F). The inverse
/// square-root endpoint is removed by rho = rho_min + u^2. Non-ok statuses
/// leave sweep and deflection NaN, except b = 0 which gives Phi = 0 on
/// reflection and Phi = pi when the path crosses the origin.
ScatterResult hyperangular_sweep(const ScatterSpec& spec);

/// chi = pi - Phi (two-body reading of the sweep).
double deflection_two_body(const ScatterSpec& spec);

struct SecondOrderReport {
    double max_rhs_residual = 0.0;       // |rho_hat . rho_hat'' + b^2/(rho^4 F)|
    double max_identity_residual = 0.0;  // |rho_hat . rho_hat'' + rho_hat' . rho_hat'|
    std::size_t points = 0;
};

/// Checks rho_hat . d^2 rho_hat/drho^2 = -b^2 / (rho^4 F) along mass-weighted
/// positions sampled on a monotone-rho segment. rho_hat' . rho_hat' is read
/// from `tree` via the hyperangular kinetic form with d/drho; rho_hat'' uses three-point
/// non-uniform differences. Needs at least 3 samples.
SecondOrderReport second_order_check(const HypersphericalTree& tree, std::span<const VecN> samples,
                                     const ScatterSpec& spec);

}  // namespace hypertree
