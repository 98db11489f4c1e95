#include "hypertree/scatter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hypertree/errors.hpp"
#include "hypertree/quadrature.hpp"

namespace hypertree {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_spec(const ScatterSpec& spec) {
    if (!(spec.energy > 0.0) || !std::isfinite(spec.energy)) throw InvalidSpec("scattering energy must be positive");
    if (!(spec.impact_parameter >= 0.0) || !std::isfinite(spec.impact_parameter))
        throw InvalidSpec("impact parameter must be non-negative");
    if (!(spec.rho_max > spec.impact_parameter) || !(spec.rho_max > 0.0) || !std::isfinite(spec.rho_max))
        throw InvalidSpec("rho_max must exceed the impact parameter");
    if (spec.potential.kind() == Potential::Kind::pairwise)
        throw InvalidSpec("scattering needs a hyperradial or averaged potential");
}
}  // namespace

double default_rho_max(double b, double rho_min) { return 1e6 * std::max(b, rho_min); }

const char* to_string(TurningStatus s) {
    switch (s) {
        case TurningStatus::ok: return "ok";
        case TurningStatus::no_turning_point: return "no-turning-point";
        case TurningStatus::orbiting: return "orbiting";
    }
    return "?";
}

double radial_factor(const ScatterSpec& spec, double rho) {
    const double b = spec.impact_parameter;
    return 1.0 - b * b / (rho * rho) - spec.potential.of_rho(rho) / spec.energy;
}

TurningPoint turning_point(const ScatterSpec& spec) {
    check_spec(spec);
    if (!(radial_factor(spec, spec.rho_max) > 0.0))
        throw InvalidSpec("F(rho_max) <= 0: the outer radius is classically forbidden");

    const double floor = spec.rho_max * 1e-15;
    double hi = spec.rho_max;
    double lo = hi;
    bool bracketed = false;
    double f_min = radial_factor(spec, hi), at_min = hi;
    while (hi > floor) {
        lo = 0.99 * hi;
        const double f = radial_factor(spec, lo);
        if (!(f > 0.0)) {
            bracketed = true;
            break;
        }
        if (f < f_min) f_min = f, at_min = lo;
        hi = lo;
    }
    TurningPoint tp;
    if (!bracketed) {
        // F may touch zero between scan points without changing sign.
        if (f_min < 1e-3) {
            double a = at_min * 0.99, c = std::min(at_min / 0.99, spec.rho_max);
            const double g = 0.5 * (std::sqrt(5.0) - 1.0);
            while (c - a > 1e-15 * c) {
                const double x1 = c - g * (c - a), x2 = a + g * (c - a);
                if (radial_factor(spec, x1) < radial_factor(spec, x2)) c = x2;
                else a = x1;
            }
            const double x = 0.5 * (a + c);
            if (radial_factor(spec, x) <= 1e-10) {
                tp.rho_min = x;
                tp.status = TurningStatus::orbiting;
                return tp;
            }
        }
        tp.rho_min = 0.0;
        tp.status = TurningStatus::no_turning_point;
        return tp;
    }
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        if (radial_factor(spec, mid) > 0.0) hi = mid;
        else lo = mid;
    }
    tp.rho_min = hi;
    const double b = spec.impact_parameter;
    const double slope = 2.0 * b * b / (hi * hi * hi) - spec.potential.derivative_of_rho(hi) / spec.energy;
    if (!(slope * hi > 1e-9)) tp.status = TurningStatus::orbiting;
    return tp;
}

ScatterResult hyperangular_sweep(const ScatterSpec& spec) {
    const TurningPoint tp = turning_point(spec);
    ScatterResult out;
    out.rho_min = tp.rho_min;
    out.rho_max = spec.rho_max;
    out.status = tp.status;
    const double b = spec.impact_parameter;
    const double E = spec.energy;

    if (b == 0.0) {
        out.sweep = tp.status == TurningStatus::ok ? 0.0
                    : tp.status == TurningStatus::no_turning_point ? std::numbers::pi
                                                                    : kNaN;
        out.deflection = std::numbers::pi - out.sweep;
        return out;
    }
    if (tp.status != TurningStatus::ok) {
        out.sweep = out.deflection = kNaN;
        return out;
    }

    const double rm = tp.rho_min;
    const double v_rm = spec.potential.of_rho(rm);
    // F(rho) - F(rho_min) divided by u^2, written so that nothing cancels
    // as u -> 0; the potential difference uses the midpoint slope there.
    auto q_of = [&](double u, double rho) {
        const double u2 = u * u;
        const double geometric = b * b * (rho + rm) / (rm * rm * rho * rho);
        double dv;
        if (u2 < 1e-4 * rm) dv = spec.potential.derivative_of_rho(rm + 0.5 * u2);
        else dv = (spec.potential.of_rho(rho) - v_rm) / u2;
        return geometric - dv / E;
    };
    auto integrand = [&](double u) {
        const double rho = rm + u * u;
        const double q = q_of(u, rho);
        if (!(q > 0.0)) return kNaN;
        return 2.0 * b / (rho * rho * std::sqrt(q));
    };

    const double upper = std::sqrt(spec.rho_max - rm);
    const QuadratureResult qr = integrate_gk15(integrand, 0.0, upper, spec.rel_tol, 0.0);
    if (!std::isfinite(qr.value)) throw InvalidSpec("sweep integrand is not finite on (rho_min, rho_max)");
    out.quad_error = 2.0 * qr.abs_error;
    out.evaluations = qr.evaluations;
    out.tail = spec.asymptotic ? 2.0 * b / spec.rho_max : 0.0;
    out.sweep = 2.0 * qr.value + out.tail;
    out.deflection = std::numbers::pi - out.sweep;

    constexpr int kSamples = 32;
    for (int k = 0; k < kSamples; ++k) {
        const double u = upper * std::pow(1e-6, 1.0 - static_cast<double>(k) / (kSamples - 1));
        const double rho = rm + u * u;
        const double q = q_of(u, rho);
        out.samples.emplace_back(rho, b / (rho * rho * std::sqrt(q) * u));
    }
    return out;
}

double deflection_two_body(const ScatterSpec& spec) { return hyperangular_sweep(spec).deflection; }

SecondOrderReport second_order_check(const HypersphericalTree& tree, std::span<const VecN> samples,
                                     const ScatterSpec& spec) {
    if (samples.size() < 3) throw InvalidInput("second-order check needs at least 3 samples");
    const std::size_t dim = tree.dimension();
    const double b = spec.impact_parameter;
    std::vector<double> r(samples.size());
    std::vector<VecN> unit(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        if (samples[k].size() != dim) throw InvalidInput("sample dimension does not match the tree");
        r[k] = norm(samples[k]);
        unit[k] = samples[k];
        for (double& x : unit[k]) x /= r[k];
    }
    SecondOrderReport rep;
    VecN dx(dim), uhat2(dim);
    for (std::size_t k = 1; k + 1 < samples.size(); ++k) {
        const double h1 = r[k] - r[k - 1];
        const double h2 = r[k + 1] - r[k];
        if (!(h1 * h2 > 0.0)) throw InvalidInput("second-order check needs a strictly monotone rho segment");
        const double s = h1 + h2;
        // Three-point weights on a non-uniform grid.
        const double d1m = -h2 / (h1 * s), d10 = (h2 - h1) / (h1 * h2), d1p = h1 / (h2 * s);
        const double d2m = 2.0 / (h1 * s), d20 = -2.0 / (h1 * h2), d2p = 2.0 / (h2 * s);
        double lhs = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            dx[i] = d1m * samples[k - 1][i] + d10 * samples[k][i] + d1p * samples[k + 1][i];
            uhat2[i] = d2m * unit[k - 1][i] + d20 * unit[k][i] + d2p * unit[k + 1][i];
            lhs += unit[k][i] * uhat2[i];
        }
        const HyperState st = angle_rates_from_velocity(tree, from_cartesian(tree, samples[k]), dx);
        const double first = kinetic_value(tree, st);
        const double rhs = -b * b / (std::pow(r[k], 4) * radial_factor(spec, r[k]));
        rep.max_rhs_residual = std::max(rep.max_rhs_residual, std::abs(lhs - rhs));
        rep.max_identity_residual = std::max(rep.max_identity_residual, std::abs(lhs + first));
        ++rep.points;
    }
    return rep;
}

}  // namespace hypertree
