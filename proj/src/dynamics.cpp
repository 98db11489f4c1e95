#include "hypertree/dynamics.hpp"

#include <cmath>
#include <limits>

namespace hypertree {

namespace {

Diagnostics diagnose_with(const ParticleSystem& system, const Potential& potential,
                          const JacobiTree& tree, const HypersphericalTree& ft) {
    Diagnostics d;
    CompensatedSum ke;
    Vec3 p, l;
    for (std::size_t i = 0; i < system.size(); ++i) {
        const double m = system.masses[i];
        ke.add(0.5 * m * dot(system.velocities[i], system.velocities[i]));
        p += m * system.velocities[i];
        l += m * cross(system.positions[i], system.velocities[i]);
    }
    d.energy = ke.value() + potential.energy(system);
    d.p_cm = norm(p);
    d.l_tot = norm(l);
    const MassWeightedVector mw = to_mass_weighted(system, tree);
    d.rho = norm(mw.rho_vec);
    VecN mom = mw.vel_vec;
    for (double& x : mom) x *= mw.mu;
    d.lambda_sq = lambda_sq_lagrange(mw.rho_vec, mom);
    try {
        const HyperState st = angle_rates_from_velocity(ft, from_cartesian(ft, mw.rho_vec), mw.vel_vec);
        d.decomp_total = decompose(ft, st, mw.mu).total;
    } catch (const DegenerateState&) {
        d.decomp_total = std::numeric_limits<double>::quiet_NaN();
    }
    return d;
}

bool all_finite(const std::vector<Vec3>& v) {
    for (const auto& x : v)
        if (!std::isfinite(x.x) || !std::isfinite(x.y) || !std::isfinite(x.z)) return false;
    return true;
}

}  // namespace

Diagnostics diagnose(const ParticleSystem& system, const Potential& potential, const JacobiTree& tree) {
    return diagnose_with(system, potential, tree, fork_tree(tree));
}

Trajectory integrate_nbody(const ParticleSystem& system, const Potential& potential,
                           const JacobiTree& tree, const IntegratorSettings& settings) {
    validate(system);
    if (!(settings.dt > 0.0) || !std::isfinite(settings.dt)) throw InvalidInput("dt must be positive");
    if (settings.record_every == 0) throw InvalidInput("record_every must be at least 1");
    if (potential.kind() == Potential::Kind::averaged)
        throw InvalidInput("averaged potentials cannot drive lab-frame integration");
    if (tree.particle_count() != system.size()) throw InvalidInput("tree does not match the system");

    const std::size_t n = system.size();
    const double dt = settings.dt;
    ParticleSystem state = system;
    std::vector<Vec3> force;
    potential.forces(state, force);
    if (!all_finite(force)) throw IntegrationHalted("non-finite forces in the initial state", state, 0);

    const HypersphericalTree ft = fork_tree(tree);
    Trajectory traj;
    auto record = [&](std::size_t step) {
        traj.time.push_back(static_cast<double>(step) * dt);
        traj.snapshots.push_back(state);
        traj.diagnostics.push_back(diagnose_with(state, potential, tree, ft));
    };
    record(0);

    std::vector<Vec3> next_force;
    for (std::size_t step = 1; step <= settings.steps; ++step) {
        ParticleSystem prev = state;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3 a = force[i] / state.masses[i];
            state.velocities[i] += (0.5 * dt) * a;
            state.positions[i] += dt * state.velocities[i];
        }
        potential.forces(state, next_force);
        if (!all_finite(next_force))
            throw IntegrationHalted("non-finite forces at step " + std::to_string(step), prev, step - 1);
        for (std::size_t i = 0; i < n; ++i)
            state.velocities[i] += (0.5 * dt / state.masses[i]) * next_force[i];
        force.swap(next_force);
        if (step % settings.record_every == 0 || step == settings.steps) record(step);
    }
    return traj;
}

Drift measure_drift(const Trajectory& trajectory) {
    Drift d;
    if (trajectory.diagnostics.empty()) return d;
    const Diagnostics& d0 = trajectory.diagnostics.front();
    const double e_scale = d0.energy != 0.0 ? std::abs(d0.energy) : 1.0;
    for (const auto& x : trajectory.diagnostics) {
        d.energy_rel = std::max(d.energy_rel, std::abs(x.energy - d0.energy) / e_scale);
        d.p_cm_abs = std::max(d.p_cm_abs, std::abs(x.p_cm - d0.p_cm));
        if (d0.l_tot > 0.0) d.l_tot_rel = std::max(d.l_tot_rel, std::abs(x.l_tot - d0.l_tot) / d0.l_tot);
        if (d0.lambda_sq > 0.0)
            d.lambda_sq_rel = std::max(d.lambda_sq_rel, std::abs(x.lambda_sq - d0.lambda_sq) / d0.lambda_sq);
    }
    d.energy_end_rel = std::abs(trajectory.diagnostics.back().energy - d0.energy) / e_scale;
    return d;
}

double radial_energy(double mu, double rho, double rho_dot, double lambda_sq, double v_at_rho) {
    if (!(rho > 0.0)) {
        if (lambda_sq > 0.0) throw DegenerateState("centrifugal barrier is singular at rho = 0");
        return 0.5 * mu * rho_dot * rho_dot + v_at_rho;
    }
    return 0.5 * mu * rho_dot * rho_dot + lambda_sq / (2.0 * mu * rho * rho) + v_at_rho;
}

double impact_parameter(std::span<const double> rho0, std::span<const double> p0) {
    if (rho0.size() != p0.size()) throw InvalidInput("position and momentum dimensions differ");
    const double pn = norm(p0);
    if (!(pn > 0.0)) throw InvalidInput("impact parameter needs nonzero momentum");
    const double along = dot(rho0, p0) / pn;
    double s = 0.0;
    for (std::size_t i = 0; i < rho0.size(); ++i) {
        const double perp = rho0[i] - along * p0[i] / pn;
        s += perp * perp;
    }
    return std::sqrt(s);
}

double lambda0_sq(double mu, double energy, double b) { return 2.0 * mu * energy * b * b; }

double hyperangular_arc(std::span<const VecN> positions) {
    double arc = 0.0;
    for (std::size_t k = 1; k < positions.size(); ++k) {
        const auto& a = positions[k - 1];
        const auto& b = positions[k];
        const double na = norm(a), nb = norm(b);
        double chord = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] / na - b[i] / nb;
            chord += d * d;
        }
        arc += 2.0 * std::asin(std::min(1.0, 0.5 * std::sqrt(chord)));
    }
    return arc;
}

}  // namespace hypertree
