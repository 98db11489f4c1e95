#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hypertree/errors.hpp"
#include "hypertree/grandang.hpp"
#include "hypertree/jacobi.hpp"
#include "hypertree/potential.hpp"

namespace hypertree {

/// Per-snapshot bookkeeping of conserved and diagnostic quantities.
struct Diagnostics {
    double energy = 0.0;
    double p_cm = 0.0;        // |total momentum|
    double l_tot = 0.0;       // |sum m r x v|
    double rho = 0.0;
    double lambda_sq = 0.0;   // Lagrange form on mass-weighted vectors
    double decomp_total = 0.0;  // NaN when the state is degenerate for the fork tree
};

Diagnostics diagnose(const ParticleSystem& system, const Potential& potential, const JacobiTree& tree);

struct IntegratorSettings {
    double dt = 1e-3;
    std::size_t steps = 1000;
    std::size_t record_every = 1;
};

struct Trajectory {
    std::vector<double> time;
    std::vector<ParticleSystem> snapshots;
    std::vector<Diagnostics> diagnostics;
};

/// Thrown when forces stop being finite; carries the last finite state.
class IntegrationHalted : public Error {
  public:
    IntegrationHalted(const std::string& what, ParticleSystem last, std::size_t step)
        : Error(what), last_(std::move(last)), step_(step) {}
    const ParticleSystem& last_state() const { return last_; }
    std::size_t step() const { return step_; }

  private:
    ParticleSystem last_;
    std::size_t step_;
};

/// Velocity-Verlet integration under a pairwise or hyperradial potential.
/// Snapshot 0 is the initial state; one snapshot per `record_every` steps
/// and always the final one.
Trajectory integrate_nbody(const ParticleSystem& system, const Potential& potential,
                           const JacobiTree& tree, const IntegratorSettings& settings);

/// Largest deviations from the first snapshot. Relative measures fall back
/// to absolute ones when the reference value is zero (energy) or skip
/// (angular momenta).
struct Drift {
    double energy_rel = 0.0;
    double energy_end_rel = 0.0;  // last snapshot against the first
    double p_cm_abs = 0.0;
    double l_tot_rel = 0.0;
    double lambda_sq_rel = 0.0;
};

Drift measure_drift(const Trajectory& trajectory);

/// 1/2 mu rho_dot^2 + Lambda^2 / (2 mu rho^2) + V(rho).
double radial_energy(double mu, double rho, double rho_dot, double lambda_sq, double v_at_rho);

/// |rho0 - (rho0 . P0_hat) P0_hat|.
double impact_parameter(std::span<const double> rho0, std::span<const double> p0);

/// 2 mu E b^2.
double lambda0_sq(double mu, double energy, double b);

/// Arc length of rho_hat along a polyline of mass-weighted positions, summed
/// as great-circle angles between consecutive unit vectors.
double hyperangular_arc(std::span<const VecN> positions);

}  // namespace hypertree
