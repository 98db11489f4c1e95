#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hypertree/jacobi.hpp"

namespace hypertree {

/// Scalar function of a distance (pair separation or hyperradius) with its
/// derivative.
struct RadialFunction {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

namespace radial {
RadialFunction zero();
RadialFunction constant(double c);
/// k / r
RadialFunction coulomb(double k);
/// c / r^2
RadialFunction inverse_square(double c);
/// k/2 (r - r0)^2
RadialFunction harmonic(double k, double r0 = 0.0);
/// 4 eps ((s/r)^12 - (s/r)^6)
RadialFunction lennard_jones(double epsilon, double sigma);
}  // namespace radial

/// Monte Carlo estimate of the hyperangular average of a pair potential.
struct AverageEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
    std::size_t rejected = 0;
};

/// Interaction potential in one of three forms:
///   pairwise     sum over pairs f(|r_i - r_j|)
///   hyperradial  g(rho) of the mass-weighted hyperradius
///   averaged     a pair potential averaged over a fixed set of directions on
///                the (3N-4)-sphere, giving a smooth V_eff(rho)
class Potential {
  public:
    enum class Kind { pairwise, hyperradial, averaged };

    static Potential pairwise(RadialFunction f);
    static Potential hyperradial(RadialFunction g);
    static Potential averaged(RadialFunction pair, const JacobiTree& tree,
                              std::vector<double> masses, std::size_t n_samples,
                              std::uint64_t seed);

    Kind kind() const { return kind_; }
    const RadialFunction& function() const { return fn_; }
    std::string describe() const;

    /// Lab-frame energy and forces. Not available for the averaged form.
    double energy(const ParticleSystem& system) const;
    void forces(const ParticleSystem& system, std::vector<Vec3>& out) const;

    /// V(rho) and dV/drho. Not available for the pairwise form.
    double of_rho(double rho) const;
    double derivative_of_rho(double rho) const;

    /// Sampling statistics of the averaged form (empty otherwise).
    AverageEstimate average_at(double rho) const;

  private:
    struct Averaged;
    Potential(Kind kind, RadialFunction fn) : kind_(kind), fn_(std::move(fn)) {}

    Kind kind_;
    RadialFunction fn_;
    std::shared_ptr<const Averaged> avg_;
};

/// Pair separations of a unit-hyperradius configuration drawn uniformly on
/// the (3N-4)-sphere (normalised standard normals in mass-weighted space).
std::vector<double> sample_unit_pair_distances(const JacobiTree& tree,
                                               std::span<const double> masses,
                                               std::mt19937_64& rng);

/// V_eff(rho): mean of the summed pair potential over n_samples uniform
/// directions at hyperradius rho. Samples where the potential is not finite
/// are redrawn; more than 10 * n_samples redraws is an error.
AverageEstimate effective_potential(const RadialFunction& pair, const JacobiTree& tree,
                                    std::span<const double> masses, double rho,
                                    std::size_t n_samples, std::uint64_t seed);

}  // namespace hypertree
