#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hypertree/hypersphere.hpp"
#include "hypertree/jacobi.hpp"

namespace hypertree {

/// Antisymmetric D x D tensor Lambda_ij = rho_i P_j - rho_j P_i, row-major.
class LambdaTensor {
  public:
    LambdaTensor(std::span<const double> rho, std::span<const double> momentum);

    std::size_t dimension() const { return dim_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

  private:
    std::size_t dim_;
    std::vector<double> data_;
};

LambdaTensor lambda_tensor(std::span<const double> rho, std::span<const double> momentum);

/// 1/2 sum_ij Lambda_ij^2 over the explicit tensor.
double lambda_sq(const LambdaTensor& tensor);

/// |rho|^2 |P|^2 - (rho.P)^2, the O(D) form used for diagnostics.
double lambda_sq_lagrange(std::span<const double> rho, std::span<const double> momentum);

/// mu^2 rho^4 (d rho_hat/dt)^2.
double lambda_sq_hyperspherical(double mu, double rho, double kinetic_val);

/// mu^2 rho^4 (theta_dot^2 + phi_dot^2 sin^2 theta) for one spherical fork.
double fork_L_sq(double mu, double rho, double theta, double theta_dot, double phi_dot);

/// mu^2 (rhoR_dot rhoL - rhoR rhoL_dot)^2 for a join node.
double node_L_sq(double mu, double rho_left, double rho_right, double rho_left_dot,
                 double rho_right_dot);

struct Contribution {
    enum class Kind { fork, node };
    Kind kind = Kind::fork;
    std::string label;   // virtual body number for forks, join name for nodes
    double L_sq = 0.0;
    double scale = 1.0;  // prod csc^2 * prod sec^2 over ancestors; +inf when singular
    double product = 0.0;
    std::vector<std::string> factors;  // e.g. {"csc²γ_{2,1}"}
};

const char* to_string(Contribution::Kind k);

struct Decomposition {
    std::vector<Contribution> contributions;
    double total = 0.0;
};

/// Splits Lambda^2 into N-1 fork and N-2 join contributions. `state` must
/// carry rates. Throws DegenerateState when a singular csc/sec scale meets a
/// nonzero L^2 (an L^2 below 1e-300 contributes 0).
Decomposition decompose(const HypersphericalTree& ftree, const HyperState& state, double mu);

/// mu_node * rho x rho_dot for Jacobi node `node` in unweighted coordinates.
Vec3 unweighted_fork_L(const ParticleSystem& system, const JacobiTree& jtree, std::size_t node);

/// Everything computed from one lab-frame state and Jacobi tree.
struct StateAnalysis {
    MassWeightedVector mw;
    HypersphericalTree ftree;
    HyperState state;      // with rates
    double lambda_sq_tensor = 0.0;
    double lambda_sq_hyper = 0.0;
    double kinetic = 0.0;
    Decomposition decomposition;
};

/// Runs the full chain lab -> Jacobi -> mass-weighted -> fork tree -> rates
/// -> Lambda^2 (both routes) -> decomposition.
StateAnalysis analyze(const ParticleSystem& system, const JacobiTree& jtree);

}  // namespace hypertree
