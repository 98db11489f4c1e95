#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hypertree/vec3.hpp"

namespace hypertree {

/// Masses, lab-frame positions and velocities of N physical bodies.
struct ParticleSystem {
    std::vector<double> masses;
    std::vector<Vec3> positions;
    std::vector<Vec3> velocities;

    std::size_t size() const { return masses.size(); }
    double total_mass() const;
};

/// Throws InvalidInput unless N >= 2, all masses are positive and finite and
/// positions/velocities have exactly N entries.
void validate(const ParticleSystem& system);

/// (prod m_i / sum m_i)^(1/(N-1)).
double nbody_reduced_mass(std::span<const double> masses);

/// One internal node of a Jacobi tree. Leaf sets hold 0-based particle
/// indices; a child index is the post-order index of the child node, or -1
/// when that side is a single physical particle.
struct JacobiNode {
    std::vector<int> left_leaves;
    std::vector<int> right_leaves;
    int left_child = -1;
    int right_child = -1;
    int parent = -1;

    /// Conventional name built from 1-based particle indices, e.g. "12,3".
    std::string label() const;
};

/// Binary tree over particles 1..N. Internal nodes are virtual bodies and are
/// stored in post-order (left subtree, right subtree, node), which fixes the
/// stacking order of the Jacobi vectors. The tree holds topology only; masses
/// are supplied per call.
class JacobiTree {
  public:
    /// Caterpillar tree ((...((1 2) 3) ...) n).
    static JacobiTree sequential(std::size_t n);

    /// Parses `tree := INT | '(' tree tree ')'`, whitespace-insensitive.
    /// Leaf set must be exactly {1..n}.
    static JacobiTree parse(std::string_view text, std::size_t n);

    std::size_t particle_count() const { return nodes_.size() + 1; }
    std::size_t node_count() const { return nodes_.size(); }
    std::span<const JacobiNode> nodes() const { return nodes_; }
    const JacobiNode& node(std::size_t i) const { return nodes_.at(i); }
    std::size_t root() const { return nodes_.size() - 1; }

    /// Canonical s-expression, e.g. "((1 2) (3 4))".
    std::string to_string() const;

  private:
    explicit JacobiTree(std::vector<JacobiNode> nodes) : nodes_(std::move(nodes)) {}
    friend class JacobiTreeBuilder;

    std::vector<JacobiNode> nodes_;
};

/// Per-node masses M_L, M_R and the node reduced mass M_L M_R / (M_L + M_R).
struct NodeMass {
    double left = 0.0;
    double right = 0.0;
    double reduced = 0.0;
};

std::vector<NodeMass> node_masses(const JacobiTree& tree, std::span<const double> masses);

/// Unweighted Jacobi vectors rho_{L,R} = R_R - R_L in tree node order.
struct JacobiCoordinates {
    std::vector<Vec3> rho;
    std::vector<Vec3> rho_dot;
    Vec3 r_cm;
    Vec3 v_cm;
};

/// Stacked mass-weighted Jacobi vectors. Node i occupies components
/// [3i, 3i+3) in (x, y, z) order.
struct MassWeightedVector {
    double mu = 0.0;
    VecN rho_vec;
    VecN vel_vec;
};

JacobiCoordinates to_jacobi(const ParticleSystem& system, const JacobiTree& tree);

ParticleSystem from_jacobi(const JacobiCoordinates& coords, const JacobiTree& tree,
                           std::span<const double> masses);

MassWeightedVector mass_weight(const JacobiCoordinates& coords, const JacobiTree& tree,
                               std::span<const double> masses);

/// Inverse of mass_weight; the centre-of-mass part is taken from the arguments.
JacobiCoordinates unweight(const MassWeightedVector& mw, const JacobiTree& tree,
                           std::span<const double> masses, const Vec3& r_cm = {},
                           const Vec3& v_cm = {});

/// Lab state to mass-weighted vector (composition of to_jacobi and mass_weight).
MassWeightedVector to_mass_weighted(const ParticleSystem& system, const JacobiTree& tree);

}  // namespace hypertree
