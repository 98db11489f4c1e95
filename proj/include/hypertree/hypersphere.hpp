#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hypertree/jacobi.hpp"
#include "hypertree/vec3.hpp"

namespace hypertree {

/// Allowed interval of a hyperangle.
///   full      both branches are bare leaves          [0, 2pi)
///   polar     exactly one branch carries more nodes  [0, pi] when the bare
///             leaf is on the left, [-pi/2, pi/2] when it is on the right
///   quadrant  both branches carry more nodes         [0, pi/2]
enum class RangeClass { full, polar, quadrant };

/// What an angle node means in a tree built by fork_tree().
enum class AngleRole { generic, fork_theta, fork_phi, join };

const char* to_string(RangeClass r);
const char* to_string(AngleRole r);

/// Reference to a child of an angle node: a Cartesian component (leaf) or
/// another angle node (by post-order index).
struct ChildRef {
    bool is_leaf = true;
    int index = 0;
};

struct AngleNode {
    ChildRef left;
    ChildRef right;
    int parent = -1;
    bool is_left_child = false;  // side of the parent this node hangs from
    RangeClass range = RangeClass::full;
    AngleRole role = AngleRole::generic;
    int body = -1;      // virtual body (0-based Jacobi node index) for fork nodes
    std::string name;   // e.g. "γ3", "θ2", "φ2", "γ_{2,1}"

    double lower() const;
    double upper() const;
};

/// Binary tree over the D components of a mass-weighted vector. Its D-1
/// internal nodes are hyperangles stored in post-order (root last). A left
/// edge into node g contributes cos(g), a right edge sin(g).
class HypersphericalTree {
  public:
    /// Linear chain: component D is the left leaf of the root, components 2
    /// and 1 hang from the deepest angle; yields the usual nested sines.
    static HypersphericalTree caterpillar(std::size_t dim);

    /// Parses the s-expression grammar with component labels as leaves:
    /// "k" / "rk" for component k, or "rkx" / "rky" / "rkz" for component
    /// 3(k-1)+{0,1,2}. Labels must cover 1..D exactly once.
    static HypersphericalTree parse(std::string_view text);

    /// Uniformly random shape with a random leaf permutation (test support).
    static HypersphericalTree random(std::size_t dim, std::mt19937_64& rng);

    std::size_t dimension() const { return labels_.size(); }
    std::size_t angle_count() const { return nodes_.size(); }
    std::span<const AngleNode> nodes() const { return nodes_; }
    const AngleNode& node(std::size_t i) const { return nodes_.at(i); }
    std::size_t root() const { return nodes_.size() - 1; }
    const std::string& component_label(std::size_t k) const { return labels_.at(k); }

    /// True for trees produced by fork_tree().
    bool is_fork_tree() const { return fork_bodies_ > 0; }
    std::size_t fork_count() const { return fork_bodies_; }

    std::string to_string() const;

  private:
    friend class HyperTreeBuilder;
    HypersphericalTree() = default;

    std::vector<AngleNode> nodes_;
    std::vector<std::string> labels_;
    std::size_t fork_bodies_ = 0;
};

/// Hyperspherical tree obtained by dropping the physical leaves of a Jacobi
/// tree and attaching a spherical fork (z = cos th, x = sin th cos ph,
/// y = sin th sin ph) to every virtual body. A body with one virtual child
/// joins as (own fork, child subtree); a body with two joins as
/// ((left subtree, right subtree), own fork).
HypersphericalTree fork_tree(const JacobiTree& jtree);

/// Hyperradius, angles in post-order, and optionally their time derivatives.
struct HyperState {
    double rho = 0.0;
    VecN angles;
    double rho_dot = 0.0;
    VecN angle_rates;
    /// Angles whose node had zero combined sub-norm and were set to 0.
    std::vector<bool> degenerate;

    bool has_rates() const { return !angle_rates.empty() || angles.empty(); }
};

VecN to_cartesian(const HypersphericalTree& tree, const HyperState& state);

/// Total inverse of to_cartesian. Degenerate angles default to 0 and are flagged.
HyperState from_cartesian(const HypersphericalTree& tree, std::span<const double> v);

/// Fills rho_dot and angle_rates of `state` for Cartesian velocity `vel` by
/// differentiating the sub-norms up the tree. Throws DegenerateState when
/// rho = 0, or when a zero sub-norm carries a nonzero velocity.
HyperState angle_rates_from_velocity(const HypersphericalTree& tree, const HyperState& state,
                                     std::span<const double> vel);

/// Ancestors of one angle: entered from the right (sin factors) and from the
/// left (cos factors), each listed from the nearest ancestor to the root.
struct AngleFactor {
    std::vector<int> alpha;
    std::vector<int> beta;
};

std::vector<AngleFactor> kinetic_factors(const HypersphericalTree& tree);

/// d/dt(rho_hat) . d/dt(rho_hat) as the sum over angles of
/// rate^2 * prod sin^2(alpha) * prod cos^2(beta).
double kinetic_value(const HypersphericalTree& tree, const HyperState& state);

/// Sub-norms of every angle node's subtree and their time derivatives,
/// propagated from the root. Index = angle index.
struct SubNorms {
    VecN norm;
    VecN rate;
};

SubNorms sub_norms(const HypersphericalTree& tree, const HyperState& state);

/// Cartesian velocity from rho_dot and angle rates (inverse of
/// angle_rates_from_velocity).
VecN velocity_from_rates(const HypersphericalTree& tree, const HyperState& state);

}  // namespace hypertree
