#include "hypertree/jacobi.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "hypertree/errors.hpp"
#include "hypertree/sexpr.hpp"

namespace hypertree {

double ParticleSystem::total_mass() const {
    CompensatedSum s;
    for (double m : masses) s.add(m);
    return s.value();
}

void validate(const ParticleSystem& system) {
    const std::size_t n = system.masses.size();
    if (n < 2) throw InvalidInput("a particle system needs at least two bodies");
    for (double m : system.masses) {
        if (!(m > 0.0) || !std::isfinite(m))
            throw InvalidInput("masses must be positive and finite");
    }
    if (system.positions.size() != n || system.velocities.size() != n)
        throw InvalidInput("positions and velocities must have one entry per mass");
}

double nbody_reduced_mass(std::span<const double> masses) {
    if (masses.size() < 2) throw InvalidInput("reduced mass needs at least two masses");
    double prod = 1.0;
    double log_prod = 0.0;
    CompensatedSum sum;
    for (double m : masses) {
        if (!(m > 0.0) || !std::isfinite(m))
            throw InvalidInput("masses must be positive and finite");
        prod *= m;
        log_prod += std::log(m);
        sum.add(m);
    }
    const double exponent = 1.0 / static_cast<double>(masses.size() - 1);
    const double ratio = prod / sum.value();
    if (std::isfinite(ratio) && ratio > std::numeric_limits<double>::min())
        return std::pow(ratio, exponent);
    // Product over/underflowed: fall back to logs.
    return std::exp((log_prod - std::log(sum.value())) * exponent);
}

namespace {

std::string join_indices(const std::vector<int>& leaves, bool wide) {
    std::string out;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        if (wide && i > 0) out.push_back('.');
        out += std::to_string(leaves[i] + 1);
    }
    return out;
}

}  // namespace

std::string JacobiNode::label() const {
    const bool wide = std::any_of(left_leaves.begin(), left_leaves.end(), [](int i) { return i >= 9; }) ||
                      std::any_of(right_leaves.begin(), right_leaves.end(), [](int i) { return i >= 9; });
    return join_indices(left_leaves, wide) + "," + join_indices(right_leaves, wide);
}

class JacobiTreeBuilder {
  public:
    struct Side {
        int child = -1;  // node index, -1 for a physical leaf
        std::vector<int> leaves;
    };

    static JacobiTree sequential(std::size_t n) {
        if (n < 2) throw InvalidInput("a Jacobi tree needs at least two particles");
        std::vector<JacobiNode> nodes;
        nodes.reserve(n - 1);
        std::vector<int> acc{0};
        for (std::size_t j = 1; j < n; ++j) {
            JacobiNode node;
            node.left_leaves = acc;
            node.right_leaves = {static_cast<int>(j)};
            node.left_child = j == 1 ? -1 : static_cast<int>(j - 2);
            if (j >= 2) nodes[j - 2].parent = static_cast<int>(j - 1);
            nodes.push_back(std::move(node));
            acc.push_back(static_cast<int>(j));
        }
        return JacobiTree(std::move(nodes));
    }

    static JacobiTree parse(std::string_view text, std::size_t n) {
        if (n < 2) throw InvalidInput("a Jacobi tree needs at least two particles");
        const SExpr expr = parse_sexpr(text);
        if (expr.is_atom()) throw ParseError("a Jacobi tree needs at least one internal node", expr.position);
        std::vector<JacobiNode> nodes;
        std::vector<bool> seen(n, false);
        build(expr, n, nodes, seen);
        for (std::size_t i = 0; i < n; ++i) {
            if (!seen[i])
                throw ParseError("missing leaf " + std::to_string(i + 1), std::string::npos);
        }
        return JacobiTree(std::move(nodes));
    }

  private:
    static Side build(const SExpr& e, std::size_t n, std::vector<JacobiNode>& nodes,
                      std::vector<bool>& seen) {
        if (e.is_atom()) {
            long value = 0;
            const auto* first = e.atom.data();
            const auto* last = first + e.atom.size();
            auto [ptr, ec] = std::from_chars(first, last, value);
            if (ec != std::errc() || ptr != last)
                throw ParseError("leaf '" + e.atom + "' is not an integer", e.position);
            if (value < 1 || static_cast<std::size_t>(value) > n)
                throw ParseError("leaf " + e.atom + " out of range 1.." + std::to_string(n), e.position);
            if (seen[value - 1]) throw ParseError("duplicate leaf " + e.atom, e.position);
            seen[value - 1] = true;
            return Side{-1, {static_cast<int>(value - 1)}};
        }
        Side l = build(e.children[0], n, nodes, seen);
        Side r = build(e.children[1], n, nodes, seen);
        JacobiNode node;
        node.left_child = l.child;
        node.right_child = r.child;
        node.left_leaves = l.leaves;
        node.right_leaves = r.leaves;
        const int idx = static_cast<int>(nodes.size());
        if (l.child >= 0) nodes[l.child].parent = idx;
        if (r.child >= 0) nodes[r.child].parent = idx;
        nodes.push_back(std::move(node));
        Side out;
        out.child = idx;
        out.leaves = std::move(l.leaves);
        out.leaves.insert(out.leaves.end(), r.leaves.begin(), r.leaves.end());
        return out;
    }
};

JacobiTree JacobiTree::sequential(std::size_t n) { return JacobiTreeBuilder::sequential(n); }

JacobiTree JacobiTree::parse(std::string_view text, std::size_t n) {
    return JacobiTreeBuilder::parse(text, n);
}

std::string JacobiTree::to_string() const {
    std::vector<std::string> text(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& nd = nodes_[i];
        const std::string l =
            nd.left_child >= 0 ? text[nd.left_child] : std::to_string(nd.left_leaves.front() + 1);
        const std::string r =
            nd.right_child >= 0 ? text[nd.right_child] : std::to_string(nd.right_leaves.front() + 1);
        text[i] = "(" + l + " " + r + ")";
    }
    return text.back();
}

std::vector<NodeMass> node_masses(const JacobiTree& tree, std::span<const double> masses) {
    if (masses.size() != tree.particle_count())
        throw InvalidInput("mass count does not match the Jacobi tree");
    std::vector<NodeMass> out;
    out.reserve(tree.node_count());
    for (const auto& nd : tree.nodes()) {
        CompensatedSum l, r;
        for (int i : nd.left_leaves) l.add(masses[i]);
        for (int i : nd.right_leaves) r.add(masses[i]);
        NodeMass nm;
        nm.left = l.value();
        nm.right = r.value();
        nm.reduced = nm.left * nm.right / (nm.left + nm.right);
        out.push_back(nm);
    }
    return out;
}

namespace {

Vec3 centroid(std::span<const int> leaves, std::span<const double> masses, std::span<const Vec3> v,
              double total) {
    CompensatedSum sx, sy, sz;
    for (int i : leaves) {
        sx.add(masses[i] * v[i].x);
        sy.add(masses[i] * v[i].y);
        sz.add(masses[i] * v[i].z);
    }
    return Vec3{sx.value(), sy.value(), sz.value()} / total;
}

std::vector<int> all_leaves(const JacobiTree& tree) {
    const auto& root = tree.node(tree.root());
    std::vector<int> out = root.left_leaves;
    out.insert(out.end(), root.right_leaves.begin(), root.right_leaves.end());
    return out;
}

}  // namespace

JacobiCoordinates to_jacobi(const ParticleSystem& system, const JacobiTree& tree) {
    validate(system);
    if (system.size() != tree.particle_count())
        throw InvalidInput("particle count does not match the Jacobi tree");
    const auto nm = node_masses(tree, system.masses);
    JacobiCoordinates out;
    out.rho.reserve(tree.node_count());
    out.rho_dot.reserve(tree.node_count());
    for (std::size_t k = 0; k < tree.node_count(); ++k) {
        const auto& nd = tree.node(k);
        out.rho.push_back(centroid(nd.right_leaves, system.masses, system.positions, nm[k].right) -
                          centroid(nd.left_leaves, system.masses, system.positions, nm[k].left));
        out.rho_dot.push_back(
            centroid(nd.right_leaves, system.masses, system.velocities, nm[k].right) -
            centroid(nd.left_leaves, system.masses, system.velocities, nm[k].left));
    }
    const auto leaves = all_leaves(tree);
    const double total = nm.back().left + nm.back().right;
    out.r_cm = centroid(leaves, system.masses, system.positions, total);
    out.v_cm = centroid(leaves, system.masses, system.velocities, total);
    return out;
}

ParticleSystem from_jacobi(const JacobiCoordinates& coords, const JacobiTree& tree,
                           std::span<const double> masses) {
    const std::size_t nodes = tree.node_count();
    if (coords.rho.size() != nodes || coords.rho_dot.size() != nodes)
        throw InvalidInput("Jacobi coordinate count does not match the tree");
    const auto nm = node_masses(tree, masses);

    // Walk root to leaves: a node's centroid C splits into
    // R_L = C - (M_R/M) rho and R_R = C + (M_L/M) rho.
    std::vector<Vec3> cpos(nodes), cvel(nodes);
    ParticleSystem out;
    out.masses.assign(masses.begin(), masses.end());
    out.positions.resize(masses.size());
    out.velocities.resize(masses.size());
    cpos[tree.root()] = coords.r_cm;
    cvel[tree.root()] = coords.v_cm;
    for (std::size_t k = nodes; k-- > 0;) {
        const auto& nd = tree.node(k);
        const double total = nm[k].left + nm[k].right;
        const double wl = nm[k].right / total;
        const double wr = nm[k].left / total;
        const Vec3 lp = cpos[k] - wl * coords.rho[k];
        const Vec3 lv = cvel[k] - wl * coords.rho_dot[k];
        const Vec3 rp = cpos[k] + wr * coords.rho[k];
        const Vec3 rv = cvel[k] + wr * coords.rho_dot[k];
        if (nd.left_child >= 0) {
            cpos[nd.left_child] = lp;
            cvel[nd.left_child] = lv;
        } else {
            out.positions[nd.left_leaves.front()] = lp;
            out.velocities[nd.left_leaves.front()] = lv;
        }
        if (nd.right_child >= 0) {
            cpos[nd.right_child] = rp;
            cvel[nd.right_child] = rv;
        } else {
            out.positions[nd.right_leaves.front()] = rp;
            out.velocities[nd.right_leaves.front()] = rv;
        }
    }
    return out;
}

MassWeightedVector mass_weight(const JacobiCoordinates& coords, const JacobiTree& tree,
                               std::span<const double> masses) {
    const std::size_t nodes = tree.node_count();
    if (coords.rho.size() != nodes || coords.rho_dot.size() != nodes)
        throw InvalidInput("Jacobi coordinate count does not match the tree");
    const auto nm = node_masses(tree, masses);
    MassWeightedVector out;
    out.mu = nbody_reduced_mass(masses);
    out.rho_vec.resize(3 * nodes);
    out.vel_vec.resize(3 * nodes);
    for (std::size_t k = 0; k < nodes; ++k) {
        const double s = std::sqrt(nm[k].reduced / out.mu);
        for (std::size_t c = 0; c < 3; ++c) {
            out.rho_vec[3 * k + c] = s * coords.rho[k][c];
            out.vel_vec[3 * k + c] = s * coords.rho_dot[k][c];
        }
    }
    return out;
}

JacobiCoordinates unweight(const MassWeightedVector& mw, const JacobiTree& tree,
                           std::span<const double> masses, const Vec3& r_cm, const Vec3& v_cm) {
    const std::size_t nodes = tree.node_count();
    if (mw.rho_vec.size() != 3 * nodes || mw.vel_vec.size() != 3 * nodes)
        throw InvalidInput("mass-weighted vector dimension must be 3(N-1)");
    const auto nm = node_masses(tree, masses);
    const double mu = nbody_reduced_mass(masses);
    JacobiCoordinates out;
    out.rho.resize(nodes);
    out.rho_dot.resize(nodes);
    out.r_cm = r_cm;
    out.v_cm = v_cm;
    for (std::size_t k = 0; k < nodes; ++k) {
        const double s = std::sqrt(mu / nm[k].reduced);
        for (std::size_t c = 0; c < 3; ++c) {
            out.rho[k][c] = s * mw.rho_vec[3 * k + c];
            out.rho_dot[k][c] = s * mw.vel_vec[3 * k + c];
        }
    }
    return out;
}

MassWeightedVector to_mass_weighted(const ParticleSystem& system, const JacobiTree& tree) {
    return mass_weight(to_jacobi(system, tree), tree, system.masses);
}

}  // namespace hypertree
