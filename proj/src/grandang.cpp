#include "hypertree/grandang.hpp"

#include <cmath>
#include <limits>

#include "hypertree/errors.hpp"

namespace hypertree {

LambdaTensor::LambdaTensor(std::span<const double> rho, std::span<const double> momentum)
    : dim_(rho.size()), data_(rho.size() * rho.size(), 0.0) {
    if (rho.size() != momentum.size())
        throw InvalidInput("position and momentum dimensions differ");
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = i + 1; j < dim_; ++j) {
            const double v = rho[i] * momentum[j] - rho[j] * momentum[i];
            data_[i * dim_ + j] = v;
            data_[j * dim_ + i] = -v;
        }
    }
}

LambdaTensor lambda_tensor(std::span<const double> rho, std::span<const double> momentum) {
    return LambdaTensor(rho, momentum);
}

double lambda_sq(const LambdaTensor& tensor) {
    CompensatedSum s;
    const std::size_t d = tensor.dimension();
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) s.add(tensor(i, j) * tensor(i, j));
    return s.value();
}

double lambda_sq_lagrange(std::span<const double> rho, std::span<const double> momentum) {
    if (rho.size() != momentum.size())
        throw InvalidInput("position and momentum dimensions differ");
    const double rr = dot(rho, rho);
    const double pp = dot(momentum, momentum);
    const double rp = dot(rho, momentum);
    return std::max(0.0, rr * pp - rp * rp);
}

double lambda_sq_hyperspherical(double mu, double rho, double kinetic_val) {
    const double r2 = rho * rho;
    return mu * mu * r2 * r2 * kinetic_val;
}

double fork_L_sq(double mu, double rho, double theta, double theta_dot, double phi_dot) {
    const double r2 = rho * rho;
    const double st = std::sin(theta);
    return mu * mu * r2 * r2 * (theta_dot * theta_dot + phi_dot * phi_dot * st * st);
}

double node_L_sq(double mu, double rho_left, double rho_right, double rho_left_dot,
                 double rho_right_dot) {
    const double w = rho_right_dot * rho_left - rho_right * rho_left_dot;
    return mu * mu * w * w;
}

const char* to_string(Contribution::Kind k) { return k == Contribution::Kind::fork ? "fork" : "node"; }

Decomposition decompose(const HypersphericalTree& ftree, const HyperState& state, double mu) {
    if (!ftree.is_fork_tree())
        throw InvalidInput("decompose needs a tree built by fork_tree");
    if (state.angle_rates.size() != ftree.angle_count())
        throw InvalidInput("decompose needs a state with angle rates");
    const SubNorms sub = sub_norms(ftree, state);

    // Scale of one node: prod over ancestors of csc^2 (entered from the right)
    // and sec^2 (entered from the left).
    auto scale_of = [&](int idx, std::vector<std::string>& factors) {
        double denom = 1.0;
        int cur = idx;
        while (ftree.node(cur).parent >= 0) {
            const auto& nd = ftree.node(cur);
            const double a = state.angles[nd.parent];
            const double f = nd.is_left_child ? std::cos(a) : std::sin(a);
            denom *= f * f;
            factors.push_back(std::string(nd.is_left_child ? "sec²" : "csc²") + ftree.node(nd.parent).name);
            cur = nd.parent;
        }
        return denom;
    };

    Decomposition out;
    std::vector<Contribution> forks(ftree.fork_count());
    std::vector<Contribution> joins;
    for (std::size_t i = 0; i < ftree.angle_count(); ++i) {
        const auto& nd = ftree.node(i);
        Contribution c;
        if (nd.role == AngleRole::fork_theta) {
            c.kind = Contribution::Kind::fork;
            c.label = std::to_string(nd.body + 1);
            c.L_sq = fork_L_sq(mu, sub.norm[i], state.angles[i], state.angle_rates[i],
                               state.angle_rates[nd.right.index]);
        } else if (nd.role == AngleRole::join) {
            c.kind = Contribution::Kind::node;
            c.label = nd.name;
            c.L_sq = node_L_sq(mu, sub.norm[nd.left.index], sub.norm[nd.right.index],
                               sub.rate[nd.left.index], sub.rate[nd.right.index]);
        } else {
            continue;
        }
        const double denom = scale_of(static_cast<int>(i), c.factors);
        const double scale = 1.0 / denom;
        if (denom == 0.0 || !std::isfinite(scale)) {
            c.scale = std::numeric_limits<double>::infinity();
            if (c.L_sq >= 1e-300)
                throw DegenerateState("contribution " + c.label +
                                      " has a singular csc/sec scale with nonzero angular momentum");
            c.product = 0.0;
        } else {
            c.scale = scale;
            c.product = c.L_sq * scale;
        }
        if (c.kind == Contribution::Kind::fork) forks[nd.body] = std::move(c);
        else joins.push_back(std::move(c));
    }
    // Joins from the root down, then forks by body number.
    CompensatedSum total;
    for (auto it = joins.rbegin(); it != joins.rend(); ++it) {
        auto& c = *it;
        total.add(c.product);
        out.contributions.push_back(std::move(c));
    }
    for (auto& c : forks) {
        total.add(c.product);
        out.contributions.push_back(std::move(c));
    }
    out.total = total.value();
    return out;
}

Vec3 unweighted_fork_L(const ParticleSystem& system, const JacobiTree& jtree, std::size_t node) {
    if (node >= jtree.node_count()) throw InvalidInput("Jacobi node index out of range");
    const JacobiCoordinates jc = to_jacobi(system, jtree);
    const auto nm = node_masses(jtree, system.masses);
    return nm[node].reduced * cross(jc.rho[node], jc.rho_dot[node]);
}

StateAnalysis analyze(const ParticleSystem& system, const JacobiTree& jtree) {
    StateAnalysis a{to_mass_weighted(system, jtree), fork_tree(jtree), {}, 0.0, 0.0, 0.0, {}};
    VecN momentum = a.mw.vel_vec;
    for (double& p : momentum) p *= a.mw.mu;
    a.lambda_sq_tensor = lambda_sq_lagrange(a.mw.rho_vec, momentum);
    a.state = angle_rates_from_velocity(a.ftree, from_cartesian(a.ftree, a.mw.rho_vec), a.mw.vel_vec);
    a.kinetic = kinetic_value(a.ftree, a.state);
    a.lambda_sq_hyper = lambda_sq_hyperspherical(a.mw.mu, a.state.rho, a.kinetic);
    a.decomposition = decompose(a.ftree, a.state, a.mw.mu);
    return a;
}

}  // namespace hypertree
