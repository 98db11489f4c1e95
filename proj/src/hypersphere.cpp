#include "hypertree/hypersphere.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>

#include "hypertree/errors.hpp"
#include "hypertree/sexpr.hpp"

namespace hypertree {

const char* to_string(RangeClass r) {
    switch (r) {
        case RangeClass::full: return "full";
        case RangeClass::polar: return "polar";
        case RangeClass::quadrant: return "quadrant";
    }
    return "?";
}

const char* to_string(AngleRole r) {
    switch (r) {
        case AngleRole::generic: return "generic";
        case AngleRole::fork_theta: return "fork_theta";
        case AngleRole::fork_phi: return "fork_phi";
        case AngleRole::join: return "join";
    }
    return "?";
}

double AngleNode::lower() const {
    if (range == RangeClass::polar && !left.is_leaf) return -std::numbers::pi / 2;
    return 0.0;
}

double AngleNode::upper() const {
    switch (range) {
        case RangeClass::full: return 2 * std::numbers::pi;
        case RangeClass::polar: return left.is_leaf ? std::numbers::pi : std::numbers::pi / 2;
        case RangeClass::quadrant: return std::numbers::pi / 2;
    }
    return 0.0;
}

class HyperTreeBuilder {
  public:
    struct Raw {
        int component = -1;
        std::unique_ptr<Raw> l, r;
        AngleRole role = AngleRole::generic;
        int body = -1;
        std::string name;

        bool is_leaf() const { return component >= 0; }
    };

    static std::unique_ptr<Raw> leaf(int component) {
        auto n = std::make_unique<Raw>();
        n->component = component;
        return n;
    }

    static std::unique_ptr<Raw> join(std::unique_ptr<Raw> l, std::unique_ptr<Raw> r) {
        auto n = std::make_unique<Raw>();
        n->l = std::move(l);
        n->r = std::move(r);
        return n;
    }

    static HypersphericalTree finalize(const Raw& root, std::vector<std::string> labels,
                                       std::size_t fork_bodies) {
        HypersphericalTree t;
        t.labels_ = std::move(labels);
        t.fork_bodies_ = fork_bodies;
        if (root.is_leaf()) throw InvalidInput("a hyperspherical tree needs at least two leaves");
        number(root, t.nodes_);
        t.nodes_.back().parent = -1;
        std::size_t generic = 0;
        for (auto& nd : t.nodes_) {
            ++generic;
            if (nd.name.empty()) nd.name = "γ" + std::to_string(generic);
        }
        return t;
    }

    static HypersphericalTree caterpillar(std::size_t dim) {
        if (dim < 2) throw InvalidInput("hyperspherical trees need dimension >= 2");
        auto sub = join(leaf(1), leaf(0));
        for (std::size_t k = 2; k < dim; ++k) sub = join(leaf(static_cast<int>(k)), std::move(sub));
        std::vector<std::string> labels;
        for (std::size_t k = 0; k < dim; ++k) labels.push_back("r" + std::to_string(k + 1));
        return finalize(*sub, std::move(labels), 0);
    }

    static HypersphericalTree parse(std::string_view text) {
        const SExpr expr = parse_sexpr(text);
        std::vector<std::pair<int, std::size_t>> seen;
        auto raw = from_sexpr(expr, seen);
        const std::size_t dim = seen.size();
        std::vector<bool> used(dim, false);
        for (auto [c, pos] : seen) {
            if (c < 0 || static_cast<std::size_t>(c) >= dim)
                throw ParseError("component label out of range 1.." + std::to_string(dim), pos);
            if (used[c]) throw ParseError("duplicate component label", pos);
            used[c] = true;
        }
        std::vector<std::string> labels(dim);
        for (const auto& [c, pos] : seen) labels[c] = expr_atom_at(expr, pos);
        return finalize(*raw, std::move(labels), 0);
    }

    static HypersphericalTree random(std::size_t dim, std::mt19937_64& rng) {
        if (dim < 2) throw InvalidInput("hyperspherical trees need dimension >= 2");
        std::vector<int> comps(dim);
        std::iota(comps.begin(), comps.end(), 0);
        std::shuffle(comps.begin(), comps.end(), rng);
        auto raw = random_split(comps, rng);
        std::vector<std::string> labels;
        for (std::size_t k = 0; k < dim; ++k) labels.push_back("r" + std::to_string(k + 1));
        return finalize(*raw, std::move(labels), 0);
    }

    static HypersphericalTree forks(const JacobiTree& jt) {
        std::vector<std::string> labels(3 * jt.node_count());
        const char axes[3] = {'x', 'y', 'z'};
        for (std::size_t b = 0; b < jt.node_count(); ++b)
            for (int c = 0; c < 3; ++c) labels[3 * b + c] = "r" + std::to_string(b + 1) + axes[c];
        std::vector<int> bodies;
        auto raw = fork_subtree(jt, jt.root(), bodies);
        return finalize(*raw, std::move(labels), jt.node_count());
    }

  private:
    static std::string expr_atom_at(const SExpr& e, std::size_t pos) {
        if (e.is_atom()) return e.position == pos ? e.atom : std::string();
        std::string l = expr_atom_at(e.children[0], pos);
        return l.empty() ? expr_atom_at(e.children[1], pos) : l;
    }

    static std::unique_ptr<Raw> fork(int body) {
        auto phi = join(leaf(3 * body + 0), leaf(3 * body + 1));
        phi->role = AngleRole::fork_phi;
        phi->body = body;
        phi->name = "φ" + std::to_string(body + 1);
        auto theta = join(leaf(3 * body + 2), std::move(phi));
        theta->role = AngleRole::fork_theta;
        theta->body = body;
        theta->name = "θ" + std::to_string(body + 1);
        return theta;
    }

    static std::string body_list(std::span<const int> bodies) {
        const bool wide = std::any_of(bodies.begin(), bodies.end(), [](int b) { return b >= 9; });
        std::string out;
        for (std::size_t i = 0; i < bodies.size(); ++i) {
            if (wide && i > 0) out.push_back('.');
            out += std::to_string(bodies[i] + 1);
        }
        return out;
    }

    static std::unique_ptr<Raw> make_join(std::unique_ptr<Raw> l, std::vector<int> lb,
                                          std::unique_ptr<Raw> r, std::vector<int> rb,
                                          std::vector<int>& bodies) {
        auto n = join(std::move(l), std::move(r));
        n->role = AngleRole::join;
        n->name = "γ_{" + body_list(lb) + "," + body_list(rb) + "}";
        bodies = std::move(lb);
        bodies.insert(bodies.end(), rb.begin(), rb.end());
        return n;
    }

    static std::unique_ptr<Raw> fork_subtree(const JacobiTree& jt, std::size_t k,
                                             std::vector<int>& bodies) {
        const auto& nd = jt.node(k);
        const int body = static_cast<int>(k);
        std::vector<int> own{body};
        if (nd.left_child < 0 && nd.right_child < 0) {
            bodies = own;
            return fork(body);
        }
        if (nd.left_child >= 0 && nd.right_child >= 0) {
            std::vector<int> lb, rb, inner;
            auto l = fork_subtree(jt, nd.left_child, lb);
            auto r = fork_subtree(jt, nd.right_child, rb);
            auto in = make_join(std::move(l), std::move(lb), std::move(r), std::move(rb), inner);
            return make_join(std::move(in), std::move(inner), fork(body), std::move(own), bodies);
        }
        const int child = nd.left_child >= 0 ? nd.left_child : nd.right_child;
        std::vector<int> cb;
        auto sub = fork_subtree(jt, child, cb);
        return make_join(fork(body), std::move(own), std::move(sub), std::move(cb), bodies);
    }

    static int number(const Raw& r, std::vector<AngleNode>& out) {
        AngleNode nd;
        nd.role = r.role;
        nd.body = r.body;
        nd.name = r.name;
        int li = -1, ri = -1;
        if (r.l->is_leaf()) nd.left = {true, r.l->component};
        else nd.left = {false, li = number(*r.l, out)};
        if (r.r->is_leaf()) nd.right = {true, r.r->component};
        else nd.right = {false, ri = number(*r.r, out)};
        const int leaves = int(nd.left.is_leaf) + int(nd.right.is_leaf);
        nd.range = leaves == 2 ? RangeClass::full : (leaves == 1 ? RangeClass::polar : RangeClass::quadrant);
        const int idx = static_cast<int>(out.size());
        if (li >= 0) {
            out[li].parent = idx;
            out[li].is_left_child = true;
        }
        if (ri >= 0) {
            out[ri].parent = idx;
            out[ri].is_left_child = false;
        }
        out.push_back(std::move(nd));
        return idx;
    }

    static int component_of(const SExpr& e) {
        std::string_view a = e.atom;
        int axis = -1;
        if (!a.empty() && (a.front() == 'r' || a.front() == 'R')) {
            a.remove_prefix(1);
            if (!a.empty() && (a.back() == 'x' || a.back() == 'y' || a.back() == 'z')) {
                axis = a.back() - 'x';
                a.remove_suffix(1);
            }
        }
        int k = 0;
        auto [ptr, ec] = std::from_chars(a.data(), a.data() + a.size(), k);
        if (a.empty() || ec != std::errc() || ptr != a.data() + a.size() || k < 1)
            throw ParseError("bad component label '" + e.atom + "'", e.position);
        return axis < 0 ? k - 1 : 3 * (k - 1) + axis;
    }

    static std::unique_ptr<Raw> from_sexpr(const SExpr& e, std::vector<std::pair<int, std::size_t>>& seen) {
        if (e.is_atom()) {
            const int c = component_of(e);
            seen.emplace_back(c, e.position);
            return leaf(c);
        }
        auto l = from_sexpr(e.children[0], seen);
        auto r = from_sexpr(e.children[1], seen);
        return join(std::move(l), std::move(r));
    }

    static std::unique_ptr<Raw> random_split(std::span<const int> comps, std::mt19937_64& rng) {
        if (comps.size() == 1) return leaf(comps.front());
        std::uniform_int_distribution<std::size_t> cut(1, comps.size() - 1);
        const std::size_t c = cut(rng);
        auto l = random_split(comps.subspan(0, c), rng);
        auto r = random_split(comps.subspan(c), rng);
        return join(std::move(l), std::move(r));
    }
};

HypersphericalTree HypersphericalTree::caterpillar(std::size_t dim) {
    return HyperTreeBuilder::caterpillar(dim);
}

HypersphericalTree HypersphericalTree::parse(std::string_view text) {
    return HyperTreeBuilder::parse(text);
}

HypersphericalTree HypersphericalTree::random(std::size_t dim, std::mt19937_64& rng) {
    return HyperTreeBuilder::random(dim, rng);
}

HypersphericalTree fork_tree(const JacobiTree& jtree) { return HyperTreeBuilder::forks(jtree); }

std::string HypersphericalTree::to_string() const {
    std::vector<std::string> text(nodes_.size());
    auto child = [&](const ChildRef& c) { return c.is_leaf ? labels_[c.index] : text[c.index]; };
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        text[i] = "(" + child(nodes_[i].left) + " " + child(nodes_[i].right) + ")";
    return text.back();
}

namespace {

void check_state(const HypersphericalTree& tree, const HyperState& state) {
    if (state.angles.size() != tree.angle_count())
        throw InvalidInput("angle count does not match the hyperspherical tree");
}

// Bottom-up sub-norms and left/right child values of every angle node.
struct Values {
    VecN norm;   // combined sub-norm at the node
    VecN left;   // signed component for a leaf child, sub-norm otherwise
    VecN right;
};

Values node_values(const HypersphericalTree& tree, std::span<const double> v) {
    const std::size_t n = tree.angle_count();
    Values out{VecN(n), VecN(n), VecN(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const auto& nd = tree.node(i);
        out.left[i] = nd.left.is_leaf ? v[nd.left.index] : out.norm[nd.left.index];
        out.right[i] = nd.right.is_leaf ? v[nd.right.index] : out.norm[nd.right.index];
        out.norm[i] = std::hypot(out.left[i], out.right[i]);
    }
    return out;
}

}  // namespace

VecN to_cartesian(const HypersphericalTree& tree, const HyperState& state) {
    check_state(tree, state);
    const std::size_t n = tree.angle_count();
    VecN factor(n);
    VecN out(tree.dimension(), 0.0);
    factor[tree.root()] = state.rho;
    for (std::size_t i = n; i-- > 0;) {
        const auto& nd = tree.node(i);
        const double c = std::cos(state.angles[i]);
        const double s = std::sin(state.angles[i]);
        const double fl = factor[i] * c;
        const double fr = factor[i] * s;
        if (nd.left.is_leaf) out[nd.left.index] = fl;
        else factor[nd.left.index] = fl;
        if (nd.right.is_leaf) out[nd.right.index] = fr;
        else factor[nd.right.index] = fr;
    }
    return out;
}

HyperState from_cartesian(const HypersphericalTree& tree, std::span<const double> v) {
    if (v.size() != tree.dimension())
        throw InvalidInput("vector dimension does not match the hyperspherical tree");
    const std::size_t n = tree.angle_count();
    const Values val = node_values(tree, v);
    HyperState st;
    st.rho = val.norm[tree.root()];
    st.angles.assign(n, 0.0);
    st.degenerate.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (val.left[i] == 0.0 && val.right[i] == 0.0) {
            st.degenerate[i] = true;
            continue;
        }
        double a = std::atan2(val.right[i], val.left[i]);
        if (tree.node(i).range == RangeClass::full && a < 0.0) {
            a += 2 * std::numbers::pi;
            if (a >= 2 * std::numbers::pi) a = 0.0;
        }
        st.angles[i] = a;
    }
    return st;
}

HyperState angle_rates_from_velocity(const HypersphericalTree& tree, const HyperState& state,
                                     std::span<const double> vel) {
    check_state(tree, state);
    if (vel.size() != tree.dimension())
        throw InvalidInput("velocity dimension does not match the hyperspherical tree");
    if (!(state.rho > 0.0)) throw DegenerateState("angle rates are undefined at zero hyperradius");

    const std::size_t n = tree.angle_count();
    const VecN pos = to_cartesian(tree, state);
    const Values val = node_values(tree, pos);

    VecN norm_rate(n, 0.0);
    VecN vel_sq(n, 0.0);  // |velocity|^2 restricted to the subtree
    HyperState out = state;
    out.angle_rates.assign(n, 0.0);
    if (out.degenerate.size() != n) out.degenerate.assign(n, false);

    for (std::size_t i = 0; i < n; ++i) {
        const auto& nd = tree.node(i);
        const double ldot = nd.left.is_leaf ? vel[nd.left.index] : norm_rate[nd.left.index];
        const double rdot = nd.right.is_leaf ? vel[nd.right.index] : norm_rate[nd.right.index];
        const double lv = nd.left.is_leaf ? vel[nd.left.index] * vel[nd.left.index] : vel_sq[nd.left.index];
        const double rv = nd.right.is_leaf ? vel[nd.right.index] * vel[nd.right.index] : vel_sq[nd.right.index];
        vel_sq[i] = lv + rv;

        const double a = val.left[i];
        const double b = val.right[i];
        const double s2 = a * a + b * b;
        if (s2 == 0.0 || out.degenerate[i]) {
            if (vel_sq[i] > 0.0)
                throw DegenerateState("angle " + nd.name +
                                      " sits at a zero sub-norm with nonzero velocity");
            continue;
        }
        out.angle_rates[i] = (a * rdot - b * ldot) / s2;
        norm_rate[i] = (a * ldot + b * rdot) / std::sqrt(s2);
    }
    out.rho_dot = norm_rate[tree.root()];
    return out;
}

std::vector<AngleFactor> kinetic_factors(const HypersphericalTree& tree) {
    std::vector<AngleFactor> out(tree.angle_count());
    for (std::size_t i = 0; i < tree.angle_count(); ++i) {
        int cur = static_cast<int>(i);
        while (tree.node(cur).parent >= 0) {
            const auto& nd = tree.node(cur);
            (nd.is_left_child ? out[i].beta : out[i].alpha).push_back(nd.parent);
            cur = nd.parent;
        }
    }
    return out;
}

double kinetic_value(const HypersphericalTree& tree, const HyperState& state) {
    check_state(tree, state);
    if (state.angle_rates.size() != tree.angle_count())
        throw InvalidInput("kinetic_value needs angle rates");
    const std::size_t n = tree.angle_count();
    VecN weight(n);
    weight[tree.root()] = 1.0;
    double sum = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        const auto& nd = tree.node(i);
        const double c = std::cos(state.angles[i]);
        const double s = std::sin(state.angles[i]);
        if (!nd.left.is_leaf) weight[nd.left.index] = weight[i] * c * c;
        if (!nd.right.is_leaf) weight[nd.right.index] = weight[i] * s * s;
        sum += state.angle_rates[i] * state.angle_rates[i] * weight[i];
    }
    return sum;
}

SubNorms sub_norms(const HypersphericalTree& tree, const HyperState& state) {
    check_state(tree, state);
    const std::size_t n = tree.angle_count();
    const bool rates = state.angle_rates.size() == n;
    SubNorms out{VecN(n), VecN(n, 0.0)};
    out.norm[tree.root()] = state.rho;
    out.rate[tree.root()] = state.rho_dot;
    for (std::size_t i = n; i-- > 0;) {
        const auto& nd = tree.node(i);
        const double c = std::cos(state.angles[i]);
        const double s = std::sin(state.angles[i]);
        const double g = rates ? state.angle_rates[i] : 0.0;
        if (!nd.left.is_leaf) {
            out.norm[nd.left.index] = out.norm[i] * c;
            out.rate[nd.left.index] = out.rate[i] * c - out.norm[i] * g * s;
        }
        if (!nd.right.is_leaf) {
            out.norm[nd.right.index] = out.norm[i] * s;
            out.rate[nd.right.index] = out.rate[i] * s + out.norm[i] * g * c;
        }
    }
    return out;
}

}  // namespace hypertree

namespace hypertree {

VecN velocity_from_rates(const HypersphericalTree& tree, const HyperState& state) {
    check_state(tree, state);
    const std::size_t n = tree.angle_count();
    if (state.angle_rates.size() != n) throw InvalidInput("state carries no angle rates");
    const SubNorms sn = sub_norms(tree, state);
    VecN out(tree.dimension(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& nd = tree.node(i);
        const double c = std::cos(state.angles[i]);
        const double s = std::sin(state.angles[i]);
        const double g = state.angle_rates[i];
        if (nd.left.is_leaf) out[nd.left.index] = sn.rate[i] * c - sn.norm[i] * g * s;
        if (nd.right.is_leaf) out[nd.right.index] = sn.rate[i] * s + sn.norm[i] * g * c;
    }
    return out;
}

}  // namespace hypertree
