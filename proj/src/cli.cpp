#include "hypertree/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "hypertree/dynamics.hpp"
#include "hypertree/errors.hpp"
#include "hypertree/grandang.hpp"
#include "hypertree/hypersphere.hpp"
#include "hypertree/jacobi.hpp"
#include "hypertree/parallel.hpp"
#include "hypertree/potential.hpp"
#include "hypertree/scatter.hpp"

namespace hypertree::cli {
namespace {

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw InvalidInput(where + " must be a JSON object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw InvalidInput("unknown key '" + it.key() + "' in " + where);
}

double number(const Json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw InvalidInput("missing '" + std::string(key) + "' in " + where);
    if (!j.at(key).is_number()) throw InvalidInput("'" + std::string(key) + "' in " + where + " must be a number");
    return j.at(key).get<double>();
}

double number_or(const Json& j, const char* key, double fallback, const std::string& where) {
    return j.contains(key) ? number(j, key, where) : fallback;
}

std::uint64_t count(const Json& j, const char* key, std::uint64_t fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_unsigned())
        throw InvalidInput("'" + std::string(key) + "' in " + where + " must be a non-negative integer");
    return j.at(key).get<std::uint64_t>();
}

std::string text(const Json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_string())
        throw InvalidInput("'" + std::string(key) + "' in " + where + " must be a string");
    return j.at(key).get<std::string>();
}

std::vector<double> masses_from(const Json& j, const std::string& where) {
    if (!j.is_array()) throw InvalidInput("masses in " + where + " must be an array");
    std::vector<double> m;
    for (const auto& x : j) {
        if (!x.is_number()) throw InvalidInput("masses must be numbers");
        m.push_back(x.get<double>());
    }
    if (m.size() < 2) throw InvalidInput("at least two masses are required");
    for (double x : m)
        if (!(x > 0.0) || !std::isfinite(x)) throw InvalidInput("masses must be positive and finite");
    return m;
}

JacobiTree tree_from(const Json& config, std::size_t n) {
    if (config.contains("tree")) return JacobiTree::parse(text(config, "tree", "config"), n);
    return JacobiTree::sequential(n);
}

/// Pair or hyperradial function from {"kind": ..., params}. `extra` lists
/// keys the caller consumes itself.
RadialFunction radial_from(const Json& j, const std::string& where,
                           std::initializer_list<const char*> extra = {}) {
    const std::string kind = text(j, "kind", where);
    auto allow = [&](std::initializer_list<const char*> params) {
        std::set<std::string> ok{"kind", "form"};
        for (const char* p : params) ok.insert(p);
        for (const char* p : extra) ok.insert(p);
        for (auto it = j.begin(); it != j.end(); ++it)
            if (!ok.count(it.key())) throw InvalidInput("unknown key '" + it.key() + "' in " + where);
    };
    if (kind == "zero") {
        allow({});
        return radial::zero();
    }
    if (kind == "constant") {
        allow({"c"});
        return radial::constant(number(j, "c", where));
    }
    if (kind == "coulomb") {
        allow({"k"});
        return radial::coulomb(number(j, "k", where));
    }
    if (kind == "inverse_square") {
        allow({"c"});
        return radial::inverse_square(number(j, "c", where));
    }
    if (kind == "harmonic") {
        allow({"k", "r0"});
        return radial::harmonic(number(j, "k", where), number_or(j, "r0", 0.0, where));
    }
    if (kind == "lennard_jones") {
        allow({"epsilon", "sigma"});
        return radial::lennard_jones(number(j, "epsilon", where), number(j, "sigma", where));
    }
    throw InvalidInput("unknown potential kind '" + kind + "' in " + where);
}

std::string form_of(const Json& j, const char* fallback) {
    return j.contains("form") ? text(j, "form", "potential") : std::string(fallback);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot open output file " + path);
    return f;
}

std::string fmt(double v) { return format_double(v); }

std::string angle_names(const HypersphericalTree& t, const std::vector<int>& idx) {
    if (idx.empty()) return "-";
    std::string s;
    for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? " " : "") + t.node(idx[i]).name;
    return s;
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const IntegrationHalted& e) {
        err << "error: integration halted: " << e.what() << "\n";
        return kIntegration;
    } catch (const DegenerateState& e) {
        err << "error: degenerate configuration: " << e.what() << "\n";
        return kDegenerate;
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const Json::exception& e) {
        err << "error: bad config: " << e.what() << "\n";
        return kConfigError;
    }
}

ParticleSystem random_state(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mass(0.5, 2.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    ParticleSystem s;
    for (std::size_t i = 0; i < n; ++i) {
        s.masses.push_back(mass(rng));
        s.positions.push_back({normal(rng), normal(rng), normal(rng)});
        s.velocities.push_back({normal(rng), normal(rng), normal(rng)});
    }
    return s;
}

}  // namespace

int cmd_tree(const Json& config, const Options& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        check_keys(config, {"tree", "masses", "n"}, "tree config");
        const std::string tree_text = text(config, "tree", "tree config");
        OrderedJson resolved = config;
        std::vector<double> masses;
        if (config.contains("masses")) {
            masses = masses_from(config.at("masses"), "tree config");
        } else {
            std::size_t n = count(config, "n", 0, "tree config");
            if (n == 0) {
                // Infer n from the largest leaf index.
                for (char c : tree_text) n += (c == '(');
                ++n;
            }
            masses.assign(n, 1.0);
            resolved["masses"] = masses;
        }
        if (config.contains("n") && count(config, "n", 0, "tree config") != masses.size())
            throw InvalidInput("'n' does not match the number of masses");
        const JacobiTree jt = JacobiTree::parse(tree_text, masses.size());
        const auto nm = node_masses(jt, masses);
        const HypersphericalTree ft = fork_tree(jt);
        const auto factors = kinetic_factors(ft);

        out << "config: " << dump_json(resolved, 0) << "\n";
        out << "jacobi tree: " << jt.to_string() << "\n";
        out << "N-body reduced mass mu = " << fmt(nbody_reduced_mass(masses)) << "\n";
        out << "nodes (post-order):\n";
        for (std::size_t k = 0; k < jt.node_count(); ++k) {
            out << "  rho" << k + 1 << "  mu_{" << jt.node(k).label() << "} = " << fmt(nm[k].reduced)
                << "  M_L = " << fmt(nm[k].left) << "  M_R = " << fmt(nm[k].right) << "\n";
        }
        out << "fork tree: " << ft.to_string() << "\n";
        out << "angles (post-order):\n";
        for (std::size_t i = 0; i < ft.angle_count(); ++i) {
            const auto& nd = ft.node(i);
            out << "  " << nd.name << "  " << to_string(nd.range) << " [" << fmt(nd.lower()) << ", "
                << fmt(nd.upper()) << (nd.range == RangeClass::full ? ")" : "]") << "  sin: "
                << angle_names(ft, factors[i].alpha) << "  cos: " << angle_names(ft, factors[i].beta)
                << "\n";
        }

        if (opt.out_path) {
            OrderedJson j;
            j["config"] = resolved;
            j["tree"] = jt.to_string();
            j["mu"] = nbody_reduced_mass(masses);
            OrderedJson nodes = OrderedJson::array();
            for (std::size_t k = 0; k < jt.node_count(); ++k)
                nodes.push_back({{"label", jt.node(k).label()},
                                 {"M_L", nm[k].left},
                                 {"M_R", nm[k].right},
                                 {"mu", nm[k].reduced}});
            j["nodes"] = std::move(nodes);
            j["fork_tree"] = ft.to_string();
            OrderedJson angles = OrderedJson::array();
            for (std::size_t i = 0; i < ft.angle_count(); ++i) {
                OrderedJson a;
                a["name"] = ft.node(i).name;
                a["range"] = to_string(ft.node(i).range);
                a["alpha"] = OrderedJson::array();
                a["beta"] = OrderedJson::array();
                for (int x : factors[i].alpha) a["alpha"].push_back(ft.node(x).name);
                for (int x : factors[i].beta) a["beta"].push_back(ft.node(x).name);
                angles.push_back(std::move(a));
            }
            j["angles"] = std::move(angles);
            auto f = open_out(*opt.out_path);
            f << dump_json(j) << "\n";
        }
        return kOk;
    });
}

int cmd_decompose(const Json& config, const Options& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        check_keys(config, {"tree", "system", "random_state", "seed"}, "decompose config");
        OrderedJson resolved = config;
        ParticleSystem sys;
        if (config.contains("system")) {
            if (config.contains("random_state")) throw InvalidInput("give either system or random_state");
            sys = system_from_json(config.at("system"));
        } else if (config.contains("random_state")) {
            const Json& rs = config.at("random_state");
            check_keys(rs, {"n"}, "random_state");
            const std::uint64_t seed = opt.seed ? *opt.seed : count(config, "seed", 0, "decompose config");
            resolved["seed"] = seed;
            sys = random_state(count(rs, "n", 0, "random_state"), seed);
            resolved["system"] = to_json(sys);
        } else {
            throw InvalidInput("decompose config needs system or random_state");
        }
        validate(sys);
        const JacobiTree jt = tree_from(config, sys.size());
        resolved["tree"] = jt.to_string();
        const StateAnalysis a = analyze(sys, jt);

        out << "config: " << dump_json(resolved, 0) << "\n";
        out << "fork tree: " << a.ftree.to_string() << "\n";
        out << "Lambda^2 (tensor)        = " << fmt(a.lambda_sq_tensor) << "\n";
        out << "Lambda^2 (hyperspherical) = " << fmt(a.lambda_sq_hyper) << "\n";
        out << "contributions:\n";
        for (const auto& c : a.decomposition.contributions) {
            std::string name = "L_" + c.label;
            if (c.kind == Contribution::Kind::node && c.label.rfind("γ", 0) == 0)
                name = "L" + c.label.substr(std::string("γ").size());
            std::string scale;
            for (const auto& f : c.factors) scale += " " + f;
            out << "  " << to_string(c.kind) << "  " << name << "^2 = " << fmt(c.L_sq) << "  scale ="
                << (scale.empty() ? " 1" : scale) << " = " << fmt(c.scale) << "  product = " << fmt(c.product)
                << "\n";
        }
        out << "decomposition total      = " << fmt(a.decomposition.total) << "\n";

        const double ref = a.lambda_sq_tensor;
        const double diff = std::abs(a.decomposition.total - ref);
        const bool agree = ref > 0.0 ? diff <= 1e-8 * ref : diff <= 1e-300;
        out << "agreement: " << (agree ? "ok" : "MISMATCH") << " (relative difference "
            << fmt(ref > 0.0 ? diff / ref : diff) << ")\n";

        if (opt.out_path) {
            OrderedJson j = to_json(a.decomposition, a.lambda_sq_tensor);
            j["hyperspherical_total"] = a.lambda_sq_hyper;
            j["config"] = resolved;
            auto f = open_out(*opt.out_path);
            f << dump_json(j) << "\n";
        }
        return agree ? kOk : kCheckFailed;
    });
}

int cmd_simulate(const Json& config, const Options& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        check_keys(config, {"system", "tree", "potential", "integrator", "output"}, "simulate config");
        if (!config.contains("system")) throw InvalidInput("simulate config needs a system");
        const ParticleSystem sys = system_from_json(config.at("system"));
        const JacobiTree jt = tree_from(config, sys.size());
        OrderedJson resolved = config;
        resolved["tree"] = jt.to_string();

        if (!config.contains("potential")) throw InvalidInput("simulate config needs a potential");
        const Json& pj = config.at("potential");
        const std::string form = form_of(pj, "pairwise");
        Potential pot = form == "pairwise"      ? Potential::pairwise(radial_from(pj, "potential"))
                        : form == "hyperradial" ? Potential::hyperradial(radial_from(pj, "potential"))
                                                : throw InvalidInput("simulate needs a pairwise or hyperradial potential");

        IntegratorSettings s;
        if (config.contains("integrator")) {
            const Json& ij = config.at("integrator");
            check_keys(ij, {"dt", "steps", "record_every"}, "integrator");
            s.dt = number_or(ij, "dt", s.dt, "integrator");
            s.steps = count(ij, "steps", s.steps, "integrator");
            s.record_every = count(ij, "record_every", s.record_every, "integrator");
        }
        resolved["integrator"] = {{"dt", s.dt}, {"steps", s.steps}, {"record_every", s.record_every}};

        std::optional<std::string> path = opt.out_path;
        if (!path && config.contains("output")) path = text(config, "output", "simulate config");
        std::ostream& report = path ? out : err;

        const Trajectory traj = integrate_nbody(sys, pot, jt, s);
        const Drift d = measure_drift(traj);
        if (path) {
            auto f = open_out(*path);
            write_trajectory_csv(f, traj);
        } else {
            write_trajectory_csv(out, traj);
        }
        report << "config: " << dump_json(resolved, 0) << "\n";
        report << "potential: " << pot.describe() << "\n";
        report << "snapshots: " << traj.time.size() << "\n";
        report << "energy drift, start to end (relative): " << fmt(d.energy_end_rel) << "\n";
        report << "energy excursion, maximum (relative): " << fmt(d.energy_rel) << "\n";
        report << "|P_cm| drift (absolute): " << fmt(d.p_cm_abs) << "\n";
        report << "|L_tot| drift (relative): " << fmt(d.l_tot_rel) << "\n";
        report << "Lambda^2 drift (relative): " << fmt(d.lambda_sq_rel) << "\n";
        return kOk;
    });
}

namespace {

Potential scatter_potential(const Json& pj, std::uint64_t seed, OrderedJson& resolved) {
    const std::string form = form_of(pj, "hyperradial");
    if (form == "hyperradial") return Potential::hyperradial(radial_from(pj, "potential"));
    if (form == "averaged") {
        RadialFunction f = radial_from(pj, "potential", {"masses", "tree", "n_samples", "seed"});
        const auto masses = masses_from(pj.at("masses"), "potential");
        const JacobiTree jt = tree_from(pj, masses.size());
        const std::uint64_t n = count(pj, "n_samples", 10000, "potential");
        const std::uint64_t s = count(pj, "seed", seed, "potential");
        resolved["potential"]["tree"] = jt.to_string();
        resolved["potential"]["n_samples"] = n;
        resolved["potential"]["seed"] = s;
        return Potential::averaged(std::move(f), jt, masses, n, s);
    }
    throw InvalidInput("scatter needs a hyperradial or averaged potential");
}

}  // namespace

int cmd_scatter(const Json& config, const Options& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        check_keys(config, {"mu", "E", "b", "potential", "rho_max", "tol", "asymptotic", "seed"},
                   "scatter config");
        OrderedJson resolved = config;
        const double mu = number_or(config, "mu", 1.0, "scatter config");
        const double energy = number(config, "E", "scatter config");
        const double tol = number_or(config, "tol", 1e-9, "scatter config");
        const bool asymptotic = config.value("asymptotic", true);
        const std::uint64_t seed = opt.seed ? *opt.seed : count(config, "seed", 0, "scatter config");
        resolved["mu"] = mu;
        resolved["tol"] = tol;
        resolved["asymptotic"] = asymptotic;
        resolved["seed"] = seed;

        std::vector<double> bs;
        if (!config.contains("b")) throw InvalidInput("scatter config needs b");
        if (config.at("b").is_array()) {
            for (const auto& x : config.at("b")) {
                if (!x.is_number()) throw InvalidInput("b values must be numbers");
                bs.push_back(x.get<double>());
            }
        } else {
            bs.push_back(number(config, "b", "scatter config"));
        }
        if (!config.contains("potential")) throw InvalidInput("scatter config needs a potential");
        const Potential pot = scatter_potential(config.at("potential"), seed, resolved);
        const std::optional<double> rho_max =
            config.contains("rho_max") ? std::optional<double>(number(config, "rho_max", "scatter config"))
                                       : std::nullopt;

        std::vector<OrderedJson> results(bs.size());
        parallel_for(bs.size(), [&](std::size_t i) {
            ScatterSpec spec;
            spec.mu = mu;
            spec.energy = energy;
            spec.impact_parameter = bs[i];
            spec.potential = pot;
            spec.rel_tol = tol;
            spec.asymptotic = asymptotic;
            try {
                if (rho_max) {
                    spec.rho_max = *rho_max;
                } else {
                    ScatterSpec probe = spec;
                    probe.rho_max = default_rho_max(bs[i], 1.0);
                    const TurningPoint tp = turning_point(probe);
                    spec.rho_max = default_rho_max(bs[i], tp.status == TurningStatus::ok ? tp.rho_min : 1.0);
                }
                const ScatterResult r = hyperangular_sweep(spec);
                results[i] = to_json(r, bs[i]);
                results[i]["lambda0_sq"] = lambda0_sq(mu, energy, bs[i]);
            } catch (const Error& e) {
                results[i] = {{"b", bs[i]}, {"status", "error"}, {"message", e.what()}};
            }
        });

        OrderedJson j;
        j["config"] = resolved;
        j["potential"] = pot.describe();
        j["results"] = results;
        const std::string body = dump_json(j) + "\n";
        if (opt.out_path) {
            auto f = open_out(*opt.out_path);
            f << body;
        } else {
            out << body;
        }
        if (opt.verbose) {
            for (const auto& r : results) err << "b = " << dump_json(r["b"], 0) << ": " << r["status"].get<std::string>() << "\n";
        }
        return kOk;
    });
}

int cmd_veff(const Json& config, const Options& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        check_keys(config, {"pair", "masses", "tree", "rho", "n_samples", "seed"}, "veff config");
        OrderedJson resolved = config;
        if (!config.contains("pair")) throw InvalidInput("veff config needs a pair potential");
        const RadialFunction pair = radial_from(config.at("pair"), "pair");
        if (!config.contains("masses")) throw InvalidInput("veff config needs masses");
        const auto masses = masses_from(config.at("masses"), "veff config");
        const JacobiTree jt = tree_from(config, masses.size());
        const std::uint64_t n = count(config, "n_samples", 10000, "veff config");
        if (n == 0) throw InvalidInput("n_samples must be positive");
        const std::uint64_t seed = opt.seed ? *opt.seed : count(config, "seed", 0, "veff config");
        resolved["tree"] = jt.to_string();
        resolved["n_samples"] = n;
        resolved["seed"] = seed;

        std::vector<double> grid;
        if (!config.contains("rho")) throw InvalidInput("veff config needs a rho grid");
        const Json& rj = config.at("rho");
        if (rj.is_array()) {
            for (const auto& x : rj) {
                if (!x.is_number()) throw InvalidInput("rho values must be numbers");
                grid.push_back(x.get<double>());
            }
        } else {
            check_keys(rj, {"min", "max", "count", "spacing"}, "rho");
            const double lo = number(rj, "min", "rho"), hi = number(rj, "max", "rho");
            const std::uint64_t c = count(rj, "count", 2, "rho");
            const std::string spacing = rj.value("spacing", std::string("linear"));
            if (c < 2 || !(lo > 0.0) || !(hi > lo)) throw InvalidInput("rho grid needs 0 < min < max and count >= 2");
            if (spacing != "linear" && spacing != "geometric") throw InvalidInput("rho spacing must be linear or geometric");
            for (std::uint64_t k = 0; k < c; ++k) {
                const double t = static_cast<double>(k) / static_cast<double>(c - 1);
                grid.push_back(spacing == "linear" ? lo + t * (hi - lo) : lo * std::pow(hi / lo, t));
            }
        }
        for (double r : grid)
            if (!(r > 0.0)) throw InvalidInput("rho values must be positive");

        std::vector<AverageEstimate> est(grid.size());
        std::vector<std::string> failures(grid.size());
        parallel_for(grid.size(), [&](std::size_t i) {
            try {
                est[i] = effective_potential(pair, jt, masses, grid[i], n, seed + i);
            } catch (const Error& e) {
                est[i].value = est[i].std_error = std::numeric_limits<double>::quiet_NaN();
                failures[i] = e.what();
            }
        });

        std::ostringstream csv;
        csv << "rho,V_eff,stderr\n";
        for (std::size_t i = 0; i < grid.size(); ++i)
            csv << fmt(grid[i]) << ',' << fmt(est[i].value) << ',' << fmt(est[i].std_error) << "\n";
        std::ostream& report = opt.out_path ? out : err;
        if (opt.out_path) {
            auto f = open_out(*opt.out_path);
            f << csv.str();
        } else {
            out << csv.str();
        }
        report << "config: " << dump_json(resolved, 0) << "\n";
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (!failures[i].empty()) err << "warning: rho = " << fmt(grid[i]) << ": " << failures[i] << "\n";
        return kOk;
    });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Grand angular momentum toolkit for classical N-body systems", "hypertree"};
    std::string command;
    std::string config_path;
    Options opt;
    std::string out_path;
    std::uint64_t seed = 0;
    app.add_option("command", command, "tree | decompose | simulate | scatter | veff")
        ->required()
        ->check(CLI::IsMember({"tree", "decompose", "simulate", "scatter", "veff"}));
    app.add_option("--config", config_path, "JSON config file")->required();
    auto* out_opt = app.add_option("--out", out_path, "output file for the machine-readable product");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides the config)");
    app.add_flag("-v,--verbose", opt.verbose, "extra diagnostics on stderr");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kConfigError;
    }
    if (*out_opt) opt.out_path = out_path;
    if (*seed_opt) opt.seed = seed;

    Json config;
    {
        std::ifstream f(config_path);
        if (!f) {
            err << "error: cannot read config " << config_path << "\n";
            return kConfigError;
        }
        try {
            config = Json::parse(f);
        } catch (const Json::exception& e) {
            err << "error: config is not valid JSON: " << e.what() << "\n";
            return kConfigError;
        }
    }
    if (command == "tree") return cmd_tree(config, opt, out, err);
    if (command == "decompose") return cmd_decompose(config, opt, out, err);
    if (command == "simulate") return cmd_simulate(config, opt, out, err);
    if (command == "scatter") return cmd_scatter(config, opt, out, err);
    return cmd_veff(config, opt, out, err);
}

}  // namespace hypertree::cli
