#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hypertree/dynamics.hpp"
#include "hypertree/errors.hpp"
#include "hypertree/grandang.hpp"
#include "hypertree/hypersphere.hpp"
#include "hypertree/io.hpp"
#include "hypertree/jacobi.hpp"
#include "hypertree/potential.hpp"
#include "hypertree/scatter.hpp"

namespace py = pybind11;
using namespace hypertree;

namespace {

ParticleSystem make_system(std::vector<double> masses, std::vector<std::array<double, 3>> positions,
                           std::vector<std::array<double, 3>> velocities) {
    ParticleSystem s;
    s.masses = std::move(masses);
    for (const auto& p : positions) s.positions.push_back({p[0], p[1], p[2]});
    if (velocities.empty()) {
        s.velocities.assign(s.positions.size(), Vec3{});
    } else {
        for (const auto& v : velocities) s.velocities.push_back({v[0], v[1], v[2]});
    }
    validate(s);
    return s;
}

std::vector<std::array<double, 3>> rows(const std::vector<Vec3>& v) {
    std::vector<std::array<double, 3>> out;
    for (const auto& x : v) out.push_back({x.x, x.y, x.z});
    return out;
}

RadialFunction radial_by_name(const std::string& kind, const py::kwargs& kw) {
    auto get = [&](const char* k, double fallback) {
        return kw.contains(k) ? kw[k].cast<double>() : fallback;
    };
    if (kind == "zero") return radial::zero();
    if (kind == "constant") return radial::constant(get("c", 0.0));
    if (kind == "coulomb") return radial::coulomb(get("k", 1.0));
    if (kind == "inverse_square") return radial::inverse_square(get("c", 1.0));
    if (kind == "harmonic") return radial::harmonic(get("k", 1.0), get("r0", 0.0));
    if (kind == "lennard_jones") return radial::lennard_jones(get("epsilon", 1.0), get("sigma", 1.0));
    throw InvalidInput("unknown potential kind '" + kind + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Jacobi trees, hyperspherical trees and grand angular momentum";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<DegenerateState>(m, "DegenerateState", PyExc_ArithmeticError);

    py::class_<ParticleSystem>(m, "ParticleSystem")
        .def(py::init(&make_system), py::arg("masses"), py::arg("positions"),
             py::arg("velocities") = std::vector<std::array<double, 3>>{})
        .def_readonly("masses", &ParticleSystem::masses)
        .def_property_readonly("positions", [](const ParticleSystem& s) { return rows(s.positions); })
        .def_property_readonly("velocities", [](const ParticleSystem& s) { return rows(s.velocities); })
        .def("__len__", &ParticleSystem::size);

    py::class_<JacobiTree>(m, "JacobiTree")
        .def_static("sequential", &JacobiTree::sequential, py::arg("n"))
        .def_static("parse", &JacobiTree::parse, py::arg("text"), py::arg("n"))
        .def_property_readonly("particle_count", &JacobiTree::particle_count)
        .def_property_readonly("node_count", &JacobiTree::node_count)
        .def("labels",
             [](const JacobiTree& t) {
                 std::vector<std::string> out;
                 for (const auto& n : t.nodes()) out.push_back(n.label());
                 return out;
             })
        .def("__str__", &JacobiTree::to_string);

    m.def("nbody_reduced_mass",
          [](const std::vector<double>& masses) { return nbody_reduced_mass(masses); });
    m.def(
        "node_reduced_masses",
        [](const JacobiTree& t, const std::vector<double>& masses) {
            std::vector<double> out;
            for (const auto& nm : node_masses(t, masses)) out.push_back(nm.reduced);
            return out;
        },
        py::arg("tree"), py::arg("masses"));
    m.def(
        "mass_weighted",
        [](const ParticleSystem& s, const JacobiTree& t) {
            const auto mw = to_mass_weighted(s, t);
            return py::make_tuple(mw.mu, mw.rho_vec, mw.vel_vec);
        },
        py::arg("system"), py::arg("tree"), "Returns (mu, rho, rho_dot) in mass-weighted coordinates.");

    py::class_<HypersphericalTree>(m, "HypersphericalTree")
        .def_static("caterpillar", &HypersphericalTree::caterpillar, py::arg("dimension"))
        .def_static("parse", &HypersphericalTree::parse, py::arg("text"))
        .def_property_readonly("dimension", &HypersphericalTree::dimension)
        .def_property_readonly("angle_count", &HypersphericalTree::angle_count)
        .def("angle_names",
             [](const HypersphericalTree& t) {
                 std::vector<std::string> out;
                 for (const auto& n : t.nodes()) out.push_back(n.name);
                 return out;
             })
        .def("range_classes",
             [](const HypersphericalTree& t) {
                 std::vector<std::string> out;
                 for (const auto& n : t.nodes()) out.push_back(to_string(n.range));
                 return out;
             })
        .def("__str__", &HypersphericalTree::to_string);

    m.def("fork_tree", &fork_tree, py::arg("jacobi_tree"));

    py::class_<HyperState>(m, "HyperState")
        .def(py::init<>())
        .def_readwrite("rho", &HyperState::rho)
        .def_readwrite("angles", &HyperState::angles)
        .def_readwrite("rho_dot", &HyperState::rho_dot)
        .def_readwrite("angle_rates", &HyperState::angle_rates)
        .def_readonly("degenerate", &HyperState::degenerate);

    m.def(
        "from_cartesian",
        [](const HypersphericalTree& t, const std::vector<double>& v) { return from_cartesian(t, v); },
        py::arg("tree"), py::arg("x"));
    m.def("to_cartesian", &to_cartesian, py::arg("tree"), py::arg("state"));
    m.def(
        "angle_rates",
        [](const HypersphericalTree& t, const HyperState& s, const std::vector<double>& v) {
            return angle_rates_from_velocity(t, s, v);
        },
        py::arg("tree"), py::arg("state"), py::arg("velocity"));
    m.def("kinetic_value", &kinetic_value, py::arg("tree"), py::arg("state"));

    m.def(
        "lambda_sq",
        [](const std::vector<double>& rho, const std::vector<double>& p) {
            return lambda_sq(lambda_tensor(rho, p));
        },
        py::arg("rho"), py::arg("momentum"), "Half the squared Frobenius norm of rho ^ P.");

    m.def(
        "decompose",
        [](const ParticleSystem& s, const JacobiTree& t) {
            const StateAnalysis a = analyze(s, t);
            py::list items;
            for (const auto& c : a.decomposition.contributions) {
                py::dict d;
                d["kind"] = to_string(c.kind);
                d["label"] = c.label;
                d["L_sq"] = c.L_sq;
                d["scale"] = c.scale;
                d["product"] = c.product;
                d["factors"] = c.factors;
                items.append(d);
            }
            py::dict out;
            out["lambda_sq_tensor"] = a.lambda_sq_tensor;
            out["lambda_sq_hyperspherical"] = a.lambda_sq_hyper;
            out["total"] = a.decomposition.total;
            out["contributions"] = items;
            return out;
        },
        py::arg("system"), py::arg("tree"));

    py::class_<Potential>(m, "Potential")
        .def_static(
            "pairwise", [](const std::string& kind, py::kwargs kw) { return Potential::pairwise(radial_by_name(kind, kw)); },
            py::arg("kind"))
        .def_static(
            "hyperradial",
            [](const std::string& kind, py::kwargs kw) { return Potential::hyperradial(radial_by_name(kind, kw)); },
            py::arg("kind"))
        .def_static(
            "averaged",
            [](const std::string& kind, const JacobiTree& t, std::vector<double> masses, std::size_t n_samples,
               std::uint64_t seed, py::kwargs kw) {
                return Potential::averaged(radial_by_name(kind, kw), t, std::move(masses), n_samples, seed);
            },
            py::arg("kind"), py::arg("tree"), py::arg("masses"), py::arg("n_samples") = 10000,
            py::arg("seed") = 0)
        .def("energy", &Potential::energy)
        .def("of_rho", &Potential::of_rho)
        .def("__str__", &Potential::describe);

    m.def(
        "effective_potential",
        [](const std::string& kind, const JacobiTree& t, const std::vector<double>& masses, double rho,
           std::size_t n_samples, std::uint64_t seed, py::kwargs kw) {
            const auto e = effective_potential(radial_by_name(kind, kw), t, masses, rho, n_samples, seed);
            return py::make_tuple(e.value, e.std_error);
        },
        py::arg("kind"), py::arg("tree"), py::arg("masses"), py::arg("rho"), py::arg("n_samples") = 10000,
        py::arg("seed") = 0, "Returns (V_eff, standard error).");

    m.def(
        "sweep",
        [](double mu, double energy, double b, const Potential& pot, double rho_max, double tol, bool asymptotic) {
            ScatterSpec spec;
            spec.mu = mu;
            spec.energy = energy;
            spec.impact_parameter = b;
            spec.potential = pot;
            spec.rel_tol = tol;
            spec.asymptotic = asymptotic;
            if (rho_max > 0.0) {
                spec.rho_max = rho_max;
            } else {
                ScatterSpec probe = spec;
                probe.rho_max = default_rho_max(b, 1.0);
                const TurningPoint tp = turning_point(probe);
                spec.rho_max = default_rho_max(b, tp.status == TurningStatus::ok ? tp.rho_min : 1.0);
            }
            const ScatterResult r = hyperangular_sweep(spec);
            py::dict out;
            out["rho_min"] = r.rho_min;
            out["rho_max"] = r.rho_max;
            out["status"] = to_string(r.status);
            out["Phi"] = r.sweep;
            out["chi"] = r.deflection;
            return out;
        },
        py::arg("mu"), py::arg("energy"), py::arg("b"), py::arg("potential"), py::arg("rho_max") = 0.0,
        py::arg("tol") = 1e-9, py::arg("asymptotic") = true);

    py::class_<IntegratorSettings>(m, "IntegratorSettings")
        .def(py::init([](double dt, std::size_t steps, std::size_t record_every) {
                 return IntegratorSettings{dt, steps, record_every};
             }),
             py::arg("dt") = 1e-3, py::arg("steps") = 1000, py::arg("record_every") = 1);

    m.def(
        "simulate",
        [](const ParticleSystem& s, const Potential& pot, const JacobiTree& t, const IntegratorSettings& set) {
            const Trajectory tr = integrate_nbody(s, pot, t, set);
            py::dict out;
            std::vector<double> e, l, lam;
            for (const auto& d : tr.diagnostics) {
                e.push_back(d.energy);
                l.push_back(d.l_tot);
                lam.push_back(d.lambda_sq);
            }
            out["t"] = tr.time;
            out["energy"] = e;
            out["l_tot"] = l;
            out["lambda_sq"] = lam;
            out["final"] = tr.snapshots.back();
            return out;
        },
        py::arg("system"), py::arg("potential"), py::arg("tree"), py::arg("settings") = IntegratorSettings{});
}
