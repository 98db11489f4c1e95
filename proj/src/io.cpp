#include "hypertree/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

#include "hypertree/errors.hpp"

namespace hypertree {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void dump(const OrderedJson& j, int indent, int depth, std::string& out) {
    const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
        case OrderedJson::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{";
            out += nl;
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) {
                    out += ",";
                    out += nl;
                }
                first = false;
                out += pad;
                out += OrderedJson(it.key()).dump();
                out += indent > 0 ? ": " : ":";
                dump(it.value(), indent, depth + 1, out);
            }
            out += nl;
            out += close_pad + "}";
            return;
        }
        case OrderedJson::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            bool flat = true;
            for (const auto& e : j) flat = flat && !e.is_structured();
            out += "[";
            bool first = true;
            for (const auto& e : j) {
                if (!first) out += flat ? ", " : ",";
                if (!flat) {
                    out += nl;
                    out += pad;
                }
                first = false;
                dump(e, indent, depth + 1, out);
            }
            if (!flat) {
                out += nl;
                out += close_pad;
            }
            out += "]";
            return;
        }
        case OrderedJson::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? format_double(v) : "null";
            return;
        }
        default:
            out += j.dump();
    }
}

Vec3 vec3_from_json(const Json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) throw InvalidInput(std::string(what) + " entries must be [x, y, z]");
    Vec3 v;
    for (std::size_t c = 0; c < 3; ++c) {
        if (!j[c].is_number()) throw InvalidInput(std::string(what) + " components must be numbers");
        v[c] = j[c].get<double>();
    }
    return v;
}

}  // namespace

std::string dump_json(const OrderedJson& j, int indent) {
    std::string out;
    dump(j, indent, 0, out);
    return out;
}

ParticleSystem system_from_json(const Json& j) {
    if (!j.is_object()) throw InvalidInput("system must be a JSON object");
    static const std::set<std::string> known{"masses", "positions", "velocities"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw InvalidInput("unknown key in system: " + it.key());
    if (!j.contains("masses") || !j.contains("positions"))
        throw InvalidInput("system needs masses and positions");
    ParticleSystem s;
    for (const auto& m : j.at("masses")) {
        if (!m.is_number()) throw InvalidInput("masses must be numbers");
        s.masses.push_back(m.get<double>());
    }
    for (const auto& p : j.at("positions")) s.positions.push_back(vec3_from_json(p, "positions"));
    if (j.contains("velocities")) {
        for (const auto& v : j.at("velocities")) s.velocities.push_back(vec3_from_json(v, "velocities"));
    } else {
        s.velocities.assign(s.masses.size(), Vec3{});
    }
    validate(s);
    return s;
}

OrderedJson to_json(const ParticleSystem& system) {
    OrderedJson j;
    j["masses"] = system.masses;
    auto arr = [](const std::vector<Vec3>& v) {
        OrderedJson a = OrderedJson::array();
        for (const auto& x : v) a.push_back({x.x, x.y, x.z});
        return a;
    };
    j["positions"] = arr(system.positions);
    j["velocities"] = arr(system.velocities);
    return j;
}

OrderedJson to_json(const Decomposition& d, double tensor_total) {
    OrderedJson j;
    OrderedJson list = OrderedJson::array();
    for (const auto& c : d.contributions) {
        OrderedJson e;
        e["kind"] = to_string(c.kind);
        e["label"] = c.label;
        e["L_sq"] = c.L_sq;
        e["scale"] = c.scale;
        e["product"] = c.product;
        list.push_back(std::move(e));
    }
    j["contributions"] = std::move(list);
    j["total"] = d.total;
    j["tensor_total"] = tensor_total;
    return j;
}

OrderedJson to_json(const ScatterResult& r, double impact_parameter) {
    OrderedJson j;
    j["b"] = impact_parameter;
    j["status"] = to_string(r.status);
    j["rho_min"] = r.rho_min;
    j["rho_max"] = r.rho_max;
    j["Phi"] = r.sweep;
    j["chi"] = r.deflection;
    j["tail"] = r.tail;
    j["quad_error"] = r.quad_error;
    OrderedJson s = OrderedJson::array();
    for (auto [rho, f] : r.samples) s.push_back({rho, f});
    j["samples"] = std::move(s);
    return j;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
    os << "t,E,Pcm,Ltot,rho,lambda_sq,decomp_total";
    const std::size_t n = trajectory.snapshots.empty() ? 0 : trajectory.snapshots.front().size();
    for (std::size_t i = 1; i <= n; ++i) os << ",x" << i << ",y" << i << ",z" << i;
    os << "\n";
    for (std::size_t k = 0; k < trajectory.time.size(); ++k) {
        const auto& d = trajectory.diagnostics[k];
        os << format_double(trajectory.time[k]) << ',' << format_double(d.energy) << ','
           << format_double(d.p_cm) << ',' << format_double(d.l_tot) << ',' << format_double(d.rho) << ','
           << format_double(d.lambda_sq) << ',' << format_double(d.decomp_total);
        for (const auto& p : trajectory.snapshots[k].positions)
            os << ',' << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(p.z);
        os << "\n";
    }
}

}  // namespace hypertree
