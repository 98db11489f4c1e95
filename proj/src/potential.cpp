#include "hypertree/potential.hpp"

#include <cmath>
#include <sstream>

#include "hypertree/errors.hpp"

namespace hypertree {

namespace radial {

namespace {
std::string fmt(const char* name, std::initializer_list<std::pair<const char*, double>> args) {
    std::ostringstream os;
    os.precision(17);
    os << name << "(";
    bool first = true;
    for (auto [k, v] : args) {
        if (!first) os << ", ";
        os << k << "=" << v;
        first = false;
    }
    os << ")";
    return os.str();
}
}  // namespace

RadialFunction zero() {
    return {"zero()", [](double) { return 0.0; }, [](double) { return 0.0; }};
}

RadialFunction constant(double c) {
    return {fmt("constant", {{"c", c}}), [c](double) { return c; }, [](double) { return 0.0; }};
}

RadialFunction coulomb(double k) {
    return {fmt("coulomb", {{"k", k}}), [k](double r) { return k / r; },
            [k](double r) { return -k / (r * r); }};
}

RadialFunction inverse_square(double c) {
    return {fmt("inverse_square", {{"c", c}}), [c](double r) { return c / (r * r); },
            [c](double r) { return -2.0 * c / (r * r * r); }};
}

RadialFunction harmonic(double k, double r0) {
    return {fmt("harmonic", {{"k", k}, {"r0", r0}}),
            [k, r0](double r) { return 0.5 * k * (r - r0) * (r - r0); },
            [k, r0](double r) { return k * (r - r0); }};
}

RadialFunction lennard_jones(double epsilon, double sigma) {
    return {fmt("lennard_jones", {{"epsilon", epsilon}, {"sigma", sigma}}),
            [epsilon, sigma](double r) {
                const double s6 = std::pow(sigma / r, 6);
                return 4.0 * epsilon * (s6 * s6 - s6);
            },
            [epsilon, sigma](double r) {
                const double s6 = std::pow(sigma / r, 6);
                return 4.0 * epsilon * (-12.0 * s6 * s6 + 6.0 * s6) / r;
            }};
}

}  // namespace radial

struct Potential::Averaged {
    std::size_t pairs = 0;
    std::vector<double> distances;  // samples x pairs, unit hyperradius
    std::size_t rejected = 0;
    std::size_t n_samples = 0;
};

Potential Potential::pairwise(RadialFunction f) { return Potential(Kind::pairwise, std::move(f)); }

Potential Potential::hyperradial(RadialFunction g) { return Potential(Kind::hyperradial, std::move(g)); }

Potential Potential::averaged(RadialFunction pair, const JacobiTree& tree, std::vector<double> masses,
                              std::size_t n_samples, std::uint64_t seed) {
    if (n_samples == 0) throw InvalidInput("averaged potential needs at least one sample");
    auto data = std::make_shared<Averaged>();
    const std::size_t n = masses.size();
    data->pairs = n * (n - 1) / 2;
    data->n_samples = n_samples;
    std::mt19937_64 rng(seed);
    while (data->distances.size() < n_samples * data->pairs) {
        auto d = sample_unit_pair_distances(tree, masses, rng);
        bool ok = true;
        for (double x : d) ok = ok && x > 0.0;
        if (!ok) {
            if (++data->rejected > 10 * n_samples)
                throw Error("averaged potential: too many rejected samples");
            continue;
        }
        data->distances.insert(data->distances.end(), d.begin(), d.end());
    }
    Potential p(Kind::averaged, std::move(pair));
    p.avg_ = std::move(data);
    return p;
}

std::string Potential::describe() const {
    switch (kind_) {
        case Kind::pairwise: return "pairwise " + fn_.name;
        case Kind::hyperradial: return "hyperradial " + fn_.name;
        case Kind::averaged:
            return "averaged " + fn_.name + " over " + std::to_string(avg_->n_samples) + " directions";
    }
    return {};
}

double Potential::energy(const ParticleSystem& system) const {
    if (kind_ == Kind::averaged) throw InvalidInput("averaged potentials have no lab-frame energy");
    const std::size_t n = system.size();
    if (kind_ == Kind::pairwise) {
        CompensatedSum e;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                e.add(fn_.value(norm(system.positions[j] - system.positions[i])));
        return e.value();
    }
    // Hyperradial: mu rho^2 = sum_i m_i |r_i - R_cm|^2.
    const double mu = nbody_reduced_mass(system.masses);
    const double total = system.total_mass();
    Vec3 cm;
    for (std::size_t i = 0; i < n; ++i) cm += system.masses[i] * system.positions[i];
    cm = cm / total;
    CompensatedSum s;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 d = system.positions[i] - cm;
        s.add(system.masses[i] * dot(d, d));
    }
    return fn_.value(std::sqrt(s.value() / mu));
}

void Potential::forces(const ParticleSystem& system, std::vector<Vec3>& out) const {
    if (kind_ == Kind::averaged) throw InvalidInput("averaged potentials have no lab-frame forces");
    const std::size_t n = system.size();
    out.assign(n, Vec3{});
    if (kind_ == Kind::pairwise) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const Vec3 d = system.positions[j] - system.positions[i];
                const double r = norm(d);
                // Force on j is -f'(r) d/r; equal and opposite on i.
                const Vec3 f = (-fn_.derivative(r) / r) * d;
                out[j] += f;
                out[i] -= f;
            }
        }
        return;
    }
    const double mu = nbody_reduced_mass(system.masses);
    const double total = system.total_mass();
    Vec3 cm;
    for (std::size_t i = 0; i < n; ++i) cm += system.masses[i] * system.positions[i];
    cm = cm / total;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 d = system.positions[i] - cm;
        s += system.masses[i] * dot(d, d);
    }
    const double rho = std::sqrt(s / mu);
    // d rho / d r_i = m_i (r_i - R_cm) / (mu rho)
    const double g = -fn_.derivative(rho) / (mu * rho);
    for (std::size_t i = 0; i < n; ++i) out[i] = (g * system.masses[i]) * (system.positions[i] - cm);
}

double Potential::of_rho(double rho) const {
    switch (kind_) {
        case Kind::hyperradial: return fn_.value(rho);
        case Kind::averaged: {
            const auto& a = *avg_;
            CompensatedSum s;
            for (std::size_t k = 0; k < a.n_samples; ++k) {
                double v = 0.0;
                for (std::size_t p = 0; p < a.pairs; ++p) v += fn_.value(rho * a.distances[k * a.pairs + p]);
                s.add(v);
            }
            return s.value() / static_cast<double>(a.n_samples);
        }
        case Kind::pairwise: break;
    }
    throw InvalidInput("a pairwise potential is not a function of the hyperradius alone");
}

double Potential::derivative_of_rho(double rho) const {
    switch (kind_) {
        case Kind::hyperradial: return fn_.derivative(rho);
        case Kind::averaged: {
            const auto& a = *avg_;
            CompensatedSum s;
            for (std::size_t k = 0; k < a.n_samples; ++k) {
                double v = 0.0;
                for (std::size_t p = 0; p < a.pairs; ++p) {
                    const double d = a.distances[k * a.pairs + p];
                    v += fn_.derivative(rho * d) * d;
                }
                s.add(v);
            }
            return s.value() / static_cast<double>(a.n_samples);
        }
        case Kind::pairwise: break;
    }
    throw InvalidInput("a pairwise potential is not a function of the hyperradius alone");
}

AverageEstimate Potential::average_at(double rho) const {
    AverageEstimate out;
    if (kind_ != Kind::averaged) return out;
    const auto& a = *avg_;
    double mean = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < a.n_samples; ++k) {
        double v = 0.0;
        for (std::size_t p = 0; p < a.pairs; ++p) v += fn_.value(rho * a.distances[k * a.pairs + p]);
        const double delta = v - mean;
        mean += delta / static_cast<double>(k + 1);
        m2 += delta * (v - mean);
    }
    out.value = mean;
    out.samples = a.n_samples;
    out.rejected = a.rejected;
    out.std_error = a.n_samples > 1 ? std::sqrt(m2 / static_cast<double>(a.n_samples - 1) /
                                              static_cast<double>(a.n_samples))
                                  : 0.0;
    return out;
}

std::vector<double> sample_unit_pair_distances(const JacobiTree& tree, std::span<const double> masses,
                                               std::mt19937_64& rng) {
    const std::size_t n = masses.size();
    if (n != tree.particle_count()) throw InvalidInput("mass count does not match the Jacobi tree");
    const std::size_t dim = 3 * (n - 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    MassWeightedVector mw;
    mw.mu = nbody_reduced_mass(masses);
    mw.rho_vec.resize(dim);
    mw.vel_vec.assign(dim, 0.0);
    double r = 0.0;
    while (!(r > 0.0)) {
        for (double& x : mw.rho_vec) x = normal(rng);
        r = norm(mw.rho_vec);
    }
    for (double& x : mw.rho_vec) x /= r;
    const ParticleSystem sys = from_jacobi(unweight(mw, tree, masses), tree, masses);
    std::vector<double> out;
    out.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) out.push_back(norm(sys.positions[j] - sys.positions[i]));
    return out;
}

AverageEstimate effective_potential(const RadialFunction& pair, const JacobiTree& tree,
                                    std::span<const double> masses, double rho, std::size_t n_samples,
                                    std::uint64_t seed) {
    if (!(rho > 0.0)) throw InvalidInput("effective potential needs rho > 0");
    if (n_samples == 0) throw InvalidInput("effective potential needs at least one sample");
    std::mt19937_64 rng(seed);
    AverageEstimate out;
    double mean = 0.0, m2 = 0.0;
    while (out.samples < n_samples) {
        const auto d = sample_unit_pair_distances(tree, masses, rng);
        double v = 0.0;
        for (double x : d) v += pair.value(rho * x);
        if (!std::isfinite(v)) {
            if (++out.rejected > 10 * n_samples)
                throw Error("effective potential: rejection cap exceeded at rho = " + std::to_string(rho));
            continue;
        }
        ++out.samples;
        const double delta = v - mean;
        mean += delta / static_cast<double>(out.samples);
        m2 += delta * (v - mean);
    }
    out.value = mean;
    out.std_error = n_samples > 1 ? std::sqrt(m2 / static_cast<double>(n_samples - 1) / static_cast<double>(n_samples))
                                : 0.0;
    return out;
}

}  // namespace hypertree
