#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "hypertree/dynamics.hpp"
#include "hypertree/grandang.hpp"
#include "hypertree/jacobi.hpp"
#include "hypertree/scatter.hpp"

namespace hypertree {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

/// 17 significant digits; "nan"/"inf"/"-inf" for non-finite values.
std::string format_double(double v);

/// Serialises with every float at 17 significant digits and non-finite
/// numbers as null. Key order is preserved.
std::string dump_json(const OrderedJson& j, int indent = 2);

/// {"masses":[...], "positions":[[x,y,z],...], "velocities":[[...],...]}.
/// Unknown keys are rejected; velocities default to zero.
ParticleSystem system_from_json(const Json& j);
OrderedJson to_json(const ParticleSystem& system);

OrderedJson to_json(const Decomposition& d, double tensor_total);
OrderedJson to_json(const ScatterResult& r, double impact_parameter);

/// Header `t,E,Pcm,Ltot,rho,lambda_sq,decomp_total,x1,y1,z1,...`.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

}  // namespace hypertree
