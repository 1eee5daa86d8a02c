#pragma once

#include "crn/dynamics.hpp"
#include "crn/network.hpp"
#include "crn/optimizer.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace crn {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form of a double (stable across runs).
std::string format_double(double x);

Json network_to_json(const ReactionNetwork& net);
ReactionNetwork network_from_json(const Json& j);

Json matrix_to_json(const Mat& m);   // dense row-major nested arrays
Mat matrix_from_json(const Json& j);
Json vector_to_json(const Vec& v);
Vec vector_from_json(const Json& j);

/// Whitespace-delimited matrix: one row per line.
Mat read_matrix_text(std::istream& in);

/// CSV layout: t,<species...>,entropy,dissipation (blank entropy cells when
/// the trajectory has no equilibrium).
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const std::vector<std::string>& species);

/// CSV layout: iter,f,grad_norm,<x components>; a trailing comment line
/// carries the termination record as JSON.
void write_trace_csv(std::ostream& out, const DescentTrace& trace,
                     const std::vector<std::string>& columns);

}  // namespace crn
