#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gasadapt/controller.hpp"
#include "gasadapt/network.hpp"
#include "gasadapt/nlp.hpp"

namespace gasadapt {

inline constexpr int kFormatVersion = 1;

struct NetworkDocument {
  Network network;
  GasParameters gas;
};

/// Parses a network document. Pressures and lifts are read in the unit named
/// by the optional "units" field ("pa" or "bar", default "pa"); lengths in m,
/// flows in kg/s. Missing cross sections are derived from the diameter and a
/// missing friction factor from the roughness. Throws ParseError with field
/// context and ValidationError listing every structural issue.
NetworkDocument parse_network(const std::string& text, const std::string& source = "<network>");
NetworkDocument load_network(const std::string& path);
/// SI document that parses back to identical values.
std::string network_to_json(const Network& net, const GasParameters& gas);

Scenario parse_scenario(const std::string& text, const std::string& source = "<scenario>");
Scenario load_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& scn);

/// Tolerances in the config document: "eps_bar" (bar), "eps_opt" (solver
/// tolerance). Unknown keys are rejected.
AdaptiveConfig parse_config(const std::string& text, const std::string& source = "<config>");
AdaptiveConfig load_config(const std::string& path);
std::string config_to_json(const AdaptiveConfig& config);

/// Solution document: status, objective, node pressures, arc flows, lifts, and
/// per-pipe level, interval count, stepsize, and gridpoint pressures.
std::string solution_to_json(const NlpSolution& solution, const Network& net);
/// Reads the fields of a solution document needed to re-evaluate estimates.
NlpSolution parse_solution(const std::string& text, const std::string& source = "<solution>");
NlpSolution load_solution(const std::string& path);

inline constexpr int kTraceColumns = 15;
void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace);
void write_estimates_csv(std::ostream& os, const std::vector<PipeEstimates>& estimates);
/// CSV of positions and pressures along one pipe.
void write_profile_csv(std::ostream& os, const std::vector<double>& positions, const std::vector<double>& values);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace gasadapt
