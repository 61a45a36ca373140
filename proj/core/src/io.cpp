#include "gasadapt/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "gasadapt/errors.hpp"
#include "json.hpp"

namespace gasadapt {

namespace {

using json = nlohmann::ordered_json;

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON (" +
                     e.what() + ")");
  }
}

/// Field access with "source: path" context in every error.
class Fields {
 public:
  Fields(const json& obj, std::string source, std::string path)
      : obj_(obj), source_(std::move(source)), path_(std::move(path)) {
    if (!obj_.is_object()) fail("", "expected an object");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    std::string where = path_;
    if (!key.empty()) where += (where.empty() ? "" : ".") + key;
    throw ParseError(source_ + ": " + (where.empty() ? "document" : where) + ": " + msg);
  }

  bool has(const std::string& key) const { return obj_.contains(key) && !obj_.at(key).is_null(); }

  double number(const std::string& key) const {
    if (!has(key)) fail(key, "missing required number");
    return as_number(key);
  }

  std::optional<double> opt_number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return as_number(key);
  }

  double number_or(const std::string& key, double fallback) const { return opt_number(key).value_or(fallback); }

  std::string string(const std::string& key) const {
    if (!has(key)) fail(key, "missing required string");
    const auto& v = obj_.at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  std::string string_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? string(key) : fallback;
  }

  bool boolean_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  int integer_or(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<int>();
  }

  const json& array(const std::string& key, bool required) const {
    static const json empty = json::array();
    if (!has(key)) {
      if (required) fail(key, "missing required array");
      return empty;
    }
    const auto& v = obj_.at(key);
    if (!v.is_array()) fail(key, "expected an array");
    return v;
  }

  const json& object(const std::string& key) const {
    if (!has(key)) fail(key, "missing required object");
    const auto& v = obj_.at(key);
    if (!v.is_object()) fail(key, "expected an object");
    return v;
  }

  void reject_unknown(const std::set<std::string>& known) const {
    for (const auto& [k, v] : obj_.items())
      if (!known.count(k)) fail(k, "unknown field");
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const std::string& source() const { return source_; }

 private:
  double as_number(const std::string& key) const {
    const auto& v = obj_.at(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }

  const json& obj_;
  std::string source_;
  std::string path_;
};

void check_version(const Fields& f) {
  const int v = f.integer_or("format_version", kFormatVersion);
  if (v != kFormatVersion) f.fail("format_version", "unsupported version " + std::to_string(v));
}

double pressure_factor(const Fields& f) {
  const std::string units = f.string_or("units", "pa");
  if (units == "pa" || units == "Pa") return 1.0;
  if (units == "bar") return kPascalPerBar;
  f.fail("units", "expected \"pa\" or \"bar\", got \"" + units + "\"");
}

json flow_bound(double v) { return std::abs(v) >= kUnboundedFlow ? json(nullptr) : json(v); }

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("failed writing '" + path + "'");
}

NetworkDocument parse_network(const std::string& text, const std::string& source) {
  const json doc = parse_json(text, source);
  const Fields top(doc, source, "");
  check_version(top);
  const double pf = pressure_factor(top);

  NetworkDocument out;
  if (top.has("gas")) {
    const Fields g(top.object("gas"), source, "gas");
    out.gas.specific_gas_constant = g.number_or("specific_gas_constant", out.gas.specific_gas_constant);
    out.gas.temperature = g.number_or("temperature", out.gas.temperature);
    out.gas.compressibility = g.number_or("compressibility", out.gas.compressibility);
    out.gas.gravity = g.number_or("gravity", out.gas.gravity);
  }

  std::vector<Node> nodes;
  const auto& jn = top.array("nodes", true);
  for (std::size_t i = 0; i < jn.size(); ++i) {
    const Fields f(jn[i], source, "nodes[" + std::to_string(i) + "]");
    Node n;
    n.id = f.string("id");
    const std::string kind = f.string_or("kind", "inner");
    const auto k = node_kind_from_string(kind);
    if (!k) f.fail("kind", "expected entry, exit or inner, got \"" + kind + "\"");
    n.kind = *k;
    n.pressure_min = f.number("pressure_min") * pf;
    n.pressure_max = f.number("pressure_max") * pf;
    n.elevation = f.number_or("elevation", 0.0);
    nodes.push_back(std::move(n));
  }

  std::vector<Pipe> pipes;
  const auto& jp = top.array("pipes", false);
  for (std::size_t i = 0; i < jp.size(); ++i) {
    const Fields f(jp[i], source, "pipes[" + std::to_string(i) + "]");
    Pipe p;
    p.id = f.string("id");
    p.from = f.string("from");
    p.to = f.string("to");
    p.length = f.number("length");
    p.diameter = f.number("diameter");
    p.cross_area = f.has("area") ? f.number("area") : circle_area(p.diameter);
    p.roughness = f.opt_number("roughness");
    if (f.has("friction")) {
      p.friction = f.number("friction");
    } else if (p.roughness) {
      if (!(p.diameter > 0.0 && *p.roughness > 0.0 && *p.roughness < p.diameter))
        f.fail("roughness", "needs 0 < roughness < diameter to derive the friction factor");
      p.friction = nikuradse_friction(p.diameter, *p.roughness);
    } else {
      f.fail("friction", "either friction or roughness is required");
    }
    p.slope = f.opt_number("slope");
    p.flow_min = f.number_or("flow_min", -kUnboundedFlow);
    p.flow_max = f.number_or("flow_max", kUnboundedFlow);
    pipes.push_back(std::move(p));
  }

  std::vector<Compressor> comps;
  const auto& jc = top.array("compressors", false);
  for (std::size_t i = 0; i < jc.size(); ++i) {
    const Fields f(jc[i], source, "compressors[" + std::to_string(i) + "]");
    Compressor c;
    c.id = f.string("id");
    c.from = f.string("from");
    c.to = f.string("to");
    c.lift_max = f.number("lift_max") * pf;
    c.cost_coeff = f.number("cost") / pf;
    c.flow_min = f.number_or("flow_min", -kUnboundedFlow);
    c.flow_max = f.number_or("flow_max", kUnboundedFlow);
    comps.push_back(std::move(c));
  }

  out.network = Network(std::move(nodes), std::move(pipes), std::move(comps));
  ValidationReport report = validate_gas(out.gas);
  const ValidationReport net_report = validate_network(out.network, Scenario{});
  report.issues.insert(report.issues.end(), net_report.issues.begin(), net_report.issues.end());
  if (!report.ok()) {
    std::string msg = source + ": invalid network";
    for (const auto& issue : report.issues) msg += "\n  " + issue;
    throw ValidationError(msg);
  }
  return out;
}

NetworkDocument load_network(const std::string& path) { return parse_network(read_file(path), path); }

std::string network_to_json(const Network& net, const GasParameters& gas) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["units"] = "pa";
  doc["gas"] = {{"specific_gas_constant", gas.specific_gas_constant},
                {"temperature", gas.temperature},
                {"compressibility", gas.compressibility},
                {"gravity", gas.gravity}};
  json nodes = json::array();
  for (const auto& n : net.nodes())
    nodes.push_back({{"id", n.id},
                     {"kind", to_string(n.kind)},
                     {"pressure_min", n.pressure_min},
                     {"pressure_max", n.pressure_max},
                     {"elevation", n.elevation}});
  doc["nodes"] = nodes;
  json pipes = json::array();
  for (const auto& p : net.pipes()) {
    json jp = {{"id", p.id},           {"from", p.from},         {"to", p.to},
               {"length", p.length},   {"diameter", p.diameter}, {"area", p.cross_area},
               {"friction", p.friction}};
    if (p.roughness) jp["roughness"] = *p.roughness;
    if (p.slope) jp["slope"] = *p.slope;
    jp["flow_min"] = flow_bound(p.flow_min);
    jp["flow_max"] = flow_bound(p.flow_max);
    pipes.push_back(jp);
  }
  doc["pipes"] = pipes;
  json comps = json::array();
  for (const auto& c : net.compressors())
    comps.push_back({{"id", c.id},
                     {"from", c.from},
                     {"to", c.to},
                     {"lift_max", c.lift_max},
                     {"cost", c.cost_coeff},
                     {"flow_min", flow_bound(c.flow_min)},
                     {"flow_max", flow_bound(c.flow_max)}});
  doc["compressors"] = comps;
  return doc.dump(2) + "\n";
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  const json doc = parse_json(text, source);
  const Fields top(doc, source, "");
  check_version(top);
  Scenario scn;
  for (const auto& [id, v] : top.object("boundary_flows").items()) {
    if (!v.is_number()) top.fail("boundary_flows." + id, "expected a number");
    scn.boundary_flows[id] = v.get<double>();
  }
  return scn;
}

Scenario load_scenario(const std::string& path) { return parse_scenario(read_file(path), path); }

std::string scenario_to_json(const Scenario& scn) {
  json doc;
  doc["format_version"] = kFormatVersion;
  json flows = json::object();
  for (const auto& [id, m] : scn.boundary_flows) flows[id] = m;
  doc["boundary_flows"] = flows;
  return doc.dump(2) + "\n";
}

AdaptiveConfig parse_config(const std::string& text, const std::string& source) {
  const json doc = parse_json(text, source);
  const Fields f(doc, source, "");
  check_version(f);
  f.reject_unknown({"format_version", "eps_bar", "theta_d", "theta_m", "phi_d", "phi_m", "tau", "mu", "eps_opt",
                    "max_outer_iterations", "initial_intervals", "split_tolerance", "adaptive_eps_opt", "threads",
                    "nlp_max_iterations"});
  AdaptiveConfig c;
  c.eps = bar_to_pascal(f.number_or("eps_bar", pascal_to_bar(c.eps)));
  c.theta_d = f.number_or("theta_d", c.theta_d);
  c.theta_m = f.number_or("theta_m", c.theta_m);
  c.phi_d = f.number_or("phi_d", c.phi_d);
  c.phi_m = f.number_or("phi_m", c.phi_m);
  c.tau = f.number_or("tau", c.tau);
  c.mu = f.integer_or("mu", c.mu);
  c.eps_opt = f.number_or("eps_opt", c.eps_opt);
  c.max_outer_iterations = f.integer_or("max_outer_iterations", c.max_outer_iterations);
  c.initial_intervals = f.integer_or("initial_intervals", c.initial_intervals);
  c.split_tolerance = f.boolean_or("split_tolerance", c.split_tolerance);
  c.adaptive_eps_opt = f.boolean_or("adaptive_eps_opt", c.adaptive_eps_opt);
  c.threads = f.integer_or("threads", c.threads);
  c.nlp.max_iterations = f.integer_or("nlp_max_iterations", c.nlp.max_iterations);
  return c;
}

AdaptiveConfig load_config(const std::string& path) { return parse_config(read_file(path), path); }

std::string config_to_json(const AdaptiveConfig& c) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["eps_bar"] = pascal_to_bar(c.eps);
  doc["theta_d"] = c.theta_d;
  doc["theta_m"] = c.theta_m;
  doc["phi_d"] = c.phi_d;
  doc["phi_m"] = c.phi_m;
  doc["tau"] = c.tau;
  doc["mu"] = c.mu;
  doc["eps_opt"] = c.eps_opt;
  doc["max_outer_iterations"] = c.max_outer_iterations;
  doc["initial_intervals"] = c.initial_intervals;
  doc["split_tolerance"] = c.split_tolerance;
  doc["adaptive_eps_opt"] = c.adaptive_eps_opt;
  doc["threads"] = c.threads;
  doc["nlp_max_iterations"] = c.nlp.max_iterations;
  return doc.dump(2) + "\n";
}

std::string solution_to_json(const NlpSolution& s, const Network& net) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["units"] = "pa";
  doc["status"] = to_string(s.status);
  doc["objective"] = s.objective;
  doc["kkt_error"] = s.kkt_error;
  doc["constraint_violation"] = s.constraint_violation;
  doc["iterations"] = s.iterations;
  json p = json::object(), q = json::object(), l = json::object();
  for (const auto& n : net.nodes()) p[n.id] = s.node_pressures.at(n.id);
  for (const auto& a : net.pipes()) q[a.id] = s.arc_flows.at(a.id);
  for (const auto& c : net.compressors()) q[c.id] = s.arc_flows.at(c.id);
  for (const auto& c : net.compressors()) l[c.id] = s.lifts.at(c.id);
  doc["node_pressures"] = p;
  doc["arc_flows"] = q;
  doc["lifts"] = l;
  json pipes = json::object();
  for (const auto& a : net.pipes()) {
    const auto& d = s.state.at(a.id);
    pipes[a.id] = {{"level", level_number(d.level)},
                   {"intervals", d.intervals},
                   {"stepsize", a.length / d.intervals},
                   {"profile", s.pipe_profiles.at(a.id)}};
  }
  doc["pipes"] = pipes;
  return doc.dump(2) + "\n";
}

NlpSolution parse_solution(const std::string& text, const std::string& source) {
  const json doc = parse_json(text, source);
  const Fields top(doc, source, "");
  check_version(top);
  const double pf = pressure_factor(top);
  NlpSolution s;
  const std::string status = top.string_or("status", "LocalOptimum");
  if (status == "LocalOptimum") s.status = NlpStatus::LocalOptimum;
  else if (status == "Infeasible") s.status = NlpStatus::Infeasible;
  else if (status == "IterationLimit") s.status = NlpStatus::IterationLimit;
  else top.fail("status", "unknown status \"" + status + "\"");
  s.objective = top.number_or("objective", 0.0);
  auto read_map = [&](const std::string& key, double factor, std::map<std::string, double>& out) {
    for (const auto& [id, v] : top.object(key).items()) {
      if (!v.is_number()) top.fail(key + "." + id, "expected a number");
      out[id] = v.get<double>() * factor;
    }
  };
  read_map("node_pressures", pf, s.node_pressures);
  read_map("arc_flows", 1.0, s.arc_flows);
  if (top.has("lifts")) read_map("lifts", pf, s.lifts);
  for (const auto& [id, v] : top.object("pipes").items()) {
    const Fields f(v, source, "pipes." + id);
    const int level = f.integer_or("level", 3);
    const auto lv = model_level_from_int(level);
    if (!lv) f.fail("level", "expected 1, 2 or 3");
    const int n = f.integer_or("intervals", 0);
    if (n <= 0) f.fail("intervals", "missing or non-positive interval count");
    s.state[id] = {*lv, n};
  }
  return s;
}

NlpSolution load_solution(const std::string& path) { return parse_solution(read_file(path), path); }

void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace) {
  os << "solve_index,outer_k,inner_j,n_vars,n_cons,nlp_seconds,ivp_seconds,sum_eta_d,sum_eta_m,sum_eta,avg_eta,"
        "n_refined,n_switched_up,n_coarsened,n_switched_down\n";
  for (const auto& r : trace)
    os << r.solve_index << ',' << r.outer_k << ',' << r.inner_j << ',' << r.n_vars << ',' << r.n_cons << ','
       << num17(r.nlp_seconds) << ',' << num17(r.ivp_seconds) << ',' << num17(r.sum_eta_d) << ','
       << num17(r.sum_eta_m) << ',' << num17(r.sum_eta) << ',' << num17(r.avg_eta) << ',' << r.n_refined << ','
       << r.n_switched_up << ',' << r.n_coarsened << ',' << r.n_switched_down << '\n';
}

void write_estimates_csv(std::ostream& os, const std::vector<PipeEstimates>& estimates) {
  os << "pipe_id,level,intervals,stepsize,eta_d,eta_m,eta\n";
  for (const auto& e : estimates) {
    const auto& c = e.current;
    os << c.pipe_id << ',' << level_number(c.level) << ',' << c.intervals << ',' << num17(c.stepsize) << ','
       << num17(c.eta_d) << ',' << num17(c.eta_m) << ',' << num17(c.eta) << '\n';
  }
}

void write_profile_csv(std::ostream& os, const std::vector<double>& positions, const std::vector<double>& values) {
  os << "x,p\n";
  for (std::size_t k = 0; k < values.size(); ++k) os << num17(positions[k]) << ',' << num17(values[k]) << '\n';
}

}  // namespace gasadapt
