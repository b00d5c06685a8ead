#include "macrospin/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace macrospin::scenario {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  if (!obj.is_object())
    throw ValidationError(where + ": expected an object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) ok = true;
    if (!ok)
      throw ValidationError(where + ": unknown key '" + item.key() + "'");
  }
}

double get_number(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key))
    throw ValidationError(where + ": missing required field '" + key + "'");
  if (!obj[key].is_number())
    throw ValidationError(where + ": field '" + key + "' must be a number");
  return obj[key].get<double>();
}

double get_number_or(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  return obj[key].get<double>();
}

Engine parse_engine(const std::string& s) {
  if (s == "closed") return Engine::closed;
  if (s == "toy") return Engine::toy;
  if (s == "master") return Engine::master;
  if (s == "qsd") return Engine::qsd;
  throw ValidationError("unknown engine '" + s + "'");
}

EnvironmentSpec parse_environment(const json& obj) {
  require_keys(obj, "environment", {"type", "gamma_dp", "gamma_th", "n_bar"});
  EnvironmentSpec env;
  const std::string type = obj.value("type", "none");
  if (type == "none") {
    env.type = EnvironmentSpec::Type::none;
  } else if (type == "dephasing") {
    env.type = EnvironmentSpec::Type::dephasing;
    env.gamma_dp = get_number(obj, "environment", "gamma_dp");
  } else if (type == "thermal") {
    env.type = EnvironmentSpec::Type::thermal;
    env.gamma_th = get_number(obj, "environment", "gamma_th");
    env.n_bar = get_number(obj, "environment", "n_bar");
  } else {
    throw ValidationError("unknown environment type '" + type + "'");
  }
  return env;
}

husimi::SlotPartition parse_partition(const json& obj) {
  require_keys(obj, "partition", {"type", "cap", "slots"});
  if (obj.contains("type")) {
    const std::string type = obj["type"].get<std::string>();
    if (type == "whole_sphere") return husimi::SlotPartition::whole_sphere();
    if (type == "hemispheres") return husimi::SlotPartition::hemispheres();
    if (type == "three_region")
      return husimi::SlotPartition::three_region(
          get_number_or(obj, "cap", M_PI / 3.0));
    throw ValidationError("unknown partition type '" + type + "'");
  }
  if (!obj.contains("slots"))
    throw ValidationError("partition: needs 'type' or 'slots'");
  husimi::SlotPartition p;
  double min_extent = M_PI;
  for (const json& slot : obj["slots"]) {
    require_keys(slot, "partition.slots[]", {"label", "rects"});
    std::vector<husimi::SlotRect> rects;
    for (const json& r : slot["rects"]) {
      require_keys(r, "partition rect", {"theta", "phi"});
      husimi::SlotRect rect{0.0, M_PI, 0.0, 2.0 * M_PI};
      if (r.contains("theta")) {
        rect.theta_lo = r["theta"].at(0).get<double>();
        rect.theta_hi = r["theta"].at(1).get<double>();
      }
      if (r.contains("phi")) {
        rect.phi_lo = r["phi"].at(0).get<double>();
        rect.phi_hi = r["phi"].at(1).get<double>();
      }
      min_extent = std::min(min_extent, rect.theta_hi - rect.theta_lo);
      rects.push_back(rect);
    }
    p.slots.push_back(std::move(rects));
    p.labels.push_back(slot.value("label", "slot" +
                                  std::to_string(p.slots.size() - 1)));
  }
  p.coarse_graining_scale = min_extent;
  return p;
}

std::vector<double> parse_time_grid(const json& obj) {
  require_keys(obj, "time_grid", {"start", "stop", "points", "times"});
  if (obj.contains("times")) {
    std::vector<double> ts = obj["times"].get<std::vector<double>>();
    if (ts.empty()) throw ValidationError("time_grid.times must not be empty");
    return ts;
  }
  const double start = get_number(obj, "time_grid", "start");
  const double stop = get_number(obj, "time_grid", "stop");
  const int points = static_cast<int>(get_number(obj, "time_grid", "points"));
  if (points < 2 || stop <= start)
    throw ValidationError("time_grid: needs stop > start and points >= 2");
  return dynamics::linear_grid(start, stop, points);
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("scenario is not valid JSON: ") +
                          e.what());
  }
  require_keys(root, "scenario",
               {"name", "engine", "system", "environment", "representation",
                "toy", "time_grid", "partition", "bins", "trajectories",
                "analysis", "output"});

  Scenario s;
  if (!root.contains("name"))
    throw ValidationError("scenario: missing required field 'name'");
  s.name = root["name"].get<std::string>();
  if (!root.contains("engine"))
    throw ValidationError("scenario: missing required field 'engine'");
  s.engine = parse_engine(root["engine"].get<std::string>());

  if (!root.contains("system"))
    throw ValidationError("scenario: missing required field 'system'");
  const json& sys = root["system"];
  require_keys(sys, "system", {"N", "j", "omega"});
  if (sys.contains("N")) {
    s.n_qubits = sys["N"].get<int>();
  } else if (sys.contains("j")) {
    const double j = sys["j"].get<double>();
    s.n_qubits = static_cast<int>(std::lround(2.0 * j));
    if (std::abs(2.0 * j - s.n_qubits) > 1e-12)
      throw ValidationError("system.j must be a half-integer");
  } else {
    throw ValidationError("system: needs 'N' or 'j'");
  }
  s.omega = get_number(sys, "system", "omega");
  if (s.omega <= 0.0) throw ValidationError("system.omega must be positive");

  if (root.contains("environment"))
    s.environment = parse_environment(root["environment"]);

  if (root.contains("representation")) {
    const std::string rep = root["representation"].get<std::string>();
    if (rep == "dicke")
      s.representation = dynamics::Representation::dicke;
    else if (rep == "full")
      s.representation = dynamics::Representation::full;
    else
      throw ValidationError("representation must be 'dicke' or 'full'");
  }

  if (root.contains("toy")) {
    const json& toy = root["toy"];
    require_keys(toy, "toy", {"delta_t", "n_steps"});
    s.toy_delta_t = get_number(toy, "toy", "delta_t");
    s.toy_n_steps = static_cast<int>(get_number(toy, "toy", "n_steps"));
  }

  if (root.contains("time_grid")) {
    s.times = parse_time_grid(root["time_grid"]);
  } else if (s.engine == Engine::toy && s.toy_n_steps > 0) {
    for (int n = 0; n <= s.toy_n_steps; ++n)
      s.times.push_back(n * s.toy_delta_t);
  } else {
    throw ValidationError("scenario: missing required field 'time_grid'");
  }

  s.partition = root.contains("partition")
                    ? parse_partition(root["partition"])
                    : husimi::SlotPartition::three_region();

  if (root.contains("bins")) {
    const json& bins = root["bins"];
    require_keys(bins, "bins", {"edges"});
    if (bins.contains("edges"))
      s.bin_edges = bins["edges"].get<std::vector<double>>();
  }

  if (root.contains("trajectories")) {
    const json& tr = root["trajectories"];
    require_keys(tr, "trajectories", {"M", "seed"});
    s.trajectories = static_cast<std::size_t>(get_number(tr, "trajectories", "M"));
    s.seed = static_cast<std::uint64_t>(get_number_or(tr, "seed", 0.0));
  }

  if (root.contains("analysis")) {
    const json& an = root["analysis"];
    require_keys(an, "analysis", {"mr_check", "continuity", "decay_fit"});
    if (an.contains("mr_check")) {
      const json& mr = an["mr_check"];
      require_keys(mr, "analysis.mr_check", {"pairs", "epsilon"});
      MrSpec spec;
      spec.epsilon = get_number_or(mr, "epsilon", 0.02);
      if (!mr.contains("pairs"))
        throw ValidationError("analysis.mr_check: missing 'pairs'");
      for (const json& pair : mr["pairs"]) {
        if (!pair.is_array() || pair.size() != 2)
          throw ValidationError("mr_check pairs must be [t_i, t_j] arrays");
        spec.pairs.push_back({pair[0].get<double>(), pair[1].get<double>()});
      }
      s.mr_check = spec;
    }
    if (an.contains("continuity")) {
      const json& c = an["continuity"];
      require_keys(c, "analysis.continuity", {"eps_mid", "delta_transfer"});
      ContinuitySpec spec;
      spec.eps_mid = get_number_or(c, "eps_mid", 0.05);
      spec.delta_transfer = get_number_or(c, "delta_transfer", 0.1);
      s.continuity = spec;
    }
    s.decay_fit = an.value("decay_fit", false);
  }

  if (root.contains("output")) {
    const json& out = root["output"];
    require_keys(out, "output",
                 {"histogram", "survival", "analysis", "run_record"});
    s.histogram_file = out.value("histogram", "");
    s.survival_file = out.value("survival", "");
    s.analysis_file = out.value("analysis", "");
    s.run_record_file = out.value("run_record", "");
  }
  if (s.histogram_file.empty()) s.histogram_file = s.name + "_hist.csv";
  if (s.survival_file.empty()) s.survival_file = s.name + "_survival.csv";
  if (s.analysis_file.empty()) s.analysis_file = s.name + "_analysis.json";
  if (s.run_record_file.empty()) s.run_record_file = s.name + "_run.json";
  return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

ValidationReport validate(const Scenario& s) {
  ValidationReport report;
  if (s.n_qubits < 1) throw ValidationError("system requires N >= 1");
  if (s.representation == dynamics::Representation::full && s.n_qubits > 12)
    throw ValidationError("full representation limited to N <= 12");
  if (s.n_qubits > 20)
    throw ValidationError("Dicke representation limited to N <= 20");

  if (s.engine == Engine::toy) {
    if (s.environment.type != EnvironmentSpec::Type::none)
      throw ValidationError(
          "toy engine has dephasing built in; environment must be 'none'");
    if (s.toy_delta_t <= 0.0)
      throw ValidationError("toy engine requires toy.delta_t > 0");
    const double odt = s.omega * s.toy_delta_t;
    if (odt < 0.05)
      report.warnings.push_back(
          "Zeno regime: omega*delta_t < 0.05 freezes the initial state");
    if (odt > 1.0)
      report.warnings.push_back(
          "step exceeds the dynamical timescale (omega*delta_t > 1)");
    for (double t : s.times) {
      const double n = t / s.toy_delta_t;
      if (std::abs(n - std::lround(n)) > 1e-9 * std::max(1.0, n))
        throw ValidationError("toy time grid must sit on multiples of delta_t");
    }
  }
  if (s.engine == Engine::closed &&
      s.environment.type != EnvironmentSpec::Type::none)
    throw ValidationError("closed engine requires environment 'none'");
  if (s.engine == Engine::qsd) {
    if (s.trajectories < 1)
      throw ValidationError("qsd engine requires trajectories.M >= 1");
    if (s.mr_check)
      throw ValidationError(
          "mr_check supports the closed/toy/master channels, not qsd");
  }

  if (s.times.empty()) throw ValidationError("time grid must not be empty");
  for (std::size_t i = 1; i < s.times.size(); ++i)
    if (s.times[i] <= s.times[i - 1])
      throw ValidationError("time grid must be strictly ascending");

  const spin::SpinJ j = s.spin_j();
  if (!s.bin_edges.empty()) {
    if (s.bin_edges.size() < 2 || s.bin_edges.front() > -j.j() ||
        s.bin_edges.back() < j.j())
      throw ValidationError("bins must cover [-j, +j]");
  }
  if (!s.partition.well_coarse_grained(j))
    report.warnings.push_back(
        "coarse-graining scale below 3/sqrt(j); slots are not macroscopic");
  if (s.continuity) {
    double max_dt = 0.0;
    for (std::size_t i = 1; i < s.times.size(); ++i)
      max_dt = std::max(max_dt, s.times[i] - s.times[i - 1]);
    if (max_dt * s.omega > 0.1 + 1e-12)
      report.warnings.push_back(
          "continuity analysis with omega*dt > 0.1 will be flagged unreliable");
  }
  for (const auto& pair :
       s.mr_check ? s.mr_check->pairs : std::vector<macroreal::TimePair>{}) {
    if (pair.t_i > pair.t_j)
      throw ValidationError("mr_check pairs require t_i <= t_j");
  }
  return report;
}

const std::map<std::string, std::string>& bundled_scenarios() {
  static const std::map<std::string, std::string> catalog = {
      {"toy_decay", R"({
  "name": "toy_decay",
  "engine": "toy",
  "system": {"N": 20, "omega": 1.0},
  "toy": {"delta_t": 0.2, "n_steps": 64},
  "partition": {"type": "three_region"},
  "analysis": {"decay_fit": true}
})"},
      {"fig2_dephasing", R"({
  "name": "fig2_dephasing",
  "engine": "master",
  "system": {"N": 10, "omega": 1.0},
  "environment": {"type": "dephasing", "gamma_dp": 1.0},
  "time_grid": {"start": 0.0, "stop": 15.0, "points": 301},
  "partition": {"type": "three_region"},
  "analysis": {"continuity": {"eps_mid": 0.05, "delta_transfer": 0.1}}
})"},
      {"fig2_thermal", R"({
  "name": "fig2_thermal",
  "engine": "master",
  "system": {"N": 10, "omega": 1.0},
  "environment": {"type": "thermal", "gamma_th": 0.1, "n_bar": 10.0},
  "time_grid": {"start": 0.0, "stop": 3.0, "points": 61},
  "partition": {"type": "three_region"},
  "analysis": {"continuity": {"eps_mid": 0.05, "delta_transfer": 0.1}}
})"},
      {"mr_closed_violation", R"({
  "name": "mr_closed_violation",
  "engine": "closed",
  "system": {"N": 20, "omega": 1.0},
  "time_grid": {"times": [0.0, 0.7853981633974483, 1.5707963267948966]},
  "partition": {"type": "hemispheres"},
  "analysis": {"mr_check": {"pairs": [[0.7853981633974483, 1.5707963267948966]],
                            "epsilon": 0.02}}
})"},
      {"mr_toy_satisfied", R"({
  "name": "mr_toy_satisfied",
  "engine": "toy",
  "system": {"N": 20, "omega": 1.0},
  "toy": {"delta_t": 0.1, "n_steps": 250},
  "partition": {"type": "hemispheres"},
  "analysis": {"mr_check": {"pairs": [[0.5, 1.0], [0.5, 2.5], [1.0, 5.0],
                                      [2.5, 10.0], [5.0, 25.0]],
                            "epsilon": 0.02},
               "decay_fit": true}
})"},
      {"qsd_dephasing", R"({
  "name": "qsd_dephasing",
  "engine": "qsd",
  "system": {"N": 10, "omega": 1.0},
  "environment": {"type": "dephasing", "gamma_dp": 1.0},
  "time_grid": {"start": 0.0, "stop": 0.02, "points": 11},
  "partition": {"type": "three_region"},
  "trajectories": {"M": 200, "seed": 12345}
})"},
      {"continuity_witness_demo", R"({
  "name": "continuity_witness_demo",
  "engine": "toy",
  "system": {"N": 20, "omega": 1.0},
  "toy": {"delta_t": 0.1, "n_steps": 250},
  "partition": {"type": "three_region"},
  "analysis": {"continuity": {"eps_mid": 0.05, "delta_transfer": 0.1},
               "decay_fit": true}
})"}};
  return catalog;
}

Scenario resolve_scenario(const std::string& path_or_name) {
  if (std::filesystem::exists(path_or_name))
    return load_scenario_file(path_or_name);
  const auto& catalog = bundled_scenarios();
  const auto it = catalog.find(path_or_name);
  if (it == catalog.end())
    throw ValidationError("no such scenario file or bundled scenario: " +
                          path_or_name);
  return parse_scenario(it->second);
}

std::string code_version() { return "macrospin 0.1.0"; }

}  // namespace macrospin::scenario
