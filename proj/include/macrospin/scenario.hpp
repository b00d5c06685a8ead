#pragma once
// Declarative scenario configurations: strict JSON parsing, validation,
// the bundled experiment catalog, and the execution pipeline that writes
// histogram/survival CSVs, the analysis JSON, and a run record.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "macrospin/macroreal.hpp"

namespace macrospin::scenario {

// configuration/usage problems, CLI exit code 2
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// solver-level failures, CLI exit code 3
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Engine { closed, toy, master, qsd };

struct EnvironmentSpec {
  enum class Type { none, dephasing, thermal };
  Type type = Type::none;
  double gamma_dp = 0.0;
  double gamma_th = 0.0;
  double n_bar = 0.0;
};

struct MrSpec {
  std::vector<macroreal::TimePair> pairs;
  double epsilon = 0.02;
};

struct ContinuitySpec {
  double eps_mid = 0.05;
  double delta_transfer = 0.1;
};

struct Scenario {
  std::string name;
  Engine engine = Engine::closed;

  int n_qubits = 0;  // N = 2j
  double omega = 1.0;
  EnvironmentSpec environment;
  dynamics::Representation representation = dynamics::Representation::dicke;

  // toy engine
  double toy_delta_t = 0.0;
  int toy_n_steps = 0;

  std::vector<double> times;
  husimi::SlotPartition partition;
  std::vector<double> bin_edges;  // empty = eigenvalue-aligned default

  std::size_t trajectories = 0;  // qsd only
  std::uint64_t seed = 0;

  std::optional<MrSpec> mr_check;
  std::optional<ContinuitySpec> continuity;
  bool decay_fit = false;

  std::string histogram_file;  // defaults derived from name
  std::string survival_file;
  std::string analysis_file;
  std::string run_record_file;

  spin::SpinJ spin_j() const { return spin::SpinJ::from_qubits(n_qubits); }
};

struct ValidationReport {
  std::vector<std::string> warnings;
};

// strict: unknown keys anywhere reject the scenario
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::filesystem::path& path);
ValidationReport validate(const Scenario& s);

const std::map<std::string, std::string>& bundled_scenarios();  // name -> json
// path to an existing file, or the name of a bundled scenario
Scenario resolve_scenario(const std::string& path_or_name);

struct RunRecord {
  std::string scenario_hash;
  std::string code_version;
  double wall_clock_seconds = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> outputs;  // path, hash
};

struct RunOutcome {
  std::vector<std::filesystem::path> files;
  RunRecord record;
};

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  int threads = 1;
};

RunOutcome run_scenario(const Scenario& s, const RunOptions& options);

std::string code_version();

}  // namespace macrospin::scenario
