#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "macrospin/scenario.hpp"

namespace macrospin::scenario {

using nlohmann::json;
using linalg::Matrix;

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
  return buf;
}

std::string file_hash(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return hex64(fnv1a(buf.str()));
}

std::string scenario_hash(const Scenario& s) {
  std::ostringstream os;
  os << s.name << '|' << static_cast<int>(s.engine) << '|' << s.n_qubits << '|'
     << fmt17(s.omega) << '|' << static_cast<int>(s.environment.type) << '|'
     << fmt17(s.environment.gamma_dp) << '|' << fmt17(s.environment.gamma_th)
     << '|' << fmt17(s.environment.n_bar) << '|'
     << static_cast<int>(s.representation) << '|' << fmt17(s.toy_delta_t)
     << '|' << s.toy_n_steps << '|' << s.trajectories << '|' << s.seed;
  for (double t : s.times) os << ',' << fmt17(t);
  for (const auto& slot : s.partition.slots)
    for (const auto& r : slot)
      os << ';' << fmt17(r.theta_lo) << ':' << fmt17(r.theta_hi) << ':'
         << fmt17(r.phi_lo) << ':' << fmt17(r.phi_hi);
  for (double e : s.bin_edges) os << '#' << fmt17(e);
  return hex64(fnv1a(os.str()));
}

dynamics::LindbladModel build_model(const Scenario& s) {
  switch (s.environment.type) {
    case EnvironmentSpec::Type::none:
      return dynamics::build_closed_model(s.n_qubits, s.omega,
                                          s.representation);
    case EnvironmentSpec::Type::dephasing:
      return dynamics::build_dephasing_model(
          s.n_qubits, s.omega, s.environment.gamma_dp, s.representation);
    case EnvironmentSpec::Type::thermal:
      return dynamics::build_thermal_model(s.n_qubits, s.omega,
                                           s.environment.gamma_th,
                                           s.environment.n_bar,
                                           s.representation);
  }
  throw ValidationError("unreachable environment type");
}

struct PipelineState {
  std::vector<Matrix> dicke_states;  // one per grid time
  std::optional<dynamics::TrajectoryEnsemble> ensemble;
};

PipelineState compute_states(const Scenario& s, int threads) {
  const spin::SpinJ j = s.spin_j();
  PipelineState out;
  const linalg::Vector north = spin::basis_state(j, j.j());
  switch (s.engine) {
    case Engine::closed: {
      const Matrix h = spin::build_nonclassical_hamiltonian(j, s.omega);
      const Matrix rho0 = linalg::outer(north, north);
      const auto channel = macroreal::make_closed_channel(h);
      for (double t : s.times)
        out.dicke_states.push_back(channel(rho0, 0.0, t));
      break;
    }
    case Engine::toy: {
      const dynamics::ToyModel model(
          j, {s.omega, s.toy_delta_t, s.toy_n_steps});
      Matrix rho = linalg::outer(north, north);
      double t_prev = 0.0;
      for (double t : s.times) {
        rho = model.evolve(rho, t_prev, t);
        t_prev = t;
        out.dicke_states.push_back(rho);
      }
      break;
    }
    case Engine::master: {
      const auto model = build_model(s);
      Matrix rho0;
      if (s.representation == dynamics::Representation::dicke) {
        rho0 = linalg::outer(north, north);
      } else {
        linalg::Vector up = spin::symmetric_embed(j, north);
        rho0 = linalg::outer(up, up);
      }
      const auto result = dynamics::integrate_master(model, rho0, s.times);
      for (const Matrix& rho : result.states) {
        if (s.representation == dynamics::Representation::dicke)
          out.dicke_states.push_back(rho);
        else
          out.dicke_states.push_back(spin::dicke_project(j, rho, 1e-6).rho);
      }
      break;
    }
    case Engine::qsd: {
      const auto model = build_model(s);
      linalg::Vector psi0 =
          s.representation == dynamics::Representation::dicke
              ? north
              : spin::symmetric_embed(j, north);
      dynamics::QsdOptions opts;
      opts.threads = threads;
      out.ensemble = dynamics::ensemble_average(model, psi0, s.times,
                                                s.trajectories, s.seed, opts);
      for (const Matrix& rho : out.ensemble->averaged_states) {
        if (s.representation == dynamics::Representation::dicke)
          out.dicke_states.push_back(rho);
        else
          out.dicke_states.push_back(spin::dicke_project(j, rho, 1e-6).rho);
      }
      break;
    }
  }
  return out;
}

json mr_report_json(const macroreal::MRReport& report) {
  json pairs = json::array();
  for (const auto& p : report.pairs)
    pairs.push_back({{"t_i", p.t_i}, {"t_j", p.t_j}, {"delta", p.delta}});
  return {{"pairs", pairs},
          {"epsilon", report.epsilon},
          {"verdict", report.satisfied ? "satisfied" : "violated"}};
}

json continuity_report_json(const macroreal::ContinuityReport& report) {
  json out = {{"witness", report.witness},
              {"eps_mid", report.eps_mid},
              {"delta_transfer", report.delta_transfer}};
  if (report.violation_time)
    out["violation_time"] = *report.violation_time;
  else
    out["violation_time"] = nullptr;
  return out;
}

}  // namespace

RunOutcome run_scenario(const Scenario& s, const RunOptions& options) {
  validate(s);
  const auto t_start = std::chrono::steady_clock::now();

  Scenario run = s;
  if (options.seed_override) run.seed = *options.seed_override;

  try {
    const spin::SpinJ j = run.spin_j();
    const PipelineState pipeline = compute_states(run, options.threads);

    // survival: population of the north pointer state |+j>
    dynamics::SurvivalSeries survival;
    survival.times = run.times;
    const int north_idx = j.index_of(j.j());
    for (const Matrix& rho : pipeline.dicke_states)
      survival.values.push_back(rho(north_idx, north_idx).real());

    const std::vector<double> edges =
        run.bin_edges.empty() ? dynamics::default_bin_edges(j) : run.bin_edges;

    const bool needs_q = run.continuity.has_value() || run.mr_check.has_value();
    std::optional<husimi::SphereGrid> grid;
    std::optional<husimi::CoherentBasis> basis;
    if (needs_q) {
      grid.emplace(husimi::default_grid(j));
      basis.emplace(j, *grid);
    }

    std::filesystem::create_directories(options.out_dir);
    RunOutcome outcome;
    auto open_out = [&](const std::string& name) {
      const auto path = options.out_dir / name;
      std::ofstream out(path);
      if (!out)
        throw ValidationError("cannot write output file " + path.string());
      outcome.files.push_back(path);
      return out;
    };

    {
      auto out = open_out(run.survival_file);
      out << "time,A\n";
      for (std::size_t i = 0; i < survival.times.size(); ++i)
        out << fmt17(survival.times[i]) << ',' << fmt17(survival.values[i])
            << '\n';
    }
    {
      auto out = open_out(run.histogram_file);
      out << "time,bin_lo,bin_hi,probability\n";
      for (std::size_t i = 0; i < run.times.size(); ++i) {
        const auto hist = dynamics::magnetization_distribution(
            j, pipeline.dicke_states[i], edges);
        for (std::size_t b = 0; b < hist.probabilities.size(); ++b)
          out << fmt17(run.times[i]) << ',' << fmt17(hist.edges[b]) << ','
              << fmt17(hist.edges[b + 1]) << ','
              << fmt17(hist.probabilities[b]) << '\n';
      }
    }

    json analysis = json::object();
    if (run.decay_fit) {
      const auto fit = dynamics::fit_decay_rate(survival);
      analysis["decay_fit"] = {{"ok", fit.ok},
                               {"nu", fit.nu},
                               {"max_residual", fit.max_residual},
                               {"message", fit.message}};
    }
    if (run.mr_check) {
      macroreal::Channel channel;
      dynamics::LindbladModel model;
      std::optional<dynamics::ToyModel> toy;
      switch (run.engine) {
        case Engine::closed:
          channel = macroreal::make_closed_channel(
              spin::build_nonclassical_hamiltonian(j, run.omega));
          break;
        case Engine::toy:
          toy.emplace(j, dynamics::ToyModelParams{run.omega, run.toy_delta_t,
                                                  run.toy_n_steps});
          channel = macroreal::make_toy_channel(*toy);
          break;
        case Engine::master:
          if (run.representation != dynamics::Representation::dicke)
            throw ValidationError(
                "mr_check on the master channel requires the Dicke "
                "representation");
          model = build_model(run);
          channel = macroreal::make_master_channel(model);
          break;
        case Engine::qsd:
          throw ValidationError("mr_check does not support the qsd engine");
      }
      const Matrix rho0 = linalg::outer(spin::basis_state(j, j.j()),
                                        spin::basis_state(j, j.j()));
      const auto povm = husimi::build_povm(run.partition, *basis);
      const auto report = macroreal::mr_condition_check(
          channel, rho0, povm, run.mr_check->pairs, *basis,
          run.mr_check->epsilon);
      analysis["mr_report"] = mr_report_json(report);
    }
    if (run.continuity) {
      macroreal::SlotTimeSeries series;
      series.times = run.times;
      const auto node_slots = run.partition.assign(*grid);
      series.north = run.partition.slot_of({0.0, 0.0});
      series.south = run.partition.slot_of({M_PI, 0.0});
      for (int k = 0; k < static_cast<int>(run.partition.n_slots()); ++k)
        if (k != series.north && k != series.south)
          series.middle.push_back(k);
      for (const Matrix& rho : pipeline.dicke_states) {
        const auto q = husimi::q_distribution(rho, *basis);
        auto w = husimi::slot_probabilities(q, node_slots,
                                            run.partition.n_slots());
        // quadrature leaves a ~1e-10 deficit; renormalize the row
        double sum = 0.0;
        for (double v : w) sum += v;
        for (double& v : w) v /= sum;
        series.occupations.push_back(std::move(w));
      }
      const auto report = macroreal::continuity_witness(
          series, run.continuity->eps_mid, run.continuity->delta_transfer,
          0.1 / run.omega);
      analysis["continuity_report"] = continuity_report_json(report);
    }
    if (pipeline.ensemble) {
      json mz = json::array();
      for (std::size_t i = 0; i < run.times.size(); ++i)
        mz.push_back({{"time", run.times[i]},
                      {"mean", pipeline.ensemble->mz_mean[i]},
                      {"stderr", pipeline.ensemble->mz_stderr[i]}});
      analysis["magnetization_trajectory_stats"] = mz;
    }
    {
      auto out = open_out(run.analysis_file);
      out << analysis.dump(2) << '\n';
    }

    RunRecord record;
    record.scenario_hash = scenario_hash(run);
    record.code_version = code_version();
    record.seed = run.seed;
    for (const auto& path : outcome.files)
      record.outputs.emplace_back(path.filename().string(), file_hash(path));
    record.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      t_start)
            .count();
    {
      const auto path = options.out_dir / run.run_record_file;
      std::ofstream out(path);
      json manifest = json::array();
      for (const auto& [name, hash] : record.outputs)
        manifest.push_back({{"file", name}, {"hash", hash}});
      const json rec = {{"scenario_hash", record.scenario_hash},
                        {"code_version", record.code_version},
                        {"wall_clock_seconds", record.wall_clock_seconds},
                        {"seed", record.seed},
                        {"outputs", manifest}};
      out << rec.dump(2) << '\n';
      outcome.files.push_back(path);
    }
    outcome.record = std::move(record);
    return outcome;
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw NumericalError(e.what());
  }
}

}  // namespace macrospin::scenario
