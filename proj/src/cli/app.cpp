#include "platoon/cli/app.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "platoon/eval/controllers.hpp"
#include "platoon/eval/experiments.hpp"
#include "platoon/eval/plots.hpp"
#include "platoon/io/checkpoint.hpp"
#include "platoon/io/config.hpp"
#include "platoon/io/csv.hpp"
#include "platoon/io/manifest.hpp"

namespace platoon::cli {

namespace {

namespace fs = std::filesystem;

// Options shared by the subcommands. Unset numeric flags leave the file value alone.
struct Flags {
  std::string config;
  std::string out;
  unsigned jobs = 0;
  std::vector<std::string> sets;  // section.key=value
  int iterations = 0;
  std::uint64_t seed = 0;
  double omega1 = 0.0;
  double omega2 = 0.0;
  int episodes = 0;
  int platoon_size = 0;
  CLI::Option* iterations_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* omega1_opt = nullptr;
  CLI::Option* omega2_opt = nullptr;
  CLI::Option* episodes_opt = nullptr;
  CLI::Option* platoon_size_opt = nullptr;
};

void add_common(CLI::App& cmd, Flags& f) {
  cmd.add_option("--config", f.config, "scenario file (INI sections, unit-suffixed keys)");
  cmd.add_option("--out", f.out, "output directory")->required();
  cmd.add_option("--jobs", f.jobs, "worker threads (default: hardware concurrency)");
  cmd.add_option("--set", f.sets, "override one config value, e.g. --set ars.step_size=0.02")->take_all();
  f.platoon_size_opt = cmd.add_option("--platoon-size", f.platoon_size, "following HDVs n");
}

void add_training(CLI::App& cmd, Flags& f) {
  f.iterations_opt = cmd.add_option("--iterations", f.iterations, "ARS iterations");
  f.omega1_opt = cmd.add_option("--omega1", f.omega1, "reward weight on energy");
  f.omega2_opt = cmd.add_option("--omega2", f.omega2, "reward weight on delay");
}

// defaults < file < flags
io::Scenario resolve(const Flags& f) {
  io::Scenario sc = f.config.empty() ? io::Scenario{} : io::load_scenario(f.config);
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + s + "'");
    io::apply_override(sc, s.substr(0, eq), s.substr(eq + 1));
  }
  if (f.platoon_size_opt && f.platoon_size_opt->count()) sc.world.platoon_size = f.platoon_size;
  if (f.iterations_opt && f.iterations_opt->count()) sc.ars.iterations = f.iterations;
  if (f.omega1_opt && f.omega1_opt->count()) sc.reward.omega1 = f.omega1;
  if (f.omega2_opt && f.omega2_opt->count()) sc.reward.omega2 = f.omega2;
  sc.ars.jobs = f.jobs;
  return sc;
}

fs::path prepare_out(const std::string& out) {
  fs::path p(out);
  fs::create_directories(p);
  return p;
}

void write_table(const fs::path& path, const io::CsvTable& t) {
  std::ostringstream ss;
  t.write(ss);
  io::write_file(path.string(), ss.str());
}

void write_trajectory(const fs::path& path, const std::vector<traffic::TrajectoryRow>& rows, double dt,
                             int approach_phase) {
  std::ostringstream ss;
  io::write_trajectory_csv(ss, rows);
  io::write_file(path.string(), ss.str());
  fs::path bands = path;
  bands.replace_filename(path.stem().string() + "_signal.csv");
  write_table(bands, eval::signal_band_table(eval::signal_bands(rows, dt, approach_phase)));
}

class ManifestScope {
 public:
  ManifestScope(std::string command, std::vector<std::string> args, const io::Scenario& sc, fs::path out)
      : out_(std::move(out)) {
    m_.command = std::move(command);
    m_.arguments = std::move(args);
    m_.resolved_config = io::format_scenario(sc);
    m_.out_dir = out_.string();
    m_.started_at = io::utc_timestamp();
    io::write_file((out_ / "config.ini").string(), m_.resolved_config);
  }
  io::RunManifest& manifest() { return m_; }
  void finish() {
    m_.finished_at = io::utc_timestamp();
    io::write_file((out_ / "manifest.json").string(), m_.to_json().dump(2) + "\n");
  }

 private:
  io::RunManifest m_;
  fs::path out_;
};

std::string ratio_label(double w1, double w2) { return io::format_double(w1) + "/" + io::format_double(w2); }

io::CsvTable metrics_table() {
  return io::CsvTable({"controller", "episodes", "delay_per_vehicle_s", "energy_per_vehicle_wh", "total_energy_wh",
                       "total_energy_var", "full_stops", "zero_stop_episodes"});
}

void add_metrics_row(io::CsvTable& t, const std::string& label, const eval::ControllerSummary& s) {
  int zero = 0;
  for (const auto& o : s.outcomes) zero += o.total_stops() == 0;
  const auto& m = s.metrics;
  t.row({label, std::to_string(m.episodes), io::format_double(m.delay_per_vehicle),
         io::format_double(m.energy_per_vehicle), io::format_double(m.total_energy),
         io::format_double(s.energy_variance), io::format_double(m.full_stops), std::to_string(zero)});
}

// ---- train -----------------------------------------------------------------

int cmd_train(const Flags& f, const std::vector<std::string>& args, std::ostream& log) {
  io::Scenario sc = resolve(f);
  if (f.seed_opt && f.seed_opt->count()) sc.ars.seed = f.seed;
  sc.validate();
  const fs::path out = prepare_out(f.out);
  ManifestScope scope("train", args, sc, out);

  const env::EnvConfig cfg = sc.env();
  const int total = sc.ars.iterations;
  auto result = eval::train_agent(cfg, sc.ars, [&](const ars::IterationReport& r, const ars::LinearPolicy&) {
    if ((r.iteration + 1) % 25 == 0 || r.iteration + 1 == total)
      log << "iteration " << r.iteration + 1 << "/" << total << " smoothed reward " << r.smoothed_reward << "\n";
  });

  io::Checkpoint ck{result.policy, sc.world.platoon_size};
  const auto ck_path = out / "policy.ckpt";
  io::save_checkpoint(ck_path.string(), ck, sc);
  std::ostringstream curve;
  io::write_training_curve_csv(curve, result.reports);
  io::write_file((out / "training_curve.csv").string(), curve.str());

  auto& m = scope.manifest();
  m.seeds = {sc.ars.seed};
  m.extra["checkpoint"] = "policy.ckpt";
  m.extra["checkpoint_hash"] = io::git_blob_hash(io::encode_checkpoint(ck));
  m.extra["training_curve"] = "training_curve.csv";
  if (!result.reports.empty()) m.extra["final_smoothed_reward"] = result.reports.back().smoothed_reward;
  scope.finish();
  log << "wrote " << ck_path.string() << "\n";
  return kOk;
}

// ---- eval ------------------------------------------------------------------

struct EvalFlags {
  std::string controller = "ars";
  std::string checkpoint;
  bool export_trajectories = false;
};

eval::Controller make_controller(const EvalFlags& ef, const io::Scenario& sc, const env::EnvConfig& cfg,
                                        std::string* checkpoint_hash) {
  if (ef.controller == "idm") return eval::Controller::idm();
  if (ef.controller == "glosa") return eval::Controller::glosa_default(sc.eval.glosa);
  if (ef.controller != "ars" && ef.controller != "policy")
    throw ConfigError("--controller must be one of ars, policy, idm, glosa");
  if (ef.checkpoint.empty()) throw ConfigError("--checkpoint is required for the policy controller");
  const std::string bytes = io::read_file(ef.checkpoint);
  auto ck = io::decode_checkpoint(bytes);
  if (ck.policy.dim() != cfg.observation_dim())
    throw DimensionMismatch(cfg.observation_dim(), ck.policy.dim(),
                            "checkpoint '" + ef.checkpoint + "' (n=" + std::to_string(ck.platoon_size) +
                                ") vs config (n=" + std::to_string(sc.world.platoon_size) + ")");
  if (checkpoint_hash) *checkpoint_hash = io::git_blob_hash(bytes);
  return eval::Controller::ars(std::move(ck.policy));
}

int cmd_eval(const Flags& f, const EvalFlags& ef, const std::vector<std::string>& args, std::ostream& log) {
  io::Scenario sc = resolve(f);
  if (f.episodes_opt && f.episodes_opt->count()) sc.eval.episodes = f.episodes;
  if (f.seed_opt && f.seed_opt->count()) sc.eval.seed = f.seed;
  sc.validate();
  const env::EnvConfig cfg = sc.env();
  std::string ck_hash;
  const auto controller = make_controller(ef, sc, cfg, &ck_hash);
  const fs::path out = prepare_out(f.out);
  ManifestScope scope("eval", args, sc, out);

  const auto seeds = sc.eval.seeds();
  auto res = eval::run_controller(cfg, controller, seeds, f.jobs, ef.export_trajectories, sc.eval.stop_rule);
  const auto summary = eval::summarize(eval::to_string(controller.kind), res.outcomes());

  auto table = metrics_table();
  add_metrics_row(table, summary.label, summary);
  write_table(out / "metrics.csv", table);

  io::CsvTable episodes({"seed", "delay_per_vehicle_s", "total_energy_wh", "full_stops", "all_crossed",
                         "ego_red_crossings", "episode_return"});
  for (std::size_t i = 0; i < res.runs.size(); ++i) {
    const auto& r = res.runs[i];
    episodes.row({std::to_string(r.seed), io::format_double(r.outcome.mean_delay()),
                  io::format_double(r.outcome.total_energy()), std::to_string(r.outcome.total_stops()),
                  r.outcome.all_crossed() ? "1" : "0", std::to_string(r.ego_red_crossings),
                  io::format_double(r.episode_return)});
  }
  write_table(out / "episodes.csv", episodes);

  if (ef.export_trajectories) {
    fs::create_directories(out / "trajectories");
    for (const auto& r : res.runs)
      write_trajectory(out / "trajectories" / ("seed_" + std::to_string(r.seed) + ".csv"), r.trajectory,
                       cfg.world.dt, sc.signal.approach_phase);
  }

  auto& m = scope.manifest();
  m.seeds = seeds;
  m.extra["controller"] = eval::to_string(controller.kind);
  if (!ck_hash.empty()) m.extra["checkpoint_hash"] = ck_hash;
  scope.finish();
  log << summary.label << ": delay/veh " << summary.metrics.delay_per_vehicle << " s, energy/veh "
      << summary.metrics.energy_per_vehicle << " Wh, stops/episode " << summary.metrics.full_stops << "\n";
  return kOk;
}

// ---- experiment --------------------------------------------------------------

int cmd_experiment(const Flags& f, const std::string& kind, const std::vector<int>& sizes_flag,
                          const std::vector<std::string>& args, std::ostream& log) {
  io::Scenario sc = resolve(f);
  if (f.seed_opt && f.seed_opt->count()) sc.ars.seed = f.seed;
  const bool episodes_set = f.episodes_opt && f.episodes_opt->count();
  if (kind == "er-vs-dr" && episodes_set) sc.experiment.episodes_per_agent = f.episodes;
  if (kind == "weight-sweep" && episodes_set) sc.eval.episodes = f.episodes;
  if (kind == "size-sweep" && episodes_set) sc.experiment.size_episodes = f.episodes;
  if (!sizes_flag.empty()) sc.experiment.sizes = sizes_flag;
  sc.validate();
  const env::EnvConfig cfg = sc.env();
  const fs::path out = prepare_out(f.out);
  ManifestScope scope("experiment " + kind, args, sc, out);
  auto progress = [&](const std::string& s) { log << s << "\n"; };
  auto& m = scope.manifest();

  if (kind == "er-vs-dr") {
    eval::AblationConfig ab{sc.experiment.agents_per_mode, sc.experiment.episodes_per_agent, sc.eval.seed};
    const auto r = eval::ablation_er_vs_dr(cfg, sc.ars, ab, progress);
    auto t = metrics_table();
    add_metrics_row(t, "ars_er", r.er);
    add_metrics_row(t, "ars_dr", r.dr);
    add_metrics_row(t, "idm", r.idm);
    write_table(out / "er_vs_dr.csv", t);
    for (int a = 0; a < ab.agents_per_mode * ab.episodes_per_agent; ++a)
      m.seeds.push_back(ab.eval_seed + static_cast<std::uint64_t>(a));
  } else if (kind == "weight-sweep") {
    const auto seeds = sc.eval.seeds();
    const auto r = eval::sweep_weights(cfg, sc.ars, sc.experiment.weight_ratios, seeds, progress);
    io::CsvTable t({"ratio", "omega1", "omega2", "delay_per_vehicle_s", "delay_imp_pct", "energy_per_vehicle_wh",
                    "energy_imp_pct", "full_stops"});
    t.row({"idm", "", "", io::format_double(r.idm.delay_per_vehicle), "0", io::format_double(r.idm.energy_per_vehicle),
           "0", io::format_double(r.idm.full_stops)});
    for (const auto& row : r.rows)
      t.row({ratio_label(row.omega1, row.omega2), io::format_double(row.omega1), io::format_double(row.omega2),
             io::format_double(row.metrics.delay_per_vehicle), io::format_double(row.delay_improvement_pct),
             io::format_double(row.metrics.energy_per_vehicle), io::format_double(row.energy_improvement_pct),
             io::format_double(row.metrics.full_stops)});
    write_table(out / "weight_sweep.csv", t);
    m.seeds = seeds;
  } else if (kind == "size-sweep") {
    const auto seeds = sc.eval.seeds(sc.experiment.size_episodes);
    const auto r = eval::sweep_platoon_size(cfg, sc.ars, sc.experiment.sizes, seeds, sc.eval.glosa, progress);
    io::CsvTable t({"platoon_size", "controller", "episodes", "delay_per_vehicle_s", "energy_per_vehicle_wh",
                    "total_energy_wh", "full_stops"});
    for (const auto& row : r.rows)
      t.row({std::to_string(row.platoon_size), eval::to_string(row.controller), std::to_string(row.metrics.episodes),
             io::format_double(row.metrics.delay_per_vehicle), io::format_double(row.metrics.energy_per_vehicle),
             io::format_double(row.metrics.total_energy), io::format_double(row.metrics.full_stops)});
    write_table(out / "size_sweep.csv", t);
    fs::create_directories(out / "trajectories");
    for (const auto& tr : r.trajectories)
      write_trajectory(out / "trajectories" /
                           ("n" + std::to_string(tr.platoon_size) + "_" + eval::to_string(tr.controller) + "_seed_" +
                            std::to_string(tr.seed) + ".csv"),
                       tr.rows, cfg.world.dt, sc.signal.approach_phase);
    m.seeds = seeds;
  } else {
    throw ConfigError("unknown experiment '" + kind + "' (expected er-vs-dr, weight-sweep or size-sweep)");
  }
  scope.finish();
  log << "wrote results to " << out.string() << "\n";
  return kOk;
}

// ---- export-plots ----------------------------------------------------------------

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

int cmd_export_plots(const std::string& in_dir, const Flags& f, std::ostream& log) {
  if (!fs::is_directory(in_dir)) throw ConfigError("--in '" + in_dir + "' is not a directory");
  io::Scenario sc;
  if (!f.config.empty()) sc = io::load_scenario(f.config);
  else if (fs::exists(fs::path(in_dir) / "config.ini")) sc = io::load_scenario((fs::path(in_dir) / "config.ini").string());
  sc.validate();
  const fs::path out = prepare_out(f.out);

  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(in_dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  std::string trajectory_header;
  for (const auto& h : io::trajectory_header()) trajectory_header += (trajectory_header.empty() ? "" : ",") + h;
  int written = 0;
  for (const auto& p : files) {
    const std::string header = first_line(p);
    const fs::path rel = fs::relative(p, in_dir);
    fs::path target = out / rel;
    target.replace_extension(".svg");
    if (header == trajectory_header) {
      std::ifstream in(p);
      const auto rows = io::read_trajectory_csv(in);
      fs::create_directories(target.parent_path());
      io::write_file(target.string(), eval::time_space_svg(rows, sc.world.lane_length, sc.world.dt, rel.stem().string(),
                                                           sc.signal.approach_phase));
      ++written;
    } else if (header.rfind("iteration,mean_reward", 0) == 0) {
      std::ifstream in(p);
      const auto reports = io::read_training_curve_csv(in);
      fs::create_directories(target.parent_path());
      io::write_file(target.string(), eval::training_curve_svg(reports, rel.stem().string()));
      ++written;
    }
  }
  log << "wrote " << written << " plot(s) to " << out.string() << "\n";
  return kOk;
}

}  // namespace

// ---- entry point ----------------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& log) {
  CLI::App app{"Mixed-platoon eco-driving: ARS training, evaluation and experiments"};
  app.require_subcommand(1);
  std::vector<std::string> args(argv + 1, argv + argc);

  Flags tf, ef_flags, xf, pf;
  EvalFlags ef;
  std::string kind, in_dir;
  std::vector<int> sizes;

  auto* train = app.add_subcommand("train", "train an ARS policy and write a checkpoint");
  add_common(*train, tf);
  add_training(*train, tf);
  tf.seed_opt = train->add_option("--seed", tf.seed, "training seed");

  auto* ev = app.add_subcommand("eval", "evaluate a controller on seeded episodes");
  add_common(*ev, ef_flags);
  ev->add_option("--controller", ef.controller, "ars|policy|idm|glosa")
      ->check(CLI::IsMember({"ars", "policy", "idm", "glosa"}));
  ev->add_option("--checkpoint", ef.checkpoint, "policy checkpoint for --controller ars");
  ef_flags.episodes_opt = ev->add_option("--episodes", ef_flags.episodes, "evaluation episodes");
  ef_flags.seed_opt = ev->add_option("--seed", ef_flags.seed, "first evaluation seed");
  ev->add_flag("--export-trajectories", ef.export_trajectories, "write one trajectory CSV per episode");

  auto* ex = app.add_subcommand("experiment", "run er-vs-dr, weight-sweep or size-sweep");
  ex->add_option("kind", kind, "er-vs-dr|weight-sweep|size-sweep")
      ->required()
      ->check(CLI::IsMember({"er-vs-dr", "weight-sweep", "size-sweep"}));
  add_common(*ex, xf);
  add_training(*ex, xf);
  xf.seed_opt = ex->add_option("--seed", xf.seed, "base training seed");
  xf.episodes_opt = ex->add_option("--episodes", xf.episodes, "evaluation episodes (per agent for er-vs-dr)");
  ex->add_option("--sizes", sizes, "platoon sizes for size-sweep, e.g. 1,3,5,8")->delimiter(',');

  auto* plots = app.add_subcommand("export-plots", "render SVG plots from trajectory and training-curve CSVs");
  plots->add_option("--in", in_dir, "directory of a previous run")->required();
  plots->add_option("--out", pf.out, "output directory")->required();
  plots->add_option("--config", pf.config, "scenario file (default: config.ini in --in)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, std::cout, log);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cout, log);
    return kValidation;
  }

  try {
    if (*train) return cmd_train(tf, args, log);
    if (*ev) return cmd_eval(ef_flags, ef, args, log);
    if (*ex) return cmd_experiment(xf, kind, sizes, args, log);
    if (*plots) return cmd_export_plots(in_dir, pf, log);
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    log << "runtime error: " << e.what() << "\n";
    return kRuntime;
  }
  return kRuntime;
}

}  // namespace platoon::cli
