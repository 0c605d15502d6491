// beamgp command line: synthesize benchmark datasets, fit the physics-informed
// GP, predict latent fields and run the noise/damage parameter studies.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "beamgp/beamgp.hpp"
#include "common.hpp"

namespace beamgp::cli {
namespace {

struct BeamOptions {
  double length = 1.0;
  double ei = 1.0;
  double load = 1.0;
  int n_elements = 20;
  std::string support = "cantilever";
  double fiber_distance = 0.0;  // 0 = unset

  BeamSpec to_spec() const {
    SupportType type;
    if (support == "cantilever")
      type = SupportType::CantileverLeft;
    else if (support == "simply-supported")
      type = SupportType::SimplySupported;
    else
      throw ConfigError("unknown support type: " + support);
    BeamSpec spec = BeamSpec::uniform(length, ei, load,
                                      static_cast<std::size_t>(n_elements), type);
    if (fiber_distance > 0.0) spec.fiber_distance = fiber_distance;
    return spec;
  }

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--length", length, "Beam length L (m)");
    cmd->add_option("--ei", ei, "True bending stiffness EI (N*m^2)");
    cmd->add_option("--load", load, "Uniform load magnitude q (N/m)");
    cmd->add_option("--n-elements", n_elements, "Finite elements in the truth model");
    cmd->add_option("--support", support, "Support type: cantilever | simply-supported");
    cmd->add_option("--fiber-distance", fiber_distance,
                    "Fiber distance c for strain (m; required for strain data)");
  }
};

struct MhOptions {
  long steps = 20000;
  long burn_in = 5000;
  long thin = 10;
  double proposal_scale = 0.05;
  double adapt_target = 0.30;
  int adapt_window = 200;
  bool no_adapt = false;

  MHConfig to_config(std::uint64_t seed) const {
    MHConfig mh;
    mh.n_steps = steps;
    mh.burn_in = burn_in;
    mh.thin = thin;
    mh.proposal_scale = proposal_scale;
    mh.adapt.enabled = !no_adapt;
    mh.adapt.target_acceptance = adapt_target;
    mh.adapt.window = adapt_window;
    mh.seed = seed;
    return mh;
  }

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--steps", steps, "Total MH proposals");
    cmd->add_option("--burn-in", burn_in, "Discarded prefix length");
    cmd->add_option("--thin", thin, "Keep every k-th sample");
    cmd->add_option("--proposal-scale", proposal_scale, "Random-walk std in log space");
    cmd->add_option("--adapt-target", adapt_target, "Target acceptance during burn-in");
    cmd->add_option("--adapt-window", adapt_window, "Adaptation window (steps)");
    cmd->add_flag("--no-adapt", no_adapt, "Disable burn-in adaptation");
  }

  nlohmann::json to_json() const {
    return {{"steps", steps},           {"burn_in", burn_in},
            {"thin", thin},             {"proposal_scale", proposal_scale},
            {"adapt_target", adapt_target}, {"adapt_window", adapt_window},
            {"adapt", !no_adapt}};
  }
};

double snr_or_inf(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "INF")
    return std::numeric_limits<double>::infinity();
  const auto v = detail::try_parse_double(text);
  if (!v || !(*v > 0.0)) throw ConfigError("SNR must be a positive number or 'inf'");
  return *v;
}

int run_synth(const std::vector<std::string>& argv, const std::string& out_dir,
              std::uint64_t seed, const BeamOptions& beam, const std::string& kinds_text,
              const std::string& sensors_text, const std::string& snr_text, int ndp,
              int load_points, const std::string& truth_text, int damage_element,
              double damage_reduction, int truth_grid) {
  BeamSpec spec = beam.to_spec();
  if (damage_element > 0)
    spec = spec.with_damage(static_cast<std::size_t>(damage_element), damage_reduction);

  TruthKind truth_kind;
  if (truth_text == "auto")
    truth_kind = (spec.support == SupportType::CantileverLeft && spec.uniform_ei())
                     ? TruthKind::Analytic
                     : TruthKind::FiniteElement;
  else if (truth_text == "analytic")
    truth_kind = TruthKind::Analytic;
  else if (truth_text == "fe")
    truth_kind = TruthKind::FiniteElement;
  else
    throw ConfigError("unknown truth model: " + truth_text);

  const std::vector<QuantityKind> kinds = parse_kind_list(kinds_text);
  const std::vector<double> positions = sensors_text.empty()
                                            ? default_sensor_positions(spec.length)
                                            : parse_double_list(sensors_text);
  const std::vector<double> snrs = parse_double_list(snr_text);
  if (snrs.size() != 1 && snrs.size() != kinds.size())
    throw ConfigError("--snr needs one value or one per kind");

  SensorPlan plan;
  plan.points_per_sensor = ndp;
  plan.seed = seed;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    PlanEntry entry;
    entry.kind = kinds[i];
    entry.positions = positions;
    entry.snr = snrs.size() == 1 ? snrs[0] : snrs[i];
    entry.label = std::string(kind_tag(kinds[i])) + "_sensors";
    plan.entries.push_back(std::move(entry));
  }
  if (load_points > 0) {
    PlanEntry load;
    load.kind = QuantityKind::Load;
    load.positions = linspace(0.0, spec.length, load_points);
    load.snr = std::numeric_limits<double>::infinity();
    load.points_per_sensor = 1;
    load.label = "q_load";
    plan.entries.push_back(std::move(load));
  }

  const Problem problem = synth_dataset(spec, plan, truth_kind);
  ensure_out_dir(out_dir);
  write_problem_csv(problem, out_dir + "/dataset.csv");
  write_sidecar(problem, spec.uniform_ei() ? spec.uniform_ei()
                                           : std::optional<double>(beam.ei),
                out_dir + "/dataset.cfg");

  // dense truth table for later error scoring
  std::vector<QuantityKind> truth_kinds = {QuantityKind::Deflection, QuantityKind::Rotation,
                                           QuantityKind::Moment, QuantityKind::Shear,
                                           QuantityKind::Load};
  if (spec.fiber_distance) truth_kinds.insert(truth_kinds.begin() + 2, QuantityKind::Strain);
  {
    const std::string path = out_dir + "/truth.csv";
    std::ofstream out(path);
    if (!out) throw IoError("cannot write truth file: " + path);
    out << "kind,x,value\n";
    for (const TruthRow& row : truth_table(spec, truth_kind, truth_kinds, truth_grid))
      out << kind_tag(row.kind) << ',' << detail::format_double(row.x) << ','
          << detail::format_double(row.value) << '\n';
    if (!out) throw IoError("failed while writing truth file: " + path);
  }

  nlohmann::json options = {
      {"seed", seed},           {"length", spec.length},
      {"load", spec.load_q},    {"support", beam.support},
      {"kinds", kinds_text},    {"snr", snr_text},
      {"ndp", ndp},             {"load_points", load_points},
      {"damage_element", damage_element}, {"damage_reduction", damage_reduction},
      {"truth_grid", truth_grid}};
  write_manifest(out_dir, "synth", argv, options);
  std::cout << "wrote " << problem.total_observations() << " observations to " << out_dir
            << "/dataset.csv\n";
  return kExitOk;
}

int run_fit(const std::vector<std::string>& argv, const std::string& data_path,
            std::string config_path, const std::string& out_dir, std::uint64_t seed,
            double ei_ref_flag, const MhOptions& mh_opts) {
  if (config_path.empty()) config_path = default_config_path(data_path);
  const SidecarConfig sidecar = parse_sidecar(config_path);
  const Problem problem = load_problem_csv(data_path, sidecar);

  FitConfig config;
  config.ei_ref = ei_ref_flag > 0.0 ? ei_ref_flag : sidecar.ei_ref.value_or(0.0);
  if (!(config.ei_ref > 0.0))
    throw ConfigError("reference stiffness missing: pass --ei-ref or set ei_ref in the config");
  config.mh = mh_opts.to_config(seed);

  const FitResult result = fit(problem, config);
  const double d_m = mahalanobis(result.stiffness);

  ensure_out_dir(out_dir);
  write_chain_csv(result.chain, out_dir + "/chain.csv");
  {
    const std::string path = out_dir + "/summary.txt";
    std::ofstream out(path);
    if (!out) throw IoError("cannot write summary: " + path);
    out << "beamgp fit summary\n";
    out << "data: " << data_path << "\n";
    out << "observations: " << problem.total_observations() << "\n";
    out << "retained samples: " << result.chain.size() << "\n";
    out << "acceptance_rate: " << detail::format_double(result.acceptance_rate) << "\n\n";
    out << "parameter, posterior_mean, posterior_std, map\n";
    const Eigen::VectorXd map = result.map.to_vector();
    for (std::size_t i = 0; i < result.layout.names.size(); ++i)
      out << result.layout.names[i] << ", "
          << detail::format_double(result.summary.mean[static_cast<Eigen::Index>(i)]) << ", "
          << detail::format_double(result.summary.std_dev[static_cast<Eigen::Index>(i)]) << ", "
          << detail::format_double(map[static_cast<Eigen::Index>(i)]) << "\n";
    out << "\nnormalized stiffness posterior (EI / ei_ref):\n";
    out << "mu_EI: " << detail::format_double(result.stiffness.mu_ei) << "\n";
    out << "sigma_EI: " << detail::format_double(result.stiffness.sigma_ei) << "\n";
    out << "mahalanobis_d: " << detail::format_double(d_m) << "\n";
    out << "\ncorrelation matrix:\n";
    for (std::size_t i = 0; i < result.layout.names.size(); ++i) {
      for (std::size_t j = 0; j < result.layout.names.size(); ++j)
        out << detail::format_double(result.summary.correlation(static_cast<Eigen::Index>(i),
                                                                static_cast<Eigen::Index>(j)))
            << (j + 1 < result.layout.names.size() ? ' ' : '\n');
    }
    for (const std::string& w : result.warnings) out << "warning: " << w << "\n";
    if (!out) throw IoError("failed while writing summary: " + path);
  }

  nlohmann::json options = {{"seed", seed},
                            {"data", data_path},
                            {"config", config_path},
                            {"ei_ref", config.ei_ref},
                            {"mh", mh_opts.to_json()}};
  write_manifest(out_dir, "fit", argv, options);
  std::cout << "mu_EI=" << result.stiffness.mu_ei << " sigma_EI=" << result.stiffness.sigma_ei
            << " d_M=" << d_m << " acceptance=" << result.acceptance_rate << "\n";
  return kExitOk;
}

int run_predict(const std::vector<std::string>& argv, const std::string& data_path,
                std::string config_path, const std::string& chain_path,
                const std::string& out_dir, const std::string& kinds_text, int grid_n,
                double grid_min, double grid_max, int draws) {
  if (config_path.empty()) config_path = default_config_path(data_path);
  const SidecarConfig sidecar = parse_sidecar(config_path);
  const Problem problem = load_problem_csv(data_path, sidecar);
  const Chain chain = read_chain_csv(chain_path);

  const std::vector<QuantityKind> kinds = parse_kind_list(kinds_text);
  if (grid_max <= grid_min) grid_max = problem.length;
  const std::vector<double> grid = linspace(grid_min, grid_max, grid_n);
  const std::size_t n_draws = std::min<std::size_t>(static_cast<std::size_t>(draws), chain.size());

  ensure_out_dir(out_dir);
  for (QuantityKind kind : kinds) {
    const PredictiveResult result = predict_mixture(problem, chain, kind, grid, n_draws);
    write_prediction_csv(result, out_dir + "/predictions_" + kind_tag(kind) + ".csv");
    for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";
  }

  nlohmann::json options = {{"data", data_path}, {"config", config_path},
                            {"chain", chain_path}, {"kinds", kinds_text},
                            {"grid", grid_n},      {"grid_min", grid_min},
                            {"grid_max", grid_max}, {"draws", draws}};
  write_manifest(out_dir, "predict", argv, options);
  std::cout << "wrote predictions for " << kinds.size() << " kind(s) to " << out_dir << "\n";
  return kExitOk;
}

int run_study(const std::vector<std::string>& argv, const std::string& study_kind,
              const std::string& out_dir, std::uint64_t seed, int seeds_per_cell,
              const BeamOptions& beam, const std::string& snr_list_text,
              const std::string& ndp_list_text, const std::string& elements_text,
              const std::string& reductions_text, double cell_snr, int cell_ndp,
              int load_points, int threads, const MhOptions& mh_opts) {
  const BeamSpec spec = beam.to_spec();

  StudyConfig config;
  config.seeds_per_cell = seeds_per_cell;
  config.master_seed = seed;
  config.fit.ei_ref = beam.ei;
  config.fit.mh = mh_opts.to_config(0);  // per-run seeds are derived
  config.load_points = load_points;
  config.snr = cell_snr;
  config.ndp = cell_ndp;
  config.threads = threads > 0 ? threads
                               : static_cast<int>(std::thread::hardware_concurrency());

  ensure_out_dir(out_dir);
  nlohmann::json options = {{"seed", seed},
                            {"study", study_kind},
                            {"seeds_per_cell", seeds_per_cell},
                            {"length", beam.length},
                            {"ei", beam.ei},
                            {"load", beam.load},
                            {"n_elements", beam.n_elements},
                            {"load_points", load_points},
                            {"mh", mh_opts.to_json()}};

  // long-form rows are flushed as cells complete, so an interrupted run keeps
  // its finished cells
  const std::string long_path = out_dir + "/study_long.csv";
  std::ofstream long_out(long_path);
  if (!long_out) throw IoError("cannot write study file: " + long_path);

  StudyGrid grid;
  if (study_kind == "noise") {
    const std::vector<double> snrs = parse_double_list(snr_list_text);
    const std::vector<int> ndps = parse_int_list(ndp_list_text);
    options["snr_list"] = snr_list_text;
    options["ndp_list"] = ndp_list_text;
    write_manifest(out_dir, "study", argv, options);
    StudyGrid header_grid;
    header_grid.axis1_name = "snr";
    header_grid.axis2_name = "ndp";
    write_study_long_header(header_grid, long_out);
    config.on_cell_done = [&long_out](const StudyCell& cell) {
      write_study_cell_rows(cell, long_out);
      long_out.flush();
    };
    grid = noise_study(spec, snrs, ndps, config);
  } else if (study_kind == "damage") {
    const std::vector<int> elements = parse_int_list(elements_text);
    const std::vector<double> reductions = parse_double_list(reductions_text);
    options["elements"] = elements_text;
    options["reductions"] = reductions_text;
    options["snr"] = cell_snr;
    options["ndp"] = cell_ndp;
    write_manifest(out_dir, "study", argv, options);
    StudyGrid header_grid;
    header_grid.axis1_name = "element";
    header_grid.axis2_name = "reduction";
    write_study_long_header(header_grid, long_out);
    config.on_cell_done = [&long_out](const StudyCell& cell) {
      write_study_cell_rows(cell, long_out);
      long_out.flush();
    };
    grid = damage_study(spec, elements, reductions, config);
  } else {
    throw ConfigError("unknown study kind: " + study_kind + " (want noise | damage)");
  }
  if (!long_out) throw IoError("failed while writing study file: " + long_path);
  long_out.close();

  write_study_median_csv(grid, out_dir + "/study_medians.csv");
  std::size_t flagged = 0;
  for (const StudyCell& cell : grid.cells) flagged += cell.flagged ? 1 : 0;
  std::cout << grid.cells.size() << " cells done, " << flagged << " flagged\n";
  return flagged == 0 ? kExitOk : kExitNumerical;
}

}  // namespace
}  // namespace beamgp::cli

int main(int argc, char** argv) {
  using namespace beamgp;
  using namespace beamgp::cli;

  std::vector<std::string> raw_args(argv, argv + argc);

  CLI::App app{"Physics-informed Gaussian process regression for Euler-Bernoulli beams"};
  app.require_subcommand(1);

  std::string out_dir = "out";
  std::uint64_t seed = 0;

  // synth
  auto* synth = app.add_subcommand("synth", "Synthesize a noisy benchmark dataset");
  BeamOptions synth_beam;
  synth_beam.add_flags(synth);
  std::string synth_kinds = "u", synth_sensors, synth_snr = "10", synth_truth = "auto";
  int synth_ndp = 5, synth_load_points = 9, synth_truth_grid = 201;
  int synth_damage_element = 0;
  double synth_damage_reduction = 0.0;
  synth->add_option("--out-dir", out_dir, "Output directory")->required();
  synth->add_option("--seed", seed, "Master RNG seed");
  synth->add_option("--kinds", synth_kinds, "Sensor kinds (comma list of u,r,eps,m,v,q)");
  synth->add_option("--sensors", synth_sensors, "Sensor positions (comma list, m)");
  synth->add_option("--snr", synth_snr, "SNR per kind (one value or per-kind list; 'inf' ok)");
  synth->add_option("--ndp", synth_ndp, "Data points per sensor");
  synth->add_option("--load-points", synth_load_points,
                    "Known-load observations (0 disables)");
  synth->add_option("--truth", synth_truth, "Truth model: auto | analytic | fe");
  synth->add_option("--damage-element", synth_damage_element,
                    "1-based element to damage (0 = none)");
  synth->add_option("--damage-reduction", synth_damage_reduction,
                    "Stiffness reduction fraction in [0,1)");
  synth->add_option("--truth-grid", synth_truth_grid, "Rows per kind in truth.csv");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Run the MH fit on a dataset");
  std::string fit_data, fit_config;
  double fit_ei_ref = 0.0;
  MhOptions fit_mh;
  fit_cmd->add_option("--data", fit_data, "Dataset CSV")->required();
  fit_cmd->add_option("--config", fit_config, "Sidecar config (default: dataset with .cfg)");
  fit_cmd->add_option("--out-dir", out_dir, "Output directory")->required();
  fit_cmd->add_option("--seed", seed, "Chain RNG seed");
  fit_cmd->add_option("--ei-ref", fit_ei_ref, "Reference stiffness (overrides config)");
  fit_mh.add_flags(fit_cmd);

  // predict
  auto* predict = app.add_subcommand("predict", "Predict latent fields from a fit chain");
  std::string pred_data, pred_config, pred_chain, pred_kinds = "u";
  int pred_grid = 50, pred_draws = 200;
  double pred_grid_min = 0.0, pred_grid_max = -1.0;
  predict->add_option("--data", pred_data, "Dataset CSV")->required();
  predict->add_option("--config", pred_config, "Sidecar config");
  predict->add_option("--chain", pred_chain, "Chain CSV from fit")->required();
  predict->add_option("--out-dir", out_dir, "Output directory")->required();
  predict->add_option("--kinds", pred_kinds, "Kinds to predict (comma list)");
  predict->add_option("--grid", pred_grid, "Query grid size");
  predict->add_option("--grid-min", pred_grid_min, "Grid start (m)");
  predict->add_option("--grid-max", pred_grid_max, "Grid end (m; default L)");
  predict->add_option("--draws", pred_draws, "Mixture components (chain subsample)");

  // study
  auto* study = app.add_subcommand("study", "Run a noise or damage parameter study");
  BeamOptions study_beam;
  study_beam.add_flags(study);
  std::string study_kind_text, study_snr_list = "5,10,50", study_ndp_list = "1,2,5,10";
  std::string study_elements = "1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20";
  std::string study_reductions = "0.1,0.2,0.3,0.4";
  int study_seeds = 5, study_threads = 0, study_load_points = 9, study_ndp = 5;
  double study_snr = 10.0;
  MhOptions study_mh;
  study->add_option("--kind", study_kind_text, "Study kind: noise | damage")->required();
  study->add_option("--out-dir", out_dir, "Output directory")->required();
  study->add_option("--seed", seed, "Master RNG seed (per-cell seeds are derived)");
  study->add_option("--seeds-per-cell", study_seeds, "Fits per cell");
  study->add_option("--snr-list", study_snr_list, "Noise study: SNR axis ('inf' ok)");
  study->add_option("--ndp-list", study_ndp_list, "Noise study: N_dp axis");
  study->add_option("--elements", study_elements, "Damage study: element indices");
  study->add_option("--reductions", study_reductions, "Damage study: reduction fractions");
  study->add_option("--snr", study_snr, "Damage study: sensor SNR");
  study->add_option("--ndp", study_ndp, "Damage study: points per sensor");
  study->add_option("--load-points", study_load_points, "Known-load observations");
  study->add_option("--threads", study_threads, "Worker threads (0 = hardware)");
  study_mh.add_flags(study);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    if (synth->parsed())
      return run_synth(raw_args, out_dir, seed, synth_beam, synth_kinds, synth_sensors,
                       synth_snr, synth_ndp, synth_load_points, synth_truth,
                       synth_damage_element, synth_damage_reduction, synth_truth_grid);
    if (fit_cmd->parsed())
      return run_fit(raw_args, fit_data, fit_config, out_dir, seed, fit_ei_ref, fit_mh);
    if (predict->parsed())
      return run_predict(raw_args, pred_data, pred_config, pred_chain, out_dir, pred_kinds,
                         pred_grid, pred_grid_min, pred_grid_max, pred_draws);
    if (study->parsed())
      return run_study(raw_args, study_kind_text, out_dir, seed, study_seeds, study_beam,
                       study_snr_list, study_ndp_list, study_elements, study_reductions,
                       study_snr, study_ndp, study_load_points, study_threads, study_mh);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const InvalidStartError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOther;
}
