#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "beamgp/beam_oracle.hpp"
#include "beamgp/detail/text.hpp"
#include "beamgp/errors.hpp"
#include "beamgp/fit.hpp"
#include "beamgp/rng.hpp"

namespace beamgp {

/// Mahalanobis distance of the normalized stiffness posterior from the
/// reference stiffness: d_M = |mu_EI - 1| / sigma_EI.
inline double mahalanobis(const StiffnessPosterior& post) {
  if (!(post.sigma_ei > 0.0))
    throw NumericalError("degenerate stiffness posterior (sigma_EI = 0)");
  return std::abs(post.mu_ei - 1.0) / post.sigma_ei;
}

struct StudyRun {
  std::uint64_t seed = 0;
  double d_m = 0.0;
  double mu_ei = 0.0;
  double sigma_ei = 0.0;
  bool ok = false;
  std::string message;
};

struct StudyCell {
  double axis1 = 0.0;
  double axis2 = 0.0;
  std::vector<StudyRun> runs;
  double median_d_m = 0.0;
  double median_mu_ei = 0.0;
  double median_sigma_ei = 0.0;
  std::size_t n_ok = 0;
  bool flagged = false;  // more than half of the runs failed
};

struct StudyGrid {
  std::string axis1_name;
  std::string axis2_name;
  std::vector<double> axis1_values;
  std::vector<double> axis2_values;
  std::vector<StudyCell> cells;  // row-major over (axis1, axis2)

  const StudyCell& cell(std::size_t i1, std::size_t i2) const {
    return cells[i1 * axis2_values.size() + i2];
  }
};

struct StudyConfig {
  int seeds_per_cell = 5;
  std::uint64_t master_seed = 0;
  FitConfig fit;
  std::vector<double> sensor_positions;  // empty = default 4 stations
  int load_points = 9;
  int ndp = 5;        // damage study; the noise study varies N_dp per cell
  double snr = 10.0;  // damage study; the noise study varies SNR per cell
  int threads = 1;
  /// Called (serialized) as each cell completes; supports incremental flushing.
  std::function<void(const StudyCell&)> on_cell_done;
};

namespace detail {

inline double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

inline void finalize_cell(StudyCell& cell) {
  std::vector<double> dms, mus, sigmas;
  for (const StudyRun& r : cell.runs) {
    if (!r.ok) continue;
    dms.push_back(r.d_m);
    mus.push_back(r.mu_ei);
    sigmas.push_back(r.sigma_ei);
  }
  cell.n_ok = dms.size();
  cell.median_d_m = median(dms);
  cell.median_mu_ei = median(mus);
  cell.median_sigma_ei = median(sigmas);
  cell.flagged = 2 * cell.n_ok < cell.runs.size();
}

/// Runs cell jobs on a small pool; `job(i)` must be independent of order.
inline void run_cells(std::size_t n_cells, int threads, const std::function<void(std::size_t)>& job) {
  const int n_threads = std::max(1, std::min<int>(threads, static_cast<int>(n_cells)));
  if (n_threads == 1) {
    for (std::size_t i = 0; i < n_cells; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t)
    pool.emplace_back([&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n_cells) return;
        job(i);
      }
    });
  for (std::thread& t : pool) t.join();
}

/// Shared driver: per cell and seed, build the problem, run the full fit and
/// score d_M. `make_problem(cell_index, seed)` supplies the synthetic dataset.
inline StudyGrid run_study(
    StudyGrid grid, const StudyConfig& config,
    const std::function<Problem(std::size_t, std::uint64_t)>& make_problem) {
  const std::size_t n_cells = grid.cells.size();
  std::mutex done_mutex;

  run_cells(n_cells, config.threads, [&](std::size_t cell_index) {
    StudyCell& cell = grid.cells[cell_index];
    cell.runs.resize(static_cast<std::size_t>(config.seeds_per_cell));
    for (int s = 0; s < config.seeds_per_cell; ++s) {
      const std::uint64_t run_seed =
          derive_seed(config.master_seed, cell_index, static_cast<std::uint64_t>(s));
      StudyRun& run = cell.runs[static_cast<std::size_t>(s)];
      run.seed = run_seed;
      try {
        const Problem problem = make_problem(cell_index, run_seed);
        FitConfig fit_config = config.fit;
        fit_config.mh.seed = derive_seed(run_seed, 0x1001);
        const FitResult result = fit(problem, fit_config);
        run.mu_ei = result.stiffness.mu_ei;
        run.sigma_ei = result.stiffness.sigma_ei;
        run.d_m = mahalanobis(result.stiffness);
        run.ok = true;
      } catch (const std::exception& e) {
        run.ok = false;
        run.message = e.what();
      }
    }
    finalize_cell(cell);
    if (config.on_cell_done) {
      const std::lock_guard<std::mutex> lock(done_mutex);
      config.on_cell_done(cell);
    }
  });
  return grid;
}

}  // namespace detail

/// SNR x N_dp study on a uniform cantilever (noise / data-size trade-off).
/// Each cell synthesizes, fits with the full sampler and scores d_M; the cell
/// statistic is the median over its seeds.
inline StudyGrid noise_study(const BeamSpec& base, const std::vector<double>& snr_list,
                             const std::vector<int>& ndp_list, const StudyConfig& config) {
  base.validate();
  const auto ei_true = base.uniform_ei();
  if (!ei_true) throw ConfigError("noise study needs a uniform-EI base beam");
  if (snr_list.empty() || ndp_list.empty())
    throw ContractViolation("noise study needs nonempty SNR and N_dp lists");

  StudyGrid grid;
  grid.axis1_name = "snr";
  grid.axis2_name = "ndp";
  grid.axis1_values = snr_list;
  for (int n : ndp_list) grid.axis2_values.push_back(static_cast<double>(n));
  for (double snr : snr_list)
    for (int ndp : ndp_list) {
      StudyCell cell;
      cell.axis1 = snr;
      cell.axis2 = static_cast<double>(ndp);
      grid.cells.push_back(cell);
    }

  StudyConfig cfg = config;
  if (!(cfg.fit.ei_ref > 0.0)) cfg.fit.ei_ref = *ei_true;
  const std::vector<double> positions = cfg.sensor_positions.empty()
                                            ? default_sensor_positions(base.length)
                                            : cfg.sensor_positions;

  const std::size_t n_ndp = ndp_list.size();
  const auto make_problem = [base, snr_list, ndp_list, n_ndp, positions,
                             load_points = cfg.load_points](std::size_t cell_index,
                                                            std::uint64_t seed) {
    const double snr = snr_list[cell_index / n_ndp];
    const int ndp = ndp_list[cell_index % n_ndp];
    SensorPlan plan = benchmark_plan(base.length, positions, ndp, snr, load_points);
    plan.seed = seed;
    return synth_dataset(base, plan, TruthKind::Analytic);
  };
  return detail::run_study(std::move(grid), cfg, make_problem);
}

/// Damage study: one element at a time, FE-synthesized data from the damaged
/// beam, fitted with the uniform-EI model against the undamaged reference
/// stiffness. Element indices are 1-based; reductions are stiffness fractions
/// removed, in [0, 1).
inline StudyGrid damage_study(const BeamSpec& base, const std::vector<int>& elements,
                              const std::vector<double>& reductions,
                              const StudyConfig& config) {
  base.validate();
  const auto ei_true = base.uniform_ei();
  if (!ei_true) throw ConfigError("damage study needs a uniform-EI base beam");
  if (elements.empty() || reductions.empty())
    throw ContractViolation("damage study needs nonempty element and reduction lists");
  for (int e : elements)
    if (e < 1 || static_cast<std::size_t>(e) > base.n_elements())
      throw ContractViolation("damage element index out of range");
  for (double r : reductions)
    if (!(r >= 0.0 && r < 1.0))
      throw ContractViolation("stiffness reduction must lie in [0, 1)");

  StudyGrid grid;
  grid.axis1_name = "element";
  grid.axis2_name = "reduction";
  for (int e : elements) grid.axis1_values.push_back(static_cast<double>(e));
  grid.axis2_values = reductions;
  for (int e : elements)
    for (double r : reductions) {
      StudyCell cell;
      cell.axis1 = static_cast<double>(e);
      cell.axis2 = r;
      grid.cells.push_back(cell);
    }

  StudyConfig cfg = config;
  if (!(cfg.fit.ei_ref > 0.0)) cfg.fit.ei_ref = *ei_true;
  const std::vector<double> positions = cfg.sensor_positions.empty()
                                            ? default_sensor_positions(base.length)
                                            : cfg.sensor_positions;

  const std::size_t n_red = reductions.size();
  const auto make_problem = [base, elements, reductions, n_red, positions,
                             ndp = cfg.ndp, snr = cfg.snr,
                             load_points = cfg.load_points](std::size_t cell_index,
                                                            std::uint64_t seed) {
    const int element = elements[cell_index / n_red];
    const double reduction = reductions[cell_index % n_red];
    const BeamSpec damaged = base.with_damage(static_cast<std::size_t>(element), reduction);
    SensorPlan plan = benchmark_plan(base.length, positions, ndp, snr, load_points);
    plan.seed = seed;
    return synth_dataset(damaged, plan, TruthKind::FiniteElement);
  };
  return detail::run_study(std::move(grid), cfg, make_problem);
}

inline void write_study_long_header(const StudyGrid& grid, std::ostream& out) {
  out << grid.axis1_name << ',' << grid.axis2_name << ",seed,d_m,mu_ei,sigma_ei,ok\n";
}

/// One long-form row per seed of one cell (used for incremental flushing too).
inline void write_study_cell_rows(const StudyCell& cell, std::ostream& out) {
  for (const StudyRun& run : cell.runs) {
    out << detail::format_double(cell.axis1) << ',' << detail::format_double(cell.axis2) << ','
        << run.seed << ',' << detail::format_double(run.d_m) << ','
        << detail::format_double(run.mu_ei) << ',' << detail::format_double(run.sigma_ei) << ','
        << (run.ok ? 1 : 0) << '\n';
  }
}

/// Long-form study CSV: one row per (cell, seed).
inline void write_study_long_csv_stream(const StudyGrid& grid, std::ostream& out) {
  write_study_long_header(grid, out);
  for (const StudyCell& cell : grid.cells) write_study_cell_rows(cell, out);
}

inline void write_study_long_csv(const StudyGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write study file: " + path);
  write_study_long_csv_stream(grid, out);
  if (!out) throw IoError("failed while writing study file: " + path);
}

/// Cell medians, directly plottable as a heatmap.
inline void write_study_median_csv_stream(const StudyGrid& grid, std::ostream& out) {
  out << grid.axis1_name << ',' << grid.axis2_name
      << ",median_d_m,median_mu_ei,median_sigma_ei,n_ok,flagged\n";
  for (const StudyCell& cell : grid.cells) {
    out << detail::format_double(cell.axis1) << ',' << detail::format_double(cell.axis2) << ','
        << detail::format_double(cell.median_d_m) << ','
        << detail::format_double(cell.median_mu_ei) << ','
        << detail::format_double(cell.median_sigma_ei) << ',' << cell.n_ok << ','
        << (cell.flagged ? 1 : 0) << '\n';
  }
}

inline void write_study_median_csv(const StudyGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write study file: " + path);
  write_study_median_csv_stream(grid, out);
  if (!out) throw IoError("failed while writing study file: " + path);
}

}  // namespace beamgp
