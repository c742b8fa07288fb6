#ifndef MIXSEP_PIPELINE_HPP
#define MIXSEP_PIPELINE_HPP

// Orchestration: sweeps over a_bf in both solver modes, overlap reports,
// persisted ground states, run manifests and plot-ready CSV files.

#include <optional>
#include <string>
#include <vector>

#include "mixsep/abel.hpp"
#include "mixsep/config.hpp"
#include "mixsep/io_util.hpp"
#include "mixsep/meanfield.hpp"
#include "mixsep/overlap.hpp"

namespace mixsep {

inline constexpr const char* kToolVersion = "1.0.0";

struct SweepPoint {
  double a_bf = 0.0;  // m
  std::optional<OverlapReport> report;
  bool converged = false;
  long iterations = 0;
  std::string error;  // empty on success
  std::string field_path;  // saved ground state, if any
};

struct ModeSweep {
  SolverMode mode = SolverMode::Full;
  std::vector<SweepPoint> points;
  std::string error;  // set when the a_bf = 0 reference failed
};

// Solves every a_bf of the list (ascending) in one mode, warm-starting each
// point from the last successful one unless the config asks for cold
// starts. Per-point failures are recorded, not thrown. Ground states are
// saved under field_dir when it is non-empty.
ModeSweep run_mode_sweep(const ScenarioConfig& config, SolverMode mode, const std::vector<double>& a_bf,
                         GridPtr grid, const std::string& field_dir = "");

// Sweep table with columns a_bf[a0], Omega, Omega_eff, gamma_pred[1/s],
// I_bb[cm^-6], I_bt[cm^-6], I_tt[cm^-6], n_peak_f[cm^-3], n_peak_b[cm^-3],
// n_peak_t[cm^-3], converged, iterations.
CsvTable sweep_table(const ModeSweep& sweep, const ScenarioConfig& config);

struct Figure3Row {
  double a_bf = 0.0;  // m
  double omega_eff_full = 0.0;
  double omega_eff_tf = 0.0;
  double omega_zero_t = 0.0;
};

struct ManifestOutput {
  std::string path;  // relative to the output directory
  std::string fnv1a;
};

struct RunManifest {
  std::string config_hash;
  std::string tool_version = kToolVersion;
  std::string started_at;
  std::string finished_at;
  std::vector<ManifestOutput> outputs;
  std::vector<std::string> point_summaries;  // one line per solved point
  std::size_t converged_points = 0;
  std::size_t failed_points = 0;

  std::string to_json() const;
  // Throws MissingInput or IoError when a listed file is absent or its
  // hash differs.
  void verify(const std::string& out_dir) const;
};

struct PipelineResult {
  std::vector<Figure3Row> rows;
  double critical_a_bf = 0.0;  // m
  std::vector<ModeSweep> sweeps;
  RunManifest manifest;
};

// Runs both solver modes over the sweep and writes figure3.csv, one sweep
// table per mode and manifest.json into out_dir.
PipelineResult run_figure3_pipeline(const ScenarioConfig& config, const std::string& out_dir,
                                    bool save_fields = false);

// Figure 3 table: a_bf[a0], omega_eff_full, omega_eff_tf, omega_zero_T with
// the critical scattering length as a comment.
CsvTable figure3_table(const PipelineResult& result);

// Ground state on disk: n_b.csv, n_f.csv and ground_state.json (energies in
// nK k_B, chemical potentials, convergence and the full config).
void save_ground_state(const std::string& dir, const GroundState& gs, const ScenarioConfig& config);
struct StoredGroundState {
  GroundState state;
  ScenarioConfig config;
};
StoredGroundState load_ground_state(const std::string& dir);
std::string overlap_report_json(const OverlapReport& report);

// Synthetic version of the imaging experiment: the z = 0 cut of n_f is
// projected, noise is added, the slice is mirrored into a two-sided image
// row, centred, optionally pre-filtered and inverted.
struct Fig1bData {
  RadialProfile truth;            // m^-3 against m
  ColumnSlice clean;              // m^-2
  ColumnSlice noisy;              // two-sided, m^-2
  RadialProfile reconstruction;   // m^-3
};
Fig1bData synthesize_fig1b(const GroundState& gs, AbelMethod method, double noise, double prefilter,
                           std::uint64_t seed, double spacing = 0.0);
// 1 - n(0) / max n.
double depletion_depth(const RadialProfile& profile);

enum class PlotKind { Fig1b, Fig2a, Fig2b, Fig3 };
PlotKind parse_plot_kind(const std::string& text);

// Projects upstream outputs into plot-ready CSV files in out_dir and returns
// their paths. fig1b reads a ground-state directory, fig2a a smoothed-curve
// CSV, fig2b and fig3 a pipeline output directory. Throws MissingInput.
std::vector<std::string> emit_plot_data(PlotKind kind, const std::string& input, const std::string& out_dir,
                                        const ScenarioConfig& config);

// Smoothed curve as CSV: a_bf[a0], L3[cm^6/s], band_low[cm^6/s], band_high[cm^6/s].
CsvTable smoothed_curve_table(const SmoothedCurve& curve);

// Worker count from MIXSEP_THREADS, defaulting to the hardware concurrency.
unsigned thread_budget();

}  // namespace mixsep

#endif  // MIXSEP_PIPELINE_HPP
