// mixsep command-line front end. Exit codes: 0 success, 2 validation,
// 3 numerical failure, 4 I/O.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mixsep/abel.hpp"
#include "mixsep/config.hpp"
#include "mixsep/error.hpp"
#include "mixsep/io_util.hpp"
#include "mixsep/log.hpp"
#include "mixsep/loss_fitting.hpp"
#include "mixsep/meanfield.hpp"
#include "mixsep/overlap.hpp"
#include "mixsep/physics.hpp"
#include "mixsep/pipeline.hpp"
#include "mixsep/trap_profiles.hpp"

using namespace mixsep;
using nlohmann::json;

namespace {

ScenarioConfig config_from(const std::string& path) {
  return path.empty() ? parse_config("", "<defaults>") : load_config(path);
}

void print_kv(const std::string& key, double value) { std::cout << key << "=" << format_double(value, 10) << "\n"; }

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file_atomic(path, text);
  }
}

int cmd_constants() {
  print_kv("hbar[J*s]", constants::hbar);
  print_kv("boltzmann[J/K]", constants::boltzmann);
  print_kv("bohr_radius[m]", constants::bohr_radius);
  print_kv("atomic_mass_unit[kg]", constants::atomic_mass_unit);
  const FeshbachResonance res;
  print_kv("feshbach_b0[G]", static_cast<double>(res.b0.gauss()));
  print_kv("feshbach_delta[G]", static_cast<double>(res.delta.gauss()));
  print_kv("feshbach_a_bg[a0]", res.a_bg / units::a0);
  const MixtureScenario s;
  print_kv("li_nu_radial[Hz]", units::rad_to_hz(s.fermion.omega_radial));
  print_kv("li_nu_axial[Hz]", units::rad_to_hz(s.fermion.omega_axial));
  print_kv("k_nu_radial[Hz]", units::rad_to_hz(s.boson.omega_radial));
  print_kv("k_nu_axial[Hz]", units::rad_to_hz(s.boson.omega_axial));
  print_kv("k_a_bb[a0]", s.boson.a_intra / units::a0);
  return 0;
}


}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field simulator for a Bose-Einstein condensate in a Fermi sea"};
  app.require_subcommand(1);
  bool quiet = false;
  bool verbose = false;
  app.add_flag("-q,--quiet", quiet, "Suppress warnings");
  app.add_flag("-v,--verbose", verbose, "Progress messages");

  auto* constants_cmd = app.add_subcommand("constants", "Print physical constants and defaults as key=value");

  std::string config_path;
  double abf = 0.0;
  double b_field = 0.0;
  std::string mode = "full";
  std::string out;
  auto* solve = app.add_subcommand("solve", "Ground state for one scattering length");
  solve->add_option("--config", config_path, "Scenario file");
  auto* abf_opt = solve->add_option("--abf", abf, "Interspecies scattering length [a0]");
  auto* b_opt = solve->add_option("--B", b_field, "Magnetic field [G]");
  abf_opt->excludes(b_opt);
  solve->add_option("--mode", mode, "full or tf")->check(CLI::IsMember({"full", "tf"}));
  solve->add_option("--out", out, "Output directory")->required();

  bool save_fields = false;
  auto* sweep = app.add_subcommand("sweep", "Both solver modes over the configured sweep (figure 3 data)");
  sweep->add_option("--config", config_path, "Scenario file");
  sweep->add_option("--out", out, "Output directory")->required();
  sweep->add_flag("--save-fields", save_fields, "Keep every ground state on disk");

  std::string gs_dir;
  std::string ref_dir;
  double alpha = 1.5;
  auto* overlap = app.add_subcommand("overlap", "Overlap report for a saved ground state");
  overlap->add_option("--ground-state", gs_dir, "Directory written by solve")->required();
  overlap->add_option("--reference", ref_dir, "a_bf = 0 ground state for Omega");
  overlap->add_option("--alpha", alpha, "Secondary-loss factor");
  overlap->add_option("--out", out, "Report JSON (stdout when omitted)");

  double a_bb = 60.9;
  double n_f = 0.0;
  auto* criterion = app.add_subcommand("criterion", "Critical scattering length for phase separation");
  criterion->add_option("--config", config_path, "Scenario file");
  criterion->add_option("--a-bb", a_bb, "Boson scattering length [a0]");
  criterion->add_option("--n-f", n_f, "Fermion peak density [cm^-3]; default from the scenario");

  std::string direction;
  std::string in;
  std::string method = "dasch3";
  std::string center = "parabolic";
  double prefilter = 0.0;
  auto* abel = app.add_subcommand("abel", "Forward or inverse Abel transform of a CSV profile");
  abel->add_option("direction", direction, "forward or inverse")->required()->check(CLI::IsMember({"forward", "inverse"}));
  abel->add_option("--in", in, "Input CSV: rho[um],value or y[um],value")->required();
  abel->add_option("--method", method, "dasch3 or onion")->check(CLI::IsMember({"dasch3", "onion"}));
  abel->add_option("--center", center, "centroid or parabolic (two-sided inverse input)");
  abel->add_option("--prefilter", prefilter, "Gaussian pre-filter width [um]");
  abel->add_option("--out", out, "Output CSV (stdout when omitted)");

  long window = 0;
  double threshold = 0.7;
  auto* fit_gamma_cmd = app.add_subcommand("fit-gamma", "Initial-decay rate of a condensed cloud");
  fit_gamma_cmd->add_option("--in", in, "CSV with t[s],N,sigma_N")->required();
  fit_gamma_cmd->add_option("--window", window, "Use the first N points");
  fit_gamma_cmd->add_option("--threshold", threshold, "Keep points with N > threshold N(0)");
  fit_gamma_cmd->add_option("--out", out, "Result JSON (stdout when omitted)");

  std::string geometry = "fra";
  auto* fit_l3_cmd = app.add_subcommand("fit-l3", "L3 from a noncondensed decay curve");
  fit_l3_cmd->add_option("--in", in, "CSV with t[s],N,sigma_N")->required();
  fit_l3_cmd->add_option("--config", config_path, "Scenario file");
  fit_l3_cmd->add_option("--geometry", geometry, "fra or integral")->check(CLI::IsMember({"fra", "integral"}));
  fit_l3_cmd->add_option("--out", out, "Result JSON (stdout when omitted)");

  double span = 0.5;
  int boot = 1000;
  std::uint64_t seed = 42;
  auto* smooth = app.add_subcommand("smooth-l3", "Smoothed L3(a_bf) with a bootstrap band");
  smooth->add_option("--in", in, "CSV with a_bf[a0],L3[cm^6/s],stderr[cm^6/s]")->required();
  smooth->add_option("--span", span, "Local-regression span");
  smooth->add_option("--boot", boot, "Bootstrap replicates");
  smooth->add_option("--seed", seed, "Random seed");
  smooth->add_option("--out", out, "Curve CSV (stdout when omitted)");

  std::string kind;
  auto* fig = app.add_subcommand("fig", "Plot-ready CSV files");
  fig->add_option("kind", kind, "fig1b, fig2a, fig2b or fig3")
      ->required()
      ->check(CLI::IsMember({"fig1b", "fig2a", "fig2b", "fig3"}));
  fig->add_option("--in", in, "Upstream output (ground state dir, curve CSV or sweep dir)")->required();
  fig->add_option("--out", out, "Output directory")->required();
  fig->add_option("--config", config_path, "Scenario file (fig1b noise, method and seed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  log::set_level(quiet ? log::Level::Quiet : (verbose ? log::Level::Info : log::Level::Warn));

  try {
    if (*constants_cmd) return cmd_constants();

    if (*solve) {
      const ScenarioConfig config = config_from(config_path);
      MixtureScenario s = config.scenario();
      s.a_bf = *b_opt ? scattering_length(config.resonance(), MagneticField::from_gauss(b_field)) : abf * units::a0;
      const GridPtr grid = default_grid(s, config.grid_spec(), config.box_factor);
      const SolverMode m = parse_solver_mode(mode);
      const GroundState gs =
          minimize(s, EnergyFunctionalParams::from(s, m, config.lambda_w), grid, config.solver_options());
      save_ground_state(out, gs, config);
      std::printf("a_bf=%.6g a0 mode=%s converged=%d iterations=%ld\n", s.a_bf / units::a0, to_string(m),
                  gs.converged ? 1 : 0, gs.iterations);
      if (!gs.converged) require_converged(gs);
      return 0;
    }

    if (*sweep) {
      const ScenarioConfig config = config_from(config_path);
      const PipelineResult r = run_figure3_pipeline(config, out, save_fields);
      std::cout << render_csv(figure3_table(r));
      std::printf("# converged=%zu failed=%zu\n", r.manifest.converged_points, r.manifest.failed_points);
      return r.manifest.failed_points == 0 ? 0 : 3;
    }

    if (*overlap) {
      const StoredGroundState stored = load_ground_state(gs_dir);
      MixtureScenario s = stored.config.scenario();
      s.a_bf = stored.state.a_bf;
      const GridPtr grid = stored.state.n_b.grid;
      const DensityField thermal = thermal_cloud(s, grid, stored.config.thermal_model, &stored.state);
      std::optional<StoredGroundState> ref;
      if (!ref_dir.empty()) ref = load_ground_state(ref_dir);
      const OverlapReport report = omega_eff_from_ground_state(stored.state, thermal, s, alpha, stored.config.l3(),
                                                               ref ? &ref->state : nullptr,
                                                               stored.config.thermal_model);
      write_or_print(out, overlap_report_json(report));
      return 0;
    }

    if (*criterion) {
      const ScenarioConfig config = config_from(config_path);
      const MixtureScenario s = config.scenario();
      const PeakQuantities peaks = fra_peak_quantities(s);
      const double nf = n_f > 0.0 ? n_f * units::per_cm3 : peaks.n_f;
      const double abb = criterion->count("--a-bb") ? a_bb * units::a0 : s.boson.a_intra;
      print_kv("n_f_peak[cm^-3]", nf / units::per_cm3);
      print_kv("k_F[1/m]", fermi_wavenumber(nf));
      print_kv("critical_a_bf[a0]", critical_scattering_length(abb, nf) / units::a0);
      const double crit_b =
          static_cast<double>(field_for_scattering_length(config.resonance(), critical_scattering_length(abb, nf)).gauss());
      print_kv("critical_B[G]", crit_b);
      print_kv("n_b_peak[cm^-3]", peaks.n_b / units::per_cm3);
      print_kv("healing_length[um]", healing_length(peaks.n_b, abb) / units::micrometer);
      return 0;
    }

    if (*abel) {
      const CsvTable t = read_csv(in);
      if (t.header.size() < 2) throw Error(ErrorCode::ParseError, in + ": need two columns");
      std::vector<double> x, v;
      for (const auto& row : t.rows) {
        x.push_back(row[0] * units::micrometer);
        v.push_back(row[1]);
      }
      CsvTable result;
      if (direction == "forward") {
        RadialProfile p{x, v};
        const ColumnSlice s = forward_abel(p);
        result.header = {"y[um]", "value"};
        for (std::size_t k = 0; k < s.y.size(); ++k) result.rows.push_back({s.y[k] / units::micrometer, s.values[k]});
      } else {
        ColumnSlice s{x, v};
        if (std::abs(s.y.front()) > 1e-9 * std::abs(s.spacing())) s = center_and_symmetrize(s, parse_center_method(center));
        if (prefilter > 0.0) s = gaussian_prefilter(s, prefilter * units::micrometer);
        const AbelMethod m = parse_abel_method(method);
        const RadialProfile p = inverse_abel(s, m);
        result.comments.push_back(std::string("method=") + to_string(m));
        result.header = {"rho[um]", "value"};
        for (std::size_t k = 0; k < p.rho.size(); ++k) result.rows.push_back({p.rho[k] / units::micrometer, p.values[k]});
      }
      write_or_print(out, render_csv(result));
      return 0;
    }

    const auto read_series = [&](const std::string& path) {
      const CsvTable t = read_csv(path);
      DecaySeries s;
      s.t = t.column_values("t[s]");
      s.n = t.column_values("N");
      s.sigma = t.column_values("sigma_N");
      return s;
    };

    if (*fit_gamma_cmd) {
      const DecaySeries s = read_series(in);
      const GammaFit f = fit_gamma(s, window > 0 ? std::optional<std::size_t>(static_cast<std::size_t>(window))
                                                 : std::nullopt,
                                   threshold);
      json j{{"gamma_per_s", f.gamma}, {"stderr_per_s", f.stderr_gamma}, {"n0", f.n0},
             {"points_used", f.points_used}, {"non_decaying", f.non_decaying}};
      write_or_print(out, j.dump(2) + "\n");
      return 0;
    }

    if (*fit_l3_cmd) {
      const DecaySeries series = read_series(in);
      ScenarioConfig config = config_from(config_path);
      MixtureScenario s = config.scenario();
      if (s.condensate_fraction != 0.0) log::info("fit-l3: treating the cloud as noncondensed (beta = 0)");
      s.condensate_fraction = 0.0;
      double q = 0.0;
      if (geometry == "fra") {
        q = l3_geometry_reservoir(s);
      } else {
        const GridPtr grid = default_grid(s, config.grid_spec(), config.box_factor);
        const TfProfile fermi = fermi_tf_profile(HarmonicTrap{s.fermion}, s.n_fermions, grid);
        q = l3_geometry_integral(fermi.density, thermal_cloud(s, grid, ThermalModel::Gaussian));
      }
      const L3Fit f = fit_l3(series, q);
      json j{{"L3_cm6_per_s", f.l3 / units::cm6_per_s}, {"stderr_cm6_per_s", f.stderr_l3 / units::cm6_per_s},
             {"n0", f.n0}, {"chi2", f.chi2}, {"geometry", geometry}};
      write_or_print(out, j.dump(2) + "\n");
      return 0;
    }

    if (*smooth) {
      const CsvTable t = read_csv(in);
      const auto a = t.column_values("a_bf[a0]");
      const auto l = t.column_values("L3[cm^6/s]");
      const auto e = t.column_values("stderr[cm^6/s]");
      std::vector<L3Point> pts;
      for (std::size_t k = 0; k < a.size(); ++k) {
        pts.push_back({a[k] * units::a0, l[k] * units::cm6_per_s, e[k] * units::cm6_per_s});
      }
      SmoothOptions o;
      o.span = span;
      o.n_boot = boot;
      o.seed = seed;
      write_or_print(out, render_csv(smoothed_curve_table(smooth_l3(pts, o))));
      return 0;
    }

    if (*fig) {
      const ScenarioConfig config = config_from(config_path);
      std::filesystem::create_directories(out);
      for (const auto& p : emit_plot_data(parse_plot_kind(kind), in, out, config)) std::cout << p << "\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "mixsep: " << e.what() << "\n";
    return exit_code_for(e.category());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "mixsep: IoError: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "mixsep: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
