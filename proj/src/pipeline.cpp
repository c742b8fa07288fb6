#include "mixsep/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <limits>
#include <random>
#include <thread>

#include <json.hpp>

#include "mixsep/error.hpp"
#include "mixsep/io_util.hpp"
#include "mixsep/log.hpp"
#include "mixsep/physics.hpp"
#include "mixsep/trap_profiles.hpp"

namespace mixsep {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
// m^-6 to cm^-6 for integrals of three densities over a volume.
constexpr double kPerCm6 = 1e-12;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string a0_label(double a_bf) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", a_bf / units::a0);
  return buf;
}

void write_table(const std::string& path, const CsvTable& table) { write_file_atomic(path, render_csv(table)); }

}  // namespace

unsigned thread_budget() {
  if (const char* env = std::getenv("MIXSEP_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

ModeSweep run_mode_sweep(const ScenarioConfig& config, SolverMode mode, const std::vector<double>& a_bf, GridPtr grid,
                         const std::string& field_dir) {
  if (!std::is_sorted(a_bf.begin(), a_bf.end())) throw Error(ErrorCode::ValidationError, "a_bf list must be ascending");
  const MixtureScenario base = config.scenario();
  const SolverOptions options = config.solver_options();
  ModeSweep sweep;
  sweep.mode = mode;

  const auto solve = [&](double a, const GroundState* warm) {
    MixtureScenario s = base;
    s.a_bf = a;
    return minimize(s, EnergyFunctionalParams::from(s, mode, config.lambda_w), grid, options, warm);
  };

  std::optional<GroundState> reference;
  try {
    reference = solve(0.0, nullptr);
  } catch (const Error& e) {
    sweep.error = e.what();
    log::warn(std::string("reference solve failed: ") + e.what());
  }
  const DensityField gaussian = thermal_cloud(base, grid, ThermalModel::Gaussian);

  std::optional<GroundState> last;
  for (double a : a_bf) {
    SweepPoint point;
    point.a_bf = a;
    try {
      const GroundState* warm = (config.cold_start || !last) ? nullptr : &*last;
      GroundState gs = (a == 0.0 && reference && !warm) ? *reference : solve(a, warm);
      MixtureScenario s = base;
      s.a_bf = a;
      const DensityField thermal = config.thermal_model == ThermalModel::Gaussian
                                       ? gaussian
                                       : thermal_cloud(s, grid, config.thermal_model, &gs);
      point.report = omega_eff_from_ground_state(gs, thermal, s, config.alpha, config.l3(),
                                                 reference ? &*reference : nullptr, config.thermal_model);
      point.converged = gs.converged;
      point.iterations = gs.iterations;
      if (!field_dir.empty()) {
        point.field_path = field_dir + "/" + to_string(mode) + "_a" + a0_label(a);
        save_ground_state(point.field_path, gs, config);
      }
      last = std::move(gs);
    } catch (const Error& e) {
      point.error = e.what();
      log::warn("a_bf = " + a0_label(a) + " a0 (" + to_string(mode) + "): " + e.what());
    }
    sweep.points.push_back(std::move(point));
  }
  return sweep;
}

CsvTable sweep_table(const ModeSweep& sweep, const ScenarioConfig& config) {
  CsvTable t;
  t.comments.push_back(std::string("mode=") + to_string(sweep.mode));
  t.comments.push_back(std::string("thermal_model=") + to_string(config.thermal_model));
  t.comments.push_back("alpha=" + format_double(config.alpha));
  t.comments.push_back("beta=" + format_double(config.beta));
  t.header = {"a_bf[a0]",     "Omega",        "Omega_eff",       "gamma_pred[1/s]", "I_bb[cm^-6]",  "I_bt[cm^-6]",
              "I_tt[cm^-6]",  "n_peak_f[cm^-3]", "n_peak_b[cm^-3]", "n_peak_t[cm^-3]", "converged", "iterations"};
  for (const auto& p : sweep.points) {
    std::vector<double> row(t.header.size(), kNan);
    row[0] = p.a_bf / units::a0;
    if (p.report) {
      const auto& r = *p.report;
      row[1] = r.omega;
      row[2] = r.omega_eff;
      row[3] = r.gamma_pred;
      row[4] = r.i_bb * kPerCm6;
      row[5] = r.i_bt * kPerCm6;
      row[6] = r.i_tt * kPerCm6;
      row[7] = r.peaks.n_f / units::per_cm3;
      row[8] = r.peaks.n_b / units::per_cm3;
      row[9] = r.peaks.n_t / units::per_cm3;
    }
    row[10] = p.converged ? 1.0 : 0.0;
    row[11] = static_cast<double>(p.iterations);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string RunManifest::to_json() const {
  json j;
  j["tool_version"] = tool_version;
  j["config_hash"] = config_hash;
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  j["outputs"] = json::array();
  for (const auto& o : outputs) j["outputs"].push_back({{"path", o.path}, {"fnv1a", o.fnv1a}});
  j["points"] = point_summaries;
  j["converged_points"] = converged_points;
  j["failed_points"] = failed_points;
  return j.dump(2) + "\n";
}

void RunManifest::verify(const std::string& out_dir) const {
  for (const auto& o : outputs) {
    const std::string path = out_dir + "/" + o.path;
    if (!fs::exists(path)) throw Error(ErrorCode::MissingInput, "manifest lists missing file " + path);
    if (fnv1a_hex(read_file(path)) != o.fnv1a) throw Error(ErrorCode::IoError, "hash mismatch for " + path);
  }
}

PipelineResult run_figure3_pipeline(const ScenarioConfig& config, const std::string& out_dir, bool save_fields) {
  config.validate();
  PipelineResult result;
  result.manifest.started_at = utc_now();
  result.manifest.config_hash = fnv1a_hex(serialize_config(config));
  const MixtureScenario base = config.scenario();
  const GridPtr grid = default_grid(base, config.grid_spec(), config.box_factor);
  const std::vector<double> a_bf = config.sweep_a_bf();
  const PeakQuantities peaks = fra_peak_quantities(base);
  result.critical_a_bf = critical_scattering_length(base.boson.a_intra, peaks.n_f);

  const std::vector<SolverMode> modes = config.modes();
  result.sweeps.resize(modes.size());
  const std::string field_dir = save_fields ? out_dir + "/fields" : "";
  if (modes.size() > 1 && thread_budget() > 1) {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> failures(modes.size());
    for (std::size_t m = 0; m < modes.size(); ++m) {
      workers.emplace_back([&, m] {
        try {
          result.sweeps[m] = run_mode_sweep(config, modes[m], a_bf, grid, field_dir);
        } catch (...) {
          failures[m] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (const auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  } else {
    for (std::size_t m = 0; m < modes.size(); ++m) {
      result.sweeps[m] = run_mode_sweep(config, modes[m], a_bf, grid, field_dir);
    }
  }

  const auto find = [&](SolverMode mode) -> const ModeSweep* {
    for (const auto& s : result.sweeps) {
      if (s.mode == mode) return &s;
    }
    return nullptr;
  };
  const ModeSweep* full = find(SolverMode::Full);
  const ModeSweep* tf = find(SolverMode::ThomasFermi);
  const auto value = [](const ModeSweep* s, std::size_t k, bool zero_t) {
    if (!s || !s->points[k].report) return kNan;
    return zero_t ? s->points[k].report->omega : s->points[k].report->omega_eff;
  };
  for (std::size_t k = 0; k < a_bf.size(); ++k) {
    Figure3Row row;
    row.a_bf = a_bf[k];
    row.omega_eff_full = value(full, k, false);
    row.omega_eff_tf = value(tf, k, false);
    row.omega_zero_t = value(full ? full : tf, k, true);
    result.rows.push_back(row);
  }

  fs::create_directories(out_dir);
  auto& manifest = result.manifest;
  const auto record = [&](const std::string& name, const CsvTable& table) {
    write_table(out_dir + "/" + name, table);
    manifest.outputs.push_back({name, fnv1a_hex(read_file(out_dir + "/" + name))});
  };
  record("figure3.csv", figure3_table(result));
  for (const auto& s : result.sweeps) record(std::string("sweep_") + to_string(s.mode) + ".csv", sweep_table(s, config));
  for (const auto& s : result.sweeps) {
    if (!s.error.empty()) manifest.point_summaries.push_back(std::string(to_string(s.mode)) + " reference: " + s.error);
    for (const auto& p : s.points) {
      std::string line = std::string(to_string(s.mode)) + " a_bf=" + a0_label(p.a_bf) + " a0: ";
      if (!p.error.empty()) {
        line += "failed: " + p.error;
        ++manifest.failed_points;
      } else {
        line += (p.converged ? "converged" : "not converged") + std::string(" after ") +
                std::to_string(p.iterations) + " iterations";
        if (p.converged) ++manifest.converged_points;
        else ++manifest.failed_points;
      }
      if (!p.field_path.empty()) {
        const std::string rel = fs::relative(p.field_path, out_dir).string();
        for (const char* f : {"n_b.csv", "n_f.csv", "ground_state.json"}) {
          const std::string path = p.field_path + "/" + f;
          manifest.outputs.push_back({rel + "/" + f, fnv1a_hex(read_file(path))});
        }
      }
      manifest.point_summaries.push_back(line);
    }
  }
  manifest.finished_at = utc_now();
  write_file_atomic(out_dir + "/manifest.json", manifest.to_json());
  return result;
}

CsvTable figure3_table(const PipelineResult& result) {
  CsvTable t;
  t.comments.push_back("critical_a_bf[a0]=" + format_double(result.critical_a_bf / units::a0, 10));
  t.header = {"a_bf[a0]", "omega_eff_full", "omega_eff_tf", "omega_zero_T"};
  for (const auto& r : result.rows) t.rows.push_back({r.a_bf / units::a0, r.omega_eff_full, r.omega_eff_tf, r.omega_zero_t});
  return t;
}

void save_ground_state(const std::string& dir, const GroundState& gs, const ScenarioConfig& config) {
  fs::create_directories(dir);
  save_density(dir + "/n_b.csv", gs.n_b);
  save_density(dir + "/n_f.csv", gs.n_f);
  const double nk = constants::boltzmann * units::nanokelvin;
  json j;
  j["a_bf_a0"] = gs.a_bf / units::a0;
  j["mode"] = to_string(gs.mode);
  j["converged"] = gs.converged;
  j["iterations"] = gs.iterations;
  j["mu_b_nK"] = gs.mu_b / nk;
  j["mu_f_nK"] = gs.mu_f / nk;
  const auto& e = gs.energy;
  j["energy_nK"] = {{"kinetic_b", e.kinetic_b / nk},     {"potential_b", e.potential_b / nk},
                    {"interaction_bb", e.interaction_bb / nk}, {"kinetic_f", e.kinetic_f / nk},
                    {"gradient_f", e.gradient_f / nk},   {"potential_f", e.potential_f / nk},
                    {"interaction_bf", e.interaction_bf / nk}, {"total", e.total() / nk}};
  j["config"] = serialize_config(config);
  write_file_atomic(dir + "/ground_state.json", j.dump(2) + "\n");
}

StoredGroundState load_ground_state(const std::string& dir) {
  const std::string meta_path = dir + "/ground_state.json";
  json j;
  try {
    j = json::parse(read_file(meta_path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, meta_path + ": " + e.what());
  }
  StoredGroundState out;
  try {
    out.config = parse_config(j.at("config").get<std::string>(), meta_path);
    auto& gs = out.state;
    gs.n_b = load_density(dir + "/n_b.csv");
    gs.n_f = load_density(dir + "/n_f.csv");
    require_same_grid(gs.n_b, gs.n_f);
    gs.a_bf = j.at("a_bf_a0").get<double>() * units::a0;
    gs.mode = parse_solver_mode(j.at("mode").get<std::string>());
    gs.converged = j.at("converged").get<bool>();
    gs.iterations = j.at("iterations").get<long>();
    const double nk = constants::boltzmann * units::nanokelvin;
    gs.mu_b = j.at("mu_b_nK").get<double>() * nk;
    gs.mu_f = j.at("mu_f_nK").get<double>() * nk;
    const auto& e = j.at("energy_nK");
    gs.energy.kinetic_b = e.at("kinetic_b").get<double>() * nk;
    gs.energy.potential_b = e.at("potential_b").get<double>() * nk;
    gs.energy.interaction_bb = e.at("interaction_bb").get<double>() * nk;
    gs.energy.kinetic_f = e.at("kinetic_f").get<double>() * nk;
    gs.energy.gradient_f = e.at("gradient_f").get<double>() * nk;
    gs.energy.potential_f = e.at("potential_f").get<double>() * nk;
    gs.energy.interaction_bf = e.at("interaction_bf").get<double>() * nk;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, meta_path + ": " + e.what());
  }
  return out;
}

std::string overlap_report_json(const OverlapReport& r) {
  json j;
  j["I_bb_cm-6"] = r.i_bb * kPerCm6;
  j["I_bt_cm-6"] = r.i_bt * kPerCm6;
  j["I_tt_cm-6"] = r.i_tt * kPerCm6;
  j["Omega"] = r.omega;
  j["Omega_eff"] = r.omega_eff;
  j["gamma_pred_per_s"] = r.gamma_pred;
  j["peaks_cm-3"] = {{"n_f", r.peaks.n_f / units::per_cm3},
                     {"n_b", r.peaks.n_b / units::per_cm3},
                     {"n_t", r.peaks.n_t / units::per_cm3}};
  j["alpha"] = r.alpha;
  j["beta"] = r.beta;
  j["L3_cm6_per_s"] = r.l3 / units::cm6_per_s;
  j["thermal_model"] = to_string(r.thermal_model);
  if (r.interface_thickness) j["interface_thickness_um"] = *r.interface_thickness / units::micrometer;
  else j["interface_thickness_um"] = nullptr;
  return j.dump(2) + "\n";
}

Fig1bData synthesize_fig1b(const GroundState& gs, AbelMethod method, double noise, double prefilter,
                           std::uint64_t seed, double spacing) {
  const Grid2D& g = *gs.n_f.grid;
  const Axis& rho = g.rho();
  const double extent = rho.extent();
  if (!(spacing > 0.0)) spacing = extent / 400.0;
  const auto n = static_cast<std::size_t>(std::floor(extent / spacing));
  Fig1bData out;
  out.truth = RadialProfile::uniform(n, spacing);
  // Linear interpolation of the z = 0 row between cell centres, flat inside
  // the first centre, zero at the outer wall.
  for (std::size_t k = 0; k < n; ++k) {
    const double r = out.truth.rho[k];
    double v;
    if (r <= rho.center(0)) {
      v = gs.n_f.at(0, 0);
    } else if (r >= rho.center(rho.size() - 1)) {
      const double c = rho.center(rho.size() - 1);
      v = gs.n_f.at(rho.size() - 1, 0) * std::max(0.0, (extent - r) / (extent - c));
    } else {
      const auto it = std::upper_bound(rho.centers().begin(), rho.centers().end(), r);
      const auto i = static_cast<std::size_t>(it - rho.centers().begin());
      const double t = (r - rho.center(i - 1)) / (rho.center(i) - rho.center(i - 1));
      v = (1.0 - t) * gs.n_f.at(i - 1, 0) + t * gs.n_f.at(i, 0);
    }
    out.truth.values[k] = v;
  }
  out.clean = forward_abel(out.truth);
  double peak = 0.0;
  for (double v : out.clean.values) peak = std::max(peak, v);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t two_sided = 2 * n - 1;
  out.noisy = ColumnSlice::uniform(two_sided, spacing, -static_cast<double>(n - 1) * spacing);
  for (std::size_t k = 0; k < two_sided; ++k) {
    const std::size_t idx = k < n - 1 ? n - 1 - k : k - (n - 1);
    out.noisy.values[k] = out.clean.values[idx] + noise * peak * gauss(rng);
  }
  ColumnSlice centred = center_and_symmetrize(out.noisy, CenterMethod::Parabolic);
  if (prefilter > 0.0) centred = gaussian_prefilter(centred, prefilter);
  out.reconstruction = inverse_abel(centred, method);
  return out;
}

double depletion_depth(const RadialProfile& profile) {
  const double peak = *std::max_element(profile.values.begin(), profile.values.end());
  if (!(peak > 0.0)) throw Error(ErrorCode::ValidationError, "profile has no positive maximum");
  return 1.0 - profile.values.front() / peak;
}

PlotKind parse_plot_kind(const std::string& text) {
  if (text == "fig1b") return PlotKind::Fig1b;
  if (text == "fig2a") return PlotKind::Fig2a;
  if (text == "fig2b") return PlotKind::Fig2b;
  if (text == "fig3") return PlotKind::Fig3;
  throw Error(ErrorCode::ValidationError, "plot kind must be fig1b, fig2a, fig2b or fig3, got '" + text + "'");
}

CsvTable smoothed_curve_table(const SmoothedCurve& curve) {
  CsvTable t;
  t.comments.push_back("span=" + format_double(curve.span));
  t.header = {"a_bf[a0]", "L3[cm^6/s]", "band_low[cm^6/s]", "band_high[cm^6/s]"};
  for (std::size_t k = 0; k < curve.a_bf.size(); ++k) {
    t.rows.push_back({curve.a_bf[k] / units::a0, curve.l3[k] / units::cm6_per_s,
                      curve.band_low[k] / units::cm6_per_s, curve.band_high[k] / units::cm6_per_s});
  }
  return t;
}

namespace {

void require_input(const std::string& path, const char* what) {
  if (!fs::exists(path)) throw Error(ErrorCode::MissingInput, std::string(what) + " not found: " + path);
}

CsvTable project(const CsvTable& in, const std::vector<std::string>& columns,
                 const std::vector<std::string>& names) {
  CsvTable out;
  out.comments = in.comments;
  out.header = names;
  std::vector<std::size_t> idx;
  for (const auto& c : columns) idx.push_back(in.column(c));
  for (const auto& row : in.rows) {
    std::vector<double> r;
    for (std::size_t i : idx) r.push_back(row[i]);
    out.rows.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<std::string> emit_plot_data(PlotKind kind, const std::string& input, const std::string& out_dir,
                                        const ScenarioConfig& config) {
  std::vector<std::string> written;
  const auto emit = [&](const std::string& name, const CsvTable& t) {
    const std::string path = out_dir + "/" + name;
    write_table(path, t);
    written.push_back(path);
  };
  switch (kind) {
    case PlotKind::Fig3: {
      const std::string path = input + "/figure3.csv";
      require_input(path, "pipeline output figure3.csv");
      const CsvTable in = read_csv(path);
      emit("fig3.csv", project(in, {"a_bf[a0]", "omega_eff_full", "omega_eff_tf", "omega_zero_T"},
                               {"a_bf[a0]", "omega_eff_full", "omega_eff_tf", "omega_zero_T"}));
      break;
    }
    case PlotKind::Fig2b: {
      const std::string full = input + "/sweep_full.csv";
      const std::string tf = input + "/sweep_tf.csv";
      require_input(full, "pipeline output sweep_full.csv");
      require_input(tf, "pipeline output sweep_tf.csv");
      const CsvTable a = read_csv(full);
      const CsvTable b = read_csv(tf);
      if (a.rows.size() != b.rows.size()) throw Error(ErrorCode::ValidationError, "sweep tables differ in length");
      CsvTable out;
      out.header = {"a_bf[a0]", "gamma_pred_full[1/s]", "gamma_pred_tf[1/s]"};
      const std::size_t ca = a.column("a_bf[a0]");
      const std::size_t ga = a.column("gamma_pred[1/s]");
      const std::size_t gb = b.column("gamma_pred[1/s]");
      for (std::size_t k = 0; k < a.rows.size(); ++k) out.rows.push_back({a.rows[k][ca], a.rows[k][ga], b.rows[k][gb]});
      emit("fig2b.csv", out);
      break;
    }
    case PlotKind::Fig2a: {
      require_input(input, "smoothed L3 curve");
      const CsvTable in = read_csv(input);
      emit("fig2a.csv", project(in, {"a_bf[a0]", "L3[cm^6/s]", "band_low[cm^6/s]", "band_high[cm^6/s]"},
                                {"a_bf[a0]", "L3[cm^6/s]", "band_low[cm^6/s]", "band_high[cm^6/s]"}));
      break;
    }
    case PlotKind::Fig1b: {
      require_input(input + "/ground_state.json", "ground state");
      const StoredGroundState stored = load_ground_state(input);
      const Fig1bData d = synthesize_fig1b(stored.state, config.abel_method, config.abel_noise,
                                           config.abel_prefilter_um * units::micrometer, config.seed);
      CsvTable profile;
      profile.comments.push_back(std::string("method=") + to_string(config.abel_method));
      profile.comments.push_back("a_bf[a0]=" + format_double(stored.state.a_bf / units::a0));
      profile.header = {"rho[um]", "n_f_true[cm^-3]", "n_f_reconstructed[cm^-3]"};
      for (std::size_t k = 0; k < d.reconstruction.rho.size(); ++k) {
        profile.rows.push_back({d.reconstruction.rho[k] / units::micrometer, d.truth.values[k] / units::per_cm3,
                                d.reconstruction.values[k] / units::per_cm3});
      }
      emit("fig1b_profile.csv", profile);
      CsvTable slice;
      slice.comments.push_back("noise=" + format_double(config.abel_noise));
      slice.header = {"y[um]", "column_noisy[cm^-2]", "column_true[cm^-2]"};
      const std::size_t half = d.clean.y.size() - 1;
      for (std::size_t k = 0; k < d.noisy.y.size(); ++k) {
        const std::size_t idx = k < half ? half - k : k - half;
        slice.rows.push_back({d.noisy.y[k] / units::micrometer, d.noisy.values[k] * 1e-4, d.clean.values[idx] * 1e-4});
      }
      emit("fig1b_slice.csv", slice);
      break;
    }
  }
  return written;
}

}  // namespace mixsep
