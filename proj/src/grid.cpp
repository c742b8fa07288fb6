#include "mixsep/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "mixsep/error.hpp"
#include "mixsep/io_util.hpp"
#include "mixsep/physics.hpp"

namespace mixsep {

Axis Axis::from_faces(std::vector<double> faces) {
  if (faces.size() < 2 || faces.front() != 0.0) {
    throw Error(ErrorCode::ValidationError, "axis needs >= 2 faces starting at 0");
  }
  for (std::size_t k = 1; k < faces.size(); ++k) {
    if (!(faces[k] > faces[k - 1])) throw Error(ErrorCode::ValidationError, "axis faces must increase");
  }
  Axis a;
  a.faces_ = std::move(faces);
  const std::size_t n = a.faces_.size() - 1;
  a.centers_.resize(n);
  a.widths_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    a.centers_[i] = 0.5 * (a.faces_[i] + a.faces_[i + 1]);
    a.widths_[i] = a.faces_[i + 1] - a.faces_[i];
  }
  return a;
}

Axis Axis::uniform(std::size_t cells, double extent) { return stretched(cells, extent, 0.0); }

Axis Axis::stretched(std::size_t cells, double extent, double stretch) {
  if (cells == 0 || !(extent > 0.0)) throw Error(ErrorCode::ValidationError, "axis needs cells and positive extent");
  std::vector<double> faces(cells + 1);
  for (std::size_t k = 0; k <= cells; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(cells);
    faces[k] = stretch > 1e-12 ? extent * std::sinh(stretch * s) / std::sinh(stretch) : extent * s;
  }
  faces[0] = 0.0;
  faces[cells] = extent;
  return from_faces(std::move(faces));
}

double Axis::min_width() const { return *std::min_element(widths_.begin(), widths_.end()); }
double Axis::max_width() const { return *std::max_element(widths_.begin(), widths_.end()); }

Grid2D::Grid2D(Axis rho, Axis z) : rho_(std::move(rho)), z_(std::move(z)) {
  volumes_.resize(size());
  for (std::size_t i = 0; i < n_rho(); ++i) {
    const double ring = 2.0 * constants::pi * rho_.center(i) * rho_.width(i);
    for (std::size_t j = 0; j < n_z(); ++j) {
      volumes_[index(i, j)] = 2.0 * ring * z_.width(j);
    }
  }
}

double Grid2D::total_volume() const {
  return constants::pi * rho_.extent() * rho_.extent() * 2.0 * z_.extent();
}

GridPtr make_grid(const GridSpec& spec) {
  if (spec.n_rho < 4 || spec.n_z < 4) throw Error(ErrorCode::ValidationError, "grid needs at least 4 cells per axis");
  if (spec.stretch_rho < 0.0 || spec.stretch_z < 0.0) throw Error(ErrorCode::ValidationError, "stretch must be >= 0");
  return std::make_shared<const Grid2D>(Axis::stretched(spec.n_rho, spec.rho_extent, spec.stretch_rho),
                                        Axis::stretched(spec.n_z, spec.z_extent, spec.stretch_z));
}

DensityField::DensityField(GridPtr g, std::string tag)
    : grid(std::move(g)), values(grid->size(), 0.0), species(std::move(tag)) {}

DensityField::DensityField(GridPtr g, std::vector<double> v, std::string tag)
    : grid(std::move(g)), values(std::move(v)), species(std::move(tag)) {
  if (values.size() != grid->size()) throw Error(ErrorCode::GridMismatch, "value count does not match grid");
}

double DensityField::integral() const { return integrate(*grid, values); }

double DensityField::peak() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double integrate(const Grid2D& grid, std::span<const double> integrand) {
  if (integrand.size() != grid.size()) throw Error(ErrorCode::GridMismatch, "integrand size does not match grid");
  CompensatedSum sum;
  const auto& w = grid.volumes();
  for (std::size_t k = 0; k < integrand.size(); ++k) sum.add(w[k] * integrand[k]);
  return sum.value();
}

void require_same_grid(const DensityField& a, const DensityField& b) {
  if (!a.grid || !b.grid) throw Error(ErrorCode::GridMismatch, "field without grid");
  if (a.grid != b.grid && !(*a.grid == *b.grid)) {
    throw Error(ErrorCode::GridMismatch, a.species + " and " + b.species + " live on different grids");
  }
}

namespace {

std::string join_um(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += ',';
    out += format_double(v[k] / units::micrometer);
  }
  return out;
}

std::vector<double> split_doubles(const std::string& s, double scale) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, "density file") * scale);
  return out;
}

}  // namespace

void write_density(std::ostream& out, const DensityField& field) {
  const Grid2D& g = *field.grid;
  out << "# mixsep density field\n";
  out << "species=" << field.species << '\n';
  out << "n_rho=" << g.n_rho() << '\n';
  out << "n_z=" << g.n_z() << '\n';
  out << "z_mirror=1\n";
  out << "rho_faces_um=" << join_um(g.rho().faces()) << '\n';
  out << "z_faces_um=" << join_um(g.z().faces()) << '\n';
  out << "values_cm-3\n";
  for (std::size_t i = 0; i < g.n_rho(); ++i) {
    for (std::size_t j = 0; j < g.n_z(); ++j) {
      if (j) out << ',';
      out << format_double(field.at(i, j) / units::per_cm3);
    }
    out << '\n';
  }
}

DensityField read_density(std::istream& in) {
  std::map<std::string, std::string> header;
  std::string line;
  bool body = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line == "values_cm-3") {
      body = true;
      break;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::ParseError, "density header line without '=': " + line);
    header[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (!body) throw Error(ErrorCode::ParseError, "density file has no values section");
  for (const char* key : {"species", "n_rho", "n_z", "rho_faces_um", "z_faces_um"}) {
    if (!header.count(key)) throw Error(ErrorCode::ParseError, std::string("density header missing ") + key);
  }
  auto grid = std::make_shared<const Grid2D>(Axis::from_faces(split_doubles(header["rho_faces_um"], units::micrometer)),
                                             Axis::from_faces(split_doubles(header["z_faces_um"], units::micrometer)));
  const auto n_rho = static_cast<std::size_t>(std::stoul(header["n_rho"]));
  const auto n_z = static_cast<std::size_t>(std::stoul(header["n_z"]));
  if (grid->n_rho() != n_rho || grid->n_z() != n_z) throw Error(ErrorCode::ParseError, "density dims disagree with faces");
  std::vector<double> values;
  values.reserve(grid->size());
  for (std::size_t i = 0; i < n_rho; ++i) {
    if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "density file truncated");
    auto row = split_doubles(line, units::per_cm3);
    if (row.size() != n_z) throw Error(ErrorCode::ParseError, "density row has wrong length");
    values.insert(values.end(), row.begin(), row.end());
  }
  return DensityField(std::move(grid), std::move(values), header["species"]);
}

void save_density(const std::string& path, const DensityField& field) {
  std::ostringstream out;
  write_density(out, field);
  write_file_atomic(path, out.str());
}

DensityField load_density(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingInput, "cannot open " + path);
  return read_density(in);
}

}  // namespace mixsep
