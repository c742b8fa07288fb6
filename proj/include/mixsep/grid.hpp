#ifndef MIXSEP_GRID_HPP
#define MIXSEP_GRID_HPP

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mixsep {

// Cell-centred 1D axis starting at 0. Cell i spans [faces[i], faces[i+1]] and
// its centre is the midpoint of its faces, which makes the cylindrical shell
// volume 2 pi rho_c d_rho d_z exact.
class Axis {
 public:
  Axis() = default;
  static Axis uniform(std::size_t cells, double extent);
  // faces x_k = extent * sinh(s k/n) / sinh(s); s = 0 gives a uniform axis.
  // Cells are finest at the origin, where the condensate sits.
  static Axis stretched(std::size_t cells, double extent, double stretch);
  static Axis from_faces(std::vector<double> faces);

  std::size_t size() const { return centers_.size(); }
  double extent() const { return faces_.back(); }
  double face(std::size_t k) const { return faces_[k]; }
  double center(std::size_t i) const { return centers_[i]; }
  double width(std::size_t i) const { return widths_[i]; }
  double min_width() const;
  double max_width() const;
  const std::vector<double>& faces() const { return faces_; }
  const std::vector<double>& centers() const { return centers_; }

  bool operator==(const Axis& other) const { return faces_ == other.faces_; }

 private:
  std::vector<double> faces_;
  std::vector<double> centers_;
  std::vector<double> widths_;
};

// Cylindrically symmetric (rho, z) grid. Only z >= 0 is stored; every field
// on the grid is the mirror image in z < 0, so fields are even in z by
// construction and volumes include both halves.
class Grid2D {
 public:
  Grid2D(Axis rho, Axis z);

  std::size_t n_rho() const { return rho_.size(); }
  std::size_t n_z() const { return z_.size(); }
  std::size_t size() const { return rho_.size() * z_.size(); }
  std::size_t index(std::size_t i, std::size_t j) const { return i * z_.size() + j; }

  const Axis& rho() const { return rho_; }
  const Axis& z() const { return z_; }
  // Full-space volume of cell k (both z halves).
  double volume(std::size_t k) const { return volumes_[k]; }
  const std::vector<double>& volumes() const { return volumes_; }
  double total_volume() const;

  bool operator==(const Grid2D& other) const { return rho_ == other.rho_ && z_ == other.z_; }

 private:
  Axis rho_;
  Axis z_;
  std::vector<double> volumes_;
};

using GridPtr = std::shared_ptr<const Grid2D>;

struct GridSpec {
  std::size_t n_rho = 128;
  std::size_t n_z = 256;
  double rho_extent = 0.0;  // m
  double z_extent = 0.0;    // m
  double stretch_rho = 3.0;
  double stretch_z = 3.0;
};

GridPtr make_grid(const GridSpec& spec);

// Nonnegative density (m^-3) sampled at the cell centres of a grid.
struct DensityField {
  GridPtr grid;
  std::vector<double> values;
  std::string species;

  DensityField() = default;
  DensityField(GridPtr g, std::string tag);
  DensityField(GridPtr g, std::vector<double> v, std::string tag);

  double integral() const;
  double peak() const;
  double at(std::size_t i, std::size_t j) const { return values[grid->index(i, j)]; }
  // Value at the cell nearest the trap centre.
  double central() const { return values[0]; }
};

// Compensated sum of w_k f_k over the grid.
double integrate(const Grid2D& grid, std::span<const double> integrand);

// Throws GridMismatch unless both fields share the same grid.
void require_same_grid(const DensityField& a, const DensityField& b);

// Text layout: key=value header (grid dims, faces in um, species tag)
// followed by one row of values per rho cell, in cm^-3.
void write_density(std::ostream& out, const DensityField& field);
DensityField read_density(std::istream& in);
void save_density(const std::string& path, const DensityField& field);
DensityField load_density(const std::string& path);

// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace mixsep

#endif  // MIXSEP_GRID_HPP
