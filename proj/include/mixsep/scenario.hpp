#ifndef MIXSEP_SCENARIO_HPP
#define MIXSEP_SCENARIO_HPP

#include "mixsep/physics.hpp"

namespace mixsep {

// Full physical problem statement for one run: 41K bosons in a 6Li Fermi sea.
struct MixtureScenario {
  SpeciesParams boson = default_potassium();
  SpeciesParams fermion = default_lithium();
  double n_bosons = 2.9e4;           // condensed + thermal
  double n_fermions = 1.4e5;
  double condensate_fraction = 0.5;  // beta
  double a_bf = 0.0;                 // m

  double condensed_bosons() const { return condensate_fraction * n_bosons; }
  double thermal_bosons() const { return (1.0 - condensate_fraction) * n_bosons; }

  // Throws ValidationError naming the first offending quantity.
  void validate() const;

  bool operator==(const MixtureScenario&) const = default;
};

}  // namespace mixsep

#endif  // MIXSEP_SCENARIO_HPP
