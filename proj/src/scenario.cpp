#include "mixsep/scenario.hpp"

#include "mixsep/error.hpp"

namespace mixsep {

void MixtureScenario::validate() const {
  boson.validate("boson");
  fermion.validate("fermion");
  if (!(boson.a_intra > 0.0)) throw Error(ErrorCode::ValidationError, "boson.a_bb must be positive");
  if (!(n_bosons >= 0.0)) throw Error(ErrorCode::ValidationError, "n_bosons must be >= 0");
  if (!(n_fermions >= 1.0)) throw Error(ErrorCode::ValidationError, "n_fermions must be >= 1");
  if (!(condensate_fraction >= 0.0 && condensate_fraction <= 1.0)) {
    throw Error(ErrorCode::ValidationError, "beta must lie in [0, 1]");
  }
}

}  // namespace mixsep
