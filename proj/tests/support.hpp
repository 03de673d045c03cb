#pragma once

#include <cmath>

#include "ambitalk/model.hpp"
#include "ambitalk/tessellation.hpp"

namespace testing {

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// Uniform prior on [-1/2, 1/2], words L and R, full simplex, P = {p}.
inline ambitalk::GameSpec symmetric_game(double p) {
  const ambitalk::StateInterval state(-0.5, 0.5);
  return {state, ambitalk::PriorDensity::uniform(state), ambitalk::WordSet({"L", "R"}),
          ambitalk::AmbiguitySet(p, p, ambitalk::FullSimplex{})};
}

// L gets [-1/2, 0), R gets [0, 1/2].
inline ambitalk::CommunicationDevice halves_device() {
  return ambitalk::CommunicationDevice({{{-0.5, 0.0}}, {{0.0, 0.5}}});
}

// 2/3 on [-1/2, 0), 4/3 on [0, 1/2].
inline ambitalk::PriorDensity tilted_prior() {
  return ambitalk::PriorDensity({-0.5, 0.0, 0.5}, {2.0 / 3.0, 4.0 / 3.0});
}

} // namespace testing
