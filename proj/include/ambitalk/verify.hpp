#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "ambitalk/equilibrium.hpp"
#include "ambitalk/instances.hpp"
#include "ambitalk/oracle.hpp"

namespace ambitalk::verify {

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  /// Largest discrepancy of the primary check.
  double worst = 0.0;
  std::string note;

  bool passed() const { return failures == 0; }
};

/// Posterior densities integrate to one for every observable word and
/// every corner (p, G), within 1e-9.
SuiteResult posterior_suite(std::span<const GameInstance> instances);

/// Receiver solvers against the grid oracles: objectives within 1e-5,
/// actions within twice the action grid step. Ex-ante checks skip
/// instances with more than three words.
SuiteResult oracle_suite(std::span<const GameInstance> instances,
                         const oracle::GridConfig &grid = {});

/// Interim replies of regular words are at most as far from the pooling
/// action as the ex-ante plan (slack 1e-9). Under full vocabulary, all
/// words regular, no ex-ante action within 1e-9 of the pooling action and
/// at least two G-set members active in the saddle mixture, every word is
/// strictly closer by more than 1e-9.
SuiteResult underreaction_suite(std::span<const GameInstance> instances);

/// A regular word exists, and the sufficient test never contradicts the
/// exact classification.
SuiteResult regular_word_suite(std::span<const GameInstance> instances);

/// The efficient equilibrium and the constructive two-cell seed both beat
/// babbling whenever p_hi < 1.
SuiteResult nonbabbling_suite(std::span<const GameInstance> instances,
                              const SearchOptions &options = {});

/// Ex-ante and interim actions lie on the segment between the cell
/// centroid and the pooling action, within 1e-9.
SuiteResult segment_suite(std::span<const GameInstance> instances);

/// Shannon channel decomposition: round trip at 1e-12 for n = 1 and
/// m = 1..5, uniqueness for m >= 2, two distinct witnesses for m = 1, and
/// certified counterexamples for m = 1, n = 2.
SuiteResult channel_suite();

} // namespace ambitalk::verify
