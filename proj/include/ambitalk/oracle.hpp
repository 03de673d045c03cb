#pragma once

#include <Eigen/Dense>

#include <cstddef>

#include "ambitalk/model.hpp"
#include "ambitalk/tessellation.hpp"

// Brute-force references. Nothing here calls into the receiver or
// equilibrium code; cell moments and objectives are recomputed from the
// prior pieces.
namespace ambitalk::oracle {

struct GridConfig {
  /// Spacing of the action grid on the state interval.
  double action_grid_step = 1e-4;
  /// Coarse spacing of the lambda grid in the ex-ante search.
  double simplex_grid_step = 0.05;
  /// Midpoint nodes per prior piece for non-quadratic losses.
  int quadrature_points = 400;

  void validate() const;
};

struct InterimResult {
  double action = 0.0;
  double objective = 0.0;
};

/// Grid minimizer over the whole state interval of the worst posterior
/// expected loss, the worst case taken over corner pairs (p, G).
/// Requires a word with positive cell mass.
InterimResult oracle_interim(const GameSpec &spec, const CommunicationDevice &device,
                             std::size_t w, const GridConfig &grid = {});

struct ExAnteResult {
  Eigen::VectorXd actions;
  Eigen::VectorXd lambda;
  double objective = 0.0;
};

/// Grid search over lambda vectors, coarse to fine. At most three words.
ExAnteResult oracle_exante(const GameSpec &spec, const CommunicationDevice &device,
                           const GridConfig &grid = {});

/// Worst-case ex-ante loss of fixed actions, evaluated by direct integration.
double oracle_exante_objective(const GameSpec &spec, const CommunicationDevice &device,
                               const Eigen::VectorXd &actions);

/// |integral of the posterior density - 1|.
double oracle_posterior_check(const GameSpec &spec, const CommunicationDevice &device,
                              std::size_t w, double p, const Eigen::VectorXd &g);

} // namespace ambitalk::oracle
