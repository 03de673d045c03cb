#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

#include "ambitalk/model.hpp"
#include "ambitalk/tessellation.hpp"

namespace ambitalk {

/// Weight on the centroid minimizing the single-G ex-ante problem of one word:
/// (1-p) mass / ((1-p) mass + p g). Equals 1 - kappa(p, g, mass).
double lambda_weight(double cell_mass, double p_hi, double g_w);

/// Sufficient regularity test: (2 kappa_hi - 1) d^2 <= Tr_0 - Tr_C.
/// Throws DegenerateWord for empty cells.
bool regular_test_sufficient(const GameSpec &spec,
                             const CommunicationDevice &device, std::size_t w);

struct InterimSolution {
  double action = 0.0;
  std::optional<double> lambda;
  KappaWeight worst_kappa{0.0};
  bool is_regular = false;
  /// Empty cell: the pooling action is returned and nothing is classified.
  bool degenerate = false;
  /// Both kappa endpoints attain the worst case at the optimum.
  bool knife_edge = false;
  double objective = 0.0;
};

/// Worst-case posterior expected loss of playing `action` after observing w.
double interim_objective(const GameSpec &spec, const CommunicationDevice &device,
                         std::size_t w, double action);

InterimSolution interim_best_reply(const GameSpec &spec,
                                   const CommunicationDevice &device,
                                   std::size_t w);

struct WorstCaseG {
  Eigen::VectorXd g;
  /// Every maximizing extreme point; `g` is the first of them.
  std::vector<Eigen::VectorXd> argmax;
  double value = 0.0;
};

/// Maximizer of sum_w G(w) (Tr_0 + (a_w - pool)^2) over the G-set.
WorstCaseG worst_case_G(const GameSpec &spec, const ActionProfile &profile);

/// Ex-ante worst-case expected loss of a (device, actions) pair, maximized
/// over p in {p_lo, p_hi} and over the G-set.
double exante_objective(const GameSpec &spec, const CommunicationDevice &device,
                        const Eigen::VectorXd &actions);

struct ExAnteSolution {
  ActionProfile profile;
  /// Lowest-index worst-case G against the returned profile.
  Eigen::VectorXd worst_G;
  /// Saddle-point mixture of the G-set certifying optimality.
  Eigen::VectorXd saddle_G;
  /// Weights of that mixture over the extreme points of the G-set.
  Eigen::VectorXd saddle_weights;
  double objective = 0.0;
  /// Primal minus dual value; zero at the exact optimum.
  double duality_gap = 0.0;
  /// Per-word stationarity residuals of the Lagrangian at (lambda, saddle_G).
  Eigen::VectorXd certificate;
  int iterations = 0;
};

struct ExAnteOptions {
  double certificate_tol = 1e-6;
  int max_iterations = 20000;
};

ExAnteSolution exante_best_reply(const GameSpec &spec,
                                 const CommunicationDevice &device,
                                 const ExAnteOptions &options = {});

} // namespace ambitalk
