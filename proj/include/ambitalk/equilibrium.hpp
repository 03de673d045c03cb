#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ambitalk/model.hpp"
#include "ambitalk/receiver.hpp"
#include "ambitalk/tessellation.hpp"

namespace ambitalk {

/// Per-word comparison of the ex-ante plan with the interim reply.
struct InconsistencyRow {
  std::size_t word = 0;
  double mass = 0.0;
  std::optional<double> centroid;
  double centroid_distance = 0.0;
  std::optional<double> lambda_exante;
  std::optional<double> lambda_interim;
  double action_exante = 0.0;
  double action_interim = 0.0;
  double distance_exante = 0.0;
  double distance_interim = 0.0;
  /// distance_interim / distance_exante; unset when the ex-ante action pools.
  std::optional<double> ratio;
  bool regular = false;
  /// Outcome of the sufficient test; unset for empty cells.
  std::optional<bool> regular_sufficient;
  double kappa_hi = 0.0;
  /// Error probability at which the ex-ante closed form reproduces the
  /// interim action. Only defined for symmetric two-word games with a full
  /// simplex and a single error probability.
  std::optional<double> as_if_p;
};

struct EquilibriumReport {
  CommunicationDevice device;
  ActionProfile exante_profile;
  ActionProfile interim_profile;
  double exante_loss = 0.0;
  bool interim_is_equilibrium = false;
  double babbling_loss = 0.0;
  std::vector<InconsistencyRow> per_word;
  int iterations = 0;
  double displacement = 0.0;
  /// Seed of the restart that produced the report; unset for the
  /// constructive seed and for direct dynamics runs.
  std::optional<std::uint64_t> restart_seed;
  int restarts = 0;
};

/// Best-reply dynamics that ran out of iterations.
class DynamicsNonConvergence : public NonConvergence {
public:
  DynamicsNonConvergence(int iterations, double displacement,
                         Eigen::VectorXd last_actions)
      : NonConvergence("best-reply dynamics did not converge", iterations, displacement),
        last_actions_(std::move(last_actions)) {}

  const Eigen::VectorXd &last_actions() const { return last_actions_; }

private:
  Eigen::VectorXd last_actions_;
};

/// Expected loss of playing the pooling action without communication.
double babbling_loss(const GameSpec &spec);

/// Two-cell device with one informative word and its worst-case reply s*;
/// every other word is answered with the pooling action.
std::pair<CommunicationDevice, ActionProfile>
seed_nonbabbling(const GameSpec &spec, std::size_t v1, std::size_t v2, double cut);

struct DynamicsOptions {
  int max_iter = 10000;
  double tol = 1e-10;
};

EquilibriumReport best_reply_dynamics(const GameSpec &spec, const ActionProfile &init,
                                      const DynamicsOptions &options = {});

struct SearchOptions {
  int restarts = 8;
  std::uint64_t seed = 1;
  DynamicsOptions dynamics;
};

/// Minimal-loss fixed point over the constructive seed and randomized starts.
EquilibriumReport efficient_equilibrium(const GameSpec &spec,
                                        const SearchOptions &options = {});

struct InterimProfile {
  ActionProfile profile;
  std::vector<InterimSolution> solutions;
  bool is_equilibrium = false;
};

InterimProfile interim_profile(const GameSpec &spec, const CommunicationDevice &device);

std::vector<InconsistencyRow> inconsistency_report(const GameSpec &spec,
                                                   const CommunicationDevice &device);

/// Builds the full report for a device and its ex-ante reply.
EquilibriumReport make_report(const GameSpec &spec, CommunicationDevice device,
                              const ExAnteSolution &exante);

} // namespace ambitalk
