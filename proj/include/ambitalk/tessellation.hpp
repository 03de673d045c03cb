#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

#include "ambitalk/model.hpp"

namespace ambitalk {

struct Interval {
  double lo;
  double hi;

  double length() const { return hi - lo; }
};

/// Sender strategy as per-word cells. Each cell is a list of intervals; the
/// intervals of all words tile the state space up to endpoints. Membership
/// of a point is right-continuous (a <= t < b, or t == hi at the top).
class CommunicationDevice {
public:
  explicit CommunicationDevice(std::vector<std::vector<Interval>> cells);

  /// Contiguous cells: word order[i] gets [cuts[i-1], cuts[i]] with the
  /// state bounds as outer cuts. Words not in `order` get empty cells.
  static CommunicationDevice from_cuts(const StateInterval &state,
                                       std::size_t words,
                                       const std::vector<std::size_t> &order,
                                       const std::vector<double> &cuts);

  std::size_t size() const { return cells_.size(); }
  const std::vector<Interval> &cell(std::size_t w) const { return cells_.at(w); }

  /// Word whose cell contains t, or size() when none does.
  std::size_t word_at(double t, double state_hi) const;

  /// Checks the tiling invariants against the state space.
  void validate(const StateInterval &state) const;

  /// Interior cut points in increasing order, deduplicated.
  std::vector<double> cutpoints() const;

  /// Same cells up to merging and zero-length pieces, endpoints within tol.
  bool equivalent(const CommunicationDevice &other, double tol) const;

private:
  std::vector<std::vector<Interval>> cells_;
};

struct CellStats {
  double mass = 0.0;
  /// Undefined for cells of zero prior mass.
  std::optional<double> centroid;
  std::optional<double> variance;
};

struct ActionProfile {
  Eigen::VectorXd actions;
  /// Weight on the centroid, defined for words with mass > 0 and d_w > 0.
  std::vector<std::optional<double>> lambda;

  static ActionProfile from_actions(Eigen::VectorXd actions);
  std::size_t size() const { return static_cast<std::size_t>(actions.size()); }
};

CellStats cell_stats(const GameSpec &spec, const CommunicationDevice &device,
                     std::size_t w);
CellStats interval_stats(const PriorDensity &prior,
                         const std::vector<Interval> &cell);

/// Bayesian estimator of the whole state space under the quadratic loss.
double pooling_action(const GameSpec &spec);

/// Variance of the prior (trace norm in one dimension).
double prior_variance(const GameSpec &spec);

/// Nearest-action (Voronoi) cells. Cuts sit at midpoints of adjacent distinct
/// actions; words sharing an action yield to the smallest index.
CommunicationDevice sender_best_reply(const GameSpec &spec,
                                      const ActionProfile &profile);

double pooling_distance(const GameSpec &spec, const ActionProfile &profile,
                        std::size_t w);

/// Per-word cell geometry used by both receiver problems.
struct CellGeometry {
  double mass = 0.0;
  double centroid = 0.0;  // pooling action for empty cells
  double variance = 0.0;  // prior variance for empty cells
  double distance = 0.0;  // |centroid - pooling action|, 0 for empty cells
  bool empty = true;
};

struct DeviceGeometry {
  double pooling = 0.0;
  double total_variance = 0.0;
  std::vector<CellGeometry> cells;
};

DeviceGeometry device_geometry(const GameSpec &spec,
                               const CommunicationDevice &device);

} // namespace ambitalk
