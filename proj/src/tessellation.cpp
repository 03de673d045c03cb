#include "ambitalk/tessellation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ambitalk {

namespace {

std::vector<Interval> normalized(const std::vector<Interval> &cell) {
  std::vector<Interval> out;
  for (const auto &iv : cell)
    if (iv.hi > iv.lo) out.push_back(iv);
  std::sort(out.begin(), out.end(),
            [](const Interval &a, const Interval &b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto &iv : out) {
    if (!merged.empty() && iv.lo <= merged.back().hi)
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    else
      merged.push_back(iv);
  }
  return merged;
}

} // namespace

CommunicationDevice::CommunicationDevice(std::vector<std::vector<Interval>> cells)
    : cells_(std::move(cells)) {
  if (cells_.size() < 2) throw InvalidSpec("a device needs at least two words");
  for (const auto &cell : cells_)
    for (const auto &iv : cell)
      if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.hi < iv.lo)
        throw InvalidSpec("cell intervals must satisfy lo <= hi");
}

CommunicationDevice CommunicationDevice::from_cuts(
    const StateInterval &state, std::size_t words,
    const std::vector<std::size_t> &order, const std::vector<double> &cuts) {
  if (order.size() != cuts.size() + 1)
    throw InvalidSpec("need one more word than interior cuts");
  std::vector<std::vector<Interval>> cells(words);
  double left = state.lo;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double right = i < cuts.size() ? std::clamp(cuts[i], left, state.hi) : state.hi;
    if (order[i] >= words) throw InvalidSpec("word index out of range");
    if (right > left) cells[order[i]].push_back({left, right});
    left = right;
  }
  return CommunicationDevice(std::move(cells));
}

std::size_t CommunicationDevice::word_at(double t, double state_hi) const {
  for (std::size_t w = 0; w < cells_.size(); ++w) {
    for (const auto &iv : cells_[w]) {
      if (!(iv.hi > iv.lo)) continue;
      if ((t >= iv.lo && t < iv.hi) || (t == state_hi && iv.hi == state_hi))
        return w;
    }
  }
  return cells_.size();
}

void CommunicationDevice::validate(const StateInterval &state) const {
  const double tol = 1e-12 * std::max(1.0, state.width());
  std::vector<Interval> all;
  for (const auto &cell : cells_)
    for (const auto &iv : cell) {
      if (iv.lo < state.lo - tol || iv.hi > state.hi + tol)
        throw InvalidSpec("cell interval leaves the state space");
      if (iv.hi > iv.lo) all.push_back(iv);
    }
  std::sort(all.begin(), all.end(),
            [](const Interval &a, const Interval &b) { return a.lo < b.lo; });
  double cursor = state.lo;
  for (const auto &iv : all) {
    if (std::abs(iv.lo - cursor) > tol) {
      std::ostringstream os;
      os << "cells must tile the state space; gap or overlap at " << cursor;
      throw InvalidSpec(os.str());
    }
    cursor = iv.hi;
  }
  if (std::abs(cursor - state.hi) > tol)
    throw InvalidSpec("cells do not cover the state space");
}

std::vector<double> CommunicationDevice::cutpoints() const {
  std::vector<double> ends;
  double lo = INFINITY;
  double hi = -INFINITY;
  for (const auto &cell : cells_)
    for (const auto &iv : normalized(cell)) {
      ends.push_back(iv.lo);
      ends.push_back(iv.hi);
      lo = std::min(lo, iv.lo);
      hi = std::max(hi, iv.hi);
    }
  std::sort(ends.begin(), ends.end());
  ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
  std::vector<double> cuts;
  for (double e : ends)
    if (e > lo && e < hi) cuts.push_back(e);
  return cuts;
}

bool CommunicationDevice::equivalent(const CommunicationDevice &other,
                                     double tol) const {
  if (size() != other.size()) return false;
  for (std::size_t w = 0; w < size(); ++w) {
    auto a = normalized(cells_[w]);
    auto b = normalized(other.cells_[w]);
    // Slivers shorter than tol are measure-zero noise.
    auto drop = [tol](std::vector<Interval> &v) {
      v.erase(std::remove_if(v.begin(), v.end(),
                             [tol](const Interval &iv) { return iv.length() <= tol; }),
              v.end());
    };
    drop(a);
    drop(b);
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::abs(a[i].lo - b[i].lo) > tol || std::abs(a[i].hi - b[i].hi) > tol)
        return false;
  }
  return true;
}

ActionProfile ActionProfile::from_actions(Eigen::VectorXd actions) {
  ActionProfile p;
  p.lambda.assign(static_cast<std::size_t>(actions.size()), std::nullopt);
  p.actions = std::move(actions);
  return p;
}

CellStats interval_stats(const PriorDensity &prior,
                         const std::vector<Interval> &cell) {
  Moments m;
  for (const auto &iv : cell) m += prior.moments(iv.lo, iv.hi);
  CellStats s;
  s.mass = m.mass;
  if (!(m.mass > 0.0)) return s;
  const double centroid = m.first / m.mass;
  double central = 0.0;
  for (const auto &iv : cell) central += prior.central_second(iv.lo, iv.hi, centroid);
  s.centroid = centroid;
  s.variance = std::max(0.0, central / m.mass);
  return s;
}

CellStats cell_stats(const GameSpec &spec, const CommunicationDevice &device,
                     std::size_t w) {
  return interval_stats(spec.prior, device.cell(w));
}

double pooling_action(const GameSpec &spec) {
  return *interval_stats(spec.prior, {{spec.state.lo, spec.state.hi}}).centroid;
}

double prior_variance(const GameSpec &spec) {
  return *interval_stats(spec.prior, {{spec.state.lo, spec.state.hi}}).variance;
}

CommunicationDevice sender_best_reply(const GameSpec &spec,
                                      const ActionProfile &profile) {
  const std::size_t n = profile.size();
  if (n != spec.word_count())
    throw InvalidSpec("profile size differs from the word count");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return profile.actions(static_cast<Index>(a)) < profile.actions(static_cast<Index>(b));
  });
  // One representative per distinct action: the smallest index, which the
  // stable sort puts first within each group.
  std::vector<std::size_t> order;
  std::vector<double> cuts;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = profile.actions(static_cast<Index>(idx[k]));
    if (!order.empty() && a == profile.actions(static_cast<Index>(order.back())))
      continue;
    if (!order.empty())
      cuts.push_back(0.5 * (profile.actions(static_cast<Index>(order.back())) + a));
    order.push_back(idx[k]);
  }
  return CommunicationDevice::from_cuts(spec.state, n, order, cuts);
}

double pooling_distance(const GameSpec &spec, const ActionProfile &profile,
                        std::size_t w) {
  return std::abs(profile.actions(static_cast<Index>(w)) - pooling_action(spec));
}

DeviceGeometry device_geometry(const GameSpec &spec,
                               const CommunicationDevice &device) {
  if (device.size() != spec.word_count())
    throw InvalidSpec("device size differs from the word count");
  DeviceGeometry g;
  g.pooling = pooling_action(spec);
  g.total_variance = prior_variance(spec);
  g.cells.resize(device.size());
  for (std::size_t w = 0; w < device.size(); ++w) {
    const CellStats s = cell_stats(spec, device, w);
    CellGeometry &c = g.cells[w];
    c.mass = s.mass;
    if (s.centroid) {
      c.empty = false;
      c.centroid = *s.centroid;
      c.variance = *s.variance;
      c.distance = std::abs(c.centroid - g.pooling);
    } else {
      c.centroid = g.pooling;
      c.variance = g.total_variance;
    }
  }
  return g;
}

} // namespace ambitalk
