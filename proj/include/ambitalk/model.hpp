#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ambitalk/errors.hpp"

namespace ambitalk {

using Index = Eigen::Index;

/// Compact one-dimensional state space [lo, hi].
struct StateInterval {
  double lo;
  double hi;

  StateInterval(double lo, double hi);

  double width() const { return hi - lo; }
  bool contains(double t) const { return t >= lo && t <= hi; }
};

/// Raw moments of the prior restricted to a set: int f0, int t f0, int t^2 f0.
struct Moments {
  double mass = 0.0;
  double first = 0.0;
  double second = 0.0;

  Moments &operator+=(const Moments &o) {
    mass += o.mass;
    first += o.first;
    second += o.second;
    return *this;
  }
};

/// Piecewise-constant prior density. Values are rescaled to integrate to one.
class PriorDensity {
public:
  PriorDensity(std::vector<double> breakpoints, std::vector<double> values);

  static PriorDensity uniform(const StateInterval &state);

  double lo() const { return breakpoints_.front(); }
  double hi() const { return breakpoints_.back(); }
  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const double> values() const { return values_; }
  std::size_t pieces() const { return values_.size(); }

  /// Density at t; right-continuous at interior breakpoints, zero outside.
  double density(double t) const;

  /// Exact moments over [a, b] (clipped to the support).
  Moments moments(double a, double b) const;

  /// Exact second moment about `center` over [a, b].
  double central_second(double a, double b, double center) const;

  /// Inverse CDF for u in [0, 1].
  double quantile(double u) const;

private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

class WordSet {
public:
  explicit WordSet(std::vector<std::string> names);
  static WordSet numbered(std::size_t count);

  std::size_t size() const { return names_.size(); }
  const std::string &name(std::size_t w) const { return names_.at(w); }
  const std::vector<std::string> &names() const { return names_; }
  /// Throws InvalidSpec for unknown labels.
  std::size_t index_of(const std::string &label) const;

private:
  std::vector<std::string> names_;
};

/// Every distribution over the word set.
struct FullSimplex {};

/// An explicit list of error distributions.
struct FiniteSet {
  std::vector<Eigen::VectorXd> members;
};

class AmbiguitySet {
public:
  using GSet = std::variant<FullSimplex, FiniteSet>;

  AmbiguitySet(double p_lo, double p_hi, GSet g_set);

  double p_lo() const { return p_lo_; }
  double p_hi() const { return p_hi_; }
  const GSet &g_set() const { return g_set_; }
  bool full_simplex() const {
    return std::holds_alternative<FullSimplex>(g_set_);
  }

  double min_g(std::size_t w) const;
  double max_g(std::size_t w) const;

  /// Extreme points of the G-set: simplex vertices or the finite members.
  std::vector<Eigen::VectorXd> extreme_points(std::size_t words) const;

  void check_dimension(std::size_t words) const;

private:
  double p_lo_;
  double p_hi_;
  GSet g_set_;
};

/// Loss as a function of the distance |t - s|. Receiver solvers need the
/// quadratic loss; the babbling baseline and oracles accept any convex one.
struct LossFunction {
  std::string name = "quadratic";
  std::function<double(double)> of_distance = [](double d) { return d * d; };
  bool quadratic = true;

  static LossFunction squared() { return {}; }
  static LossFunction convex(std::string name, std::function<double(double)> f) {
    return {std::move(name), std::move(f), false};
  }
};

struct GameSpec {
  StateInterval state;
  PriorDensity prior;
  WordSet words;
  AmbiguitySet ambiguity;
  LossFunction loss = LossFunction::squared();

  GameSpec(StateInterval state, PriorDensity prior, WordSet words,
           AmbiguitySet ambiguity, LossFunction loss = LossFunction::squared());

  std::size_t word_count() const { return words.size(); }
  void require_quadratic(const char *who) const;
};

struct KappaWeight {
  double value;
};

inline bool operator<=(KappaWeight a, KappaWeight b) { return a.value <= b.value; }

/// Probability of receiving `w` when `v` was sent: (1-p)[v=w] + p G(w).
double channel_prob(std::size_t v, std::size_t w, double p,
                    const Eigen::VectorXd &g);

/// Prior weight of the posterior after observing a word:
/// p g / ((1-p) mass + p g). Throws DegenerateWord on a zero denominator.
KappaWeight kappa(double p, double g_w, double cell_mass);

struct KappaBounds {
  KappaWeight lo;
  KappaWeight hi;
};

class CommunicationDevice;

/// Range of kappa over the ambiguity set, attained at (p_lo, min G(w)) and
/// (p_hi, max G(w)). Corners with g = 0 and mass > 0 take the limit value 0.
KappaBounds kappa_bounds(const GameSpec &spec, const CommunicationDevice &device,
                         std::size_t w);
KappaBounds kappa_bounds(const AmbiguitySet &ambiguity, double cell_mass,
                         std::size_t w);

/// Posterior density of the state after observing `w` under (p, G).
double posterior_density(const GameSpec &spec, const CommunicationDevice &device,
                         std::size_t w, double p, const Eigen::VectorXd &g,
                         double t);

} // namespace ambitalk
