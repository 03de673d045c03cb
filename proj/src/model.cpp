#include "ambitalk/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "ambitalk/tessellation.hpp"

namespace ambitalk {

namespace {

constexpr double kProbabilityTol = 1e-12;

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

} // namespace

StateInterval::StateInterval(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    std::ostringstream os;
    os << "state interval requires lo < hi, got [" << lo << ", " << hi << "]";
    throw InvalidSpec(os.str());
  }
}

PriorDensity::PriorDensity(std::vector<double> breakpoints,
                           std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.size() < 2 || values_.size() + 1 != breakpoints_.size())
    throw InvalidSpec("prior needs n+1 breakpoints for n density values");
  for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
    if (!std::isfinite(breakpoints_[i]) || !(breakpoints_[i] < breakpoints_[i + 1]))
      throw InvalidSpec("prior breakpoints must be strictly increasing");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || !(values_[i] > 0.0))
      throw InvalidSpec("prior density values must be positive");
    total += values_[i] * (breakpoints_[i + 1] - breakpoints_[i]);
  }
  for (double &v : values_) v /= total;
}

PriorDensity PriorDensity::uniform(const StateInterval &state) {
  return PriorDensity({state.lo, state.hi}, {1.0});
}

double PriorDensity::density(double t) const {
  if (t < lo() || t > hi()) return 0.0;
  if (t == hi()) return values_.back();
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

Moments PriorDensity::moments(double a, double b) const {
  Moments m;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double x0 = std::max(a, breakpoints_[i]);
    const double x1 = std::min(b, breakpoints_[i + 1]);
    if (!(x1 > x0)) continue;
    const double c = values_[i];
    m.mass += c * (x1 - x0);
    m.first += c * (x1 * x1 - x0 * x0) / 2.0;
    m.second += c * (x1 * x1 * x1 - x0 * x0 * x0) / 3.0;
  }
  return m;
}

double PriorDensity::central_second(double a, double b, double center) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double x0 = std::max(a, breakpoints_[i]);
    const double x1 = std::min(b, breakpoints_[i + 1]);
    if (!(x1 > x0)) continue;
    const double u0 = x0 - center;
    const double u1 = x1 - center;
    acc += values_[i] * (u1 * u1 * u1 - u0 * u0 * u0) / 3.0;
  }
  return acc;
}

double PriorDensity::quantile(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  double cum = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double piece = values_[i] * (breakpoints_[i + 1] - breakpoints_[i]);
    if (cum + piece >= u || i + 1 == values_.size()) {
      const double t = breakpoints_[i] + (u - cum) / values_[i];
      return std::clamp(t, breakpoints_[i], breakpoints_[i + 1]);
    }
    cum += piece;
  }
  return hi();
}

WordSet::WordSet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() < 2) throw InvalidSpec("word set needs at least two words");
  std::set<std::string> seen(names_.begin(), names_.end());
  if (seen.size() != names_.size()) throw InvalidSpec("word labels must be unique");
}

WordSet WordSet::numbered(std::size_t count) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < count; ++i) names.push_back("w" + std::to_string(i));
  return WordSet(std::move(names));
}

std::size_t WordSet::index_of(const std::string &label) const {
  auto it = std::find(names_.begin(), names_.end(), label);
  if (it == names_.end()) throw InvalidSpec("unknown word '" + label + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

AmbiguitySet::AmbiguitySet(double p_lo, double p_hi, GSet g_set)
    : p_lo_(p_lo), p_hi_(p_hi), g_set_(std::move(g_set)) {
  if (!is_probability(p_lo_) || !is_probability(p_hi_) || p_lo_ > p_hi_)
    throw InvalidSpec("error probabilities need 0 <= p_lo <= p_hi <= 1");
  if (const auto *fs = std::get_if<FiniteSet>(&g_set_)) {
    if (fs->members.empty()) throw InvalidSpec("finite G-set must be nonempty");
    for (const auto &g : fs->members) {
      if (g.size() == 0 || (g.array() < 0.0).any() || !g.allFinite() ||
          std::abs(g.sum() - 1.0) > kProbabilityTol)
        throw InvalidSpec("G-set members must be probability vectors");
    }
  }
}

double AmbiguitySet::min_g(std::size_t w) const {
  if (full_simplex()) return 0.0;
  const auto &members = std::get<FiniteSet>(g_set_).members;
  double v = members.front()(static_cast<Index>(w));
  for (const auto &g : members) v = std::min(v, g(static_cast<Index>(w)));
  return v;
}

double AmbiguitySet::max_g(std::size_t w) const {
  if (full_simplex()) return 1.0;
  const auto &members = std::get<FiniteSet>(g_set_).members;
  double v = members.front()(static_cast<Index>(w));
  for (const auto &g : members) v = std::max(v, g(static_cast<Index>(w)));
  return v;
}

std::vector<Eigen::VectorXd> AmbiguitySet::extreme_points(std::size_t words) const {
  if (const auto *fs = std::get_if<FiniteSet>(&g_set_)) return fs->members;
  std::vector<Eigen::VectorXd> vertices;
  for (std::size_t w = 0; w < words; ++w)
    vertices.push_back(Eigen::VectorXd::Unit(static_cast<Index>(words), static_cast<Index>(w)));
  return vertices;
}

void AmbiguitySet::check_dimension(std::size_t words) const {
  if (const auto *fs = std::get_if<FiniteSet>(&g_set_)) {
    for (const auto &g : fs->members)
      if (static_cast<std::size_t>(g.size()) != words)
        throw InvalidSpec("G-set member length differs from the word count");
  }
}

GameSpec::GameSpec(StateInterval state_, PriorDensity prior_, WordSet words_,
                   AmbiguitySet ambiguity_, LossFunction loss_)
    : state(state_), prior(std::move(prior_)), words(std::move(words_)),
      ambiguity(std::move(ambiguity_)), loss(std::move(loss_)) {
  if (prior.lo() != state.lo || prior.hi() != state.hi)
    throw InvalidSpec("prior breakpoints must span the state interval");
  ambiguity.check_dimension(words.size());
}

void GameSpec::require_quadratic(const char *who) const {
  if (!loss.quadratic)
    throw UnsupportedLoss(std::string(who) + " requires the quadratic loss");
}

double channel_prob(std::size_t v, std::size_t w, double p,
                    const Eigen::VectorXd &g) {
  return (1.0 - p) * (v == w ? 1.0 : 0.0) + p * g(static_cast<Index>(w));
}

KappaWeight kappa(double p, double g_w, double cell_mass) {
  const double num = p * g_w;
  const double den = (1.0 - p) * cell_mass + num;
  if (!(den > 0.0)) throw DegenerateWord("word has zero expected frequency");
  return {std::clamp(num / den, 0.0, 1.0)};
}

KappaBounds kappa_bounds(const AmbiguitySet &ambiguity, double cell_mass,
                         std::size_t w) {
  const double g_lo = ambiguity.min_g(w);
  const double g_hi = ambiguity.max_g(w);
  if (cell_mass > 0.0) {
    // With no error mass on w the weight is 0 for every p < 1; p = 1 is the
    // continuous limit.
    auto at = [&](double p, double g) {
      return g > 0.0 ? kappa(p, g, cell_mass) : KappaWeight{0.0};
    };
    return {at(ambiguity.p_lo(), g_lo), at(ambiguity.p_hi(), g_hi)};
  }
  if (!(ambiguity.p_hi() * g_hi > 0.0))
    throw DegenerateWord("empty cell and no error mass on the word");
  return {KappaWeight{1.0}, KappaWeight{1.0}};
}

KappaBounds kappa_bounds(const GameSpec &spec, const CommunicationDevice &device,
                         std::size_t w) {
  return kappa_bounds(spec.ambiguity, cell_stats(spec, device, w).mass, w);
}

double posterior_density(const GameSpec &spec, const CommunicationDevice &device,
                         std::size_t w, double p, const Eigen::VectorXd &g,
                         double t) {
  const double mass = cell_stats(spec, device, w).mass;
  const double gw = g(static_cast<Index>(w));
  const double freq = (1.0 - p) * mass + p * gw;
  if (!(freq > 0.0)) throw DegenerateWord("word has zero expected frequency");
  const double in_cell = device.word_at(t, spec.state.hi) == w ? 1.0 : 0.0;
  return ((1.0 - p) * in_cell + p * gw) / freq * spec.prior.density(t);
}

} // namespace ambitalk
