#include "ambitalk/instances.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace ambitalk {

namespace {

double uniform(std::mt19937_64 &rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

int uniform_int(std::mt19937_64 &rng, int a, int b) {
  return std::uniform_int_distribution<int>(a, b)(rng);
}

// Sorted interior points of [lo, hi] with every gap at least min_gap.
std::vector<double> spaced_points(std::mt19937_64 &rng, double lo, double hi, int count,
                                  double min_gap) {
  while (true) {
    std::vector<double> pts(static_cast<std::size_t>(count));
    for (double &x : pts) x = uniform(rng, lo, hi);
    std::sort(pts.begin(), pts.end());
    double prev = lo;
    bool ok = true;
    for (double x : pts) {
      ok = ok && x - prev >= min_gap;
      prev = x;
    }
    if (ok && hi - prev >= min_gap) return pts;
  }
}

} // namespace

GameInstance random_instance(std::uint64_t seed, const InstanceOptions &options) {
  std::mt19937_64 rng(seed);
  const double lo = uniform(rng, -1.0, 0.5);
  const double width = uniform(rng, 0.5, 2.0);
  const StateInterval state(lo, lo + width);

  const int pieces = uniform_int(rng, 1, options.max_pieces);
  std::vector<double> bp{state.lo};
  for (double x : spaced_points(rng, state.lo, state.hi, pieces - 1, 0.02 * width)) bp.push_back(x);
  bp.push_back(state.hi);
  std::vector<double> values(static_cast<std::size_t>(pieces));
  for (double &v : values) v = uniform(rng, 0.2, 3.0);
  PriorDensity prior(std::move(bp), std::move(values));

  const int n = uniform_int(rng, options.min_words, options.max_words);
  std::vector<double> cuts =
      spaced_points(rng, state.lo, state.hi, n - 1, options.min_cell_fraction * width);
  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  const int members = uniform_int(rng, 1, options.max_members);
  FiniteSet g_set;
  std::exponential_distribution<double> expo(1.0);
  for (int k = 0; k < members; ++k) {
    Eigen::VectorXd g(n);
    for (Index i = 0; i < n; ++i) g(i) = expo(rng) + 1e-3;
    g_set.members.push_back(g / g.sum());
  }

  double p1 = uniform(rng, 0.02, 0.95);
  double p2 = uniform(rng, 0.02, 0.95);
  if (p1 > p2) std::swap(p1, p2);

  GameSpec spec(state, std::move(prior), WordSet::numbered(static_cast<std::size_t>(n)),
                AmbiguitySet(p1, p2, std::move(g_set)));
  CommunicationDevice device =
      CommunicationDevice::from_cuts(state, static_cast<std::size_t>(n), order, cuts);
  return {std::move(spec), std::move(device)};
}

std::vector<GameInstance> seeded_instances(std::uint64_t base, std::size_t count,
                                           const InstanceOptions &options) {
  std::vector<GameInstance> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_instance(base + i, options));
  return out;
}

} // namespace ambitalk
