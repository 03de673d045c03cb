#include "ambitalk/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ambitalk {

namespace {

constexpr double kDeviceTol = 1e-9;
constexpr double kSymmetryTol = 1e-9;

// Composite midpoint rule of a loss around `s`, aligned with the prior pieces.
double expected_loss(const GameSpec &spec, double s, int points_per_piece = 4000) {
  const auto bp = spec.prior.breakpoints();
  const auto val = spec.prior.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < val.size(); ++i) {
    const double h = (bp[i + 1] - bp[i]) / points_per_piece;
    double piece = 0.0;
    for (int k = 0; k < points_per_piece; ++k) {
      const double t = bp[i] + (k + 0.5) * h;
      piece += spec.loss.of_distance(std::abs(t - s));
    }
    acc += val[i] * h * piece;
  }
  return acc;
}

bool symmetric_two_word(const GameSpec &spec, const DeviceGeometry &geo) {
  if (geo.cells.size() != 2 || !spec.ambiguity.full_simplex()) return false;
  if (spec.ambiguity.p_lo() != spec.ambiguity.p_hi()) return false;
  const auto &a = geo.cells[0];
  const auto &b = geo.cells[1];
  return !a.empty && !b.empty && a.distance > 0.0 &&
         std::abs(a.mass - b.mass) <= kSymmetryTol &&
         std::abs(a.distance - b.distance) <= kSymmetryTol;
}

ActionProfile quantile_spread(const GameSpec &spec, std::mt19937_64 &rng) {
  const std::size_t n = spec.word_count();
  std::uniform_real_distribution<double> jitter(-0.45, 0.45);
  Eigen::VectorXd actions(static_cast<Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const double u = (static_cast<double>(k) + 0.5 + jitter(rng)) / static_cast<double>(n);
    actions(static_cast<Index>(k)) = spec.prior.quantile(u);
  }
  std::sort(actions.data(), actions.data() + actions.size());
  return ActionProfile::from_actions(std::move(actions));
}

} // namespace

double babbling_loss(const GameSpec &spec) {
  if (spec.loss.quadratic) return prior_variance(spec);
  // Bayesian estimator of the whole space under a convex loss.
  double a = spec.state.lo;
  double b = spec.state.hi;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = expected_loss(spec, x1);
  double f2 = expected_loss(spec, x2);
  while (b - a > 1e-10 * spec.state.width()) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = expected_loss(spec, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = expected_loss(spec, x2);
    }
  }
  return expected_loss(spec, 0.5 * (a + b));
}

std::pair<CommunicationDevice, ActionProfile>
seed_nonbabbling(const GameSpec &spec, std::size_t v1, std::size_t v2, double cut) {
  spec.require_quadratic("seed_nonbabbling");
  const std::size_t n = spec.word_count();
  if (v1 >= n || v2 >= n || v1 == v2) throw InvalidCut("seed needs two distinct words");
  if (!(cut > spec.state.lo && cut < spec.state.hi))
    throw InvalidCut("cut must lie strictly inside the state interval");
  const double pool = pooling_action(spec);
  // The informative cell is the side whose interior avoids the pooling action.
  const bool upper = cut >= pool;
  const Interval c1 = upper ? Interval{cut, spec.state.hi} : Interval{spec.state.lo, cut};
  const Interval c2 = upper ? Interval{spec.state.lo, cut} : Interval{cut, spec.state.hi};
  std::vector<std::vector<Interval>> cells(n);
  cells[v1].push_back(c1);
  cells[v2].push_back(c2);
  CommunicationDevice device(std::move(cells));

  const CellStats s1 = cell_stats(spec, device, v1);
  if (!(s1.mass > 0.0 && s1.mass < 1.0) || *s1.centroid == pool)
    throw InvalidCut("cut must leave prior mass on both sides");
  const double p = spec.ambiguity.p_hi();
  const double num = (1.0 - p) * s1.mass;
  const double den = num + p * spec.ambiguity.max_g(v1);

  ActionProfile profile = ActionProfile::from_actions(
      Eigen::VectorXd::Constant(static_cast<Index>(n), pool));
  if (den > 0.0) {
    const double lambda = num / den;
    profile.actions(static_cast<Index>(v1)) = lambda * *s1.centroid + (1.0 - lambda) * pool;
    profile.lambda[v1] = lambda;
  }
  return {std::move(device), std::move(profile)};
}

InterimProfile interim_profile(const GameSpec &spec, const CommunicationDevice &device) {
  const std::size_t n = spec.word_count();
  InterimProfile out;
  out.profile = ActionProfile::from_actions(Eigen::VectorXd::Zero(static_cast<Index>(n)));
  for (std::size_t w = 0; w < n; ++w) {
    InterimSolution sol = interim_best_reply(spec, device, w);
    out.profile.actions(static_cast<Index>(w)) = sol.action;
    out.profile.lambda[w] = sol.lambda;
    out.solutions.push_back(sol);
  }
  out.is_equilibrium =
      device.equivalent(sender_best_reply(spec, out.profile), kDeviceTol);
  return out;
}

EquilibriumReport make_report(const GameSpec &spec, CommunicationDevice device,
                              const ExAnteSolution &exante) {
  const DeviceGeometry geo = device_geometry(spec, device);
  InterimProfile interim = interim_profile(spec, device);
  const bool symmetric = symmetric_two_word(spec, geo);

  std::vector<InconsistencyRow> rows;
  for (std::size_t w = 0; w < geo.cells.size(); ++w) {
    const auto &c = geo.cells[w];
    const auto &isol = interim.solutions[w];
    InconsistencyRow r;
    r.word = w;
    r.mass = c.mass;
    if (!c.empty) r.centroid = c.centroid;
    r.centroid_distance = c.distance;
    r.lambda_exante = exante.profile.lambda[w];
    r.lambda_interim = isol.lambda;
    r.action_exante = exante.profile.actions(static_cast<Index>(w));
    r.action_interim = isol.action;
    r.distance_exante = std::abs(r.action_exante - geo.pooling);
    r.distance_interim = std::abs(r.action_interim - geo.pooling);
    if (r.distance_exante > 0.0) r.ratio = r.distance_interim / r.distance_exante;
    r.regular = isol.is_regular;
    if (!c.empty) {
      r.regular_sufficient = regular_test_sufficient(spec, device, w);
      r.kappa_hi = kappa_bounds(spec.ambiguity, c.mass, w).hi.value;
    } else {
      r.kappa_hi = 1.0;
    }
    if (symmetric && isol.lambda) r.as_if_p = 1.0 - *isol.lambda;
    rows.push_back(r);
  }

  EquilibriumReport report{
      .device = std::move(device),
      .exante_profile = exante.profile,
      .interim_profile = interim.profile,
      .exante_loss = exante.objective,
      .interim_is_equilibrium = interim.is_equilibrium,
      .babbling_loss = babbling_loss(spec),
      .per_word = std::move(rows),
      .iterations = 0,
      .displacement = 0.0,
      .restart_seed = std::nullopt,
      .restarts = 0,
  };
  return report;
}

std::vector<InconsistencyRow> inconsistency_report(const GameSpec &spec,
                                                   const CommunicationDevice &device) {
  return make_report(spec, device, exante_best_reply(spec, device)).per_word;
}

EquilibriumReport best_reply_dynamics(const GameSpec &spec, const ActionProfile &init,
                                      const DynamicsOptions &options) {
  if (init.size() != spec.word_count())
    throw InvalidSpec("initial profile size differs from the word count");
  Eigen::VectorXd actions = init.actions;
  double displacement = INFINITY;
  for (int it = 1; it <= options.max_iter; ++it) {
    CommunicationDevice device = sender_best_reply(spec, ActionProfile::from_actions(actions));
    ExAnteSolution ex = exante_best_reply(spec, device);
    displacement = (ex.profile.actions - actions).lpNorm<Eigen::Infinity>();
    actions = ex.profile.actions;
    if (displacement < options.tol) {
      EquilibriumReport report = make_report(spec, std::move(device), ex);
      report.iterations = it;
      report.displacement = displacement;
      return report;
    }
  }
  throw DynamicsNonConvergence(options.max_iter, displacement, actions);
}

EquilibriumReport efficient_equilibrium(const GameSpec &spec, const SearchOptions &options) {
  spec.require_quadratic("efficient_equilibrium");
  if (options.restarts < 1) throw InvalidSpec("restarts must be at least 1");
  const std::size_t n = spec.word_count();
  const double pool = pooling_action(spec);

  if (spec.ambiguity.p_hi() >= 1.0) {
    // Pure noise: babbling is the only sensible outcome.
    EquilibriumReport r = best_reply_dynamics(
        spec, ActionProfile::from_actions(Eigen::VectorXd::Constant(static_cast<Index>(n), pool)),
        options.dynamics);
    r.restarts = options.restarts;
    return r;
  }

  std::optional<EquilibriumReport> best;
  std::optional<DynamicsNonConvergence> last_failure;
  auto consider = [&](const ActionProfile &init, std::optional<std::uint64_t> seed) {
    try {
      EquilibriumReport r = best_reply_dynamics(spec, init, options.dynamics);
      r.restart_seed = seed;
      if (!best || r.exante_loss < best->exante_loss - 1e-12) best = std::move(r);
    } catch (const DynamicsNonConvergence &e) {
      last_failure = e;
    }
  };

  consider(seed_nonbabbling(spec, n - 1, 0, pool).second, std::nullopt);
  for (int r = 1; r < options.restarts; ++r) {
    const std::uint64_t seed = options.seed + static_cast<std::uint64_t>(r);
    std::mt19937_64 rng(seed);
    consider(quantile_spread(spec, rng), seed);
  }
  if (!best) throw *last_failure;
  best->restarts = options.restarts;
  if (!(best->exante_loss < best->babbling_loss))
    throw EfficiencyAssertionFailed("no fixed point found beats babbling");
  return *best;
}

} // namespace ambitalk
