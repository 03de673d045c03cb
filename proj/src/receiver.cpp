#include "ambitalk/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ambitalk {

namespace {

// Relative slack for sign decisions on quantities of order Tr_0.
constexpr double kSignTol = 1e-13;

double sign_slack(const DeviceGeometry &geo, const CellGeometry &c) {
  return kSignTol * (geo.total_variance + c.variance + c.distance * c.distance);
}

// Cell loss minus prior loss, as a function of the segment weight lambda.
double kappa_slope(const DeviceGeometry &geo, const CellGeometry &c,
                   double lambda) {
  const double d2 = c.distance * c.distance;
  return (geo.total_variance - c.variance) + d2 * (2.0 * lambda - 1.0);
}

double interim_value(const DeviceGeometry &geo, const CellGeometry &c,
                     const KappaBounds &kb, double s) {
  const double cell = c.variance + (s - c.centroid) * (s - c.centroid);
  const double prior = geo.total_variance + (s - geo.pooling) * (s - geo.pooling);
  auto at = [&](double k) { return (1.0 - k) * cell + k * prior; };
  return std::max(at(kb.lo.value), at(kb.hi.value));
}

// Solves min_s (1-p) sum_w m_w (d_w - s)_+^2 + p s^2 over s >= 0, the
// full-simplex ex-ante problem written in the epigraph level s = max lambda_w d_w.
double epigraph_level(const DeviceGeometry &geo, double p_hi) {
  std::vector<std::size_t> active;
  for (std::size_t w = 0; w < geo.cells.size(); ++w)
    if (!geo.cells[w].empty && geo.cells[w].distance > 0.0) active.push_back(w);
  if (active.empty()) return 0.0;
  std::sort(active.begin(), active.end(), [&](std::size_t a, std::size_t b) {
    return geo.cells[a].distance > geo.cells[b].distance;
  });
  double sum_m = 0.0;
  double sum_md = 0.0;
  for (std::size_t k = 0; k < active.size(); ++k) {
    const auto &c = geo.cells[active[k]];
    sum_m += c.mass;
    sum_md += c.mass * c.distance;
    const double s = (1.0 - p_hi) * sum_md / (p_hi + (1.0 - p_hi) * sum_m);
    const double next = k + 1 < active.size() ? geo.cells[active[k + 1]].distance : 0.0;
    if (s >= next) return std::min(s, c.distance);
  }
  return 0.0;
}

// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_simplex(const Eigen::VectorXd &v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double tau = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cum += u[i];
    const double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) tau = t;
  }
  return (v.array() - tau).max(0.0).matrix();
}

// Dual of the finite-set ex-ante problem over mixtures theta of the members:
//   phi(theta) = sum_w c_w a_w b_w / (a_w + b_w),  b = p G^T theta,
// with a_w = (1-p) m_w and c_w = d_w^2. The primal minimizer of the
// Lagrangian is lambda_w = a_w / (a_w + b_w).
class FiniteDual {
public:
  FiniteDual(const DeviceGeometry &geo, double p_hi,
             const std::vector<Eigen::VectorXd> &members)
      : p_(p_hi), members_(static_cast<Index>(members.size()),
                           static_cast<Index>(geo.cells.size())) {
    const Index n = static_cast<Index>(geo.cells.size());
    a_.resize(n);
    c_.resize(n);
    for (Index w = 0; w < n; ++w) {
      const auto &cell = geo.cells[static_cast<std::size_t>(w)];
      a_(w) = cell.empty ? 0.0 : (1.0 - p_hi) * cell.mass;
      c_(w) = cell.empty ? 0.0 : cell.distance * cell.distance;
    }
    for (Index k = 0; k < members_.rows(); ++k)
      members_.row(k) = members[static_cast<std::size_t>(k)].transpose();
  }

  Index size() const { return members_.rows(); }

  Eigen::VectorXd mixture(const Eigen::VectorXd &theta) const {
    return members_.transpose() * theta;
  }

  double value(const Eigen::VectorXd &theta) const {
    const Eigen::VectorXd b = p_ * mixture(theta);
    double v = 0.0;
    for (Index w = 0; w < a_.size(); ++w)
      if (a_(w) > 0.0 && c_(w) > 0.0) v += c_(w) * a_(w) * b(w) / (a_(w) + b(w));
    return v;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd &theta) const {
    const Eigen::VectorXd b = p_ * mixture(theta);
    Eigen::VectorXd dw = Eigen::VectorXd::Zero(a_.size());
    for (Index w = 0; w < a_.size(); ++w)
      if (a_(w) > 0.0 && c_(w) > 0.0) {
        const double s = a_(w) + b(w);
        dw(w) = c_(w) * a_(w) * a_(w) / (s * s);
      }
    return p_ * (members_ * dw);
  }

  Eigen::MatrixXd hessian(const Eigen::VectorXd &theta) const {
    const Eigen::VectorXd b = p_ * mixture(theta);
    Eigen::VectorXd dw = Eigen::VectorXd::Zero(a_.size());
    for (Index w = 0; w < a_.size(); ++w)
      if (a_(w) > 0.0 && c_(w) > 0.0) {
        const double s = a_(w) + b(w);
        dw(w) = -2.0 * c_(w) * a_(w) * a_(w) / (s * s * s);
      }
    return p_ * p_ * members_ * dw.asDiagonal() * members_.transpose();
  }

  Eigen::VectorXd lambda(const Eigen::VectorXd &theta) const {
    const Eigen::VectorXd b = p_ * mixture(theta);
    Eigen::VectorXd l = Eigen::VectorXd::Ones(a_.size());
    for (Index w = 0; w < a_.size(); ++w) {
      const double s = a_(w) + b(w);
      l(w) = s > 0.0 ? a_(w) / s : 0.0;
    }
    return l;
  }

  // Max over members of the lambda-dependent part of the primal objective.
  double primal(const Eigen::VectorXd &lambda) const {
    double cell = 0.0;
    Eigen::VectorXd x(a_.size());
    for (Index w = 0; w < a_.size(); ++w) {
      cell += a_(w) * (1.0 - lambda(w)) * (1.0 - lambda(w)) * c_(w);
      x(w) = lambda(w) * lambda(w) * c_(w);
    }
    return cell + p_ * (members_ * x).maxCoeff();
  }

private:
  double p_;
  Eigen::MatrixXd members_;
  Eigen::VectorXd a_;
  Eigen::VectorXd c_;
};

struct DualResult {
  Eigen::VectorXd theta;
  int iterations = 0;
};

DualResult maximize_dual(const FiniteDual &dual, int max_iterations,
                         double scale) {
  const Index k = dual.size();
  Eigen::VectorXd theta = Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
  if (k == 1) return {theta, 0};

  auto gap = [&](const Eigen::VectorXd &th) {
    return dual.primal(dual.lambda(th)) - dual.value(th);
  };
  const double target = 1e-15 * std::max(scale, 1e-300);

  double step = 1.0;
  double phi = dual.value(theta);
  int it = 0;
  for (; it < max_iterations; ++it) {
    if (gap(theta) <= target) break;
    const Eigen::VectorXd g = dual.gradient(theta);
    Eigen::VectorXd next;
    double phi_next = 0.0;
    for (int ls = 0; ls < 80; ++ls) {
      next = project_simplex(theta + step * g);
      phi_next = dual.value(next);
      const Eigen::VectorXd diff = next - theta;
      if (phi_next >= phi + g.dot(diff) - diff.squaredNorm() / (2.0 * step)) break;
      step *= 0.5;
    }
    const double moved = (next - theta).lpNorm<Eigen::Infinity>();
    theta = next;
    phi = phi_next;
    step *= 1.5;
    if (moved < 1e-16) break;
  }

  // Newton polishing on the face spanned by the support of theta.
  for (int polish = 0; polish < 40; ++polish) {
    if (gap(theta) <= target) break;
    std::vector<Index> support;
    for (Index i = 0; i < k; ++i)
      if (theta(i) > 1e-13) support.push_back(i);
    const Index s = static_cast<Index>(support.size());
    if (s < 2) break;
    const Eigen::VectorXd g = dual.gradient(theta);
    const Eigen::MatrixXd h = dual.hessian(theta);
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(s + 1, s + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
    for (Index i = 0; i < s; ++i) {
      for (Index j = 0; j < s; ++j) kkt(i, j) = h(support[i], support[j]);
      kkt(i, s) = 1.0;
      kkt(s, i) = 1.0;
      rhs(i) = -g(support[i]);
    }
    const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(k);
    for (Index i = 0; i < s; ++i) dir(support[i]) = sol(i);
    double t = 1.0;
    for (Index i = 0; i < k; ++i)
      if (dir(i) < 0.0) t = std::min(t, -theta(i) / dir(i));
    const double before = gap(theta);
    Eigen::VectorXd candidate = theta;
    bool improved = false;
    for (int ls = 0; ls < 40 && t > 1e-12; ++ls, t *= 0.5) {
      candidate = (theta + t * dir).cwiseMax(0.0);
      candidate /= candidate.sum();
      if (gap(candidate) < before) {
        improved = true;
        break;
      }
    }
    ++it;
    if (!improved) break;
    theta = candidate;
  }
  return {theta, it};
}

} // namespace

double lambda_weight(double cell_mass, double p_hi, double g_w) {
  return 1.0 - kappa(p_hi, g_w, cell_mass).value;
}

bool regular_test_sufficient(const GameSpec &spec,
                             const CommunicationDevice &device, std::size_t w) {
  spec.require_quadratic("regular_test_sufficient");
  const DeviceGeometry geo = device_geometry(spec, device);
  const CellGeometry &c = geo.cells.at(w);
  if (c.empty) throw DegenerateWord("regularity is undefined for an empty cell");
  const KappaBounds kb = kappa_bounds(spec.ambiguity, c.mass, w);
  const double lhs = (2.0 * kb.hi.value - 1.0) * c.distance * c.distance;
  return lhs <= geo.total_variance - c.variance + sign_slack(geo, c);
}

double interim_objective(const GameSpec &spec, const CommunicationDevice &device,
                         std::size_t w, double action) {
  spec.require_quadratic("interim_objective");
  const DeviceGeometry geo = device_geometry(spec, device);
  const CellGeometry &c = geo.cells.at(w);
  if (c.empty)
    return geo.total_variance + (action - geo.pooling) * (action - geo.pooling);
  return interim_value(geo, c, kappa_bounds(spec.ambiguity, c.mass, w), action);
}

InterimSolution interim_best_reply(const GameSpec &spec,
                                   const CommunicationDevice &device,
                                   std::size_t w) {
  spec.require_quadratic("interim_best_reply");
  const DeviceGeometry geo = device_geometry(spec, device);
  const CellGeometry &c = geo.cells.at(w);
  InterimSolution sol;
  if (c.empty) {
    sol.action = geo.pooling;
    sol.degenerate = true;
    sol.worst_kappa = KappaWeight{1.0};
    sol.objective = geo.total_variance;
    return sol;
  }
  const KappaBounds kb = kappa_bounds(spec.ambiguity, c.mass, w);
  const double slack = sign_slack(geo, c);
  const double spread = kb.hi.value - kb.lo.value;

  if (c.distance == 0.0) {
    // Centroid and pooling action coincide; every kappa gives the same action.
    sol.action = c.centroid;
    sol.is_regular = true;
    const double slope = geo.total_variance - c.variance;
    sol.worst_kappa = slope >= -slack ? kb.hi : kb.lo;
    sol.knife_edge = std::abs(slope) * spread <= slack || spread == 0.0;
    sol.objective = interim_value(geo, c, kb, sol.action);
    return sol;
  }

  const double lambda_hi = 1.0 - kb.hi.value;
  const double lambda_lo = 1.0 - kb.lo.value;
  const double slope_at_hi = kappa_slope(geo, c, lambda_hi);
  double lambda = 0.0;
  if (slope_at_hi >= -slack) {
    lambda = lambda_hi;
    sol.worst_kappa = kb.hi;
    sol.is_regular = true;
    sol.knife_edge = std::abs(slope_at_hi) <= slack || spread == 0.0;
  } else if (kappa_slope(geo, c, lambda_lo) <= slack) {
    lambda = lambda_lo;
    sol.worst_kappa = kb.lo;
    sol.knife_edge = spread == 0.0;
  } else {
    // Both endpoint posteriors give the same expected loss.
    const double d2 = c.distance * c.distance;
    lambda = std::clamp(0.5 * (1.0 - (geo.total_variance - c.variance) / d2),
                        lambda_hi, lambda_lo);
    sol.worst_kappa = KappaWeight{1.0 - lambda};
    sol.knife_edge = true;
  }
  sol.lambda = lambda;
  sol.action = lambda * c.centroid + (1.0 - lambda) * geo.pooling;
  sol.objective = interim_value(geo, c, kb, sol.action);
  return sol;
}

WorstCaseG worst_case_G(const GameSpec &spec, const ActionProfile &profile) {
  spec.require_quadratic("worst_case_G");
  const double pool = pooling_action(spec);
  const double tr0 = prior_variance(spec);
  const std::size_t n = spec.word_count();
  Eigen::VectorXd x(static_cast<Index>(n));
  for (Index w = 0; w < x.size(); ++w) {
    const double d = profile.actions(w) - pool;
    x(w) = tr0 + d * d;
  }
  const auto points = spec.ambiguity.extreme_points(n);
  std::vector<double> values;
  for (const auto &g : points) values.push_back(g.dot(x));
  const double best = *std::max_element(values.begin(), values.end());
  const double tol = 1e-13 * std::max(1.0, std::abs(best));
  WorstCaseG out;
  out.value = best;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (values[i] >= best - tol) out.argmax.push_back(points[i]);
  out.g = out.argmax.front();
  return out;
}

double exante_objective(const GameSpec &spec, const CommunicationDevice &device,
                        const Eigen::VectorXd &actions) {
  spec.require_quadratic("exante_objective");
  const DeviceGeometry geo = device_geometry(spec, device);
  double cell_term = 0.0;
  Eigen::VectorXd prior_terms(actions.size());
  for (Index w = 0; w < actions.size(); ++w) {
    const auto &c = geo.cells[static_cast<std::size_t>(w)];
    if (!c.empty)
      cell_term += c.mass * (c.variance + (actions(w) - c.centroid) * (actions(w) - c.centroid));
    prior_terms(w) = geo.total_variance + (actions(w) - geo.pooling) * (actions(w) - geo.pooling);
  }
  double error_term = -INFINITY;
  for (const auto &g : spec.ambiguity.extreme_points(geo.cells.size()))
    error_term = std::max(error_term, g.dot(prior_terms));
  const double lo = (1.0 - spec.ambiguity.p_lo()) * cell_term + spec.ambiguity.p_lo() * error_term;
  const double hi = (1.0 - spec.ambiguity.p_hi()) * cell_term + spec.ambiguity.p_hi() * error_term;
  return std::max(lo, hi);
}

ExAnteSolution exante_best_reply(const GameSpec &spec,
                                 const CommunicationDevice &device,
                                 const ExAnteOptions &options) {
  spec.require_quadratic("exante_best_reply");
  const DeviceGeometry geo = device_geometry(spec, device);
  const std::size_t n = geo.cells.size();
  const Index ni = static_cast<Index>(n);
  // The objective is affine in p and the error term dominates the cell term
  // on the segment box, so p_hi is the worst case throughout.
  const double p = spec.ambiguity.p_hi();

  Eigen::VectorXd lambda = Eigen::VectorXd::Ones(ni);
  Eigen::VectorXd saddle;
  Eigen::VectorXd weights;
  int iterations = 0;

  if (p == 0.0) {
    saddle = Eigen::VectorXd::Constant(ni, 1.0 / static_cast<double>(n));
  } else if (spec.ambiguity.full_simplex()) {
    const double level = epigraph_level(geo, p);
    saddle = Eigen::VectorXd::Zero(ni);
    for (std::size_t w = 0; w < n; ++w) {
      const auto &c = geo.cells[w];
      if (c.empty || c.distance == 0.0) continue;
      lambda(static_cast<Index>(w)) = std::min(1.0, level / c.distance);
      if (level > 0.0)
        saddle(static_cast<Index>(w)) =
            (1.0 - p) * c.mass * std::max(0.0, c.distance - level) / (p * level);
    }
    if (!(saddle.sum() > 0.0)) saddle.setZero();
  } else {
    const auto members = spec.ambiguity.extreme_points(n);
    const FiniteDual dual(geo, p, members);
    const DualResult res = maximize_dual(dual, options.max_iterations,
                                         geo.total_variance);
    iterations = res.iterations;
    lambda = dual.lambda(res.theta);
    saddle = dual.mixture(res.theta);
    weights = res.theta;
  }

  ActionProfile profile = ActionProfile::from_actions(Eigen::VectorXd::Constant(ni, geo.pooling));
  for (std::size_t w = 0; w < n; ++w) {
    const auto &c = geo.cells[w];
    if (c.empty) continue;
    if (c.distance == 0.0) {
      profile.actions(static_cast<Index>(w)) = c.centroid;
      continue;
    }
    const double l = std::clamp(lambda(static_cast<Index>(w)), 0.0, 1.0);
    profile.lambda[w] = l;
    profile.actions(static_cast<Index>(w)) = l * c.centroid + (1.0 - l) * geo.pooling;
  }

  ExAnteSolution sol;
  sol.objective = exante_objective(spec, device, profile.actions);
  const WorstCaseG worst = worst_case_G(spec, profile);
  if (saddle.size() == 0 || !(saddle.sum() > 0.0)) saddle = worst.g;
  if (weights.size() == 0) {
    if (spec.ambiguity.full_simplex()) {
      weights = saddle;
    } else {
      const auto members = spec.ambiguity.extreme_points(n);
      weights = Eigen::VectorXd::Zero(static_cast<Index>(members.size()));
      for (std::size_t i = 0; i < members.size(); ++i)
        if (members[i] == saddle) {
          weights(static_cast<Index>(i)) = 1.0;
          break;
        }
    }
  }
  sol.worst_G = worst.g;
  sol.saddle_G = saddle;
  sol.saddle_weights = weights;
  sol.iterations = iterations;

  // Dual value at the saddle mixture and per-word stationarity residuals.
  double dual_value = p * geo.total_variance;
  sol.certificate = Eigen::VectorXd::Zero(ni);
  for (std::size_t w = 0; w < n; ++w) {
    const auto &c = geo.cells[w];
    if (c.empty) continue;
    const double a = (1.0 - p) * c.mass;
    const double b = p * saddle(static_cast<Index>(w));
    const double d2 = c.distance * c.distance;
    dual_value += (1.0 - p) * c.mass * c.variance;
    if (a + b > 0.0) dual_value += d2 * a * b / (a + b);
    if (profile.lambda[w])
      sol.certificate(static_cast<Index>(w)) =
          std::abs(2.0 * d2 * ((a + b) * *profile.lambda[w] - a));
  }
  sol.duality_gap = sol.objective - dual_value;
  sol.profile = std::move(profile);

  const double scale = std::max(1.0, std::abs(sol.objective));
  const double residual = std::max(sol.duality_gap, sol.certificate.size() ? sol.certificate.maxCoeff() : 0.0);
  if (!(residual <= options.certificate_tol * scale))
    throw NonConvergence("ex-ante best reply certificate not met", iterations, residual);
  return sol;
}

} // namespace ambitalk
