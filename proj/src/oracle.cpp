#include "ambitalk/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace ambitalk::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Integral of f0(t) * loss(|t - s|) over [a, b].
double integral(const GameSpec &spec, double a, double b, double s, int nodes) {
  const auto bp = spec.prior.breakpoints();
  const auto val = spec.prior.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < val.size(); ++i) {
    const double lo = std::max(a, bp[i]);
    const double hi = std::min(b, bp[i + 1]);
    if (!(hi > lo)) continue;
    if (spec.loss.quadratic) {
      const double u = hi - s;
      const double v = lo - s;
      acc += val[i] * (u * u * u - v * v * v) / 3.0;
    } else {
      // Split at s so the integrand is smooth on each part.
      auto midpoint = [&](double x0, double x1) {
        if (!(x1 > x0)) return 0.0;
        const double h = (x1 - x0) / nodes;
        double sum = 0.0;
        for (int k = 0; k < nodes; ++k) sum += spec.loss.of_distance(std::abs(x0 + (k + 0.5) * h - s));
        return h * sum;
      };
      const double mid = std::clamp(s, lo, hi);
      acc += val[i] * (midpoint(lo, mid) + midpoint(mid, hi));
    }
  }
  return acc;
}

double cell_integral(const GameSpec &spec, const CommunicationDevice &device, std::size_t w,
                     double s, int nodes) {
  double acc = 0.0;
  for (const Interval &iv : device.cell(w)) acc += integral(spec, iv.lo, iv.hi, s, nodes);
  return acc;
}

// Mass and first moment of the prior over [a, b].
std::pair<double, double> raw_moments(const PriorDensity &prior, double a, double b) {
  const auto bp = prior.breakpoints();
  const auto val = prior.values();
  double m0 = 0.0;
  double m1 = 0.0;
  for (std::size_t i = 0; i < val.size(); ++i) {
    const double lo = std::max(a, bp[i]);
    const double hi = std::min(b, bp[i + 1]);
    if (!(hi > lo)) continue;
    m0 += val[i] * (hi - lo);
    m1 += val[i] * (hi * hi - lo * lo) / 2.0;
  }
  return {m0, m1};
}

std::pair<double, double> cell_moments(const GameSpec &spec, const CommunicationDevice &device,
                                       std::size_t w) {
  double m0 = 0.0;
  double m1 = 0.0;
  for (const Interval &iv : device.cell(w)) {
    const auto [a, b] = raw_moments(spec.prior, iv.lo, iv.hi);
    m0 += a;
    m1 += b;
  }
  return {m0, m1};
}

// Minimizes a convex function of one variable on [lo, hi]: uniform grid,
// then three tenfold refinements around the best node.
template <class F>
std::pair<double, double> grid_min_1d(F &&f, double lo, double hi, double step) {
  double best_x = lo;
  double best_f = kInf;
  double a = lo;
  double b = hi;
  double h = step;
  for (int level = 0; level < 4; ++level) {
    const auto n = static_cast<long>(std::ceil((b - a) / h - 1e-9));
    const double dh = n > 0 ? (b - a) / static_cast<double>(n) : 0.0;
    for (long k = 0; k <= n; ++k) {
      const double x = k == n ? b : a + static_cast<double>(k) * dh;
      const double fx = f(x);
      if (fx < best_f) {
        best_f = fx;
        best_x = x;
      }
    }
    a = std::max(lo, best_x - 2.0 * dh);
    b = std::min(hi, best_x + 2.0 * dh);
    h = dh / 10.0;
    if (!(b > a) || h <= 0.0) break;
  }
  return {best_x, best_f};
}

} // namespace

void GridConfig::validate() const {
  if (!(action_grid_step > 0.0) || !(simplex_grid_step > 0.0) || quadrature_points < 1)
    throw InvalidSpec("grid steps and quadrature points must be positive");
}

InterimResult oracle_interim(const GameSpec &spec, const CommunicationDevice &device,
                             std::size_t w, const GridConfig &grid) {
  grid.validate();
  const auto [mass, first] = cell_moments(spec, device, w);
  (void)first;
  if (!(mass > 0.0)) throw DegenerateWord("oracle_interim needs a word with positive mass");

  std::vector<double> g_values;
  for (const auto &g : spec.ambiguity.extreme_points(spec.word_count()))
    g_values.push_back(g(static_cast<Index>(w)));
  const double ps[2] = {spec.ambiguity.p_lo(), spec.ambiguity.p_hi()};
  const int nodes = grid.quadrature_points;

  auto objective = [&](double s) {
    const double in_cell = cell_integral(spec, device, w, s, nodes);
    const double everywhere = integral(spec, spec.state.lo, spec.state.hi, s, nodes);
    double worst = -kInf;
    for (double p : ps) {
      for (double g : g_values) {
        const double den = (1.0 - p) * mass + p * g;
        if (!(den > 0.0)) continue;
        worst = std::max(worst, ((1.0 - p) * in_cell + p * g * everywhere) / den);
      }
    }
    return worst;
  };

  const auto [x, fx] = grid_min_1d(objective, spec.state.lo, spec.state.hi, grid.action_grid_step);
  return {x, fx};
}

double oracle_exante_objective(const GameSpec &spec, const CommunicationDevice &device,
                               const Eigen::VectorXd &actions) {
  const std::size_t n = spec.word_count();
  std::vector<double> in_cell(n);
  std::vector<double> everywhere(n);
  for (std::size_t w = 0; w < n; ++w) {
    const double a = actions(static_cast<Index>(w));
    in_cell[w] = cell_integral(spec, device, w, a, 400);
    everywhere[w] = integral(spec, spec.state.lo, spec.state.hi, a, 400);
  }
  const auto extremes = spec.ambiguity.extreme_points(n);
  double worst = -kInf;
  for (double p : {spec.ambiguity.p_lo(), spec.ambiguity.p_hi()}) {
    for (const auto &g : extremes) {
      double total = 0.0;
      for (std::size_t w = 0; w < n; ++w)
        total += (1.0 - p) * in_cell[w] + p * g(static_cast<Index>(w)) * everywhere[w];
      worst = std::max(worst, total);
    }
  }
  return worst;
}

ExAnteResult oracle_exante(const GameSpec &spec, const CommunicationDevice &device,
                           const GridConfig &grid) {
  grid.validate();
  spec.require_quadratic("oracle_exante");
  const std::size_t n = spec.word_count();
  if (n > 3) throw TooManyWords("oracle_exante enumerates at most three words");

  const auto [total_mass, total_first] = raw_moments(spec.prior, spec.state.lo, spec.state.hi);
  const double pool = total_first / total_mass;

  std::vector<double> centroid(n, pool);
  std::vector<std::size_t> free_words;
  for (std::size_t w = 0; w < n; ++w) {
    const auto [m0, m1] = cell_moments(spec, device, w);
    if (m0 > 0.0) centroid[w] = m1 / m0;
    if (m0 > 0.0 && centroid[w] != pool) free_words.push_back(w);
  }
  auto action = [&](std::size_t w, double lam) { return lam * centroid[w] + (1.0 - lam) * pool; };

  // One scenario per (p, G) corner; the objective is the largest scenario total.
  struct Scenario {
    double p;
    Eigen::VectorXd g;
  };
  std::vector<Scenario> scenarios;
  for (double p : {spec.ambiguity.p_lo(), spec.ambiguity.p_hi()})
    for (const auto &g : spec.ambiguity.extreme_points(n)) scenarios.push_back({p, g});
  auto contribution = [&](std::size_t w, double a, std::vector<double> &acc) {
    const double in_cell = cell_integral(spec, device, w, a, 1);
    const double everywhere = integral(spec, spec.state.lo, spec.state.hi, a, 1);
    for (std::size_t c = 0; c < scenarios.size(); ++c)
      acc[c] += (1.0 - scenarios[c].p) * in_cell +
                scenarios[c].p * scenarios[c].g(static_cast<Index>(w)) * everywhere;
  };

  std::vector<double> fixed(scenarios.size(), 0.0);
  for (std::size_t w = 0; w < n; ++w)
    if (std::find(free_words.begin(), free_words.end(), w) == free_words.end())
      contribution(w, pool, fixed);

  // Nested one-dimensional grid searches: the partial minimum of a jointly
  // convex function stays convex, so each level may zoom safely.
  const double step = grid.simplex_grid_step;
  const double final_step = 0.1 * grid.action_grid_step / std::max(1.0, spec.state.width());
  std::vector<double> lam(free_words.size(), 1.0);
  std::vector<std::vector<double>> buffers(free_words.size() + 1);
  auto search = [&](auto &&self, std::size_t k, const std::vector<double> &acc,
                    std::vector<double> *best_lam) -> double {
    if (k == free_words.size()) return *std::max_element(acc.begin(), acc.end());
    auto f = [&](double x) {
      std::vector<double> &next = buffers[k + 1];
      next = acc;
      contribution(free_words[k], action(free_words[k], x), next);
      return self(self, k + 1, next, nullptr);
    };
    double best_x = 0.0;
    double best_f = kInf;
    double a = 0.0;
    double b = 1.0;
    double h = step;
    while (true) {
      const auto cnt = std::max(1L, static_cast<long>(std::ceil((b - a) / h - 1e-9)));
      const double dh = (b - a) / static_cast<double>(cnt);
      for (long i = 0; i <= cnt; ++i) {
        const double x = i == cnt ? b : a + static_cast<double>(i) * dh;
        const double fx = f(x);
        if (fx < best_f) {
          best_f = fx;
          best_x = x;
        }
      }
      if (dh <= final_step) break;
      a = std::max(0.0, best_x - 2.0 * dh);
      b = std::min(1.0, best_x + 2.0 * dh);
      h = dh / 10.0;
    }
    if (best_lam) {
      (*best_lam)[k] = best_x;
      std::vector<double> next = acc;
      contribution(free_words[k], action(free_words[k], best_x), next);
      self(self, k + 1, next, best_lam);
    }
    return best_f;
  };

  ExAnteResult out;
  out.objective = search(search, 0, fixed, &lam);
  out.lambda = Eigen::VectorXd::Ones(static_cast<Index>(n));
  out.actions = Eigen::VectorXd::Constant(static_cast<Index>(n), pool);
  for (std::size_t k = 0; k < free_words.size(); ++k) {
    out.lambda(static_cast<Index>(free_words[k])) = lam[k];
    out.actions(static_cast<Index>(free_words[k])) = action(free_words[k], lam[k]);
  }
  return out;
}

double oracle_posterior_check(const GameSpec &spec, const CommunicationDevice &device,
                              std::size_t w, double p, const Eigen::VectorXd &g) {
  std::vector<double> nodes(spec.prior.breakpoints().begin(), spec.prior.breakpoints().end());
  for (const Interval &iv : device.cell(w)) {
    nodes.push_back(iv.lo);
    nodes.push_back(iv.hi);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  // The posterior is constant between consecutive nodes.
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double a = std::max(nodes[i], spec.state.lo);
    const double b = std::min(nodes[i + 1], spec.state.hi);
    if (!(b > a)) continue;
    total += posterior_density(spec, device, w, p, g, 0.5 * (a + b)) * (b - a);
  }
  return std::abs(total - 1.0);
}

} // namespace ambitalk::oracle
