#include "ambitalk/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ambitalk/channels.hpp"

namespace ambitalk::verify {

namespace {

constexpr std::size_t kMaxNotes = 5;

void record_failure(SuiteResult &r, const std::string &what) {
  ++r.failures;
  if (r.failures <= kMaxNotes) {
    if (!r.note.empty()) r.note += "; ";
    r.note += what;
  }
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::string where(std::size_t instance, std::size_t w) {
  return "instance " + std::to_string(instance) + " word " + std::to_string(w);
}

} // namespace

SuiteResult posterior_suite(std::span<const GameInstance> instances) {
  SuiteResult r;
  r.name = "posterior_normalization";
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto &[spec, device] = instances[i];
    const auto extremes = spec.ambiguity.extreme_points(spec.word_count());
    for (std::size_t w = 0; w < spec.word_count(); ++w) {
      const double mass = cell_stats(spec, device, w).mass;
      for (double p : {spec.ambiguity.p_lo(), spec.ambiguity.p_hi()}) {
        for (const auto &g : extremes) {
          if (!((1.0 - p) * mass + p * g(static_cast<Index>(w)) > 0.0)) continue;
          const double dev = oracle::oracle_posterior_check(spec, device, w, p, g);
          ++r.cases;
          r.worst = std::max(r.worst, dev);
          if (!(dev <= 1e-9)) record_failure(r, where(i, w) + " deviation " + fmt(dev));
        }
      }
    }
  }
  return r;
}

SuiteResult oracle_suite(std::span<const GameInstance> instances, const oracle::GridConfig &grid) {
  SuiteResult r;
  r.name = "oracle_agreement";
  const double action_tol = 2.0 * grid.action_grid_step;
  double worst_action = 0.0;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto &[spec, device] = instances[i];
    try {
      if (spec.word_count() <= 3) {
        const ExAnteSolution ex = exante_best_reply(spec, device);
        const oracle::ExAnteResult oe = oracle::oracle_exante(spec, device, grid);
        const double obj = std::abs(ex.objective - oe.objective);
        const double act = (ex.profile.actions - oe.actions).lpNorm<Eigen::Infinity>();
        ++r.cases;
        r.worst = std::max(r.worst, obj);
        worst_action = std::max(worst_action, act);
        if (!(obj <= 1e-5 && act <= action_tol))
          record_failure(r, "instance " + std::to_string(i) + " ex-ante objective gap " + fmt(obj) +
                                " action gap " + fmt(act));
      } else {
        ++skipped;
      }
      for (std::size_t w = 0; w < spec.word_count(); ++w) {
        if (!(cell_stats(spec, device, w).mass > 0.0)) continue;
        const InterimSolution is = interim_best_reply(spec, device, w);
        const oracle::InterimResult oi = oracle::oracle_interim(spec, device, w, grid);
        const double obj = std::abs(is.objective - oi.objective);
        const double act = std::abs(is.action - oi.action);
        ++r.cases;
        r.worst = std::max(r.worst, obj);
        worst_action = std::max(worst_action, act);
        if (!(obj <= 1e-5 && act <= action_tol))
          record_failure(r, where(i, w) + " interim objective gap " + fmt(obj) + " action gap " +
                                fmt(act));
      }
    } catch (const Error &e) {
      ++r.cases;
      record_failure(r, "instance " + std::to_string(i) + ": " + e.what());
    }
  }
  if (r.passed()) r.note = "largest action gap " + fmt(worst_action);
  if (skipped > 0) r.note += (r.note.empty() ? "" : "; ") + std::to_string(skipped) +
                             " ex-ante checks skipped (more than three words)";
  return r;
}

SuiteResult underreaction_suite(std::span<const GameInstance> instances) {
  SuiteResult r;
  r.name = "underreaction";
  std::size_t strict_instances = 0;
  double smallest_margin = INFINITY;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto &[spec, device] = instances[i];
    try {
      const ExAnteSolution ex = exante_best_reply(spec, device);
      const EquilibriumReport rep = make_report(spec, device, ex);
      bool full = true;
      bool all_regular = true;
      bool no_pooling = true;
      for (const auto &row : rep.per_word) {
        full = full && row.mass > 0.0;
        all_regular = all_regular && row.regular;
        // An action within the strictness margin of the pooling action pools.
        no_pooling = no_pooling && row.distance_exante > 1e-9;
        if (!row.regular) continue;
        const double excess = row.distance_interim - row.distance_exante;
        ++r.cases;
        r.worst = std::max(r.worst, excess);
        if (!(excess <= 1e-9)) record_failure(r, where(i, row.word) + " interim farther by " + fmt(excess));
      }
      const auto active = (ex.saddle_weights.array() > 1e-9).count();
      if (!(full && all_regular && no_pooling && active >= 2)) continue;
      ++strict_instances;
      for (const auto &row : rep.per_word) {
        const double margin = row.distance_exante - row.distance_interim;
        ++r.cases;
        smallest_margin = std::min(smallest_margin, margin);
        if (!(margin > 1e-9)) record_failure(r, where(i, row.word) + " not strictly closer, margin " + fmt(margin));
      }
    } catch (const Error &e) {
      ++r.cases;
      record_failure(r, "instance " + std::to_string(i) + ": " + e.what());
    }
  }
  if (r.passed())
    r.note = std::to_string(strict_instances) + " instances under the strictness hypotheses" +
             (strict_instances ? ", smallest margin " + fmt(smallest_margin) : "");
  return r;
}

SuiteResult regular_word_suite(std::span<const GameInstance> instances) {
  SuiteResult r;
  r.name = "regular_words";
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto &[spec, device] = instances[i];
    const InterimProfile ip = interim_profile(spec, device);
    bool any = false;
    for (std::size_t w = 0; w < ip.solutions.size(); ++w) {
      if (ip.solutions[w].degenerate) continue;
      any = any || ip.solutions[w].is_regular;
      ++r.cases;
      if (regular_test_sufficient(spec, device, w) && !ip.solutions[w].is_regular)
        record_failure(r, where(i, w) + " passes the sufficient test but is not regular");
    }
    ++r.cases;
    if (!any) record_failure(r, "instance " + std::to_string(i) + " has no regular word");
  }
  return r;
}

SuiteResult nonbabbling_suite(std::span<const GameInstance> instances, const SearchOptions &options) {
  SuiteResult r;
  r.name = "beats_babbling";
  r.worst = -INFINITY;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto &spec = instances[i].spec;
    if (!(spec.ambiguity.p_hi() < 1.0)) continue;
    const double l0 = prior_variance(spec);
    const std::size_t n = spec.word_count();
    try {
      const auto [device, profile] = seed_nonbabbling(spec, n - 1, 0, pooling_action(spec));
      const double seed_loss = exante_objective(spec, device, profile.actions);
      ++r.cases;
      if (!(seed_loss < l0))
        record_failure(r, "instance " + std::to_string(i) + " seed loss " + fmt(seed_loss) +
                              " not below " + fmt(l0));
      const EquilibriumReport eq = efficient_equilibrium(spec, options);
      ++r.cases;
      r.worst = std::max(r.worst, eq.exante_loss / l0);
      if (!(eq.exante_loss < eq.babbling_loss))
        record_failure(r, "instance " + std::to_string(i) + " equilibrium loss " + fmt(eq.exante_loss));
    } catch (const Error &e) {
      ++r.cases;
      record_failure(r, "instance " + std::to_string(i) + ": " + e.what());
    }
  }
  if (r.cases == 0) r.worst = 0.0;
  if (r.passed() && r.cases > 0) r.note = "largest loss ratio to babbling " + fmt(r.worst);
  return r;
}

SuiteResult segment_suite(std::span<const GameInstance> instances) {
  SuiteResult r;
  r.name = "segment";
  auto check = [&](std::size_t i, std::size_t w, const CellGeometry &c, double pool, double action,
                   const char *which) {
    ++r.cases;
    double dev = 0.0;
    if (c.empty) {
      dev = std::abs(action - pool);
    } else if (c.distance == 0.0) {
      dev = std::abs(action - c.centroid);
    } else {
      const double lambda = (action - pool) / (c.centroid - pool);
      dev = std::max({0.0, -lambda, lambda - 1.0}) * c.distance;
    }
    r.worst = std::max(r.worst, dev);
    if (!(dev <= 1e-9)) record_failure(r, where(i, w) + " " + which + " action off the segment by " + fmt(dev));
  };
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto &[spec, device] = instances[i];
    try {
      const DeviceGeometry geo = device_geometry(spec, device);
      const ExAnteSolution ex = exante_best_reply(spec, device);
      for (std::size_t w = 0; w < geo.cells.size(); ++w) {
        check(i, w, geo.cells[w], geo.pooling, ex.profile.actions(static_cast<Index>(w)), "ex-ante");
        check(i, w, geo.cells[w], geo.pooling, interim_best_reply(spec, device, w).action, "interim");
      }
    } catch (const Error &e) {
      ++r.cases;
      record_failure(r, "instance " + std::to_string(i) + ": " + e.what());
    }
  }
  return r;
}

SuiteResult channel_suite() {
  using namespace channels;
  SuiteResult r;
  r.name = "channel_decomposition";
  for (int m = 1; m <= 5; ++m) {
    const WordSpace space(m + 1, 1);
    const double top = static_cast<double>(m) / (m + 1);
    for (int k = 1; k <= 9; ++k) {
      const double q = top * k / 10.0;
      const std::string tag = "m=" + std::to_string(m) + " q=" + fmt(q);
      const ShannonChannel ch(space, q);
      const Eigen::MatrixXd target = transition_matrix(ch);
      const RepresentabilityResult res = decompose_shannon(ch);
      ++r.cases;
      if (!res.representable || !res.witness) {
        record_failure(r, tag + " not representable");
        continue;
      }
      const double err = (transition_matrix(*res.witness) - target).cwiseAbs().maxCoeff();
      r.worst = std::max(r.worst, err);
      if (!(err <= 1e-12)) record_failure(r, tag + " round trip error " + fmt(err));

      ++r.cases;
      if (m >= 2) {
        // Off-diagonal entries are p_v G(w); ratios within a row pin down G
        // whenever a third word exists, so each choice of reference rows
        // must give back the canonical witness.
        if (!res.unique) record_failure(r, tag + " not flagged unique");
        const auto n = static_cast<Index>(space.size());
        double spread = 0.0;
        for (Index shift = 1; shift < n; ++shift) {
          Eigen::VectorXd g(n);
          g(0) = 1.0;
          for (Index w = 1; w < n; ++w) {
            Index v = (w + shift) % n;
            if (v == 0 || v == w) v = w == 1 ? 2 : 1;
            g(w) = target(v, w) / target(v, 0);
          }
          g /= g.sum();
          Eigen::VectorXd p(n);
          for (Index v = 0; v < n; ++v) {
            const Index w = v == 0 ? 1 : 0;
            p(v) = target(v, w) / g(w);
          }
          spread = std::max({spread, (g - res.witness->g).cwiseAbs().maxCoeff(),
                             (p - res.witness->p).cwiseAbs().maxCoeff()});
        }
        if (!(spread <= 1e-10)) record_failure(r, tag + " second witness differs by " + fmt(spread));
      } else {
        if (res.unique || !res.family) {
          record_failure(r, tag + " expected a non-unique family");
          continue;
        }
        const double other = q + 0.25 * (1.0 - 2.0 * q);
        const NoisyTalkChannel a = res.family->member(0.5);
        const NoisyTalkChannel b = res.family->member(other);
        const double ea = (transition_matrix(a) - target).cwiseAbs().maxCoeff();
        const double eb = (transition_matrix(b) - target).cwiseAbs().maxCoeff();
        const double apart = (a.g - b.g).cwiseAbs().maxCoeff();
        if (!(ea <= 1e-12 && eb <= 1e-12 && apart > 1e-6))
          record_failure(r, tag + " family members do not give two distinct witnesses");
      }
    }
  }
  for (double q : {0.1, 0.2, 0.3}) {
    const WordSpace space(2, 2);
    const ShannonChannel ch(space, q);
    const std::string tag = "m=1 n=2 q=" + fmt(q);
    const RepresentabilityResult res = decompose_shannon(ch);
    ++r.cases;
    if (res.representable || !res.counterexample) {
      record_failure(r, tag + " expected a counterexample");
      continue;
    }
    const auto &c = *res.counterexample;
    const double qt = q / (1.0 - q);
    const double expected = std::pow(1.0 - q, 2) * (qt - qt * qt);
    const bool valid = hamming(c.v, c.w) == 1 && hamming(c.v, c.w_prime) == 2 &&
                       std::abs(c.shannon_w - shannon_prob(ch, c.v, c.w)) <= 1e-15 &&
                       std::abs(c.shannon_w_prime - shannon_prob(ch, c.v, c.w_prime)) <= 1e-15 &&
                       std::abs((c.shannon_w - c.shannon_w_prime) - expected) <= 1e-12 &&
                       expected > 0.0;
    if (!valid) record_failure(r, tag + " invalid counterexample");
  }
  return r;
}

} // namespace ambitalk::verify
