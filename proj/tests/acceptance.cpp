// Prints one PASS/FAIL line per acceptance criterion; exits nonzero on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ambitalk/cli.hpp"
#include "ambitalk/equilibrium.hpp"
#include "ambitalk/instances.hpp"
#include "ambitalk/verify.hpp"

using namespace ambitalk;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

GameSpec symmetric_game(double p) {
  const StateInterval state(-0.5, 0.5);
  return {state, PriorDensity::uniform(state), WordSet({"L", "R"}),
          AmbiguitySet(p, p, FullSimplex{})};
}

Outcome from_suites(std::initializer_list<verify::SuiteResult> suites) {
  Outcome o{true, ""};
  for (const auto &s : suites) {
    o.passed = o.passed && s.passed();
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s%s: %zu cases, %zu failures, worst %.3g", o.detail.empty() ? "" : "; ",
                  s.name.c_str(), s.cases, s.failures, s.worst);
    o.detail += buf;
    if (!s.note.empty()) o.detail += " (" + s.note + ")";
  }
  return o;
}

Outcome symmetric_reproduction() {
  double worst_exante = 0.0;
  double worst_interim = 0.0;
  for (int k = 0; k <= 20; ++k) {
    const double p = 0.05 * k;
    const EquilibriumReport r = efficient_equilibrium(symmetric_game(p));
    const double ex = (1.0 - p) / 4.0;
    const double in = (1.0 - p) / (4.0 * (1.0 + p));
    for (int w = 0; w < 2; ++w) {
      const double sign = w == 0 ? -1.0 : 1.0;
      worst_exante = std::max(worst_exante, std::abs(r.exante_profile.actions(w) - sign * ex));
      worst_interim = std::max(worst_interim, std::abs(r.interim_profile.actions(w) - sign * in));
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "ex-ante error %.3g, interim error %.3g", worst_exante, worst_interim);
  return {worst_exante <= 1e-6 && worst_interim <= 1e-9, buf};
}

Outcome sweep_curves() {
  std::ostringstream os;
  cli::SweepOptions opts;
  opts.steps = 21;
  if (cli::cmd_sweep(cli::symmetric_config(0.0), opts, os) != cli::kOk) return {false, "sweep failed"};
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  if (line != "p,exante_L,exante_R,interim_L,interim_R,exante_loss,babbling_loss,as_if_p")
    return {false, "unexpected header " + line};
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) row.push_back(field.empty() ? NAN : std::stod(field));
    rows.push_back(row);
  }
  if (rows.size() != 21) return {false, "expected 21 rows"};
  double endpoint = 0.0;
  for (int c = 1; c <= 4; ++c) {
    const double sign = c % 2 == 1 ? -1.0 : 1.0;
    endpoint = std::max(endpoint, std::abs(rows.front()[c] - sign * 0.25));
    endpoint = std::max(endpoint, std::abs(rows.back()[c]));
  }
  const auto &mid = rows[6];
  const double analytic = 2.0 * 0.3 / 1.3;
  const double as_if_error = std::abs(mid[7] - analytic);
  char buf[160];
  std::snprintf(buf, sizeof buf, "endpoint error %.3g, as-if p at 0.3 = %.6f (analytic %.6f)", endpoint,
                mid[7], analytic);
  return {std::abs(mid[0] - 0.3) < 1e-12 && endpoint <= 1e-6 && as_if_error <= 1e-3, buf};
}

} // namespace

int main() {
  const std::vector<GameInstance> instances = seeded_instances(20240601, 200);
  const auto example = [] {
    GameInstance g{symmetric_game(1.0 / 3.0), CommunicationDevice({{{-0.5, 0.0}}, {{0.0, 0.5}}})};
    return std::vector<GameInstance>{g};
  }();

  struct Criterion {
    int id;
    const char *name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "symmetric game reproduction", 10.0, symmetric_reproduction},
      {2, "sweep curves and as-if mapping", 10.0, sweep_curves},
      {3, "underreaction on random instances", 60.0,
       [&] { return from_suites({verify::underreaction_suite(instances)}); }},
      {4, "oracle equivalence", 300.0, [&] { return from_suites({verify::oracle_suite(instances)}); }},
      {5, "regular word existence and sufficiency", 0.0,
       [&] { return from_suites({verify::regular_word_suite(instances)}); }},
      {6, "communication beats babbling", 0.0,
       [&] { return from_suites({verify::nonbabbling_suite(instances)}); }},
      {7, "channel decomposition", 5.0, [] { return from_suites({verify::channel_suite()}); }},
      {8, "posterior normalization", 0.0,
       [&] {
         return from_suites({verify::posterior_suite(instances), verify::posterior_suite(example)});
       }},
  };

  int failures = 0;
  for (const auto &c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) {
      o.passed = false;
      o.detail += "; over time budget";
    }
    if (!o.passed) ++failures;
    std::printf("%s %d %s [%.2f s] %s\n", o.passed ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
