#include <doctest.h>

#include "ambitalk/oracle.hpp"
#include "ambitalk/receiver.hpp"
#include "support.hpp"

using namespace ambitalk;
using testing::near;

namespace {

GameSpec with(const GameSpec &base, std::size_t words, double p_lo, double p_hi, AmbiguitySet::GSet g) {
  return GameSpec(base.state, base.prior, WordSet::numbered(words), AmbiguitySet(p_lo, p_hi, std::move(g)));
}

CommunicationDevice thirds() {
  return CommunicationDevice({{{-0.5, -1.0 / 6.0}}, {{-1.0 / 6.0, 1.0 / 6.0}}, {{1.0 / 6.0, 0.5}}});
}

} // namespace

TEST_CASE("lambda weight") {
  CHECK(near(lambda_weight(0.5, 1.0 / 3.0, 1.0), 0.5, 1e-15));
  CHECK(lambda_weight(0.3, 0.6, 0.0) == 1.0);
  CHECK(near(lambda_weight(0.25, 0.5, 0.75), 0.25, 1e-15));
}

TEST_CASE("sufficient regularity test") {
  for (double p : {0.05, 1.0 / 3.0, 0.7, 0.95})
    CHECK(regular_test_sufficient(testing::symmetric_game(p), testing::halves_device(), 1));

  const auto spec = with(testing::symmetric_game(0.9), 3, 0.9, 0.9, FullSimplex{});
  // Edge cell: kappa_hi = 0.9 / (0.1/3 + 0.9), d^2 = 1/9, Tr_0 - Tr_C = 1/12 - 1/108.
  const double k = 0.9 / (0.1 / 3.0 + 0.9);
  const bool edge = (2.0 * k - 1.0) / 9.0 <= 1.0 / 12.0 - 1.0 / 108.0;
  CHECK(regular_test_sufficient(spec, thirds(), 0) == edge);
  CHECK_FALSE(edge);
  CHECK(regular_test_sufficient(spec, thirds(), 1));
  CHECK(interim_best_reply(spec, thirds(), 0).is_regular == edge);
  CHECK(interim_best_reply(spec, thirds(), 1).is_regular);

  const CommunicationDevice silent({{{-0.5, 0.5}}, {}});
  CHECK_THROWS_AS(regular_test_sufficient(testing::symmetric_game(0.2), silent, 1), DegenerateWord);
}

TEST_CASE("interim best reply") {
  SUBCASE("symmetric game") {
    const InterimSolution s = interim_best_reply(testing::symmetric_game(1.0 / 3.0), testing::halves_device(), 1);
    CHECK(near(s.action, 0.125, 1e-15));
    CHECK(s.is_regular);
    CHECK(near(s.worst_kappa.value, 0.5, 1e-15));
  }
  SUBCASE("no error") {
    const InterimSolution s = interim_best_reply(testing::symmetric_game(0.0), testing::halves_device(), 0);
    CHECK(near(s.action, -0.25, 1e-15));
  }
  SUBCASE("pure noise") {
    const InterimSolution s = interim_best_reply(testing::symmetric_game(1.0), testing::halves_device(), 0);
    CHECK(near(s.action, 0.0, 1e-15));
  }
  SUBCASE("empty cell") {
    const CommunicationDevice silent({{{-0.5, 0.5}}, {}});
    const InterimSolution s = interim_best_reply(testing::symmetric_game(0.2), silent, 1);
    CHECK(s.degenerate);
    CHECK_FALSE(s.is_regular);
    CHECK(s.action == 0.0);
  }
  SUBCASE("non-regular word matches the grid oracle") {
    const auto spec = with(testing::symmetric_game(0.9), 3, 0.6, 0.9, FullSimplex{});
    const InterimSolution s = interim_best_reply(spec, thirds(), 2);
    CHECK_FALSE(s.is_regular);
    const auto o = oracle::oracle_interim(spec, thirds(), 2);
    CHECK(near(s.action, o.action, 2e-4));
    CHECK(near(s.objective, o.objective, 1e-5));
    CHECK(near(interim_objective(spec, thirds(), 2, s.action), s.objective, 1e-15));
  }
}

TEST_CASE("worst-case G") {
  const auto base = testing::symmetric_game(0.3);
  const auto profile = ActionProfile::from_actions(Eigen::Vector2d(0.1, 0.2));
  const WorstCaseG full = worst_case_G(base, profile);
  CHECK(full.g.isApprox(Eigen::Vector2d(0.0, 1.0)));

  const auto finite = with(base, 2, 0.3, 0.3, FiniteSet{{Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(0.9, 0.1)}});
  const WorstCaseG f = worst_case_G(finite, ActionProfile::from_actions(Eigen::Vector2d(0.3, 0.1)));
  CHECK(f.g.isApprox(Eigen::Vector2d(0.9, 0.1)));

  const WorstCaseG flat = worst_case_G(finite, ActionProfile::from_actions(Eigen::Vector2d(0.0, 0.0)));
  CHECK(flat.argmax.size() == 2);
}

TEST_CASE("ex-ante best reply") {
  SUBCASE("symmetric game") {
    for (double p : {0.0, 0.2, 1.0 / 3.0, 0.5, 0.9}) {
      const ExAnteSolution s = exante_best_reply(testing::symmetric_game(p), testing::halves_device());
      CHECK(near(s.profile.actions(1), (1.0 - p) / 4.0, 1e-12));
      CHECK(near(s.profile.actions(0), -(1.0 - p) / 4.0, 1e-12));
      CHECK(s.duality_gap <= 1e-12);
    }
  }
  SUBCASE("no error gives centroids") {
    const auto spec = with(testing::symmetric_game(0.0), 3, 0.0, 0.0, FullSimplex{});
    const ExAnteSolution s = exante_best_reply(spec, thirds());
    CHECK(near(s.profile.actions(0), -1.0 / 3.0, 1e-15));
    CHECK(near(s.profile.actions(2), 1.0 / 3.0, 1e-15));
  }
  SUBCASE("singleton G-set decouples words") {
    const Eigen::Vector2d g(0.3, 0.7);
    const auto spec = with(testing::symmetric_game(0.4), 2, 0.4, 0.4, FiniteSet{{g}});
    const CommunicationDevice device({{{-0.5, 0.2}}, {{0.2, 0.5}}});
    const ExAnteSolution s = exante_best_reply(spec, device);
    CHECK(near(*s.profile.lambda[0], lambda_weight(0.7, 0.4, 0.3), 1e-12));
    CHECK(near(*s.profile.lambda[1], lambda_weight(0.3, 0.4, 0.7), 1e-12));
    const auto o = oracle::oracle_exante(spec, device);
    CHECK(near(s.objective, o.objective, 1e-5));
    CHECK((s.profile.actions - o.actions).cwiseAbs().maxCoeff() <= 2e-4);
  }
  SUBCASE("finite G-set matches the grid oracle") {
    const auto spec = with(testing::symmetric_game(0.4), 3, 0.2, 0.5,
                           FiniteSet{{Eigen::Vector3d(0.6, 0.2, 0.2), Eigen::Vector3d(0.1, 0.3, 0.6),
                                      Eigen::Vector3d(0.3, 0.5, 0.2)}});
    const CommunicationDevice device({{{-0.5, -0.2}}, {{-0.2, 0.05}}, {{0.05, 0.5}}});
    const ExAnteSolution s = exante_best_reply(spec, device);
    const auto o = oracle::oracle_exante(spec, device);
    CHECK(near(s.objective, o.objective, 1e-5));
    CHECK((s.profile.actions - o.actions).cwiseAbs().maxCoeff() <= 2e-4);
    CHECK(s.duality_gap <= 1e-6);
    CHECK(near(exante_objective(spec, device, s.profile.actions), s.objective, 1e-15));
  }
}
