#include <doctest.h>

#include "ambitalk/equilibrium.hpp"
#include "support.hpp"

using namespace ambitalk;
using testing::near;

TEST_CASE("babbling loss") {
  CHECK(near(babbling_loss(testing::symmetric_game(0.3)), 1.0 / 12.0, 1e-15));
  const StateInterval unit(0.0, 1.0);
  const GameSpec u(unit, PriorDensity::uniform(unit), WordSet::numbered(2), AmbiguitySet(0.3, 0.3, FullSimplex{}));
  CHECK(near(babbling_loss(u), 1.0 / 12.0, 1e-15));
  const GameSpec t(StateInterval(-0.5, 0.5), testing::tilted_prior(), WordSet::numbered(2),
                   AmbiguitySet(0.3, 0.3, FullSimplex{}));
  CHECK(near(babbling_loss(t), 1.0 / 12.0 - 1.0 / 144.0, 1e-15));

  // Absolute loss: the median estimator, E|t| = 1/4 on the centred unit interval.
  GameSpec abs_loss = testing::symmetric_game(0.3);
  abs_loss.loss = LossFunction::convex("absolute", [](double d) { return d; });
  CHECK(near(babbling_loss(abs_loss), 0.25, 1e-6));
}

TEST_CASE("constructive seed") {
  const auto [device, profile] = seed_nonbabbling(testing::symmetric_game(1.0 / 3.0), 1, 0, 0.0);
  CHECK(near(*cell_stats(testing::symmetric_game(0.2), device, 1).centroid, 0.25, 1e-15));
  CHECK(near(profile.actions(1), 0.125, 1e-15));
  CHECK(profile.actions(0) == 0.0);

  CHECK(near(seed_nonbabbling(testing::symmetric_game(0.0), 1, 0, 0.0).second.actions(1), 0.25, 1e-15));

  const auto base = testing::symmetric_game(0.4);
  const GameSpec blind(base.state, base.prior, base.words,
                       AmbiguitySet(0.4, 0.4, FiniteSet{{Eigen::Vector2d(1.0, 0.0)}}));
  CHECK(near(seed_nonbabbling(blind, 1, 0, 0.0).second.actions(1), 0.25, 1e-15));

  CHECK_THROWS_AS(seed_nonbabbling(base, 1, 1, 0.0), InvalidCut);
  CHECK_THROWS_AS(seed_nonbabbling(base, 1, 0, 0.5), InvalidCut);
}

TEST_CASE("best-reply dynamics") {
  SUBCASE("symmetric game") {
    const auto r = best_reply_dynamics(testing::symmetric_game(1.0 / 3.0),
                                       ActionProfile::from_actions(Eigen::Vector2d(-0.3, 0.2)));
    CHECK(near(r.exante_profile.actions(0), -1.0 / 6.0, 1e-9));
    CHECK(near(r.exante_profile.actions(1), 1.0 / 6.0, 1e-9));
    REQUIRE(r.device.cutpoints().size() == 1);
    CHECK(near(r.device.cutpoints()[0], 0.0, 1e-9));
  }
  SUBCASE("equal actions babble") {
    const auto r = best_reply_dynamics(testing::symmetric_game(0.3),
                                       ActionProfile::from_actions(Eigen::Vector2d(0.0, 0.0)));
    CHECK(r.iterations == 1);
    CHECK(near(r.exante_loss, 1.0 / 12.0, 1e-15));
  }
  SUBCASE("no error quantizer") {
    const auto r = best_reply_dynamics(testing::symmetric_game(0.0),
                                       ActionProfile::from_actions(Eigen::Vector2d(-0.1, 0.45)));
    CHECK(near(r.exante_profile.actions(0), -0.25, 1e-9));
    CHECK(near(r.exante_profile.actions(1), 0.25, 1e-9));
  }
  SUBCASE("iteration budget") {
    DynamicsOptions tight;
    tight.max_iter = 1;
    try {
      best_reply_dynamics(testing::symmetric_game(0.3), ActionProfile::from_actions(Eigen::Vector2d(-0.3, 0.2)), tight);
      FAIL("expected non-convergence");
    } catch (const DynamicsNonConvergence &e) {
      CHECK(e.iterations() == 1);
      CHECK(e.last_actions().size() == 2);
      CHECK(e.residual() > 0.0);
    }
  }
}

TEST_CASE("efficient equilibrium") {
  const auto r = efficient_equilibrium(testing::symmetric_game(0.5));
  CHECK(near(r.exante_profile.actions(1), 0.125, 1e-9));
  CHECK(near(r.exante_profile.actions(0), -0.125, 1e-9));
  CHECK(r.exante_loss < 1.0 / 12.0);

  const auto b = efficient_equilibrium(testing::symmetric_game(1.0));
  CHECK(near(b.exante_loss, 1.0 / 12.0, 1e-15));
  CHECK(b.exante_profile.actions.cwiseAbs().maxCoeff() == 0.0);

  const auto two = efficient_equilibrium(testing::symmetric_game(0.2));
  const auto base = testing::symmetric_game(0.2);
  const GameSpec three(base.state, base.prior, WordSet::numbered(3), AmbiguitySet(0.2, 0.2, FullSimplex{}));
  const auto r3 = efficient_equilibrium(three);
  CHECK(r3.exante_loss < two.exante_loss);
  const auto cuts = r3.device.cutpoints();
  CHECK(cuts.size() == 2);
}

TEST_CASE("interim profile") {
  const auto ip = interim_profile(testing::symmetric_game(1.0 / 3.0), testing::halves_device());
  CHECK(near(ip.profile.actions(0), -0.125, 1e-15));
  CHECK(near(ip.profile.actions(1), 0.125, 1e-15));
  CHECK(ip.is_equilibrium);

  const CommunicationDevice shifted({{{-0.5, 0.1}}, {{0.1, 0.5}}});
  CHECK_FALSE(interim_profile(testing::symmetric_game(0.3), shifted).is_equilibrium);

  const auto noise = interim_profile(testing::symmetric_game(1.0), testing::halves_device());
  CHECK(noise.profile.actions.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("inconsistency report") {
  const auto rows = inconsistency_report(testing::symmetric_game(0.3), testing::halves_device());
  REQUIRE(rows.size() == 2);
  CHECK(near(rows[1].action_exante, 0.175, 1e-12));
  CHECK(near(rows[1].action_interim, 0.7 / 5.2, 1e-12));
  REQUIRE(rows[1].as_if_p.has_value());
  CHECK(near(*rows[1].as_if_p, 0.4615, 1e-3));
  CHECK(*rows[1].ratio < 1.0);

  const auto same = inconsistency_report(testing::symmetric_game(0.0), testing::halves_device());
  CHECK(near(*same[0].ratio, 1.0, 1e-15));
}
