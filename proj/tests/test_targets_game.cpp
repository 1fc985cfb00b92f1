#include "doctest.h"

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absgame/game.hpp"
#include "absgame/targets.hpp"

using absgame::AliceCallback;
using absgame::BobCallback;
using absgame::Cube;
using absgame::GameConfig;
using absgame::GameResult;
using absgame::GameView;
using absgame::IllegalMoveError;
using absgame::Mode;
using absgame::Order;
using absgame::PrecisionExhausted;
using absgame::Scalar;
using absgame::Slab;
using absgame::SpecError;
using absgame::TargetFamily;
using absgame::Ternary;
using nlohmann::ordered_json;

namespace {

const Mode kRat = Mode::rational();

Scalar q(long num, long den = 1) {
  return Scalar::from_mpq(mpq_class(num, den), kRat);
}

bool eq(const Scalar& a, const Scalar& b) {
  return Scalar::compare(a, b) == Order::eq;
}

std::vector<Scalar> pt(std::vector<long> num, long den) {
  std::vector<Scalar> out;
  for (long n : num) out.push_back(q(n, den));
  return out;
}

GameConfig quarter_game(std::size_t d, unsigned long rounds) {
  GameConfig config;
  config.gamma = q(1, 4);
  config.dimension = d;
  config.mode = kRat;
  config.max_rounds = rounds;
  config.seed = 7;
  return config;
}

// Captures the predicate name of the IllegalMoveError a game raises, or
// an empty string when the run finishes legally.
std::string illegal_predicate(const GameConfig& config, const Cube& initial,
                              const AliceCallback& alice,
                              const BobCallback& bob) {
  try {
    absgame::run_game(config, initial, alice, bob);
  } catch (const IllegalMoveError& e) {
    return e.predicate();
  }
  return "";
}

}  // namespace

TEST_SUITE("targets_game") {

TEST_CASE("target family factories evaluate as declared") {
  TargetFamily c = TargetFamily::constant(pt({1, 3}, 4));
  CHECK(c.dimension() == 2);
  CHECK(eq(c.lipschitz(), q(0)));
  CHECK(eq(c.evaluate(5, pt({1, 1}, 2))[0], q(1, 4)));
  CHECK(eq(c.evaluate(5, pt({1, 1}, 2))[1], q(3, 4)));

  TargetFamily seq = TargetFamily::point_sequence({pt({0}, 1), pt({1}, 2)});
  CHECK(eq(seq.evaluate(1, pt({1}, 3))[0], q(0)));
  CHECK(eq(seq.evaluate(2, pt({1}, 3))[0], q(1, 2)));
  CHECK_THROWS_AS(seq.evaluate(3, pt({1}, 3)), SpecError);
  CHECK_THROWS_AS(seq.evaluate(0, pt({1}, 3)), SpecError);

  TargetFamily id = TargetFamily::identity(2, kRat);
  CHECK(eq(id.lipschitz(), q(1)));
  CHECK(eq(id.evaluate(9, pt({2, 5}, 7))[1], q(5, 7)));

  TargetFamily aff = TargetFamily::affine({q(1, 2), q(-1, 3)}, {q(1, 4), q(1, 2)});
  CHECK(eq(aff.lipschitz(), q(1, 2)));
  std::vector<Scalar> y = aff.evaluate(1, pt({1, 1}, 2));
  CHECK(eq(y[0], q(1, 2)));
  CHECK(eq(y[1], q(1, 3)));
}

TEST_CASE("targets that leave the unit cube are rejected, not clamped") {
  // Construction already rejects a parked point outside [0,1]^d.
  CHECK_THROWS_AS(TargetFamily::constant(pt({5}, 4)), SpecError);

  // 2x + 0 escapes at x = 3/4; the family is constructible (it is fine on
  // [0,1/2]) but evaluation at the escaping point must throw.
  TargetFamily doubling = TargetFamily::affine({q(2)}, {q(0)});
  CHECK(eq(doubling.evaluate(1, pt({1}, 4))[0], q(1, 2)));
  CHECK_THROWS_AS(doubling.evaluate(1, pt({3}, 4)), SpecError);

  // A custom family returning the wrong dimension is caught at evaluation.
  TargetFamily bad = TargetFamily::custom(
      [](unsigned long, const std::vector<Scalar>& x) {
        return std::vector<Scalar>{x[0], x[0]};
      },
      q(1), 1, "widens");
  CHECK_THROWS_AS(bad.evaluate(1, pt({1}, 2)), SpecError);
}

TEST_CASE("lipschitz audit separates honest and dishonest constants") {
  std::vector<std::pair<std::vector<Scalar>, std::vector<Scalar>>> pairs;
  for (long i = 0; i < 8; ++i) {
    pairs.emplace_back(pt({i, 8 - i}, 9), pt({8 - i, i}, 9));
  }

  TargetFamily aff = TargetFamily::affine({q(1, 3), q(1, 2)}, {q(1, 4), q(0)});
  CHECK(absgame::lipschitz_audit(aff, 1, pairs) == Ternary::yes);

  // Same map but the declared constant lies: it claims 1/8 while the second
  // coordinate genuinely contracts only by 1/2.
  TargetFamily liar = TargetFamily::custom(
      [](unsigned long, const std::vector<Scalar>& x) {
        return std::vector<Scalar>{x[0] * q(1, 3) + q(1, 4), x[1] * q(1, 2)};
      },
      q(1, 8), 2, "liar");
  CHECK(absgame::lipschitz_audit(liar, 1, pairs) == Ternary::no);
}

TEST_CASE("game configuration and initial cube are validated") {
  Cube unit{pt({1}, 2), q(1, 2)};
  AliceCallback pass = [](const GameView& view) {
    return absgame::pass_slab(view.current.dimension(), kRat);
  };
  BobCallback stay = [](const GameView& view) -> std::optional<Cube> {
    return Cube{view.current.center, view.current.radius * q(1, 4)};
  };

  GameConfig config = quarter_game(1, 1);
  config.gamma = q(1, 3);  // boundary excluded
  CHECK_THROWS_AS(absgame::run_game(config, unit, pass, stay), SpecError);
  config.gamma = q(0);
  CHECK_THROWS_AS(absgame::run_game(config, unit, pass, stay), SpecError);

  config = quarter_game(1, 1);
  CHECK_THROWS_AS(
      absgame::run_game(config, Cube{pt({3}, 2), q(1, 4)}, pass, stay),
      SpecError);  // center outside [0,1]
  CHECK_THROWS_AS(absgame::run_game(config, Cube{pt({1}, 2), q(0)}, pass, stay),
                  SpecError);  // degenerate radius
  CHECK_THROWS_AS(absgame::run_game(config, Cube{pt({1}, 2), q(2)}, pass, stay),
                  SpecError);  // radius above 1
  CHECK_THROWS_AS(
      absgame::run_game(config, Cube{pt({1, 1}, 2), q(1, 2)}, pass, stay),
      SpecError);  // dimension mismatch
}

TEST_CASE("every illegal move is named by its violated predicate") {
  GameConfig config = quarter_game(1, 4);
  Cube unit{pt({1}, 2), q(1, 2)};

  AliceCallback center_slab = [](const GameView& view) {
    // Slab through the cube center at the maximal legal halfwidth.
    return Slab{{q(1)}, view.current.center[0], q(1, 4) * view.current.radius};
  };
  BobCallback left_quarter = [](const GameView& view) -> std::optional<Cube> {
    Scalar r = view.current.radius * q(1, 4);
    return Cube{{view.current.center[0] - view.current.radius + r}, r};
  };

  CHECK(illegal_predicate(config, unit,
                          [](const GameView&) {
                            return Slab{{q(0)}, q(0), q(0)};
                          },
                          left_quarter) == "zero_normal");

  CHECK(illegal_predicate(config, unit,
                          [](const GameView& view) {
                            return Slab{{q(1)}, q(1, 2),
                                        view.current.radius * q(1, 3)};
                          },
                          left_quarter) ==
        "halfwidth_exceeds_gamma_half_diameter");

  CHECK(illegal_predicate(config, unit, center_slab,
                          [](const GameView&) -> std::optional<Cube> {
                            return Cube{{q(9, 8)}, q(1, 8)};
                          }) == "center_outside_unit_cube");

  CHECK(illegal_predicate(config, unit, center_slab,
                          [](const GameView&) -> std::optional<Cube> {
                            return Cube{{q(1, 16)}, q(1, 8)};
                          }) == "cube_not_inside_parent");

  CHECK(illegal_predicate(config, unit, center_slab,
                          [](const GameView&) -> std::optional<Cube> {
                            return Cube{{q(3, 8)}, q(1, 8)};
                          }) == "cube_meets_slab");

  CHECK(illegal_predicate(config, unit, center_slab,
                          [](const GameView&) -> std::optional<Cube> {
                            return Cube{{q(1, 16)}, q(1, 16)};
                          }) == "diameter_below_gamma_fraction");

  // A legal response to the same slab completes the round.
  CHECK(illegal_predicate(config, unit, center_slab, left_quarter) == "");

  // Malformed moves (not merely illegal ones) surface as SpecError.
  CHECK_THROWS_AS(absgame::run_game(config, unit,
                                    [](const GameView&) {
                                      return Slab{{q(1)}, q(1, 2), q(-1, 8)};
                                    },
                                    left_quarter),
                  SpecError);
  CHECK_THROWS_AS(absgame::run_game(config, unit,
                                    [](const GameView&) {
                                      return Slab{{q(1), q(1)}, q(1, 2), q(0)};
                                    },
                                    left_quarter),
                  SpecError);
}

TEST_CASE("passing is always legal and the game reaches max_rounds") {
  GameConfig config = quarter_game(2, 6);
  Cube initial{pt({1, 1}, 2), q(1, 2)};
  AliceCallback pass = [](const GameView& view) {
    return absgame::pass_slab(view.current.dimension(), kRat);
  };
  BobCallback shrink = [](const GameView& view) -> std::optional<Cube> {
    // Exactly the minimal legal diameter, pinned at the parent center.
    return Cube{view.current.center, view.current.radius * q(1, 4)};
  };
  GameResult res = absgame::run_game(config, initial, pass, shrink);
  CHECK(res.status == "max_rounds");
  CHECK(res.rounds.size() == 6);
  // Radius contracts by gamma each round: (1/2) * 4^-6.
  CHECK(eq(res.final_cube.radius, q(1, 8192)));
  CHECK(eq(res.final_cube.center[1], q(1, 2)));
}

TEST_CASE("clean stops are reported and bob sees the round slab") {
  GameConfig config = quarter_game(1, 10);
  Cube unit{pt({1}, 2), q(1, 2)};

  AliceCallback tired = [](const GameView& view) -> std::optional<Slab> {
    if (view.round == 2) return std::nullopt;
    return absgame::pass_slab(1, kRat);
  };
  BobCallback shrink = [](const GameView& view) -> std::optional<Cube> {
    CHECK(view.slab != nullptr);
    CHECK(view.history.size() == view.round + 1);  // in-progress round visible
    return Cube{view.current.center, view.current.radius * q(1, 4)};
  };
  GameResult stopped = absgame::run_game(config, unit, tired, shrink);
  CHECK(stopped.status == "alice_stopped");
  CHECK(stopped.rounds.size() == 2);
  CHECK(eq(stopped.final_cube.radius, q(1, 32)));

  AliceCallback pass = [](const GameView&) {
    return absgame::pass_slab(1, kRat);
  };
  BobCallback walks_out = [](const GameView& view) -> std::optional<Cube> {
    if (view.round == 1) return std::nullopt;
    return Cube{view.current.center, view.current.radius * q(1, 4)};
  };
  GameResult left = absgame::run_game(config, unit, pass, walks_out);
  CHECK(left.status == "bob_stopped");
  CHECK(left.rounds.size() == 2);
  CHECK(!left.rounds.back().cube.has_value());
  CHECK(eq(left.final_cube.radius, q(1, 8)));
}

TEST_CASE("a trace replays byte for byte") {
  GameConfig config = quarter_game(1, 2);
  Cube unit{pt({1}, 2), q(1, 2)};

  AliceCallback alice = [](const GameView& view) {
    return Slab{{q(1)}, view.current.center[0], q(1, 4) * view.current.radius};
  };
  BobCallback bob = [](const GameView& view) -> std::optional<Cube> {
    Scalar r = view.current.radius * q(1, 4);
    return Cube{{view.current.center[0] - view.current.radius + r}, r};
  };

  GameResult res = absgame::run_game(config, unit, alice, bob);
  res.diagnostics["note"] = "scripted";
  res.diagnostics["stage_words"] = {3, 5};
  ordered_json trace = absgame::trace_json(config, unit, res);

  CHECK(trace.at("status") == "max_rounds");
  CHECK(trace.at("rounds").size() == 2);
  CHECK(trace.at("radii").size() == 3);
  CHECK(trace.at("radii")[2] == "1/32");
  CHECK(trace.at("final_center")[0] == trace.at("final_cube").at("center")[0]);

  ordered_json replayed = absgame::replay_trace(trace);
  CHECK(replayed.dump() == trace.dump());

  // A trace ending in a mid-round stop also survives the round trip.
  GameConfig longer = quarter_game(1, 9);
  BobCallback leaves = [&bob](const GameView& view) -> std::optional<Cube> {
    if (view.round == 3) return std::nullopt;
    return bob(view);
  };
  GameResult partial = absgame::run_game(longer, unit, alice, leaves);
  ordered_json partial_trace = absgame::trace_json(longer, unit, partial);
  CHECK(partial_trace.at("status") == "bob_stopped");
  CHECK(!partial_trace.at("rounds")[3].contains("bob"));
  CHECK(absgame::replay_trace(partial_trace).dump() == partial_trace.dump());
}

TEST_CASE("undecidable legality aborts with a precision diagnostic") {
  GameConfig config;
  config.gamma = Scalar::parse("0.1", Mode::bigfloat(53));
  config.dimension = 1;
  config.mode = Mode::bigfloat(53);
  config.max_rounds = 1;

  Mode m = config.mode;
  Cube unit{{Scalar::parse("1/2", m)}, Scalar::one(m)};

  // gamma * r carries a rounding ball, so demanding exactly that halfwidth
  // is undecidable; shading it down to the ball's lower endpoint is not.
  AliceCallback exact = [&](const GameView& view) {
    return Slab{{Scalar::one(m)}, view.current.center[0],
                config.gamma * view.current.radius};
  };
  AliceCallback shaded = [&](const GameView& view) {
    return Slab{{Scalar::one(m)}, view.current.center[0],
                (config.gamma * view.current.radius * Scalar::parse("1/2", m))
                    .lower_point()};
  };
  BobCallback right_side = [&](const GameView& view) -> std::optional<Cube> {
    return Cube{{Scalar::parse("7/8", m)}, view.current.radius *
                                               Scalar::parse("1/8", m)};
  };

  CHECK_THROWS_AS(absgame::run_game(config, unit, exact, right_side),
                  PrecisionExhausted);
  GameResult res = absgame::run_game(config, unit, shaded, right_side);
  CHECK(res.status == "max_rounds");
}

}  // TEST_SUITE
