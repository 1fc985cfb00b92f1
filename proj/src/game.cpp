#include "absgame/game.hpp"

#include "absgame/errors.hpp"

using nlohmann::ordered_json;

namespace absgame {

namespace {

void require_config(const GameConfig& config) {
  const Mode& m = config.mode;
  if (!definitely(Scalar::gt(config.gamma, Scalar::zero(m))) ||
      !definitely(Scalar::lt(config.gamma,
                             Scalar::from_mpq(mpq_class(1, 3), m)))) {
    throw SpecError("gamma must lie in (0, 1/3)");
  }
  if (config.dimension == 0) throw SpecError("dimension must be positive");
}

void require_initial(const GameConfig& config, const Cube& initial) {
  if (initial.dimension() != config.dimension) {
    throw SpecError("initial cube has the wrong dimension");
  }
  const Mode& m = config.mode;
  if (!definitely(Scalar::gt(initial.radius, Scalar::zero(m)))) {
    throw SpecError("initial cube needs positive radius");
  }
  if (!definitely(Scalar::le(initial.radius, Scalar::one(m)))) {
    throw SpecError("initial cube radius must be at most 1");
  }
  if (point_in_unit_cube(initial.center) != Ternary::yes) {
    throw SpecError("initial cube center must lie in [0,1]^d");
  }
}

// Evaluates one legality predicate: `yes` passes, `no` is an illegal move,
// indeterminate aborts the run with a precision diagnostic.
void require_move(Ternary ok, const char* predicate, unsigned long round) {
  if (ok == Ternary::yes) return;
  std::string where = std::string(predicate) + " (round " +
                      std::to_string(round) + ")";
  if (ok == Ternary::no) throw IllegalMoveError(predicate, where);
  throw PrecisionExhausted("legality of " + where +
                           " is undecidable at this precision");
}

}  // namespace

Slab pass_slab(std::size_t dimension, const Mode& mode) {
  std::vector<Scalar> normal(dimension, Scalar::zero(mode));
  normal[0] = Scalar::one(mode);
  // Offset 3 puts the hyperplane two units away from the unit cube, so a
  // zero-halfwidth slab there restricts nothing.
  return Slab{std::move(normal), Scalar::from_long(3, mode),
              Scalar::zero(mode)};
}

GameResult run_game(const GameConfig& config, const Cube& initial,
                    const AliceCallback& alice, const BobCallback& bob) {
  require_config(config);
  require_initial(config, initial);

  GameResult result{{}, initial, "max_rounds", ordered_json::object()};
  Cube current = initial;
  for (unsigned long round = 0; round < config.max_rounds; ++round) {
    GameView alice_view{round, current, result.rounds, nullptr};
    std::optional<Slab> slab = alice(alice_view);
    if (!slab) {
      result.status = "alice_stopped";
      break;
    }
    if (slab->normal.size() != config.dimension) {
      throw SpecError("slab normal has the wrong dimension");
    }
    if (!definitely(Scalar::ge(slab->halfwidth, Scalar::zero(config.mode)))) {
      throw SpecError("slab halfwidth must be nonnegative");
    }
    require_move(Scalar::gt(one_norm(slab->normal), Scalar::zero(config.mode)),
                 "zero_normal", round);
    require_move(Scalar::le(slab->halfwidth, config.gamma * current.radius),
                 "halfwidth_exceeds_gamma_half_diameter", round);
    result.rounds.push_back(RoundRecord{*slab, std::nullopt});

    GameView bob_view{round, current, result.rounds, &*slab};
    std::optional<Cube> cube = bob(bob_view);
    if (!cube) {
      result.status = "bob_stopped";
      break;
    }
    if (cube->dimension() != config.dimension) {
      throw SpecError("cube has the wrong dimension");
    }
    if (!definitely(Scalar::gt(cube->radius, Scalar::zero(config.mode)))) {
      throw SpecError("cube needs positive radius");
    }
    require_move(point_in_unit_cube(cube->center), "center_outside_unit_cube",
                 round);
    require_move(cube_inside(*cube, current), "cube_not_inside_parent", round);
    require_move(cube_avoids_slab(*cube, *slab), "cube_meets_slab", round);
    require_move(Scalar::ge(cube->radius, config.gamma * current.radius),
                 "diameter_below_gamma_fraction", round);
    result.rounds.back().cube = *cube;
    current = *cube;
    result.final_cube = current;
  }
  return result;
}

namespace {

ordered_json point_json(const std::vector<Scalar>& p) {
  ordered_json arr = ordered_json::array();
  for (const Scalar& c : p) arr.push_back(c.str());
  return arr;
}

std::vector<Scalar> parse_point(const ordered_json& arr, const Mode& mode) {
  std::vector<Scalar> out;
  for (const auto& v : arr) {
    out.push_back(Scalar::parse(v.get<std::string>(), mode));
  }
  return out;
}

}  // namespace

ordered_json trace_json(const GameConfig& config, const Cube& initial,
                        const GameResult& result) {
  ordered_json j;
  j["gamma"] = config.gamma.str();
  j["mode"] = config.mode.str();
  ordered_json rounds = ordered_json::array();
  for (const RoundRecord& r : result.rounds) {
    ordered_json entry;
    entry["alice"] = {{"normal", point_json(r.slab.normal)},
                      {"offset", r.slab.offset.str()},
                      {"halfwidth", r.slab.halfwidth.str()}};
    if (r.cube) {
      entry["bob"] = {{"center", point_json(r.cube->center)},
                      {"radius", r.cube->radius.str()}};
    }
    rounds.push_back(std::move(entry));
  }
  j["rounds"] = std::move(rounds);
  j["final_center"] = point_json(result.final_cube.center);
  j["diagnostics"] = result.diagnostics;
  j["d"] = config.dimension;
  j["initial"] = {{"center", point_json(initial.center)},
                  {"radius", initial.radius.str()}};
  j["max_rounds"] = config.max_rounds;
  j["seed"] = config.seed;
  j["status"] = result.status;
  j["final_cube"] = {{"center", point_json(result.final_cube.center)},
                     {"radius", result.final_cube.radius.str()}};
  ordered_json radii = ordered_json::array();
  radii.push_back(initial.radius.str());
  for (const RoundRecord& r : result.rounds) {
    if (r.cube) radii.push_back(r.cube->radius.str());
  }
  j["radii"] = std::move(radii);
  return j;
}

ordered_json replay_trace(const ordered_json& trace) {
  GameConfig config;
  config.mode = Mode::parse(trace.at("mode").get<std::string>());
  config.gamma = Scalar::parse(trace.at("gamma").get<std::string>(), config.mode);
  config.dimension = trace.at("d").get<std::size_t>();
  config.max_rounds = trace.at("max_rounds").get<unsigned long>();
  config.seed = trace.at("seed").get<std::uint64_t>();

  const ordered_json& init = trace.at("initial");
  Cube initial{parse_point(init.at("center"), config.mode),
               Scalar::parse(init.at("radius").get<std::string>(), config.mode)};

  const ordered_json& rounds = trace.at("rounds");
  AliceCallback alice = [&](const GameView& view) -> std::optional<Slab> {
    if (view.round >= rounds.size()) return std::nullopt;
    const ordered_json& entry = rounds.at(view.round).at("alice");
    return Slab{parse_point(entry.at("normal"), config.mode),
                Scalar::parse(entry.at("offset").get<std::string>(), config.mode),
                Scalar::parse(entry.at("halfwidth").get<std::string>(),
                              config.mode)};
  };
  BobCallback bob = [&](const GameView& view) -> std::optional<Cube> {
    const ordered_json& entry = rounds.at(view.round);
    if (!entry.contains("bob")) return std::nullopt;
    const ordered_json& b = entry.at("bob");
    return Cube{parse_point(b.at("center"), config.mode),
                Scalar::parse(b.at("radius").get<std::string>(), config.mode)};
  };

  GameResult replayed = run_game(config, initial, alice, bob);
  replayed.diagnostics = trace.at("diagnostics");
  return trace_json(config, initial, replayed);
}

}  // namespace absgame
