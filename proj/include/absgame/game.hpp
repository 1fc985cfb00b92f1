#ifndef ABSGAME_GAME_HPP
#define ABSGAME_GAME_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "absgame/geometry.hpp"
#include "absgame/scalar.hpp"

namespace absgame {

// Parameters of one hyperplane-neighborhood game on [0,1]^d. Alice answers
// the current cube B with a slab A of sup-norm halfwidth at most
// gamma * |B| / 2; Bob answers with a closed cube inside B \ A of diameter
// at least gamma * |B|, centered in [0,1]^d.
struct GameConfig {
  Scalar gamma;  // in (0, 1/3)
  std::size_t dimension = 1;
  Mode mode = Mode::rational();
  unsigned long max_rounds = 0;
  std::uint64_t seed = 0;  // recorded in the trace; the engine draws nothing
};

struct RoundRecord {
  Slab slab;
  std::optional<Cube> cube;  // absent when Bob stopped mid-round
};

// What a player sees when asked to move: the current cube, the 0-based
// round index, the full history, and (for Bob) this round's slab.
struct GameView {
  unsigned long round = 0;
  const Cube& current;
  const std::vector<RoundRecord>& history;
  const Slab* slab = nullptr;  // set for Bob only
};

using AliceCallback = std::function<std::optional<Slab>(const GameView&)>;
using BobCallback = std::function<std::optional<Cube>(const GameView&)>;

struct GameResult {
  std::vector<RoundRecord> rounds;
  Cube final_cube;
  std::string status;  // "max_rounds" | "alice_stopped" | "bob_stopped"
  nlohmann::ordered_json diagnostics = nlohmann::ordered_json::object();
};

// A slab no point of [0,1]^d can meet: the canonical "pass" move.
Slab pass_slab(std::size_t dimension, const Mode& mode);

// Runs the game until a callback declines to move, a move is illegal
// (IllegalMoveError, naming the violated predicate), a legality predicate
// is undecidable at the working precision (PrecisionExhausted), or
// max_rounds is reached.
GameResult run_game(const GameConfig& config, const Cube& initial,
                    const AliceCallback& alice, const BobCallback& bob);

// Serialization. All numbers are exact "p" or "p/q" strings; replaying a
// trace therefore reproduces it byte for byte.
nlohmann::ordered_json trace_json(const GameConfig& config, const Cube& initial,
                                  const GameResult& result);
// Re-runs the moves of a trace through the engine (re-checking legality)
// and returns the freshly serialized trace.
nlohmann::ordered_json replay_trace(const nlohmann::ordered_json& trace);

}  // namespace absgame

#endif  // ABSGAME_GAME_HPP
