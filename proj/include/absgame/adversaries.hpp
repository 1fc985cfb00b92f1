#ifndef ABSGAME_ADVERSARIES_HPP
#define ABSGAME_ADVERSARIES_HPP

#include <cstdint>
#include <vector>

#include "absgame/dynamics.hpp"
#include "absgame/game.hpp"
#include "absgame/targets.hpp"

namespace absgame {

// Seeded opponents for exercising the hyperplane strategies. Every cube
// they return has already passed the engine's own legality predicates, so
// a run against them can only stop through the strategy's choices.

// Answers each slab with a cube sampled uniformly from the legal region.
// Aims for radius lambda * R (lambda in [gamma, 1)) and falls back to the
// minimal legal radius gamma * R when the larger cube does not fit; for a
// parent inside [0,1]^d that fallback always succeeds when the slab normal
// is a coordinate axis, and is found by rejection otherwise.
BobCallback random_bob(const Scalar& gamma, const Scalar& lambda,
                       std::uint64_t seed);

// Draws `candidates` legal cubes the same way random_bob would and keeps
// the one whose center's first coordinate stays closest to the moving
// points over the next `horizon` steps: score = min over 1 <= n <= horizon
// of |T_(1,n)(center_1) - g_n(center)_1|, first minimum kept on ties. A
// horizon of 0 returns the first sample, reproducing random_bob's stream.
BobCallback greedy_bob(const Scalar& gamma, const Scalar& lambda,
                       std::uint64_t seed, MapSequence seq,
                       TargetFamily target, unsigned long horizon,
                       std::size_t candidates = 24);

// Fixed move lists for deterministic tests; they stop when exhausted.
AliceCallback scripted_alice(std::vector<Slab> moves);
BobCallback scripted_bob(std::vector<Cube> moves);

}  // namespace absgame

#endif  // ABSGAME_ADVERSARIES_HPP
