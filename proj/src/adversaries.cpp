#include "absgame/adversaries.hpp"

#include <memory>
#include <optional>
#include <utility>

#include "absgame/errors.hpp"
#include "absgame/geometry.hpp"
#include "absgame/rng.hpp"

namespace absgame {

namespace {

void require_params(const Scalar& gamma, const Scalar& lambda) {
  const Mode& m = gamma.mode();
  if (!definitely(Scalar::gt(gamma, Scalar::zero(m))) ||
      !definitely(Scalar::lt(gamma, Scalar::from_mpq(mpq_class(1, 3), m)))) {
    throw SpecError("adversary needs gamma in (0, 1/3)");
  }
  if (!definitely(Scalar::ge(lambda, gamma)) ||
      !definitely(Scalar::lt(lambda, Scalar::one(m)))) {
    throw SpecError("adversary needs lambda in [gamma, 1)");
  }
}

// k / 2^53 in [0,1), or (k+1) / 2^53 in (0,1]: exact dyadic rationals, so
// the draw is reproducible across modes (53-bit significands hold them).
Scalar unit_draw(Rng& rng, const Mode& mode, bool open_low) {
  mpz_class k(static_cast<unsigned long>(rng.next_dyadic53()));
  if (open_low) k += 1;
  mpq_class t(k, mpz_class(1) << 53);
  t.canonicalize();
  return Scalar::from_mpq(t, mode);
}

// Index of the one coordinate a slab constrains, when its normal is
// decisively a multiple of a standard basis vector; anything ambiguous
// goes down the general rejection path instead.
std::optional<std::size_t> axis_of(const std::vector<Scalar>& normal) {
  std::optional<std::size_t> axis;
  for (std::size_t i = 0; i < normal.size(); ++i) {
    switch (normal[i].sign()) {
      case Order::eq:
        break;
      case Order::lt:
      case Order::gt:
        if (axis) return std::nullopt;  // two active coordinates
        axis = i;
        break;
      default:
        return std::nullopt;
    }
  }
  return axis;
}

bool verified_legal(const GameView& view, const Slab& slab, const Cube& cube,
                    const Scalar& gamma) {
  return point_in_unit_cube(cube.center) == Ternary::yes &&
         cube_inside(cube, view.current) == Ternary::yes &&
         cube_avoids_slab(cube, slab) == Ternary::yes &&
         definitely(Scalar::ge(cube.radius,
                               gamma * view.current.radius));
}

// One uniform draw of a center with the given radius. Coordinates range
// over [c_i - (R - r), c_i + (R - r)] clamped to [0,1]; on the slab's axis
// (when it has one) the expanded slab [S - hw - r, S + hw + r] is cut out
// and a side is chosen with probability proportional to its length, half
// open at the side's slab-facing end so the sample never touches the slab.
std::optional<Cube> sample_candidate(Rng& rng, const GameView& view,
                                     const Slab& slab, const Scalar& radius,
                                     const std::optional<std::size_t>& axis,
                                     const Scalar& slab_center) {
  const Mode& mode = radius.mode();
  const Cube& parent = view.current;
  const Scalar zero = Scalar::zero(mode);
  const Scalar one = Scalar::one(mode);
  Scalar reach = parent.radius - radius;

  std::vector<Scalar> center;
  center.reserve(parent.dimension());
  for (std::size_t i = 0; i < parent.dimension(); ++i) {
    Scalar lo = Scalar::max(zero, parent.center[i] - reach).midpoint_point();
    Scalar hi = Scalar::min(one, parent.center[i] + reach).midpoint_point();
    Scalar x = lo;
    if (axis && *axis == i) {
      Scalar ex_lo = slab_center - slab.halfwidth - radius;
      Scalar ex_hi = slab_center + slab.halfwidth + radius;
      Scalar low_hi = Scalar::min(hi, ex_lo).midpoint_point();
      Scalar high_lo = Scalar::max(lo, ex_hi).midpoint_point();
      Scalar w_low = Scalar::max(zero, low_hi - lo).midpoint_point();
      Scalar w_high = Scalar::max(zero, hi - high_lo).midpoint_point();
      bool has_low = definitely(Scalar::gt(w_low, zero));
      bool has_high = definitely(Scalar::gt(w_high, zero));
      if (!has_low && !has_high) return std::nullopt;
      bool pick_low = has_low;
      if (has_low && has_high) {
        Scalar u = unit_draw(rng, mode, false);
        pick_low = definitely(Scalar::lt(u * (w_low + w_high), w_low));
      }
      if (pick_low) {
        x = lo + w_low * unit_draw(rng, mode, false);  // in [lo, low_hi)
      } else {
        x = high_lo + w_high * unit_draw(rng, mode, true);  // in (high_lo, hi]
      }
    } else {
      x = lo + (hi - lo) * unit_draw(rng, mode, false);
    }
    center.push_back(x.midpoint_point());
  }
  return Cube{std::move(center), radius};
}

// Every returned cube re-passes the engine's legality predicates, so an
// accepted sample can never be rejected downstream. For a parent inside
// the unit cube the fallback radius gamma * R always leaves one side of
// an axis slab with positive length (2R(1-gamma) beats 2(hw + r) when
// gamma < 1/3), hence the exhaustion error signals a broken invariant,
// not bad luck, on the axis path.
Cube respond(Rng& rng, const Scalar& gamma, const Scalar& lambda,
             const GameView& view) {
  if (view.slab == nullptr) {
    throw SpecError("bob asked to move without a slab");
  }
  const Slab& slab = *view.slab;
  const Mode& mode = gamma.mode();
  std::optional<std::size_t> axis = axis_of(slab.normal);
  Scalar slab_center = Scalar::zero(mode);
  if (axis) slab_center = slab.offset / slab.normal[*axis];

  for (int phase = 0; phase < 2; ++phase) {
    // Midpoint keeps the preferred radius a point; the fallback rounds up
    // so that radius >= gamma * R stays decisively true in ball mode.
    Scalar radius = phase == 0 ? (lambda * view.current.radius).midpoint_point()
                               : (gamma * view.current.radius).upper_point();
    const int tries = axis ? 16 : 128;
    for (int attempt = 0; attempt < tries; ++attempt) {
      std::optional<Cube> cand =
          sample_candidate(rng, view, slab, radius, axis, slab_center);
      if (cand && verified_legal(view, slab, *cand, gamma)) return *cand;
      if (!cand) break;  // no room at this radius, grow the free region
    }
  }
  if (mode.kind == Mode::Kind::rational) {
    throw VerificationError(
        "random bob found no legal cube; the parent likely leaves [0,1]^d");
  }
  // In ball mode the usual culprit is a cube shrunk near the working
  // precision's resolution, where no comparison stays decisive.
  throw PrecisionExhausted(
      "random bob found no decisively legal cube; raise the precision");
}

// Smallest decisive distance between the center's forward orbit and the
// moving points; nullopt when the orbit hits a branch boundary or the
// working precision cannot resolve it.
std::optional<Scalar> proximity_score(const MapSequence& seq,
                                      const TargetFamily& target,
                                      unsigned long horizon,
                                      const std::vector<Scalar>& center) {
  try {
    std::vector<Scalar> path = orbit(seq, center[0], horizon);
    std::optional<Scalar> best;
    for (unsigned long n = 1; n <= horizon; ++n) {
      Scalar dist = (path[n] - target.evaluate(n, center)[0]).abs();
      if (!best || definitely(Scalar::lt(dist, *best))) best = dist;
    }
    return best;
  } catch (const BoundaryOrbitError&) {
    return std::nullopt;
  } catch (const PrecisionExhausted&) {
    return std::nullopt;
  }
}

}  // namespace

BobCallback random_bob(const Scalar& gamma, const Scalar& lambda,
                       std::uint64_t seed) {
  require_params(gamma, lambda);
  auto rng = std::make_shared<Rng>(seed);
  return [rng, gamma, lambda](const GameView& view) -> std::optional<Cube> {
    return respond(*rng, gamma, lambda, view);
  };
}

BobCallback greedy_bob(const Scalar& gamma, const Scalar& lambda,
                       std::uint64_t seed, MapSequence seq,
                       TargetFamily target, unsigned long horizon,
                       std::size_t candidates) {
  require_params(gamma, lambda);
  if (candidates == 0) throw SpecError("greedy bob needs candidates");
  auto rng = std::make_shared<Rng>(seed);
  auto dyn = std::make_shared<MapSequence>(std::move(seq));
  auto tgt = std::make_shared<TargetFamily>(std::move(target));
  return [rng, gamma, lambda, dyn, tgt, horizon,
          candidates](const GameView& view) -> std::optional<Cube> {
    Cube best = respond(*rng, gamma, lambda, view);
    if (horizon == 0) return best;
    std::optional<Scalar> best_score =
        proximity_score(*dyn, *tgt, horizon, best.center);
    for (std::size_t i = 1; i < candidates; ++i) {
      Cube cand = respond(*rng, gamma, lambda, view);
      std::optional<Scalar> score =
          proximity_score(*dyn, *tgt, horizon, cand.center);
      if (score &&
          (!best_score || definitely(Scalar::lt(*score, *best_score)))) {
        best = std::move(cand);
        best_score = std::move(score);
      }
    }
    return best;
  };
}

AliceCallback scripted_alice(std::vector<Slab> moves) {
  auto script = std::make_shared<std::vector<Slab>>(std::move(moves));
  return [script](const GameView& view) -> std::optional<Slab> {
    if (view.round >= script->size()) return std::nullopt;
    return (*script)[view.round];
  };
}

BobCallback scripted_bob(std::vector<Cube> moves) {
  auto script = std::make_shared<std::vector<Cube>>(std::move(moves));
  return [script](const GameView& view) -> std::optional<Cube> {
    if (view.round >= script->size()) return std::nullopt;
    return (*script)[view.round];
  };
}

}  // namespace absgame
