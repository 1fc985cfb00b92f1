#include "absgame/strategies.hpp"

#include <algorithm>
#include <cstdio>
#include <utility>

#include "absgame/errors.hpp"

namespace absgame {

namespace {

void require_gamma(const mpq_class& gamma) {
  if (gamma <= 0 || 3 * gamma >= 1)
    throw SpecError("gamma must lie in (0, 1/3)");
}

// eps = 1 - gamma/(4 + 6 gamma) = (4 + 5 gamma)/(4 + 6 gamma).
mpq_class epsilon_mpq(const mpq_class& gamma) {
  mpq_class num = 4 + 5 * gamma;
  mpq_class den = 4 + 6 * gamma;
  return num / den;
}

// q^e. Powers of a canonical fraction stay canonical: num and den are
// coprime, hence so are their powers.
mpq_class mpq_pow(const mpq_class& q, unsigned long e) {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), mpq_numref(q.get_mpq_t()), e);
  mpz_pow_ui(den.get_mpz_t(), mpq_denref(q.get_mpq_t()), e);
  return mpq_class(num, den);
}

Scalar gamma_power(const mpq_class& gamma, unsigned long e, const Mode& mode) {
  return Scalar::from_mpq(mpq_pow(gamma, e), mode);
}

// ceil(2 (1 + gamma) / gamma): the number of cells the projection window
// splits into. Each cell is then no wider than gamma * radius.
unsigned long cell_count(const mpq_class& gamma) {
  mpz_class num = 2 * (gamma.get_den() + gamma.get_num());
  mpz_class cells;
  mpz_cdiv_q(cells.get_mpz_t(), num.get_mpz_t(), mpq_numref(gamma.get_mpq_t()));
  return mpz_get_ui(cells.get_mpz_t());
}

Scalar dot(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
  Scalar s = a[0] * b[0];
  for (std::size_t i = 1; i < a.size(); ++i) s = s + a[i] * b[i];
  return s;
}

Scalar clamped_halfwidth(const Scalar& gamma_scalar, const Scalar& radius) {
  // Largest halfwidth that is decisively legal in every mode: at or below
  // the true gamma * radius, never negative.
  const Scalar hw = (gamma_scalar * radius).lower_point();
  return Scalar::max(hw, Scalar::zero(hw.mode()));
}

}  // namespace

// ---------------------------------------------------------------------------
// Blockade core.
// ---------------------------------------------------------------------------

Scalar epsilon_of_gamma(const Scalar& gamma) {
  const Scalar zero = Scalar::zero(gamma.mode());
  const Scalar third = Scalar::one(gamma.mode()) / 3;
  if (definitely(Scalar::le(gamma, zero)) || definitely(Scalar::ge(gamma, third)))
    throw SpecError("gamma must lie in (0, 1/3)");
  return (gamma * 5 + 4) / (gamma * 6 + 4);
}

unsigned long rounds_to_clear(const mpq_class& gamma, unsigned long count) {
  require_gamma(gamma);
  if (count == 0) return 0;
  const mpq_class eps = epsilon_mpq(gamma);
  const mpz_class num = eps.get_num();
  const mpz_class den = eps.get_den();
  // Least t with num^t * count < den^t. The comparison regularly hinges on
  // a few parts in a thousand, so it is done with exact integer powers.
  mpz_class lhs(count), rhs(1);
  unsigned long t = 0;
  while (lhs >= rhs) {
    lhs *= num;
    rhs *= den;
    ++t;
    if (t > 2000000) throw SpecError("blockade budget diverges");
  }
  return t;
}

AvoidIntervalsPlan::AvoidIntervalsPlan(mpq_class gamma,
                                       std::vector<Scalar> normal,
                                       std::vector<Interval> offsets)
    : gamma_(std::move(gamma)) {
  require_gamma(gamma_);
  if (normal.empty())
    throw SpecError("the blockade normal needs at least one component");
  mode_ = normal.front().mode();
  normal_ = std::move(normal);
  norm1_ = one_norm(normal_);
  if (norm1_.sign() != Order::gt)
    throw SpecError("the blockade normal must be decisively nonzero");
  targets_.reserve(offsets.size());
  for (const Interval& t : offsets) targets_.push_back(Target{t.closure(), false});
  initial_ = targets_.size();
  budget_ = rounds_to_clear(gamma_, initial_);
}

unsigned long AvoidIntervalsPlan::alive() const {
  unsigned long a = 0;
  for (const Target& t : targets_)
    if (!t.dead) ++a;
  return a;
}

Slab AvoidIntervalsPlan::move(const Cube& cube) {
  if (awaiting_reply_)
    throw SpecError("the previous blockade move was not acknowledged");
  if (cube.dimension() != normal_.size())
    throw SpecError("cube dimension does not match the blockade normal");
  if (done()) return pass_slab(normal_.size(), mode_);

  const Scalar gamma_scalar = Scalar::from_mpq(gamma_, mode_);
  const Scalar m = dot(normal_, cube.center);
  const Scalar reach = cube.radius * norm1_;
  const Scalar plo = m - reach;
  const Scalar phi = m + reach;
  const Scalar thr = gamma_scalar * cube.radius * norm1_;

  // A midpoint farther than gamma * radius from the cube (sup-norm; thr in
  // raw inner-product units) stays out of reach of every nested successor
  // cube, because distances only grow while the legality threshold shrinks.
  // Those targets are dead for good, with no slab spent on them.
  std::vector<std::size_t> near;
  unsigned long alive_before = 0, died_far = 0;
  for (std::size_t j = 0; j < targets_.size(); ++j) {
    if (targets_[j].dead) continue;
    ++alive_before;
    const Scalar mid = (targets_[j].offsets.lo + targets_[j].offsets.hi) / 2;
    const Scalar gap = Scalar::max(mid - phi, plo - mid);
    switch (Scalar::gt(gap, thr)) {
      case Ternary::yes:
        targets_[j].dead = true;
        ++died_far;
        break;
      case Ternary::no:
        near.push_back(j);
        break;
      case Ternary::indeterminate:
        throw PrecisionExhausted(
            "blockade near/far test undecidable; raise the precision");
    }
  }

  ++rounds_;
  awaiting_reply_ = true;
  pending_.clear();

  Slab play = pass_slab(normal_.size(), mode_);
  if (2 * died_far < alive_before) {
    // Fewer than half of the live targets died by distance, so more than
    // half have their midpoints inside the window [plo - thr, phi + thr].
    // Split it into ceil(2(1+gamma)/gamma) closed cells -- each at most
    // gamma * radius wide -- and put the maximal slab on the most crowded
    // cell. Everything in that cell dies with a positive margin, and the
    // cell holds at least a 1/(2P) > gamma/(4+6 gamma) share of the
    // survivors, which is exactly the per-round decay eps accounts for.
    const unsigned long cells = cell_count(gamma_);
    const Scalar wlo = plo - thr;
    const Scalar cell_len = (reach + thr) * 2 / static_cast<long>(cells);
    // Bucketing only decides where the slab goes, so it may run on exact
    // representative points (total order, no undecidable ties — a midpoint
    // can land exactly on a cell boundary, e.g. over a periodic orbit
    // point). Soundness lives in the per-target margin below, which never
    // trusts the bucket.
    const mpq_class wlo_q = wlo.midpoint_point().point_mpq();
    const mpq_class len_q = cell_len.midpoint_point().point_mpq();
    std::vector<std::vector<std::size_t>> members(cells);
    for (std::size_t j : near) {
      const Scalar mid = (targets_[j].offsets.lo + targets_[j].offsets.hi) / 2;
      const mpq_class rel = mid.midpoint_point().point_mpq() - wlo_q;
      unsigned long c = 0;
      if (len_q > 0 && rel > 0) {
        mpz_class idx;
        mpz_fdiv_q(idx.get_mpz_t(), mpz_class(rel.get_num() * len_q.get_den()).get_mpz_t(),
                   mpz_class(rel.get_den() * len_q.get_num()).get_mpz_t());
        c = idx >= static_cast<long>(cells) ? cells - 1 : idx.get_ui();
      }
      members[c].push_back(j);
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < cells; ++c)
      if (members[c].size() > members[best].size()) best = c;

    const Scalar centre = wlo + cell_len * static_cast<long>(best) + cell_len / 2;
    const Scalar offset = centre.midpoint_point();
    const Scalar halfwidth = clamped_halfwidth(gamma_scalar, cube.radius);
    // Each kill is owed its own margin: any reply disjoint from the slab
    // clears the hyperplane by more than halfwidth * |n|_1, so a target
    // whose midpoint provably sits within dist of the materialized offset
    // keeps a gap above halfwidth * |n|_1 - dist. Bucket members sit within
    // about half a cell of the offset, leaving roughly half the halfwidth.
    const Scalar hw_reach = (halfwidth * norm1_).lower_point();
    for (std::size_t j : members[best]) {
      const Scalar mid = (targets_[j].offsets.lo + targets_[j].offsets.hi) / 2;
      const Scalar dist = (mid - offset).abs().upper_point();
      targets_[j].dead = true;
      pending_.push_back(PendingKill{j, hw_reach - dist});
    }
    play = Slab{normal_, offset, halfwidth};
  }

  // Survivor invariant, exact: this round alive' <= floor(eps * alive), and
  // cumulatively alive(t) <= floor(eps^t * N0) (floors compose downward).
  const mpq_class eps = epsilon_mpq(gamma_);
  const mpz_class alive_now(alive());
  mpz_class round_bound = (eps.get_num() * alive_before) / eps.get_den();
  if (alive_now > round_bound)
    throw VerificationError("blockade survivor invariant violated this round");
  mpz_class num_pow, den_pow;
  mpz_pow_ui(num_pow.get_mpz_t(), mpq_numref(eps.get_mpq_t()), rounds_);
  mpz_pow_ui(den_pow.get_mpz_t(), mpq_denref(eps.get_mpq_t()), rounds_);
  mpz_class total_bound = (num_pow * initial_) / den_pow;
  if (alive_now > total_bound)
    throw VerificationError("blockade survivor invariant violated cumulatively");
  return play;
}

void AvoidIntervalsPlan::note_reply(const Cube& cube) {
  if (!awaiting_reply_) throw SpecError("no blockade move awaits a reply");
  if (cube.dimension() != normal_.size())
    throw SpecError("cube dimension does not match the blockade normal");
  awaiting_reply_ = false;
  if (pending_.empty()) return;
  const Scalar m = dot(normal_, cube.center);
  const Scalar reach = cube.radius * norm1_;
  for (const PendingKill& k : pending_) {
    const Interval& t = targets_[k.index].offsets;
    const Scalar mid = (t.lo + t.hi) / 2;
    const Scalar gap = Scalar::max(mid - (m + reach), (m - reach) - mid);
    const Scalar need = Scalar::max(k.margin, Scalar::zero(mode_));
    switch (Scalar::gt(gap, need)) {
      case Ternary::yes:
        break;
      case Ternary::no:
        throw VerificationError("blockade kill margin violated");
      case Ternary::indeterminate:
        throw PrecisionExhausted(
            "blockade kill margin undecidable; raise the precision");
    }
  }
  pending_.clear();
}

Slab blockade_move(const mpq_class& gamma, const Cube& cube,
                   std::vector<Scalar> normal, std::vector<Scalar> offsets) {
  std::vector<Interval> targets;
  targets.reserve(offsets.size());
  for (const Scalar& b : offsets) targets.push_back(Interval::closed(b, b));
  AvoidIntervalsPlan plan(gamma, std::move(normal), std::move(targets));
  return plan.move(cube);
}

Slab avoid_hyperplane_move(const mpq_class& gamma, const Cube& cube,
                           std::vector<Scalar> normal, const Scalar& offset) {
  require_gamma(gamma);
  if (normal.empty() || cube.dimension() != normal.size())
    throw SpecError("cube dimension does not match the hyperplane normal");
  const Mode& mode = normal.front().mode();
  const Scalar n1 = one_norm(normal);
  if (n1.sign() != Order::gt)
    throw SpecError("the hyperplane normal must be decisively nonzero");
  const Scalar gamma_scalar = Scalar::from_mpq(gamma, mode);
  const Scalar m = dot(normal, cube.center);
  const Scalar reach = cube.radius * n1;
  const Scalar gap = Scalar::max(offset - (m + reach), (m - reach) - offset);
  switch (Scalar::gt(gap, gamma_scalar * cube.radius * n1)) {
    case Ternary::yes:
      return pass_slab(normal.size(), mode);
    case Ternary::indeterminate:
      throw PrecisionExhausted(
          "hyperplane distance undecidable; raise the precision");
    case Ternary::no:
      break;
  }
  const Scalar halfwidth = clamped_halfwidth(gamma_scalar, cube.radius);
  return Slab{std::move(normal), offset.midpoint_point(), halfwidth};
}

// ---------------------------------------------------------------------------
// Bad intervals.
// ---------------------------------------------------------------------------

Interval moving_window(const TargetFamily& g, unsigned long n,
                       const Interval& b, const Scalar& delta) {
  if (g.dimension() != 1)
    throw SpecError("moving windows are defined for one-dimensional families");
  const Scalar c = b.midpoint();
  const Scalar y = g.evaluate(n, {c})[0];
  const Scalar half = delta + g.lipschitz() * b.length() / 2;
  return Interval::closed(y - half, y + half);
}

std::optional<Interval> pull_back_window(const CylinderNode& piece,
                                         const Interval& window) {
  const Interval image = piece.image_hull();
  const Interval hit = intersect_closed(window.closure(), image);
  if (hit.nonempty() == Ternary::no) return std::nullopt;
  // The forward composition is a single Mobius expression, injective on the
  // piece, so its exact inverse maps the clipped window back; min/max keeps
  // the endpoints ordered without needing the orientation.
  const Mobius inverse = piece.forward.inverse();
  const Scalar x1 = inverse.apply(hit.lo);
  const Scalar x2 = inverse.apply(hit.hi);
  Interval back = Interval::closed(Scalar::min(x1, x2), Scalar::max(x1, x2));
  back = intersect_closed(back, piece.hull);
  if (back.nonempty() == Ternary::no) return std::nullopt;
  // Mean value: the preimage cannot beat the weakest expansion on the piece.
  const Scalar bound = window.closure().length() / piece.min_abs_derivative();
  if (Scalar::gt(back.length(), bound) == Ternary::yes)
    throw VerificationError("pullback exceeds the expansion bound");
  return back;
}

namespace {

std::vector<CylinderNode> extend_level(
    const MapSequence& seq, const std::vector<CylinderNode>& level,
    const std::optional<Scalar>& floor = std::nullopt) {
  std::vector<CylinderNode> next;
  for (const CylinderNode& node : level) {
    for (long sym : cylinder_children_symbols(seq, node, floor)) {
      CylinderNode child = cylinder_child(seq, node, sym);
      if (child.hull.nonempty() != Ternary::no) next.push_back(std::move(child));
    }
  }
  return next;
}

// Depth-`depth` cylinder pieces over b: hulls trimmed to b from the root
// down, so every node is the closure of (cylinder intersect b).
std::vector<CylinderNode> pieces_over(const MapSequence& seq, const Interval& b,
                                      unsigned long depth) {
  CylinderNode root = cylinder_root(seq.mode());
  root.hull = intersect_closed(root.hull, b);
  std::vector<CylinderNode> level;
  if (root.hull.nonempty() != Ternary::no) level.push_back(std::move(root));
  for (unsigned long d = 0; d < depth && !level.empty(); ++d)
    level = extend_level(seq, level);
  return level;
}

}  // namespace

std::vector<Interval> bad_intervals(const MapSequence& seq,
                                    const TargetFamily& g, unsigned long n,
                                    const Interval& b, const Scalar& delta) {
  for (unsigned long t = 1; t <= n; ++t)
    if (!seq.at(t).finite_alphabet())
      throw SpecError(
          "bad-interval enumeration needs finite alphabets; the cylinder-class "
          "strategy covers the infinite families");
  const Interval window = moving_window(g, n, b, delta);
  std::vector<Interval> out;
  for (const CylinderNode& piece : pieces_over(seq, b, n)) {
    std::optional<Interval> j = pull_back_window(piece, window);
    if (j) out.push_back(std::move(*j));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Constants.
// ---------------------------------------------------------------------------

namespace {

void require_family(const MapSequence& seq, const Scalar& c1) {
  if (!(c1.mode() == seq.mode()))
    throw SpecError("map and target constants live in different modes");
  const Order sign = c1.sign();
  if (sign != Order::eq && sign != Order::gt)
    throw SpecError("the target slope bound must be nonnegative");
}

// Least t >= 1 with 2 M C2 (1 + C1) gamma^t <= 1. This makes the windows of
// one stage contract enough that every pullback obeys the certified length
// bound gamma^{s1} |B| / 2 even after the worst admissible steering delay.
unsigned long contraction_exponent_a(const Scalar& m_bound, const Scalar& c2,
                                     const Scalar& c1, const mpq_class& gamma,
                                     unsigned long cap) {
  const Mode& mode = c2.mode();
  const Scalar one = Scalar::one(mode);
  const Scalar k = m_bound * c2 * (c1 + 1) * 2;
  for (unsigned long t = 1; t <= cap; ++t) {
    if (definitely(Scalar::le(k * gamma_power(gamma, t, mode), one))) return t;
  }
  throw SpecError("window contraction exponent not found below the cap");
}

}  // namespace

ConstantsA derive_constants_a(const MapSequence& seq, const Scalar& c1,
                              const mpq_class& gamma, unsigned long cap) {
  require_gamma(gamma);
  require_family(seq, c1);
  const Mode& mode = seq.mode();
  const std::optional<Scalar> sup = seq.sup_abs_derivative();
  if (!sup)
    throw SpecError(
        "the derivative-milestone strategy needs a bounded derivative; use the "
        "cylinder-class strategy instead");
  const Scalar c2 = seq.distortion();
  const unsigned long s2 = contraction_exponent_a(*sup, c2, c1, gamma, cap);

  ConstantsA out;
  out.gamma = gamma;
  out.s2 = s2;
  out.sup_derivative = *sup;
  const Scalar need = c2 * (*sup);
  bool found = false;
  for (unsigned long n = 1; n <= cap; ++n) {
    const unsigned long s1 = rounds_to_clear(gamma, n + 1);
    const unsigned long s = 2 + s1 + s2;
    const Scalar lhs = seq.min_expansion(n) * gamma_power(gamma, s, mode);
    if (definitely(Scalar::gt(lhs, need))) {
      out.depth = n;
      out.s1 = s1;
      out.s = s;
      found = true;
      break;
    }
  }
  if (!found)
    throw SpecError("no depth satisfies the expansion inequality below the cap");

  const MapSequence::CylinderFloor floor = seq.min_cylinder_length(out.depth);
  out.min_cyl = floor.length;
  out.certified = floor.certified;
  const Scalar inv_sup = Scalar::one(mode) / *sup;
  out.wait_bound =
      floor.length * Scalar::min(gamma_power(gamma, out.s, mode), inv_sup);
  return out;
}

ConstantsA empirical_constants_a(const MapSequence& seq, const Scalar& c1,
                                 const mpq_class& gamma, unsigned long depth,
                                 unsigned long s) {
  require_gamma(gamma);
  require_family(seq, c1);
  if (depth == 0 || s == 0) throw SpecError("degenerate strategy constants");
  const Mode& mode = seq.mode();
  const std::optional<Scalar> sup = seq.sup_abs_derivative();
  if (!sup)
    throw SpecError(
        "the derivative-milestone strategy needs a bounded derivative; use the "
        "cylinder-class strategy instead");
  ConstantsA out;
  out.gamma = gamma;
  out.depth = depth;
  out.s1 = rounds_to_clear(gamma, depth + 1);
  out.s2 = contraction_exponent_a(*sup, seq.distortion(), c1, gamma, 4096);
  out.s = s;
  out.sup_derivative = *sup;
  const MapSequence::CylinderFloor floor = seq.min_cylinder_length(depth);
  out.min_cyl = floor.length;
  const Scalar inv_sup = Scalar::one(mode) / *sup;
  out.wait_bound =
      floor.length * Scalar::min(gamma_power(gamma, s, mode), inv_sup);
  out.certified = false;
  return out;
}

namespace {

// Least t >= 1 with gamma^{2t-1} * 2 C1 C2 gamma^{s1} < 1 and
// C1 C2 gamma^t <= (1 - gamma)/2. The first keeps the stage-0 windows
// inside the relabeled cube's reach; the second keeps every later window
// from outrunning its cylinder class.
unsigned long contraction_exponent_b(const Scalar& c1, const Scalar& c2,
                                     const mpq_class& gamma, unsigned long s1,
                                     unsigned long cap) {
  const Mode& mode = c2.mode();
  const Scalar one = Scalar::one(mode);
  const Scalar lead = c1 * c2 * 2 * gamma_power(gamma, s1, mode);
  const Scalar slope = c1 * c2;
  const Scalar half_gap = Scalar::from_mpq(mpq_class(1 - gamma) / 2, mode);
  for (unsigned long t = 1; t <= cap; ++t) {
    const bool first =
        definitely(Scalar::lt(lead * gamma_power(gamma, 2 * t - 1, mode), one));
    const bool second =
        definitely(Scalar::le(slope * gamma_power(gamma, t, mode), half_gap));
    if (first && second) return t;
  }
  throw SpecError("window contraction exponent not found below the cap");
}

Scalar window_factor_b(const Scalar& c1, const Scalar& c2,
                       const mpq_class& gamma, unsigned long s2,
                       unsigned long s) {
  const Mode& mode = c2.mode();
  const Scalar one = Scalar::one(mode);
  const Scalar factor =
      (one / (c2 * gamma_power(gamma, s2 - 1, mode) * 2) -
       c1 * gamma_power(gamma, s, mode)) /
      2;
  if (factor.sign() != Order::gt)
    throw SpecError("the window factor must be decisively positive");
  return factor;
}

}  // namespace

ConstantsB derive_constants_b(const MapSequence& seq, const Scalar& c1,
                              const mpq_class& gamma, unsigned long cap) {
  require_gamma(gamma);
  require_family(seq, c1);
  const Mode& mode = seq.mode();
  const Scalar c2 = seq.distortion();
  const Scalar c3 = c2.pow_ui(3);

  ConstantsB out;
  out.gamma = gamma;
  bool found = false;
  for (unsigned long n = 1; n <= cap; ++n) {
    const unsigned long s1 = rounds_to_clear(gamma, 2 * n);
    const unsigned long s2 = contraction_exponent_b(c1, c2, gamma, s1, cap);
    const unsigned long s = s1 + s2;
    const Scalar lhs = seq.min_expansion(n) * gamma_power(gamma, s, mode);
    if (definitely(Scalar::gt(lhs, c3))) {
      out.depth = n;
      out.s1 = s1;
      out.s2 = s2;
      out.s = s;
      found = true;
      break;
    }
  }
  if (!found)
    throw SpecError("no depth satisfies the expansion inequality below the cap");
  out.delta_factor = window_factor_b(c1, c2, gamma, out.s2, out.s);
  out.certified = true;
  return out;
}

ConstantsB empirical_constants_b(const MapSequence& seq, const Scalar& c1,
                                 const mpq_class& gamma, unsigned long depth,
                                 unsigned long s) {
  require_gamma(gamma);
  require_family(seq, c1);
  if (depth == 0 || s == 0) throw SpecError("degenerate strategy constants");
  const Scalar c2 = seq.distortion();
  ConstantsB out;
  out.gamma = gamma;
  out.depth = depth;
  out.s1 = rounds_to_clear(gamma, 2 * depth);
  out.s2 = contraction_exponent_b(c1, c2, gamma, out.s1, 4096);
  out.s = s;
  out.delta_factor = window_factor_b(c1, c2, gamma, out.s2, s);
  out.certified = false;
  return out;
}

// ---------------------------------------------------------------------------
// Reports.
// ---------------------------------------------------------------------------

namespace {

nlohmann::ordered_json scalar_or_null(const std::optional<Scalar>& s) {
  if (!s) return nlohmann::ordered_json();
  return nlohmann::ordered_json(s->str());
}

}  // namespace

nlohmann::ordered_json StrategyAReport::to_json() const {
  nlohmann::ordered_json out;
  out["wait_rounds"] = wait_rounds;
  out["rho1"] = scalar_or_null(rho1);
  out["rho2"] = scalar_or_null(rho2);
  out["delta"] = scalar_or_null(delta);
  out["stages"] = nlohmann::ordered_json::array();
  for (const StageReportA& s : stages) {
    nlohmann::ordered_json j;
    j["stage"] = s.stage;
    j["m_k"] = s.m_k;
    j["steer_rounds"] = s.steer_rounds;
    j["plan_rounds"] = s.plan_rounds;
    j["intervals"] = s.intervals;
    j["max_len_ratio"] = s.max_len_ratio;
    out["stages"].push_back(std::move(j));
  }
  return out;
}

nlohmann::ordered_json StrategyBReport::to_json() const {
  nlohmann::ordered_json out;
  out["wait_rounds"] = wait_rounds;
  out["rho1"] = scalar_or_null(rho1);
  out["delta"] = scalar_or_null(delta);
  out["stages"] = nlohmann::ordered_json::array();
  for (const StageReportB& s : stages) {
    nlohmann::ordered_json j;
    j["stage"] = s.stage;
    j["start_round"] = s.start_round;
    j["plan_rounds"] = s.plan_rounds;
    j["intervals"] = s.intervals;
    j["skipped_words"] = s.skipped_words;
    j["words"] = s.words;
    out["stages"].push_back(std::move(j));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Strategy machines.
// ---------------------------------------------------------------------------

namespace {

// Shared by both machines: acknowledge the pending blockade reply, play the
// next blockade move, or report the plan finished.
struct DodgeDriver {
  std::optional<AvoidIntervalsPlan> plan;
  std::vector<Interval> plan_targets;
  bool awaiting = false;

  void open(const mpq_class& gamma, const Mode& mode,
            std::vector<Interval> targets) {
    plan_targets = std::move(targets);
    plan.emplace(gamma, std::vector<Scalar>{Scalar::one(mode)}, plan_targets);
    awaiting = false;
  }

  // Returns the move to play, or nullopt when the plan has completed (in
  // which case every target has been verified separated from b).
  std::optional<Slab> drive(const Cube& cube, const Interval& b) {
    if (awaiting) {
      plan->note_reply(cube);
      awaiting = false;
    }
    if (!plan->done()) {
      Slab s = plan->move(cube);
      awaiting = true;
      return s;
    }
    for (const Interval& j : plan_targets) {
      const Ternary apart =
          ternary_or(Scalar::gt(j.lo, b.hi), Scalar::lt(j.hi, b.lo));
      if (apart == Ternary::yes) continue;
      if (apart == Ternary::no)
        throw VerificationError(
            "a bad interval still meets the cube after its blockade");
      throw PrecisionExhausted(
          "bad-interval separation undecidable; raise the precision");
    }
    return std::nullopt;
  }

  unsigned long rounds_played() const { return plan->rounds_played(); }

  void close() {
    plan.reset();
    plan_targets.clear();
  }
};

struct MachineA {
  MapSequence seq;
  TargetFamily targets;
  ConstantsA cst;
  std::shared_ptr<StrategyAReport> report;
  Mode mode;
  Scalar gamma_scalar;

  enum class Phase { wait, steer, dodge, fill };
  Phase phase = Phase::wait;
  bool first_steer = true;
  unsigned long stage = 0;
  bool have_m_prev = false;
  unsigned long m_prev = 0;
  unsigned long m_cur = 0;
  unsigned long steer_depth = 0;
  unsigned long steer_rounds = 0;  // per stage, for the report
  unsigned long leg_rounds = 0;    // per steering target depth, for the cap
  Scalar rho2, delta, fill_threshold;
  DodgeDriver dodge;
  StageReportA stage_report;

  MachineA(MapSequence s, TargetFamily g, ConstantsA c,
           std::shared_ptr<StrategyAReport> r)
      : seq(std::move(s)),
        targets(std::move(g)),
        cst(std::move(c)),
        report(r ? std::move(r) : std::make_shared<StrategyAReport>()),
        mode(seq.mode()),
        gamma_scalar(Scalar::from_mpq(cst.gamma, mode)) {
    require_gamma(cst.gamma);
    if (targets.dimension() != 1)
      throw SpecError("orbit dodging works on one-dimensional families");
    if (!(targets.mode() == mode))
      throw SpecError("map and target modes differ");
    if (cst.depth == 0 || cst.s == 0)
      throw SpecError("degenerate strategy constants");
  }

  // First time n at which the steepest derivative over the pieces of b
  // exceeds gamma^{-(stage+1)s} / M. Monotone in n (every branch expands),
  // and never more than `depth` past the previous milestone: one extra
  // depth-N leg of expansion crosses a gamma^{-s} threshold gap by the
  // defining inequality of N.
  unsigned long find_milestone(const Interval& b) {
    const unsigned long start = have_m_prev ? m_prev : 1;
    const unsigned long cap = (have_m_prev ? m_prev : 0) + cst.depth;
    const mpq_class inv_gamma(cst.gamma.get_den(), cst.gamma.get_num());
    const Scalar threshold =
        Scalar::from_mpq(mpq_pow(inv_gamma, (stage + 1) * cst.s), mode) /
        cst.sup_derivative;
    std::vector<CylinderNode> level = pieces_over(seq, b, start);
    for (unsigned long n = start;;) {
      if (level.empty()) return n;  // every orbit of b has already escaped
      Scalar sup = level.front().max_abs_derivative();
      for (std::size_t i = 1; i < level.size(); ++i)
        sup = Scalar::max(sup, level[i].max_abs_derivative());
      const Ternary hit = Scalar::gt(sup, threshold);
      if (hit == Ternary::yes) return n;
      if (hit == Ternary::indeterminate && cst.certified)
        throw PrecisionExhausted(
            "derivative milestone undecidable; raise the precision");
      ++n;
      if (n > cap)
        throw VerificationError("derivative milestone gap exceeded its bound");
      level = extend_level(seq, level);
    }
  }

  Slab steering_move(const std::vector<CylinderNode>& pieces,
                     const Cube& cube) {
    ++steer_rounds;
    ++leg_rounds;
    if (leg_rounds > 8) {
      if (mode.kind == Mode::Kind::rational)
        throw VerificationError("steering failed to isolate one cylinder");
      throw PrecisionExhausted(
          "steering could not separate cylinders; raise the precision");
    }
    // A cut is valid when at least one piece lies inside each closed
    // half-line bounded by the slab the cut will carry: Bob's reply is
    // strictly disjoint from the slab, so whichever side he keeps, the
    // pieces counted on the far side stop meeting the cube and the piece
    // count strictly drops. Classifying against the slab edges rather
    // than the bare hyperplane keeps the comparisons decidable when two
    // adjacent hulls name their shared endpoint through different ball
    // enclosures: the halfwidth dwarfs any enclosure width. Hull
    // endpoints are the candidates (same-depth cylinders only ever touch
    // at endpoints).
    const Scalar halfwidth = clamped_halfwidth(gamma_scalar, cube.radius);
    std::optional<Scalar> cut;
    std::size_t best_balance = 0;
    for (const CylinderNode& c : pieces) {
      for (const Scalar& p : {c.hull.lo, c.hull.hi}) {
        const Scalar offset = p.midpoint_point();
        std::size_t left = 0, right = 0;
        for (const CylinderNode& other : pieces) {
          if (definitely(Scalar::le(other.hull.hi, offset + halfwidth)))
            ++left;
          if (definitely(Scalar::ge(other.hull.lo, offset - halfwidth)))
            ++right;
        }
        const std::size_t balance = std::min(left, right);
        if (balance > best_balance) {
          best_balance = balance;
          cut = offset;
        }
      }
    }
    if (!cut) {
      if (mode.kind == Mode::Kind::rational)
        throw VerificationError("steering found no separating cut");
      throw PrecisionExhausted(
          "steering cut undecidable; raise the precision");
    }
    return Slab{{Scalar::one(mode)}, *cut, halfwidth};
  }

  void build_plan(const std::vector<CylinderNode>& pieces, const Interval& b) {
    std::vector<Interval> plan_targets;
    double max_ratio = 0;
    if (!pieces.empty()) {
      const std::vector<long>& word = pieces.front().word;
      const Scalar certified_bound =
          gamma_power(cst.gamma, cst.s1, mode) * b.length() / 2;
      const Scalar ratio_den = gamma_scalar * b.length() / 2;
      CylinderNode node = cylinder_root(mode);
      node.hull = intersect_closed(node.hull, b);
      for (unsigned long i = 0; i < word.size(); ++i) {
        node = cylinder_child(seq, node, word[i]);
        if (node.hull.nonempty() == Ternary::no) break;
        const unsigned long time = i + 1;
        if (time < m_cur) continue;
        const Interval w = moving_window(targets, time, b, delta);
        std::optional<Interval> j = pull_back_window(node, w);
        if (!j) continue;
        if (Scalar::gt(j->length(), certified_bound) == Ternary::yes &&
            cst.certified)
          throw VerificationError(
              "a bad interval exceeds its certified length bound");
        max_ratio = std::max(max_ratio, (j->length() / ratio_den).to_double());
        plan_targets.push_back(std::move(*j));
      }
    }
    stage_report.intervals = plan_targets.size();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", max_ratio);
    stage_report.max_len_ratio = buf;
    dodge.open(cst.gamma, mode, std::move(plan_targets));
    if (dodge.plan->round_budget() > cst.s1)
      throw VerificationError("blockade budget exceeds its stage bound");
  }

  std::optional<Slab> next(const GameView& view) {
    const Cube& cube = view.current;
    if (cube.dimension() != 1)
      throw SpecError("orbit dodging works in dimension one");
    const Interval b = cube.axis_interval(0);
    for (;;) {
      switch (phase) {
        case Phase::wait: {
          if (!definitely(Scalar::lt(cube.radius, cst.wait_bound)))
            return pass_slab(1, mode);
          report->wait_rounds = view.round;
          report->rho1 = cube.radius;
          steer_depth = cst.depth;
          steer_rounds = 0;
          leg_rounds = 0;
          first_steer = true;
          phase = Phase::steer;
          break;
        }
        case Phase::steer: {
          const std::vector<CylinderNode> pieces =
              pieces_over(seq, b, steer_depth);
          if (pieces.size() > 1) return steering_move(pieces, cube);
          if (first_steer) {
            // The cube sits inside one starting cylinder: relabel it, fix
            // the protection radius for the whole run, and aim for the
            // first derivative milestone.
            first_steer = false;
            rho2 = cube.radius;
            delta = gamma_scalar * rho2;
            report->rho2 = rho2;
            report->delta = delta;
            stage = 0;
            m_cur = find_milestone(b);
            stage_report = StageReportA{};
            stage_report.stage = 0;
            stage_report.m_k = m_cur;
            steer_depth = m_cur + cst.depth;
            leg_rounds = 0;
            break;
          }
          stage_report.steer_rounds = steer_rounds;
          build_plan(pieces, b);
          phase = Phase::dodge;
          break;
        }
        case Phase::dodge: {
          std::optional<Slab> move = dodge.drive(cube, b);
          if (move) return move;
          stage_report.plan_rounds = dodge.rounds_played();
          report->stages.push_back(stage_report);
          dodge.close();
          m_prev = m_cur;
          have_m_prev = true;
          ++stage;
          fill_threshold =
              gamma_power(cst.gamma, stage * cst.s, mode) * rho2;
          phase = Phase::fill;
          break;
        }
        case Phase::fill: {
          if (!definitely(Scalar::lt(cube.radius, fill_threshold)))
            return pass_slab(1, mode);
          m_cur = find_milestone(b);
          stage_report = StageReportA{};
          stage_report.stage = stage;
          stage_report.m_k = m_cur;
          steer_depth = m_cur + cst.depth;
          steer_rounds = 0;
          leg_rounds = 0;
          phase = Phase::steer;
          break;
        }
      }
    }
  }
};

struct MachineB {
  MapSequence seq;
  TargetFamily targets;
  ConstantsB cst;
  std::shared_ptr<StrategyBReport> report;
  Mode mode;
  Scalar wait_threshold;

  enum class Phase { wait, dodge, fill };
  Phase phase = Phase::wait;
  unsigned long stage = 0;
  Scalar rho1, delta, fill_threshold;
  DodgeDriver dodge;
  StageReportB stage_report;

  MachineB(MapSequence s, TargetFamily g, ConstantsB c,
           std::shared_ptr<StrategyBReport> r)
      : seq(std::move(s)),
        targets(std::move(g)),
        cst(std::move(c)),
        report(r ? std::move(r) : std::make_shared<StrategyBReport>()),
        mode(seq.mode()),
        wait_threshold(gamma_power(cst.gamma, 2 * cst.s, mode)) {
    require_gamma(cst.gamma);
    if (targets.dimension() != 1)
      throw SpecError("orbit dodging works on one-dimensional families");
    if (!(targets.mode() == mode))
      throw SpecError("map and target modes differ");
    if (cst.depth == 0 || cst.s == 0)
      throw SpecError("degenerate strategy constants");
  }

  static bool is_prefix(const std::vector<long>& u, const std::vector<long>& v) {
    if (u.size() >= v.size()) return false;
    return std::equal(u.begin(), u.end(), v.begin());
  }

  void start_stage(unsigned long round_index, const Interval& b) {
    stage_report = StageReportB{};
    stage_report.stage = stage;
    stage_report.start_round = round_index;
    // Words of the current length class: gamma^{(k+2)s} < |I_u| <=
    // gamma^{(k+1)s}, cylinder meeting the cube. Anything at or below the
    // lower bound is pruned outright -- its children are shorter still --
    // which also keeps the infinite families' child lists finite.
    const Scalar lower = gamma_power(cst.gamma, (stage + 2) * cst.s, mode);
    const Scalar upper = gamma_power(cst.gamma, (stage + 1) * cst.s, mode);
    std::vector<CylinderNode> collected;
    std::vector<CylinderNode> stack{cylinder_root(mode)};
    while (!stack.empty()) {
      CylinderNode node = std::move(stack.back());
      stack.pop_back();
      if (node.depth() > 0) {
        const Ternary meets = intersect_closed(node.hull, b).nonempty();
        if (meets == Ternary::no) continue;
        const Scalar len = node.hull.length();
        const Ternary below = Scalar::le(len, lower);
        if (below == Ternary::yes) continue;
        const Ternary in_class = Scalar::le(len, upper);
        if (below == Ternary::indeterminate ||
            in_class == Ternary::indeterminate) {
          if (cst.certified)
            throw PrecisionExhausted(
                "cylinder class membership undecidable; raise the precision");
          ++stage_report.skipped_words;
        } else if (in_class == Ternary::yes) {
          if (meets == Ternary::indeterminate && cst.certified)
            throw PrecisionExhausted(
                "cylinder overlap undecidable; raise the precision");
          // An indeterminate overlap is collected anyway: dodging one
          // spurious word is cheap, missing a real one is not.
          collected.push_back(node);
        }
      }
      for (long sym : cylinder_children_symbols(seq, node, lower)) {
        CylinderNode child = cylinder_child(seq, node, sym);
        if (child.hull.nonempty() != Ternary::no)
          stack.push_back(std::move(child));
      }
    }

    if (collected.size() > 2 * cst.depth)
      throw VerificationError("stage word count exceeds its budget");
    for (const CylinderNode& u : collected)
      for (const CylinderNode& v : collected)
        if (is_prefix(u.word, v.word) &&
            v.word.size() - u.word.size() >= cst.depth)
          throw VerificationError("nested same-class words too far apart");

    std::vector<Interval> plan_targets;
    for (const CylinderNode& node : collected) {
      stage_report.words.push_back(node.word);
      const CylinderNode piece{node.word, intersect_closed(node.hull, b),
                               node.forward};
      if (piece.hull.nonempty() == Ternary::no) continue;
      const Interval w = moving_window(targets, node.depth(), b, delta);
      std::optional<Interval> j = pull_back_window(piece, w);
      if (j) plan_targets.push_back(std::move(*j));
    }
    stage_report.intervals = plan_targets.size();
    dodge.open(cst.gamma, mode, std::move(plan_targets));
    if (dodge.plan->round_budget() > cst.s1)
      throw VerificationError("blockade budget exceeds its stage bound");
  }

  std::optional<Slab> next(const GameView& view) {
    const Cube& cube = view.current;
    if (cube.dimension() != 1)
      throw SpecError("orbit dodging works in dimension one");
    const Interval b = cube.axis_interval(0);
    for (;;) {
      switch (phase) {
        case Phase::wait: {
          if (!definitely(Scalar::lt(cube.radius, wait_threshold)))
            return pass_slab(1, mode);
          report->wait_rounds = view.round;
          rho1 = cube.radius;
          delta = cst.delta_factor * rho1;
          report->rho1 = rho1;
          report->delta = delta;
          stage = 0;
          start_stage(view.round, b);
          phase = Phase::dodge;
          break;
        }
        case Phase::dodge: {
          std::optional<Slab> move = dodge.drive(cube, b);
          if (move) return move;
          stage_report.plan_rounds = dodge.rounds_played();
          report->stages.push_back(stage_report);
          dodge.close();
          ++stage;
          fill_threshold = gamma_power(cst.gamma, stage * cst.s, mode) * rho1;
          phase = Phase::fill;
          break;
        }
        case Phase::fill: {
          if (!definitely(Scalar::lt(cube.radius, fill_threshold)))
            return pass_slab(1, mode);
          start_stage(view.round, b);
          phase = Phase::dodge;
          break;
        }
      }
    }
  }
};

}  // namespace

AliceCallback strategy_a_alice(MapSequence seq, TargetFamily g,
                               ConstantsA constants,
                               std::shared_ptr<StrategyAReport> report) {
  auto machine = std::make_shared<MachineA>(std::move(seq), std::move(g),
                                            std::move(constants),
                                            std::move(report));
  return [machine](const GameView& view) { return machine->next(view); };
}

AliceCallback strategy_b_alice(MapSequence seq, TargetFamily g,
                               ConstantsB constants,
                               std::shared_ptr<StrategyBReport> report) {
  auto machine = std::make_shared<MachineB>(std::move(seq), std::move(g),
                                            std::move(constants),
                                            std::move(report));
  return [machine](const GameView& view) { return machine->next(view); };
}

// ---------------------------------------------------------------------------
// Orbit verification.
// ---------------------------------------------------------------------------

Scalar min_orbit_distance(const MapSequence& seq, const TargetFamily& g,
                          const Scalar& x, unsigned long horizon) {
  if (g.dimension() != 1)
    throw SpecError("orbit distances are defined for one-dimensional families");
  if (horizon == 0) throw SpecError("the verification horizon must be positive");
  const std::vector<Scalar> path = orbit(seq, x, horizon);
  std::optional<Scalar> best;
  for (unsigned long n = 1; n <= horizon; ++n) {
    const Scalar target = g.evaluate(n, {x})[0];
    const Scalar d = (path[n] - target).abs();
    best = best ? Scalar::min(*best, d) : d;
  }
  return *best;
}

}  // namespace absgame
