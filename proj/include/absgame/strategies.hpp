#ifndef ABSGAME_STRATEGIES_HPP
#define ABSGAME_STRATEGIES_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "absgame/dynamics.hpp"
#include "absgame/game.hpp"
#include "absgame/targets.hpp"

namespace absgame {

// ---------------------------------------------------------------------------
// Blockade core: dodging a batch of parallel hyperplanes.
// ---------------------------------------------------------------------------

// Survival fraction of one blockade round: eps = 1 - gamma / (4 + 6 gamma).
// At most this fraction of the hyperplanes that still threaten the cube is
// left threatening after the round (the rest are dead for good).
Scalar epsilon_of_gamma(const Scalar& gamma);

// Least t with eps^t * count < 1, i.e. the round budget after which a
// blockade plan over `count` hyperplanes has killed every one. Computed
// with exact integer powers; never with floating point, since the answer
// regularly hinges on razor-thin comparisons like 3 * 25^28 vs 26^28.
unsigned long rounds_to_clear(const mpq_class& gamma, unsigned long count);

// Runs the blockade against a family of parallel thickened hyperplanes
// { x : <normal, x> in offsets[j] } (degenerate intervals are plain
// hyperplanes). Each round:
//   - every target whose distance from the cube already exceeds
//     gamma * radius is marked dead (it can never again come within the
//     legality reach of future cubes);
//   - if at least half of the still-live targets just died, Alice passes;
//   - otherwise the window around the cube's projection is split into
//     ceil(2(1+gamma)/gamma) equal closed cells, and Alice plays the
//     maximal slab at the midpoint of the most crowded cell, killing all
//     of the cell's targets with a safety margin.
// After Bob replies, note_reply verifies the margins and the survivor
// invariant alive(t) <= floor(eps^t * initial) exactly.
class AvoidIntervalsPlan {
 public:
  AvoidIntervalsPlan(mpq_class gamma, std::vector<Scalar> normal,
                     std::vector<Interval> offsets);

  // Alice's move for the current cube. Requires the previous move to have
  // been acknowledged through note_reply.
  Slab move(const Cube& cube);
  // Feed Bob's reply back so kill margins and the survivor invariant can
  // be checked; throws VerificationError when either fails.
  void note_reply(const Cube& cube);

  bool done() const { return alive() == 0; }
  bool awaiting_reply() const { return awaiting_reply_; }
  unsigned long alive() const;
  unsigned long rounds_played() const { return rounds_; }
  unsigned long round_budget() const { return budget_; }

 private:
  struct Target {
    Interval offsets;  // raw <normal, x> values, closed
    bool dead = false;
  };
  struct PendingKill {
    std::size_t index;
    Scalar margin;  // distance the new cube must clear, raw units; may be 0
  };

  mpq_class gamma_;
  Mode mode_;
  std::vector<Scalar> normal_;
  Scalar norm1_;
  std::vector<Target> targets_;
  unsigned long initial_;
  unsigned long budget_;
  unsigned long rounds_ = 0;
  bool awaiting_reply_ = false;
  std::vector<PendingKill> pending_;
};

// One-shot blockade move with no bookkeeping (interactive play, policies).
Slab blockade_move(const mpq_class& gamma, const Cube& cube,
                   std::vector<Scalar> normal, std::vector<Scalar> offsets);

// Slab pinned on a single hyperplane when it is within reach, a pass
// otherwise. One round kills the hyperplane outright.
Slab avoid_hyperplane_move(const mpq_class& gamma, const Cube& cube,
                           std::vector<Scalar> normal, const Scalar& offset);

// ---------------------------------------------------------------------------
// Bad intervals: pullbacks of the moving-point windows.
// ---------------------------------------------------------------------------

// The fattened window around the moving point at time n, evaluated at the
// interval's midpoint: [g_n(c) - delta - C1 |B|/2, g_n(c) + delta + C1 |B|/2].
// Any x in B with |T_(1,n)(x) - g_n(x)| <= delta has T_(1,n)(x) in here.
Interval moving_window(const TargetFamily& g, unsigned long n,
                       const Interval& b, const Scalar& delta);

// Pulls the window back through the piece's forward composition: the set
// { x in piece : T_(1,n)(x) in window } as a closed interval, or nullopt
// when the window misses the piece's image. The exact Mobius inverse makes
// |J| <= |window| / min |T'| hold by construction; it is asserted anyway.
std::optional<Interval> pull_back_window(const CylinderNode& piece,
                                         const Interval& window);

// All bad intervals of time n over the interval b: one pullback for every
// depth-n cylinder piece meeting b. Union-complete: every x in b with
// |T_(1,n)(x) - g_n(c)| <= delta lies in one of them.
std::vector<Interval> bad_intervals(const MapSequence& seq,
                                    const TargetFamily& g, unsigned long n,
                                    const Interval& b, const Scalar& delta);

// ---------------------------------------------------------------------------
// Certified constants.
// ---------------------------------------------------------------------------

// Parameters of the twisted-point dodging strategy (bounded derivative).
struct ConstantsA {
  mpq_class gamma;
  unsigned long depth = 0;  // N: window width and steering depth unit
  unsigned long s1 = 0;     // blockade budget for N+1 intervals
  unsigned long s2 = 0;     // window-contraction exponent
  unsigned long s = 0;      // stage modulus, 2 + s1 + s2 when derived
  Scalar sup_derivative;    // M
  Scalar min_cyl;           // depth-N cylinder length floor
  Scalar wait_bound;        // rho_1 threshold: min_cyl * min(gamma^s, 1/M)
  bool certified = false;
};

// Smallest admissible constants: N minimal (up to cap) with
// min_expansion(N) * gamma^s > C2 * M, where s = 2 + s1(N) + s2,
// s1(N) = rounds_to_clear(N + 1) and s2 is the least t >= 1 with
// 2 M C2 (1 + C1) gamma^t <= 1.
// Throws SpecError when the map has unbounded derivative or no N fits.
ConstantsA derive_constants_a(const MapSequence& seq, const Scalar& c1,
                              const mpq_class& gamma, unsigned long cap = 512);

// Hand-picked (N, s) for empirical runs: the run itself, not the
// derivation, carries the evidence. Everything else is filled in as in
// the certified case; `certified` is false and the strategy records
// rather than enforces the certified-only inequalities.
ConstantsA empirical_constants_a(const MapSequence& seq, const Scalar& c1,
                                 const mpq_class& gamma, unsigned long depth,
                                 unsigned long s);

// Parameters of the cylinder-class dodging strategy (distortion only).
struct ConstantsB {
  mpq_class gamma;
  unsigned long depth = 0;  // N: per-stage word budget is 2N
  unsigned long s1 = 0;     // blockade budget for 2N intervals
  unsigned long s2 = 0;
  unsigned long s = 0;      // class modulus, s1 + s2 when derived
  Scalar delta_factor;      // delta = delta_factor * rho_1
  bool certified = false;
};

// Smallest admissible constants: N minimal (up to cap) with
// min_expansion(N) > C2^3 * gamma^{-s}, where s = s1(N) + s2,
// s1(N) = rounds_to_clear(2N) and s2 is the least t >= 1 with
// gamma^{2t-1} * 2 C1 C2 gamma^{s1} < 1 and C1 C2 gamma^t <= (1-gamma)/2.
ConstantsB derive_constants_b(const MapSequence& seq, const Scalar& c1,
                              const mpq_class& gamma, unsigned long cap = 512);

ConstantsB empirical_constants_b(const MapSequence& seq, const Scalar& c1,
                                 const mpq_class& gamma, unsigned long depth,
                                 unsigned long s);

// ---------------------------------------------------------------------------
// The two winning strategies, packaged as Alice callbacks.
// ---------------------------------------------------------------------------

// Per-stage records: enough to audit the gap inequality m_{k+1} - m_k <= N,
// the word budgets, and the blockade effort after a run.
struct StageReportA {
  unsigned long stage = 0;
  unsigned long m_k = 0;
  unsigned long steer_rounds = 0;
  unsigned long plan_rounds = 0;
  unsigned long intervals = 0;
  std::string max_len_ratio;  // max |J| / (gamma^{s1} |B| / 2), exact
};

struct StrategyAReport {
  unsigned long wait_rounds = 0;
  std::optional<Scalar> rho1, rho2, delta;
  std::vector<StageReportA> stages;
  nlohmann::ordered_json to_json() const;
};

// Dodges the moving points g_n along the orbit: waits until the cube is
// deep enough, steers it into a single cylinder, and per stage k blockades
// the pullbacks of the delta-windows at times m_k .. m_k + N, where m_k is
// the first time the derivative along the cube exceeds gamma^{-(k+1)s}/M.
// The limit point x of any play then has |T_(1,n)(x) - g_n(x)| > 0 for
// every n past the first stage, with delta = gamma * rho_2 realized.
AliceCallback strategy_a_alice(MapSequence seq, TargetFamily g,
                               ConstantsA constants,
                               std::shared_ptr<StrategyAReport> report = {});

struct StageReportB {
  unsigned long stage = 0;
  unsigned long start_round = 0;
  unsigned long plan_rounds = 0;
  unsigned long intervals = 0;
  std::vector<std::vector<long>> words;
  unsigned long skipped_words = 0;  // ball mode, empirical runs only
};

struct StrategyBReport {
  unsigned long wait_rounds = 0;
  std::optional<Scalar> rho1, delta;
  std::vector<StageReportB> stages;
  nlohmann::ordered_json to_json() const;
};

// Dodges the moving points through cylinder-length classes: stage k fires
// when the radius drops below gamma^{ks} * rho_1 and blockades the window
// pullbacks of every word u with gamma^{(k+2)s} < |I_u| <= gamma^{(k+1)s}
// meeting the cube (at most 2N of them). Needs only bounded distortion,
// so it covers the full-branch infinite families as well.
AliceCallback strategy_b_alice(MapSequence seq, TargetFamily g,
                               ConstantsB constants,
                               std::shared_ptr<StrategyBReport> report = {});

// ---------------------------------------------------------------------------
// Orbit verification.
// ---------------------------------------------------------------------------

// min over 1 <= n <= horizon of |T_(1,n)(x) - g_n(x)|: the quantity the
// dodging strategies drive away from zero. Exact in rational mode.
Scalar min_orbit_distance(const MapSequence& seq, const TargetFamily& g,
                          const Scalar& x, unsigned long horizon);

}  // namespace absgame

#endif  // ABSGAME_STRATEGIES_HPP
