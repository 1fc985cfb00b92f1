#ifndef ABSGAME_DYNAMICS_HPP
#define ABSGAME_DYNAMICS_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "absgame/geometry.hpp"
#include "absgame/scalar.hpp"

namespace absgame {

// Fractional linear map x -> (a x + b) / (c x + d). Affine branches have
// c = 0, d = 1; keeping everything in matrix form makes composition along a
// cylinder word a 2x2 product and keeps rational inputs exactly rational.
struct Mobius {
  Scalar a, b, c, d;

  static Mobius identity(const Mode& mode);
  static Mobius affine(const Scalar& slope, const Scalar& intercept);

  Scalar apply(const Scalar& x) const;
  // (ad - bc) / (cx + d)^2, signed.
  Scalar derivative(const Scalar& x) const;
  Scalar determinant() const;
  Mobius compose(const Mobius& inner) const;  // (*this) after inner
  Mobius inverse() const;                     // adjugate; same fixed scale
};

// One monotone branch of a piecewise map: an open (or half-open) domain on
// which the Mobius expression inverts the dynamics exactly.
struct Branch {
  long symbol = 0;
  Interval domain;
  Mobius map;
  bool increasing = true;

  // Closed hull of the image of the closed domain hull.
  Interval image_hull() const;
  // min/max of |derivative| over the closed domain hull. |T'| is monotone
  // on a pole-free interval, so both are attained at endpoints.
  Scalar min_abs_derivative() const;
  Scalar max_abs_derivative() const;
};

// An expanding interval map given by countably many monotone branches.
// Finite families store their branches; the classical infinite families
// (Gauss, Lueroth) synthesize branch k on demand, ordered so that domain
// lengths are non-increasing in the symbol.
class PiecewiseMap {
 public:
  enum class Kind { affine_family, gauss, luroth };

  // x -> beta x - k on (k/beta, (k+1)/beta), k = 0..ceil(beta)-1 (the last
  // branch is truncated at 1 when beta is not an integer). Requires beta > 1.
  static PiecewiseMap beta(const Scalar& b);
  static PiecewiseMap times(long m, const Mode& mode);
  // Branch i sends (breakpoints[i], breakpoints[i+1]) to (0, ...) with the
  // given slope: x -> slopes[i] * (x - breakpoints[i]). Breakpoints must
  // start at 0, end at 1, and increase; slopes must be >= 1 and no branch
  // image may leave [0,1].
  static PiecewiseMap piecewise_affine(std::vector<Scalar> breakpoints,
                                       std::vector<Scalar> slopes);
  static PiecewiseMap gauss(const Mode& mode);
  static PiecewiseMap luroth(const Mode& mode);

  Kind kind() const { return kind_; }
  const Mode& mode() const { return mode_; }
  const std::string& name() const { return name_; }
  bool finite_alphabet() const { return kind_ == Kind::affine_family; }
  long first_symbol() const;
  std::size_t branch_count() const;  // finite families only
  Branch branch(long symbol) const;

  // Symbols whose closed domain hull meets the closed interval w. For the
  // infinite families w.lo must be positive (otherwise infinitely many
  // branches qualify).
  std::vector<long> symbols_meeting(const Interval& w) const;
  // Symbols whose domain is definitely longer than min_len, plus any whose
  // comparison is too close to call (so the list is always complete).
  std::vector<long> symbols_with_domain_longer(const Scalar& min_len) const;

  // Digit of x: the symbol whose open domain contains x. Landing on a
  // branch boundary raises BoundaryOrbitError (the orbit entered the
  // countable exceptional set); an undecidable membership raises
  // PrecisionExhausted.
  long symbol_at(const Scalar& x) const;

  bool full_branches() const { return full_branches_; }
  // sup |T'| over the whole domain, when finite.
  std::optional<Scalar> sup_abs_derivative() const;
  // inf over branches of inf |T'|.
  Scalar min_abs_derivative() const;
  // max over branches of sup |T'| (finite families only).
  Scalar max_abs_derivative() const;

  // Uniform-expansion certificate: |(T^n0)'| >= eta > 1 everywhere the
  // composition is defined.
  struct Certificate {
    unsigned long n0;
    Scalar eta;
  };
  bool has_expansion_certificate() const { return certificate_.has_value(); }
  Certificate expansion_certificate() const;

  // Bounded-distortion constant: sup / inf of |(T^n)'| over any depth-n
  // cylinder is at most this, for every n.
  Scalar distortion() const;

 private:
  PiecewiseMap(Kind kind, Mode mode) : kind_(kind), mode_(mode) {}

  Kind kind_;
  Mode mode_;
  std::string name_;
  bool full_branches_ = false;
  std::vector<Branch> branches_;           // affine_family
  std::optional<Scalar> sup_derivative_;   // affine_family
  std::optional<Certificate> certificate_;
  Scalar distortion_ = Scalar();
};

// A (possibly non-autonomous) sequence of maps: time n >= 1 applies
// items[order[(n-1) mod |order|]]. A single-item order models the
// autonomous case.
class MapSequence {
 public:
  MapSequence(std::vector<PiecewiseMap> items, std::vector<std::size_t> order);
  static MapSequence constant(PiecewiseMap item);
  // Periodic integer-slope family: time n multiplies by q[(n-1) mod |q|].
  static MapSequence cyclic_times(const std::vector<long>& q, const Mode& mode);

  const Mode& mode() const { return mode_; }
  const PiecewiseMap& at(unsigned long n) const;  // 1-based time
  unsigned long period() const { return order_.size(); }
  const std::vector<PiecewiseMap>& items() const { return items_; }
  bool constant_map() const;

  bool all_full_branches() const;
  std::optional<Scalar> sup_abs_derivative() const;  // max M over items
  Scalar distortion() const;                         // max C2 over items

  // Lower bound for inf |(T_{k+1} o ... o T_{k+count})'| over every start
  // phase k: the best of the per-time minimal-slope product and, for an
  // autonomous sequence, the certificate power eta^floor(count/n0).
  Scalar min_expansion(unsigned long count) const;

  // Lower bound for the length of every depth-`depth` cylinder starting at
  // time 1 (affine families only). Exact for single-slope maps. When an
  // irrational branch boundary cannot be separated from a state endpoint
  // the closure is completed heuristically and `certified` is set false.
  struct CylinderFloor {
    Scalar length;
    bool certified;
  };
  CylinderFloor min_cylinder_length(unsigned long depth) const;

 private:
  std::vector<PiecewiseMap> items_;
  std::vector<std::size_t> order_;
  Mode mode_;
};

// Node of the cylinder tree: word u for times 1..n, the closed hull V of
// the cylinder, and the forward composition F = T_n o ... o T_1 which is a
// single Mobius expression on V.
struct CylinderNode {
  std::vector<long> word;
  Interval hull;   // closed; may be degenerate or empty
  Mobius forward;  // identity at the root

  unsigned long depth() const { return word.size(); }
  // Closed hull of F(V), endpoints sorted.
  Interval image_hull() const;
  // min/max of |F'| over V (monotone, attained at endpoints).
  Scalar min_abs_derivative() const;
  Scalar max_abs_derivative() const;
};

CylinderNode cylinder_root(const Mode& mode);
// Extend by one symbol of the map at time depth+1. The child hull is
// V ∩ F^{-1}(closed branch domain hull); empty hulls are legal outputs.
CylinderNode cylinder_child(const MapSequence& seq, const CylinderNode& node,
                            long symbol);
// Symbols of the map at time depth+1 whose domain hull meets F(V). With a
// length floor, only children whose cylinder could be longer than
// min_child_len are produced (|child| <= |domain| / min |F'| on V), which
// makes the enumeration finite for the infinite families.
std::vector<long> cylinder_children_symbols(
    const MapSequence& seq, const CylinderNode& node,
    const std::optional<Scalar>& min_child_len = std::nullopt);
// Closed hull of the cylinder of an explicit word (pullback from the
// innermost domain out; exact for Mobius branches).
Interval cylinder_hull(const MapSequence& seq, const std::vector<long>& word);

// Orbit utilities. Times are 1-based: step(x, n) applies the map at time n.
Scalar orbit_step(const MapSequence& seq, unsigned long time, const Scalar& x);
std::vector<long> itinerary(const MapSequence& seq, const Scalar& x,
                            unsigned long depth);
// x, T x, ..., T^depth x (depth+1 entries).
std::vector<Scalar> orbit(const MapSequence& seq, const Scalar& x,
                          unsigned long depth);

// Bounded-distortion bound from an explicit Hoelder estimate: a rigorous
// upper bound for e^t valid on 0 <= t <= 5/4, usable in rational mode.
Scalar distortion_from_exponent(const Scalar& t);

}  // namespace absgame

#endif  // ABSGAME_DYNAMICS_HPP
