#ifndef ABSGAME_CONFORMAL_HPP
#define ABSGAME_CONFORMAL_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"

#include "absgame/geometry.hpp"
#include "absgame/scalar.hpp"

namespace absgame {

// One increasing affine contraction x -> ratio * x + offset, ratio in (0,1).
struct AffineContraction {
  Scalar ratio;
  Scalar offset;
};

// A finite family of affine contractions of the line and its attractor,
// the unique compact K with K = union of map images of K. Affine maps are
// exactly self-similar, so every piece diameter is an exact product of
// ratios and no distortion slack enters anywhere.
class IFS1D {
 public:
  explicit IFS1D(std::vector<AffineContraction> maps);

  // {"maps": [{"ratio": "1/3", "offset": "0"}, ...]}
  static IFS1D from_json(const nlohmann::json& spec, const Mode& mode);
  nlohmann::ordered_json to_json() const;

  std::size_t size() const { return maps_.size(); }
  const AffineContraction& map(std::size_t i) const { return maps_.at(i); }
  const Mode& mode() const { return mode_; }

  // Convex hull of the attractor: [min fixed point, max fixed point].
  const Interval& hull() const { return hull_; }
  Scalar diameter() const { return hull_.length(); }
  Scalar min_ratio() const;
  // Whether the depth-1 hull pieces are pairwise disjoint (strict gaps).
  bool strongly_separated() const;

  // Composite of the word's maps, applied left to right.
  AffineContraction composite(const std::vector<long>& word) const;
  // phi_I(hull): contains the attractor piece K_I, with equality of length.
  Interval piece_hull(const std::vector<long>& word) const;
  // |K_I| = (product of the word's ratios) * diameter, exact.
  Scalar piece_diameter(const std::vector<long>& word) const;

 private:
  std::vector<AffineContraction> maps_;
  Mode mode_;
  Interval hull_;
};

// The cut set of the word tree at diameter scale r: every word I with
// |K_I| < r <= |K_(parent of I)|, in lexicographic order. The pieces cover
// the attractor. Requires 0 < r < diameter.
std::vector<std::vector<long>> scale_cut_words(const IFS1D& ifs,
                                               const Scalar& r);

// A scale-r subfamily with pairwise disjoint pieces.
struct Subsystem {
  Scalar r;
  std::vector<std::vector<long>> cut_words;  // the full cut set
  std::vector<std::vector<long>> words;      // kept: pairwise disjoint pieces
  Scalar separation;  // least gap between kept pieces; 0 when fewer than 2
  nlohmann::ordered_json to_json() const;
};

// Greedy maximal disjoint subfamily of the scale-r cut set, scanning in
// lexicographic order (deterministic, so traces replay). A piece is kept
// when it has a strictly positive gap to every piece already kept;
// touching counts as overlap.
Subsystem maximal_disjoint(const IFS1D& ifs, const Scalar& r);

// Root of sum of ratios^t = 1 (each ratio in (0,1), at least one),
// bisected to the given tolerance: the similarity dimension when the
// pieces are strongly separated.
double moran_root(const std::vector<double>& ratios, double tol = 1e-12);

struct DimensionBound {
  // log(#words) / log(1 / (min_ratio * r)): the exponent the uniform word
  // measure certifies through the mass distribution principle.
  double lower = 0;
  // Exact similarity dimension of the full family when it is strongly
  // separated (absent otherwise): the Moran root over the map ratios.
  std::optional<double> similarity;
};

// Requires at least two kept words (one point carries no dimension) and a
// decisively positive separation.
DimensionBound subsystem_dimension(const IFS1D& ifs, const Subsystem& sub);

// Upper bound on mu(B) for the uniform self-similar measure on the
// subsystem (equal weight per kept word), by exact rational recursion on
// the word tree truncated at `depth`. B = hull gives exactly 1; B disjoint
// from the hull gives exactly 0.
mpq_class subsystem_mass_upper(const IFS1D& ifs, const Subsystem& sub,
                               const Interval& b, unsigned long depth = 24);

struct MassCheckResult {
  double max_ratio = 0;  // max over samples of mu(B) / ((|B|/(c1 c2 r))^t)
  unsigned long samples = 0;
  bool passed = false;  // max_ratio <= 1 within a 1e-9 log-space slack
};

// Samples random closed subintervals B of the hull and checks the mass
// distribution bound mu(B) <= (|B| / (c1 c2 r))^t for the uniform
// self-similar measure on the subsystem (equal weight per kept word),
// with t the certified exponent, c1 the recorded separation and c2 the
// least map ratio. mu is computed by exact rational recursion on the
// subsystem's word tree, truncated at depth 24 in the bound's favor.
MassCheckResult mass_distribution_check(const IFS1D& ifs, const Subsystem& sub,
                                        unsigned long samples,
                                        std::uint64_t seed);

}  // namespace absgame

#endif  // ABSGAME_CONFORMAL_HPP
