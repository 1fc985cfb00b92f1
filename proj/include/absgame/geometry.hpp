#ifndef ABSGAME_GEOMETRY_HPP
#define ABSGAME_GEOMETRY_HPP

#include <cstddef>
#include <vector>

#include "absgame/scalar.hpp"

namespace absgame {

// Interval with independently open or closed endpoints. Branch domains of
// interval maps are typically half-open; everything the game touches is
// closed. Emptiness and membership come back as Ternary because in ball
// mode an endpoint may not be separable from the query point.
struct Interval {
  Scalar lo;
  Scalar hi;
  bool closed_lo = true;
  bool closed_hi = true;

  static Interval closed(Scalar lo, Scalar hi);

  Scalar length() const;
  Scalar midpoint() const;
  Interval closure() const;
  Ternary contains(const Scalar& x) const;
  // lo <= hi in the closed reading; open intervals with lo == hi still
  // report "yes" here, which is all the callers need (they work on hulls).
  Ternary nonempty() const;
};

// Intersection of the closed hulls (endpoint flags of the inputs are
// ignored; the result is closed and may be empty).
Interval intersect_closed(const Interval& a, const Interval& b);

// Axis-parallel cube in the sup norm: {x : |x_i - center_i| <= radius}.
// Its diameter (side length) is 2 * radius.
struct Cube {
  std::vector<Scalar> center;
  Scalar radius;

  std::size_t dimension() const { return center.size(); }
  Scalar diameter() const;
  Interval axis_interval(std::size_t i) const;
};

// Closed neighborhood of the hyperplane {<normal, x> = offset}, of sup-norm
// width `halfwidth` on each side: {x : |<n,x> - b| <= halfwidth * |n|_1}.
// halfwidth = 0 degenerates to the hyperplane itself.
struct Slab {
  std::vector<Scalar> normal;
  Scalar offset;
  Scalar halfwidth;
};

// l1 norm of a vector (the dual norm of sup, which converts inner-product
// slack into sup-norm distance).
Scalar one_norm(const std::vector<Scalar>& v);

// Sup-norm distance from the cube to the slab's central hyperplane
// (0 when the cube crosses it). Throws SpecError on a zero normal.
Scalar hyperplane_distance(const Cube& cube, const Slab& slab);

// Sup-norm distance from a point to the slab's central hyperplane.
Scalar point_hyperplane_distance(const std::vector<Scalar>& p, const Slab& slab);

// Whether the closed cube and the closed slab are disjoint. Equivalent to
// hyperplane_distance(cube) > halfwidth, but computed without division so
// it stays exact in every mode.
Ternary cube_avoids_slab(const Cube& cube, const Slab& slab);

// Whether `inner` is contained in `outer` (closed cubes, componentwise).
Ternary cube_inside(const Cube& inner, const Cube& outer);

// Whether the point lies in [0,1]^d.
Ternary point_in_unit_cube(const std::vector<Scalar>& p);

}  // namespace absgame

#endif  // ABSGAME_GEOMETRY_HPP
