#include "absgame/geometry.hpp"

namespace absgame {

Interval Interval::closed(Scalar lo, Scalar hi) {
  return Interval{std::move(lo), std::move(hi), true, true};
}

Scalar Interval::length() const { return hi - lo; }

Scalar Interval::midpoint() const { return (lo + hi) / 2; }

Interval Interval::closure() const { return Interval{lo, hi, true, true}; }

Ternary Interval::contains(const Scalar& x) const {
  Ternary left = closed_lo ? Scalar::le(lo, x) : Scalar::lt(lo, x);
  Ternary right = closed_hi ? Scalar::le(x, hi) : Scalar::lt(x, hi);
  return ternary_and(left, right);
}

Ternary Interval::nonempty() const { return Scalar::le(lo, hi); }

Interval intersect_closed(const Interval& a, const Interval& b) {
  return Interval::closed(Scalar::max(a.lo, b.lo), Scalar::min(a.hi, b.hi));
}

Scalar Cube::diameter() const { return radius * 2; }

Interval Cube::axis_interval(std::size_t i) const {
  if (i >= center.size()) throw SpecError("cube axis index out of range");
  return Interval::closed(center[i] - radius, center[i] + radius);
}

Scalar one_norm(const std::vector<Scalar>& v) {
  if (v.empty()) throw SpecError("one_norm of an empty vector");
  Scalar acc = v[0].abs();
  for (std::size_t i = 1; i < v.size(); ++i) acc = acc + v[i].abs();
  return acc;
}

namespace {

void require_dimension(const Cube& cube, const Slab& slab) {
  if (cube.dimension() == 0) throw SpecError("zero-dimensional cube");
  if (cube.dimension() != slab.normal.size()) {
    throw SpecError("cube and slab dimensions differ");
  }
}

Scalar dot(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
  Scalar acc = a[0] * b[0];
  for (std::size_t i = 1; i < a.size(); ++i) acc = acc + a[i] * b[i];
  return acc;
}

}  // namespace

Scalar hyperplane_distance(const Cube& cube, const Slab& slab) {
  require_dimension(cube, slab);
  Scalar n1 = one_norm(slab.normal);
  if (!definitely(Scalar::gt(n1, Scalar::zero(n1.mode())))) {
    throw SpecError("hyperplane_distance with zero normal");
  }
  // <n, x> over the cube sweeps [s - r|n|_1, s + r|n|_1] with s = <n,c> - b,
  // so the minimal |<n,x> - b| is max(lo, -hi, 0); dividing by |n|_1 turns
  // that inner-product gap into a sup-norm distance.
  Scalar s = dot(slab.normal, cube.center) - slab.offset;
  Scalar spread = cube.radius * n1;
  Scalar lo = s - spread;
  Scalar hi = s + spread;
  Scalar m = Scalar::max(Scalar::max(lo, -hi), Scalar::zero(n1.mode()));
  return m / n1;
}

Scalar point_hyperplane_distance(const std::vector<Scalar>& p, const Slab& slab) {
  if (p.size() != slab.normal.size()) {
    throw SpecError("point and slab dimensions differ");
  }
  Scalar n1 = one_norm(slab.normal);
  if (!definitely(Scalar::gt(n1, Scalar::zero(n1.mode())))) {
    throw SpecError("point_hyperplane_distance with zero normal");
  }
  return (dot(slab.normal, p) - slab.offset).abs() / n1;
}

Ternary cube_avoids_slab(const Cube& cube, const Slab& slab) {
  require_dimension(cube, slab);
  Scalar n1 = one_norm(slab.normal);
  Scalar s = dot(slab.normal, cube.center) - slab.offset;
  Scalar spread = cube.radius * n1;
  Scalar bound = slab.halfwidth * n1;
  // Both sets are closed, so disjointness needs a strict corner inequality
  // on one side or the other.
  return ternary_or(Scalar::gt(s - spread, bound),
                    Scalar::lt(s + spread, -bound));
}

Ternary cube_inside(const Cube& inner, const Cube& outer) {
  if (inner.dimension() != outer.dimension()) {
    throw SpecError("cube dimensions differ");
  }
  Scalar slack = outer.radius - inner.radius;
  Ternary acc = Ternary::yes;
  for (std::size_t i = 0; i < inner.dimension(); ++i) {
    Scalar off = (inner.center[i] - outer.center[i]).abs();
    acc = ternary_and(acc, Scalar::le(off, slack));
    if (acc == Ternary::no) return acc;
  }
  return acc;
}

Ternary point_in_unit_cube(const std::vector<Scalar>& p) {
  if (p.empty()) throw SpecError("empty point");
  Ternary acc = Ternary::yes;
  for (const Scalar& c : p) {
    const Mode& m = c.mode();
    acc = ternary_and(acc, ternary_and(Scalar::le(Scalar::zero(m), c),
                                       Scalar::le(c, Scalar::one(m))));
    if (acc == Ternary::no) return acc;
  }
  return acc;
}

}  // namespace absgame
