#include "absgame/targets.hpp"

#include "absgame/geometry.hpp"

namespace absgame {

namespace {

void require_unit_point(const std::vector<Scalar>& p, const std::string& who) {
  switch (point_in_unit_cube(p)) {
    case Ternary::yes: return;
    case Ternary::no: throw SpecError(who + " leaves [0,1]^d");
    default:
      throw PrecisionExhausted(who + ": containment in [0,1]^d undecidable");
  }
}

}  // namespace

TargetFamily TargetFamily::constant(std::vector<Scalar> point) {
  if (point.empty()) throw SpecError("constant target needs a point");
  require_unit_point(point, "constant target");
  const Mode mode = point[0].mode();
  std::size_t d = point.size();
  auto fn = [point = std::move(point)](unsigned long,
                                       const std::vector<Scalar>&) {
    return point;
  };
  return TargetFamily(std::move(fn), Scalar::zero(mode), d, "constant");
}

TargetFamily TargetFamily::point_sequence(
    std::vector<std::vector<Scalar>> points) {
  if (points.empty()) throw SpecError("point sequence target needs points");
  std::size_t d = points[0].size();
  if (d == 0) throw SpecError("point sequence target needs a dimension");
  for (const std::vector<Scalar>& p : points) {
    if (p.size() != d) {
      throw SpecError("point sequence entries have mixed dimensions");
    }
    require_unit_point(p, "point sequence target");
  }
  const Mode mode = points[0][0].mode();
  auto fn = [points = std::move(points)](unsigned long n,
                                         const std::vector<Scalar>&) {
    if (n == 0 || n > points.size()) {
      throw SpecError("point sequence target index " + std::to_string(n) +
                      " out of range");
    }
    return points[n - 1];
  };
  return TargetFamily(std::move(fn), Scalar::zero(mode), d, "point_sequence");
}

TargetFamily TargetFamily::identity(std::size_t dimension, const Mode& mode) {
  if (dimension == 0) throw SpecError("identity target needs a dimension");
  auto fn = [](unsigned long, const std::vector<Scalar>& x) { return x; };
  return TargetFamily(std::move(fn), Scalar::one(mode), dimension, "identity");
}

TargetFamily TargetFamily::affine(std::vector<Scalar> slopes,
                                  std::vector<Scalar> offsets) {
  if (slopes.empty() || slopes.size() != offsets.size()) {
    throw SpecError("affine target needs matching slopes and offsets");
  }
  Scalar c1 = slopes[0].abs();
  for (std::size_t i = 1; i < slopes.size(); ++i) {
    c1 = Scalar::max(c1, slopes[i].abs());
  }
  std::size_t d = slopes.size();
  auto fn = [slopes = std::move(slopes), offsets = std::move(offsets)](
                unsigned long, const std::vector<Scalar>& x) {
    std::vector<Scalar> out;
    out.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      out.push_back(slopes[i] * x[i] + offsets[i]);
    }
    return out;
  };
  return TargetFamily(std::move(fn), std::move(c1), d, "affine");
}

TargetFamily TargetFamily::custom(Fn fn, Scalar lipschitz,
                                  std::size_t dimension, std::string label) {
  if (!fn) throw SpecError("custom target needs a function");
  if (dimension == 0) throw SpecError("custom target needs a dimension");
  if (!definitely(Scalar::ge(lipschitz, Scalar::zero(lipschitz.mode())))) {
    throw SpecError("custom target needs a nonnegative Lipschitz constant");
  }
  return TargetFamily(std::move(fn), std::move(lipschitz), dimension,
                      std::move(label));
}

std::vector<Scalar> TargetFamily::evaluate(unsigned long n,
                                           const std::vector<Scalar>& x) const {
  if (n == 0) throw SpecError("target families are indexed from 1");
  if (x.size() != dimension_) {
    throw SpecError("target " + name_ + " evaluated in the wrong dimension");
  }
  std::vector<Scalar> out = fn_(n, x);
  if (out.size() != dimension_) {
    throw SpecError("target " + name_ + " returned the wrong dimension");
  }
  require_unit_point(out, "target " + name_);
  return out;
}

Ternary lipschitz_audit(
    const TargetFamily& g, unsigned long n,
    const std::vector<std::pair<std::vector<Scalar>, std::vector<Scalar>>>&
        pairs) {
  const Mode& mode = g.mode();
  // C1 * (1 + 1e-9), exact in rational mode.
  Scalar bound =
      g.lipschitz() * (Scalar::one(mode) +
                       Scalar::from_mpq(mpq_class(1, 1000000000), mode));
  Ternary acc = Ternary::yes;
  for (const auto& [x, y] : pairs) {
    std::vector<Scalar> gx = g.evaluate(n, x);
    std::vector<Scalar> gy = g.evaluate(n, y);
    Scalar in_dist = (x[0] - y[0]).abs();
    Scalar out_dist = (gx[0] - gy[0]).abs();
    for (std::size_t i = 1; i < x.size(); ++i) {
      in_dist = Scalar::max(in_dist, (x[i] - y[i]).abs());
      out_dist = Scalar::max(out_dist, (gx[i] - gy[i]).abs());
    }
    acc = ternary_and(acc, Scalar::le(out_dist, bound * in_dist));
    if (acc == Ternary::no) return acc;
  }
  return acc;
}

}  // namespace absgame
