#include "absgame/dynamics.hpp"

#include <algorithm>
#include <cstdio>

namespace absgame {

namespace {

// Enumeration guard for the infinite branch families.
constexpr long kSymbolCap = 10'000'000;

std::string approx(const Scalar& s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", s.to_double());
  return buf;
}

}  // namespace

Mobius Mobius::identity(const Mode& mode) {
  return Mobius{Scalar::one(mode), Scalar::zero(mode), Scalar::zero(mode),
                Scalar::one(mode)};
}

Mobius Mobius::affine(const Scalar& slope, const Scalar& intercept) {
  const Mode& m = slope.mode();
  return Mobius{slope, intercept, Scalar::zero(m), Scalar::one(m)};
}

Scalar Mobius::apply(const Scalar& x) const {
  return (a * x + b) / (c * x + d);
}

Scalar Mobius::derivative(const Scalar& x) const {
  Scalar den = c * x + d;
  return determinant() / (den * den);
}

Scalar Mobius::determinant() const { return a * d - b * c; }

Mobius Mobius::compose(const Mobius& inner) const {
  return Mobius{a * inner.a + b * inner.c, a * inner.b + b * inner.d,
                c * inner.a + d * inner.c, c * inner.b + d * inner.d};
}

Mobius Mobius::inverse() const {
  return Mobius{d, -b, -c, a};
}

Interval Branch::image_hull() const {
  Scalar at_lo = map.apply(domain.lo);
  Scalar at_hi = map.apply(domain.hi);
  if (increasing) return Interval::closed(at_lo, at_hi);
  return Interval::closed(at_hi, at_lo);
}

Scalar Branch::min_abs_derivative() const {
  return Scalar::min(map.derivative(domain.lo).abs(),
                     map.derivative(domain.hi).abs());
}

Scalar Branch::max_abs_derivative() const {
  return Scalar::max(map.derivative(domain.lo).abs(),
                     map.derivative(domain.hi).abs());
}

namespace {

Branch make_branch(long symbol, Interval domain, Mobius map) {
  Branch b{symbol, std::move(domain), std::move(map), true};
  switch (b.map.determinant().sign()) {
    case Order::gt: b.increasing = true; break;
    case Order::lt: b.increasing = false; break;
    case Order::eq: throw SpecError("degenerate branch map");
    default:
      throw PrecisionExhausted("branch monotonicity is undecidable");
  }
  return b;
}

}  // namespace

PiecewiseMap PiecewiseMap::beta(const Scalar& b) {
  const Mode& mode = b.mode();
  if (!definitely(Scalar::gt(b, Scalar::one(mode)))) {
    throw SpecError("beta map requires beta > 1");
  }
  mpz_class fl = b.floor_integer();
  if (!fl.fits_slong_p()) throw SpecError("beta out of range");
  long k_floor = fl.get_si();
  bool integral =
      Scalar::compare(b, Scalar::from_long(k_floor, mode)) == Order::eq;
  long count = integral ? k_floor : k_floor + 1;

  PiecewiseMap map(Kind::affine_family, mode);
  map.name_ = integral ? "times(" + std::to_string(k_floor) + ")"
                       : "beta(~" + approx(b) + ")";
  for (long k = 0; k < count; ++k) {
    Scalar lo = Scalar::from_long(k, mode) / b;
    Scalar hi = (k + 1 == count) ? Scalar::one(mode)
                                 : Scalar::from_long(k + 1, mode) / b;
    Mobius m = Mobius::affine(b, Scalar::from_long(-k, mode));
    map.branches_.push_back(
        make_branch(k, Interval{std::move(lo), std::move(hi), false, false},
                    std::move(m)));
  }
  map.full_branches_ = integral;
  map.sup_derivative_ = b;
  map.certificate_ = Certificate{1, b};
  map.distortion_ = Scalar::one(mode);
  return map;
}

PiecewiseMap PiecewiseMap::times(long m, const Mode& mode) {
  if (m < 2) throw SpecError("times map requires an integer factor >= 2");
  return beta(Scalar::from_long(m, mode));
}

PiecewiseMap PiecewiseMap::piecewise_affine(std::vector<Scalar> breakpoints,
                                            std::vector<Scalar> slopes) {
  if (slopes.empty() || breakpoints.size() != slopes.size() + 1) {
    throw SpecError("piecewise_affine needs n slopes and n+1 breakpoints");
  }
  const Mode& mode = slopes[0].mode();
  if (Scalar::compare(breakpoints.front(), Scalar::zero(mode)) != Order::eq ||
      Scalar::compare(breakpoints.back(), Scalar::one(mode)) != Order::eq) {
    throw SpecError("breakpoints must start at 0 and end at 1");
  }
  PiecewiseMap map(Kind::affine_family, mode);
  map.name_ =
      "piecewise_affine[" + std::to_string(slopes.size()) + " branches]";
  bool full = true;
  Scalar sup = slopes[0];
  std::optional<Scalar> min_slope;
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    if (!definitely(Scalar::lt(breakpoints[i], breakpoints[i + 1]))) {
      throw SpecError("breakpoints must be strictly increasing");
    }
    if (!definitely(Scalar::ge(slopes[i], Scalar::one(mode)))) {
      throw SpecError("piecewise_affine slopes must be >= 1");
    }
    // Branch image is (0, slope * (b_{i+1} - b_i)); it must stay in [0,1].
    Scalar reach = slopes[i] * (breakpoints[i + 1] - breakpoints[i]);
    Order cmp = Scalar::compare(reach, Scalar::one(mode));
    if (cmp == Order::gt || cmp == Order::indeterminate) {
      throw SpecError("piecewise_affine branch image leaves [0,1]");
    }
    if (cmp != Order::eq) full = false;
    sup = Scalar::max(sup, slopes[i]);
    min_slope = min_slope ? Scalar::min(*min_slope, slopes[i]) : slopes[i];
    Mobius m = Mobius::affine(slopes[i], -(slopes[i] * breakpoints[i]));
    map.branches_.push_back(make_branch(
        static_cast<long>(i),
        Interval{breakpoints[i], breakpoints[i + 1], false, false},
        std::move(m)));
  }
  map.full_branches_ = full;
  map.sup_derivative_ = sup;
  if (definitely(Scalar::gt(*min_slope, Scalar::one(mode)))) {
    map.certificate_ = Certificate{1, *min_slope};
  }
  map.distortion_ = Scalar::one(mode);
  return map;
}

PiecewiseMap PiecewiseMap::gauss(const Mode& mode) {
  PiecewiseMap map(Kind::gauss, mode);
  map.name_ = "gauss";
  map.full_branches_ = true;
  // |(T^2)'(x)| = (x T x)^{-2} and x T x = 1 - k x < 1/(k+1) <= 1/2 on the
  // k-th branch, so every two steps expand by more than 4.
  map.certificate_ = Certificate{2, Scalar::from_long(4, mode)};
  // Writing x = [0; a_1..a_n + y] with y = T^n x gives
  // |(T^n)'(x)| = (q_n + q_{n-1} y)^2 for the continuant q_n, so over one
  // cylinder the derivative ratio is at most ((q_n + q_{n-1})/q_n)^2 <= 4
  // because q_{n-1} <= q_n. The bound is exact, no Hoelder slack needed.
  map.distortion_ = Scalar::from_long(4, mode);
  return map;
}

PiecewiseMap PiecewiseMap::luroth(const Mode& mode) {
  PiecewiseMap map(Kind::luroth, mode);
  map.name_ = "luroth";
  map.full_branches_ = true;
  map.certificate_ = Certificate{1, Scalar::from_long(2, mode)};
  map.distortion_ = Scalar::one(mode);  // every branch is affine
  return map;
}

long PiecewiseMap::first_symbol() const {
  return kind_ == Kind::affine_family ? 0 : 1;
}

std::size_t PiecewiseMap::branch_count() const {
  if (kind_ != Kind::affine_family) {
    throw SpecError(name_ + " has infinitely many branches");
  }
  return branches_.size();
}

Branch PiecewiseMap::branch(long symbol) const {
  if (kind_ == Kind::affine_family) {
    if (symbol < 0 || static_cast<std::size_t>(symbol) >= branches_.size()) {
      throw SpecError(name_ + ": no branch " + std::to_string(symbol));
    }
    return branches_[static_cast<std::size_t>(symbol)];
  }
  if (symbol < 1) {
    throw SpecError(name_ + ": no branch " + std::to_string(symbol));
  }
  Scalar k = Scalar::from_long(symbol, mode_);
  Interval domain{Scalar::one(mode_) / (k + 1), Scalar::one(mode_) / k, false,
                  false};
  if (kind_ == Kind::gauss) {
    // 1/x - k, decreasing, onto (0,1).
    Mobius m{Scalar::from_long(-symbol, mode_), Scalar::one(mode_),
             Scalar::one(mode_), Scalar::zero(mode_)};
    return make_branch(symbol, std::move(domain), std::move(m));
  }
  // Lueroth: k(k+1) x - k, increasing, onto (0,1).
  return make_branch(symbol, std::move(domain),
                     Mobius::affine(k * (k + 1), -k));
}

std::vector<long> PiecewiseMap::symbols_meeting(const Interval& w) const {
  std::vector<long> out;
  if (kind_ == Kind::affine_family) {
    for (const Branch& b : branches_) {
      if (intersect_closed(b.domain, w).nonempty() != Ternary::no) {
        out.push_back(b.symbol);
      }
    }
    return out;
  }
  const Scalar zero = Scalar::zero(mode_);
  if (Scalar::le(w.hi, zero) == Ternary::yes) return out;
  if (!definitely(Scalar::gt(w.lo, zero))) {
    throw SpecError(name_ + ": interval reaching 0 meets infinitely many branches");
  }
  // Domain of symbol k is [1/(k+1), 1/k]; march left from the first symbol
  // that can reach w.hi until domains fall definitely below w.lo.
  mpz_class start = (Scalar::one(mode_) / w.hi).floor_integer() - 1;
  long k = start.fits_slong_p() ? std::max(1l, start.get_si()) : kSymbolCap;
  for (; k < kSymbolCap; ++k) {
    Branch b = branch(k);
    if (Scalar::lt(b.domain.hi, w.lo) == Ternary::yes) break;
    if (intersect_closed(b.domain, w).nonempty() != Ternary::no) {
      out.push_back(k);
    }
  }
  if (k >= kSymbolCap) {
    throw PrecisionExhausted(name_ + ": branch enumeration exceeded cap");
  }
  return out;
}

std::vector<long> PiecewiseMap::symbols_with_domain_longer(
    const Scalar& min_len) const {
  std::vector<long> out;
  if (kind_ == Kind::affine_family) {
    for (const Branch& b : branches_) {
      if (Scalar::gt(b.domain.length(), min_len) != Ternary::no) {
        out.push_back(b.symbol);
      }
    }
    return out;
  }
  // |domain(k)| = 1/(k(k+1)) is strictly decreasing, so stop at the first
  // definite failure; undecidable lengths are kept for completeness.
  for (long k = 1; k < kSymbolCap; ++k) {
    Scalar kk = Scalar::from_long(k, mode_);
    Scalar len = Scalar::one(mode_) / (kk * (kk + 1));
    Ternary t = Scalar::gt(len, min_len);
    if (t == Ternary::no) return out;
    out.push_back(k);
  }
  throw PrecisionExhausted(name_ + ": branch enumeration exceeded cap");
}

long PiecewiseMap::symbol_at(const Scalar& x) const {
  if (kind_ == Kind::affine_family) {
    bool undecided = false;
    for (const Branch& b : branches_) {
      switch (b.domain.contains(x)) {
        case Ternary::yes: return b.symbol;
        case Ternary::indeterminate: undecided = true; break;
        case Ternary::no: break;
      }
    }
    if (undecided) {
      throw PrecisionExhausted(name_ + ": digit of " + x.str() +
                               " is undecidable at this precision");
    }
    throw BoundaryOrbitError(name_ + ": orbit hit a branch boundary at " +
                             x.str());
  }
  const Scalar zero = Scalar::zero(mode_);
  const Scalar one = Scalar::one(mode_);
  if (!definitely(Scalar::gt(x, zero)) || !definitely(Scalar::lt(x, one))) {
    Order at_zero = Scalar::compare(x, zero);
    Order at_one = Scalar::compare(x, one);
    if (at_zero == Order::eq || at_one == Order::eq) {
      throw BoundaryOrbitError(name_ + ": orbit hit a branch boundary at " +
                               x.str());
    }
    if (at_zero == Order::indeterminate || at_one == Order::indeterminate) {
      throw PrecisionExhausted(name_ + ": digit of " + x.str() +
                               " is undecidable at this precision");
    }
    throw SpecError(name_ + ": point " + x.str() + " is outside (0,1)");
  }
  mpz_class k = (one / x).floor_integer();
  if (!k.fits_slong_p() || k.get_si() < 1) {
    throw PrecisionExhausted(name_ + ": digit of " + x.str() +
                             " out of range");
  }
  Branch b = branch(k.get_si());
  switch (b.domain.contains(x)) {
    case Ternary::yes: return b.symbol;
    case Ternary::no:
      throw BoundaryOrbitError(name_ + ": orbit hit a branch boundary at " +
                               x.str());
    default:
      throw PrecisionExhausted(name_ + ": digit of " + x.str() +
                               " is undecidable at this precision");
  }
}

std::optional<Scalar> PiecewiseMap::sup_abs_derivative() const {
  if (kind_ == Kind::affine_family) return sup_derivative_;
  return std::nullopt;  // both classical families have unbounded slopes
}

Scalar PiecewiseMap::min_abs_derivative() const {
  switch (kind_) {
    case Kind::affine_family: {
      Scalar m = branches_[0].min_abs_derivative();
      for (std::size_t i = 1; i < branches_.size(); ++i) {
        m = Scalar::min(m, branches_[i].min_abs_derivative());
      }
      return m;
    }
    case Kind::gauss:
      // |T'| = x^{-2} > 1 on (0,1), with infimum 1 as x -> 1.
      return Scalar::one(mode_);
    case Kind::luroth:
      // Slopes k(k+1) are minimized by the first branch.
      return Scalar::from_long(2, mode_);
  }
  throw SpecError("unreachable map kind");
}

Scalar PiecewiseMap::max_abs_derivative() const {
  if (kind_ != Kind::affine_family) {
    throw SpecError(name_ + " has unbounded derivative");
  }
  Scalar m = branches_[0].max_abs_derivative();
  for (std::size_t i = 1; i < branches_.size(); ++i) {
    m = Scalar::max(m, branches_[i].max_abs_derivative());
  }
  return m;
}

PiecewiseMap::Certificate PiecewiseMap::expansion_certificate() const {
  if (!certificate_) {
    throw SpecError(name_ + ": no uniform expansion certificate (some branch "
                            "has slope 1)");
  }
  return *certificate_;
}

Scalar PiecewiseMap::distortion() const { return distortion_; }

MapSequence::MapSequence(std::vector<PiecewiseMap> items,
                         std::vector<std::size_t> order)
    : items_(std::move(items)), order_(std::move(order)), mode_(Mode::rational()) {
  if (items_.empty()) throw SpecError("map sequence needs at least one map");
  if (order_.empty()) throw SpecError("map sequence needs a nonempty order");
  mode_ = items_[0].mode();
  for (const PiecewiseMap& m : items_) {
    if (!(m.mode() == mode_)) {
      throw SpecError("all maps of a sequence must share one numeric mode");
    }
  }
  for (std::size_t i : order_) {
    if (i >= items_.size()) throw SpecError("map order index out of range");
  }
}

MapSequence MapSequence::constant(PiecewiseMap item) {
  std::vector<PiecewiseMap> items;
  items.push_back(std::move(item));
  return MapSequence(std::move(items), {0});
}

MapSequence MapSequence::cyclic_times(const std::vector<long>& q,
                                      const Mode& mode) {
  if (q.empty()) throw SpecError("cyclic_times needs at least one factor");
  std::vector<PiecewiseMap> items;
  std::vector<std::size_t> order;
  for (long f : q) {
    order.push_back(items.size());
    items.push_back(PiecewiseMap::times(f, mode));
  }
  return MapSequence(std::move(items), std::move(order));
}

const PiecewiseMap& MapSequence::at(unsigned long n) const {
  if (n == 0) throw SpecError("map times are 1-based");
  return items_[order_[(n - 1) % order_.size()]];
}

bool MapSequence::constant_map() const {
  return std::all_of(order_.begin(), order_.end(),
                     [&](std::size_t i) { return i == order_[0]; });
}

bool MapSequence::all_full_branches() const {
  return std::all_of(items_.begin(), items_.end(),
                     [](const PiecewiseMap& m) { return m.full_branches(); });
}

std::optional<Scalar> MapSequence::sup_abs_derivative() const {
  std::optional<Scalar> sup;
  for (const PiecewiseMap& m : items_) {
    std::optional<Scalar> s = m.sup_abs_derivative();
    if (!s) return std::nullopt;
    sup = sup ? Scalar::max(*sup, *s) : *s;
  }
  return sup;
}

Scalar MapSequence::distortion() const {
  Scalar d = items_[0].distortion();
  for (std::size_t i = 1; i < items_.size(); ++i) {
    d = Scalar::max(d, items_[i].distortion());
  }
  return d;
}

Scalar MapSequence::min_expansion(unsigned long count) const {
  if (count == 0) return Scalar::one(mode_);
  // Per-time minimal slopes multiply into a bound valid on any window; the
  // starting phase matters for non-constant schedules, so take the worst.
  std::optional<Scalar> product_bound;
  for (unsigned long phase = 0; phase < order_.size(); ++phase) {
    Scalar p = Scalar::one(mode_);
    for (unsigned long t = 0; t < count; ++t) {
      p = p * at(phase + t + 1).min_abs_derivative();
    }
    product_bound = product_bound ? Scalar::min(*product_bound, p) : p;
  }
  Scalar best = *product_bound;
  // An autonomous certificate |(T^n0)'| >= eta compounds along the window;
  // leftover steps contribute at least factor 1 (the maps are expanding).
  if (constant_map() && at(1).has_expansion_certificate()) {
    PiecewiseMap::Certificate c = at(1).expansion_certificate();
    if (count >= c.n0) {
      best = Scalar::max(best, c.eta.pow_ui(count / c.n0));
    }
  }
  return best;
}

MapSequence::CylinderFloor MapSequence::min_cylinder_length(
    unsigned long depth) const {
  for (const PiecewiseMap& m : items_) {
    if (m.kind() != PiecewiseMap::Kind::affine_family) {
      throw SpecError("min_cylinder_length needs affine branch families");
    }
  }
  // Every branch sends the low end of its domain to 0, so the forward image
  // of a cylinder is always an interval (0, h): track reachable upper
  // endpoints h layer by layer. The cylinder of a word then has length
  // |final image| / (product of the slopes used), and bounding the product
  // by the per-time maximal slope gives a floor that is exact whenever each
  // map has a single slope (all shipped families do).
  bool certified = true;
  std::vector<Scalar> layer{Scalar::one(mode_)};
  for (unsigned long t = 0; t < depth; ++t) {
    const PiecewiseMap& map = at(t + 1);
    std::vector<Scalar> next;
    auto push = [&](const Scalar& h) {
      for (const Scalar& e : next) {
        Order c = Scalar::compare(e, h);
        if (c == Order::eq) return;
        if (c == Order::indeterminate) {
          // Cannot separate the new state from an existing one; merging
          // them keeps the closure finite but forfeits certification.
          certified = false;
          return;
        }
      }
      next.push_back(h);
    };
    for (const Scalar& h : layer) {
      for (std::size_t i = 0; i < map.branch_count(); ++i) {
        Branch b = map.branch(static_cast<long>(i));
        Ternary reaches = Scalar::lt(b.domain.lo, h);
        if (reaches == Ternary::no) continue;
        if (reaches == Ternary::indeterminate) {
          // A sliver of the branch may peek below h; dropping it can only
          // be wrong by a degenerate cylinder, but note the uncertainty.
          certified = false;
          continue;
        }
        Scalar top = b.domain.hi;
        Order c = Scalar::compare(h, b.domain.hi);
        if (c == Order::lt) {
          top = h;
        } else if (c == Order::indeterminate) {
          certified = false;  // treat as the full branch
        }
        push(b.map.apply(top));
      }
      if (next.size() > 256) {
        throw SpecError("cylinder state closure exceeded 256 states");
      }
    }
    layer = std::move(next);
    if (layer.empty()) throw SpecError("cylinder state closure died out");
  }
  Scalar shortest = layer[0];
  for (std::size_t i = 1; i < layer.size(); ++i) {
    shortest = Scalar::min(shortest, layer[i]);
  }
  Scalar divisor = Scalar::one(mode_);
  for (unsigned long t = 0; t < depth; ++t) {
    divisor = divisor * at(t + 1).max_abs_derivative();
  }
  return CylinderFloor{shortest / divisor, certified};
}

Interval CylinderNode::image_hull() const {
  Scalar at_lo = forward.apply(hull.lo);
  Scalar at_hi = forward.apply(hull.hi);
  switch (forward.determinant().sign()) {
    case Order::gt: return Interval::closed(at_lo, at_hi);
    case Order::lt: return Interval::closed(at_hi, at_lo);
    default:
      throw PrecisionExhausted("cylinder orientation is undecidable");
  }
}

Scalar CylinderNode::min_abs_derivative() const {
  return Scalar::min(forward.derivative(hull.lo).abs(),
                     forward.derivative(hull.hi).abs());
}

Scalar CylinderNode::max_abs_derivative() const {
  return Scalar::max(forward.derivative(hull.lo).abs(),
                     forward.derivative(hull.hi).abs());
}

CylinderNode cylinder_root(const Mode& mode) {
  return CylinderNode{{},
                      Interval::closed(Scalar::zero(mode), Scalar::one(mode)),
                      Mobius::identity(mode)};
}

CylinderNode cylinder_child(const MapSequence& seq, const CylinderNode& node,
                            long symbol) {
  Branch b = seq.at(node.depth() + 1).branch(symbol);
  Mobius inv = node.forward.inverse();
  Scalar p = inv.apply(b.domain.lo);
  Scalar q = inv.apply(b.domain.hi);
  Interval pre = Interval::closed(p, q);
  switch (node.forward.determinant().sign()) {
    case Order::gt: break;
    case Order::lt: pre = Interval::closed(std::move(q), std::move(p)); break;
    default:
      throw PrecisionExhausted("cylinder orientation is undecidable");
  }
  CylinderNode child{node.word, intersect_closed(node.hull, pre),
                     b.map.compose(node.forward)};
  child.word.push_back(symbol);
  return child;
}

std::vector<long> cylinder_children_symbols(
    const MapSequence& seq, const CylinderNode& node,
    const std::optional<Scalar>& min_child_len) {
  const PiecewiseMap& map = seq.at(node.depth() + 1);
  Interval w = node.image_hull();
  if (!min_child_len) {
    return map.symbols_meeting(w);
  }
  // |child| <= |branch domain| / min |F'|, so domains at or below
  // min_child_len * min|F'| cannot produce a long enough child.
  Scalar floor = *min_child_len * node.min_abs_derivative();
  std::vector<long> out;
  for (long s : map.symbols_with_domain_longer(floor)) {
    Branch b = map.branch(s);
    if (intersect_closed(b.domain, w).nonempty() != Ternary::no) {
      out.push_back(s);
    }
  }
  return out;
}

Interval cylinder_hull(const MapSequence& seq, const std::vector<long>& word) {
  const Mode& mode = seq.mode();
  if (word.empty()) {
    return Interval::closed(Scalar::zero(mode), Scalar::one(mode));
  }
  // Pull the innermost domain back through the earlier branches; working
  // outward keeps every inverse application on a single Mobius branch.
  Interval v = seq.at(word.size()).branch(word.back()).domain.closure();
  for (std::size_t t = word.size() - 1; t-- > 0;) {
    Branch b = seq.at(t + 1).branch(word[t]);
    Interval reachable = intersect_closed(v, b.image_hull());
    if (reachable.nonempty() == Ternary::no) {
      return Interval::closed(Scalar::one(mode), Scalar::zero(mode));
    }
    Mobius inv = b.map.inverse();
    Scalar p = inv.apply(reachable.lo);
    Scalar q = inv.apply(reachable.hi);
    Interval pre = b.increasing ? Interval::closed(p, q)
                                : Interval::closed(std::move(q), std::move(p));
    v = intersect_closed(b.domain.closure(), pre);
    if (v.nonempty() == Ternary::no) {
      return Interval::closed(Scalar::one(mode), Scalar::zero(mode));
    }
  }
  return v;
}

Scalar orbit_step(const MapSequence& seq, unsigned long time, const Scalar& x) {
  const PiecewiseMap& map = seq.at(time);
  return map.branch(map.symbol_at(x)).map.apply(x);
}

std::vector<long> itinerary(const MapSequence& seq, const Scalar& x,
                            unsigned long depth) {
  std::vector<long> word;
  Scalar y = x;
  for (unsigned long t = 1; t <= depth; ++t) {
    const PiecewiseMap& map = seq.at(t);
    long s = map.symbol_at(y);
    word.push_back(s);
    y = map.branch(s).map.apply(y);
  }
  return word;
}

std::vector<Scalar> orbit(const MapSequence& seq, const Scalar& x,
                          unsigned long depth) {
  std::vector<Scalar> points{x};
  for (unsigned long t = 1; t <= depth; ++t) {
    points.push_back(orbit_step(seq, t, points.back()));
  }
  return points;
}

Scalar distortion_from_exponent(const Scalar& t) {
  const Mode& m = t.mode();
  // 1 + 2t dominates e^t on [0, 5/4]: their difference vanishes at 0, rises
  // until t = ln 2, and is still 3.5 - e^(5/4) > 0 at the right endpoint, so
  // by concavity of the difference it is nonnegative throughout.
  if (!definitely(Scalar::ge(t, Scalar::zero(m))) ||
      !definitely(Scalar::le(t, Scalar::from_mpq(mpq_class(5, 4), m)))) {
    throw SpecError("distortion exponent outside [0, 5/4]");
  }
  return Scalar::one(m) + t * 2;
}

}  // namespace absgame
