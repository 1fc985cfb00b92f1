#include "absgame/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absgame/errors.hpp"
#include "absgame/rng.hpp"

namespace absgame {

namespace {

Scalar fixed_point(const AffineContraction& f) {
  return f.offset / (Scalar::one(f.ratio.mode()) - f.ratio);
}

Interval map_interval(const AffineContraction& f, const Interval& x) {
  // ratio > 0, so the map is increasing and endpoints stay in order.
  return Interval::closed(f.ratio * x.lo + f.offset, f.ratio * x.hi + f.offset);
}

// Gap between two closed intervals: positive iff strictly disjoint.
Scalar interval_gap(const Interval& a, const Interval& b) {
  return Scalar::max(b.lo - a.hi, a.lo - b.hi);
}

}  // namespace

IFS1D::IFS1D(std::vector<AffineContraction> maps) : maps_(std::move(maps)) {
  if (maps_.size() < 2)
    throw SpecError("a contraction family needs at least two maps");
  mode_ = maps_.front().ratio.mode();
  const Scalar zero = Scalar::zero(mode_);
  const Scalar one = Scalar::one(mode_);
  for (const AffineContraction& f : maps_) {
    if (!(f.ratio.mode() == mode_) || !(f.offset.mode() == mode_))
      throw SpecError("contraction entries live in different modes");
    if (!definitely(Scalar::gt(f.ratio, zero)) ||
        !definitely(Scalar::lt(f.ratio, one)))
      throw SpecError("contraction ratios must lie strictly between 0 and 1");
  }
  Scalar lo = fixed_point(maps_.front());
  Scalar hi = lo;
  for (std::size_t i = 1; i < maps_.size(); ++i) {
    const Scalar fp = fixed_point(maps_[i]);
    lo = Scalar::min(lo, fp);
    hi = Scalar::max(hi, fp);
  }
  hull_ = Interval::closed(lo, hi);
  if (!definitely(Scalar::gt(hull_.length(), zero)))
    throw SpecError("the attractor degenerates to a single point");
}

IFS1D IFS1D::from_json(const nlohmann::json& spec, const Mode& mode) {
  if (!spec.contains("maps") || !spec["maps"].is_array())
    throw SpecError("contraction family spec needs a \"maps\" array");
  std::vector<AffineContraction> maps;
  for (const nlohmann::json& m : spec["maps"]) {
    if (!m.contains("ratio") || !m.contains("offset"))
      throw SpecError("each map needs \"ratio\" and \"offset\"");
    maps.push_back(
        AffineContraction{Scalar::parse(m["ratio"].get<std::string>(), mode),
                          Scalar::parse(m["offset"].get<std::string>(), mode)});
  }
  return IFS1D(std::move(maps));
}

nlohmann::ordered_json IFS1D::to_json() const {
  nlohmann::ordered_json out;
  out["maps"] = nlohmann::ordered_json::array();
  for (const AffineContraction& f : maps_) {
    nlohmann::ordered_json m;
    m["ratio"] = f.ratio.str();
    m["offset"] = f.offset.str();
    out["maps"].push_back(std::move(m));
  }
  out["hull"] = {hull_.lo.str(), hull_.hi.str()};
  return out;
}

Scalar IFS1D::min_ratio() const {
  Scalar r = maps_.front().ratio;
  for (std::size_t i = 1; i < maps_.size(); ++i)
    r = Scalar::min(r, maps_[i].ratio);
  return r;
}

bool IFS1D::strongly_separated() const {
  const Scalar zero = Scalar::zero(mode_);
  for (std::size_t i = 0; i < maps_.size(); ++i) {
    for (std::size_t j = i + 1; j < maps_.size(); ++j) {
      const Ternary apart =
          Scalar::gt(interval_gap(map_interval(maps_[i], hull_),
                                  map_interval(maps_[j], hull_)),
                     zero);
      if (apart == Ternary::no) return false;
      if (apart == Ternary::indeterminate)
        throw PrecisionExhausted(
            "piece separation undecidable; raise the precision");
    }
  }
  return true;
}

AffineContraction IFS1D::composite(const std::vector<long>& word) const {
  AffineContraction acc{Scalar::one(mode_), Scalar::zero(mode_)};
  for (long s : word) {
    if (s < 0 || static_cast<std::size_t>(s) >= maps_.size())
      throw SpecError("word symbol outside the contraction family");
    const AffineContraction& f = maps_[static_cast<std::size_t>(s)];
    // acc after f: x -> acc(f(x)).
    acc.offset = acc.ratio * f.offset + acc.offset;
    acc.ratio = acc.ratio * f.ratio;
  }
  return acc;
}

Interval IFS1D::piece_hull(const std::vector<long>& word) const {
  return map_interval(composite(word), hull_);
}

Scalar IFS1D::piece_diameter(const std::vector<long>& word) const {
  return composite(word).ratio * hull_.length();
}

namespace {

void cut_below(const IFS1D& ifs, std::vector<long>& word, const Scalar& diam,
               const Scalar& r, std::vector<std::vector<long>>& out) {
  for (std::size_t i = 0; i < ifs.size(); ++i) {
    word.push_back(static_cast<long>(i));
    const Scalar child = diam * ifs.map(i).ratio;
    switch (Scalar::lt(child, r)) {
      case Ternary::yes:
        out.push_back(word);
        break;
      case Ternary::no:
        cut_below(ifs, word, child, r, out);
        break;
      case Ternary::indeterminate:
        throw PrecisionExhausted(
            "cut-scale comparison undecidable; raise the precision");
    }
    word.pop_back();
  }
}

}  // namespace

std::vector<std::vector<long>> scale_cut_words(const IFS1D& ifs,
                                               const Scalar& r) {
  if (!definitely(Scalar::gt(r, Scalar::zero(ifs.mode()))) ||
      !definitely(Scalar::lt(r, ifs.diameter())))
    throw SpecError("the cut scale must lie strictly between 0 and the "
                    "attractor diameter");
  std::vector<std::vector<long>> out;
  std::vector<long> word;
  cut_below(ifs, word, ifs.diameter(), r, out);
  return out;
}

Subsystem maximal_disjoint(const IFS1D& ifs, const Scalar& r) {
  Subsystem sub;
  sub.r = r;
  sub.cut_words = scale_cut_words(ifs, r);
  const Scalar zero = Scalar::zero(ifs.mode());
  std::vector<Interval> kept_hulls;
  for (const std::vector<long>& word : sub.cut_words) {
    const Interval hull = ifs.piece_hull(word);
    bool disjoint = true;
    for (const Interval& other : kept_hulls) {
      switch (Scalar::gt(interval_gap(hull, other), zero)) {
        case Ternary::yes:
          break;
        case Ternary::no:
          disjoint = false;
          break;
        case Ternary::indeterminate:
          throw PrecisionExhausted(
              "piece separation undecidable; raise the precision");
      }
      if (!disjoint) break;
    }
    if (disjoint) {
      kept_hulls.push_back(hull);
      sub.words.push_back(word);
    }
  }
  sub.separation = zero;
  for (std::size_t i = 0; i < kept_hulls.size(); ++i) {
    for (std::size_t j = i + 1; j < kept_hulls.size(); ++j) {
      const Scalar gap = interval_gap(kept_hulls[i], kept_hulls[j]);
      sub.separation = (i == 0 && j == 1) ? gap : Scalar::min(sub.separation, gap);
    }
  }
  return sub;
}

nlohmann::ordered_json Subsystem::to_json() const {
  nlohmann::ordered_json out;
  out["r"] = r.str();
  out["cut_words"] = cut_words.size();
  out["words"] = words;
  out["separation"] = separation.str();
  return out;
}

double moran_root(const std::vector<double>& ratios, double tol) {
  if (ratios.empty()) throw SpecError("the Moran equation needs ratios");
  for (double c : ratios)
    if (!(c > 0.0) || !(c < 1.0))
      throw SpecError("Moran ratios must lie strictly between 0 and 1");
  const auto excess = [&](double t) {
    double s = -1.0;
    for (double c : ratios) s += std::pow(c, t);
    return s;
  };
  double lo = 0.0, hi = 1.0;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw SpecError("the Moran equation fails to bracket");
  }
  // excess(lo) >= 0 >= excess(hi), excess strictly decreasing.
  while (hi - lo > tol) {
    const double mid = (lo + hi) / 2;
    if (excess(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return (lo + hi) / 2;
}

DimensionBound subsystem_dimension(const IFS1D& ifs, const Subsystem& sub) {
  if (sub.words.empty()) throw SpecError("the subsystem is empty");
  if (sub.words.size() < 2)
    throw SpecError("a single piece carries no dimension bound");
  const Scalar zero = Scalar::zero(ifs.mode());
  if (!definitely(Scalar::gt(sub.separation, zero)))
    throw SpecError("the subsystem separation must be decisively positive");
  const Scalar scale = ifs.min_ratio() * sub.r;
  if (!definitely(Scalar::lt(scale, Scalar::one(ifs.mode()))))
    throw SpecError("the separation scale must be below 1");

  DimensionBound out;
  out.lower = std::log(static_cast<double>(sub.words.size())) /
              -std::log(scale.to_double());
  if (ifs.strongly_separated()) {
    std::vector<double> ratios;
    ratios.reserve(ifs.size());
    for (std::size_t i = 0; i < ifs.size(); ++i)
      ratios.push_back(ifs.map(i).ratio.to_double());
    out.similarity = moran_root(ratios);
  }
  return out;
}

namespace {

// Upper bound on mu(g(K_sub) region) cut to B, where the node's frame is
// g(hull) and the node carries `mass`. Pieces inside B contribute their
// full mass, pieces missing B contribute nothing, and pieces straddling an
// endpoint of B recurse. The kept pieces are disjoint, so at most two
// straddle per level and the recursion is linear in the depth; whatever
// still straddles at the depth cap is counted in full, which can only
// overstate mu(B). Indeterminate comparisons also fall through to the
// overstating side, so the result is an upper bound in every mode.
mpq_class mass_upper(const IFS1D& ifs,
                     const std::vector<AffineContraction>& kept,
                     const AffineContraction& g, const Interval& b,
                     const mpq_class& mass, unsigned long depth) {
  const Scalar zero = Scalar::zero(ifs.mode());
  const Interval frame = map_interval(g, ifs.hull());
  if (Scalar::gt(interval_gap(frame, b), zero) == Ternary::yes)
    return mpq_class(0);
  if (definitely(Scalar::ge(frame.lo, b.lo)) &&
      definitely(Scalar::le(frame.hi, b.hi)))
    return mass;
  if (depth == 0) return mass;
  mpq_class total(0);
  const mpq_class share = mass / static_cast<unsigned long>(kept.size());
  for (const AffineContraction& c : kept) {
    const AffineContraction child{g.ratio * c.ratio,
                                  g.ratio * c.offset + g.offset};
    total += mass_upper(ifs, kept, child, b, share, depth - 1);
  }
  return total;
}

std::vector<AffineContraction> kept_composites(const IFS1D& ifs,
                                               const Subsystem& sub) {
  std::vector<AffineContraction> kept;
  kept.reserve(sub.words.size());
  for (const std::vector<long>& w : sub.words) kept.push_back(ifs.composite(w));
  return kept;
}

}  // namespace

mpq_class subsystem_mass_upper(const IFS1D& ifs, const Subsystem& sub,
                               const Interval& b, unsigned long depth) {
  if (sub.words.empty()) throw SpecError("the subsystem is empty");
  const AffineContraction identity{Scalar::one(ifs.mode()),
                                   Scalar::zero(ifs.mode())};
  return mass_upper(ifs, kept_composites(ifs, sub), identity, b, mpq_class(1),
                    depth);
}

MassCheckResult mass_distribution_check(const IFS1D& ifs, const Subsystem& sub,
                                        unsigned long samples,
                                        std::uint64_t seed) {
  const DimensionBound dim = subsystem_dimension(ifs, sub);
  const double t = dim.lower;
  // Scale floor of the bound: c1 c2 r with c1 the separation and c2 the
  // least ratio. All are decisively positive past subsystem_dimension.
  const double log_floor =
      std::log(sub.separation.to_double()) +
      std::log(ifs.min_ratio().to_double()) + std::log(sub.r.to_double());
  const Interval hull = ifs.hull();
  const Scalar diam = ifs.diameter();
  const std::vector<AffineContraction> kept = kept_composites(ifs, sub);
  const AffineContraction identity{Scalar::one(ifs.mode()),
                                   Scalar::zero(ifs.mode())};

  Rng rng(seed);
  const Mode& mode = ifs.mode();
  MassCheckResult out;
  out.passed = true;
  for (unsigned long k = 0; k < samples; ++k) {
    Scalar len = Scalar::zero(mode);
    do {
      const mpq_class u(mpz_class(static_cast<unsigned long>(
                            rng.next_dyadic53())),
                        mpz_class(1) << 53);
      len = diam * Scalar::from_mpq(u, mode);
    } while (!definitely(Scalar::gt(len, Scalar::zero(mode))));
    const mpq_class v(mpz_class(static_cast<unsigned long>(
                          rng.next_dyadic53())),
                      mpz_class(1) << 53);
    const Scalar lo = hull.lo + (diam - len) * Scalar::from_mpq(v, mode);
    const Interval b = Interval::closed(lo, lo + len);

    const mpq_class mu = mass_upper(ifs, kept, identity, b, mpq_class(1), 24);
    ++out.samples;
    if (mu == 0) continue;
    const double log_mu = std::log(mu.get_d());
    const double log_bound = t * (std::log(len.to_double()) - log_floor);
    out.max_ratio = std::max(out.max_ratio, std::exp(log_mu - log_bound));
    if (log_mu > log_bound + 1e-9) out.passed = false;
  }
  return out;
}

}  // namespace absgame
