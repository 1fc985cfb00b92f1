#include "doctest.h"

#include <cmath>
#include <vector>

#include "absgame/conformal.hpp"
#include "absgame/errors.hpp"

using absgame::AffineContraction;
using absgame::IFS1D;
using absgame::Interval;
using absgame::Mode;
using absgame::Order;
using absgame::Scalar;
using absgame::SpecError;
using absgame::Subsystem;

namespace {

const Mode kRat = Mode::rational();

Scalar q(long num, long den = 1) {
  return Scalar::from_mpq(mpq_class(num, den), kRat);
}

bool eq(const Scalar& a, const Scalar& b) {
  return Scalar::compare(a, b) == Order::eq;
}

IFS1D cantor() {
  return IFS1D({AffineContraction{q(1, 3), q(0)},
                AffineContraction{q(1, 3), q(2, 3)}});
}

// Two half-scale maps whose pieces touch at 1/4: not strongly separated,
// so the greedy selection has something to drop.
IFS1D touching_pair() {
  return IFS1D({AffineContraction{q(1, 2), q(0)},
                AffineContraction{q(1, 2), q(1, 4)}});
}

IFS1D mixed_pair() {
  return IFS1D({AffineContraction{q(1, 2), q(0)},
                AffineContraction{q(1, 4), q(3, 4)}});
}

}  // namespace

TEST_SUITE("conformal") {

TEST_CASE("contraction families are validated and expose exact geometry") {
  CHECK_THROWS_AS(IFS1D({AffineContraction{q(1, 3), q(0)}}), SpecError);
  CHECK_THROWS_AS(IFS1D({AffineContraction{q(1, 3), q(0)},
                         AffineContraction{q(1), q(1, 2)}}),
                  SpecError);
  CHECK_THROWS_AS(IFS1D({AffineContraction{q(0), q(0)},
                         AffineContraction{q(1, 3), q(2, 3)}}),
                  SpecError);
  // Shared fixed point: the attractor is a single point.
  CHECK_THROWS_AS(IFS1D({AffineContraction{q(1, 2), q(0)},
                         AffineContraction{q(1, 3), q(0)}}),
                  SpecError);

  const IFS1D c = cantor();
  CHECK(eq(c.hull().lo, q(0)));
  CHECK(eq(c.hull().hi, q(1)));
  CHECK(eq(c.diameter(), q(1)));
  CHECK(eq(c.min_ratio(), q(1, 3)));
  CHECK(c.strongly_separated());
  CHECK(!touching_pair().strongly_separated());

  // phi_0(phi_1(hull)) = [2/9, 1/3], diameter 1/9, all exact.
  const Interval piece = c.piece_hull({0, 1});
  CHECK(eq(piece.lo, q(2, 9)));
  CHECK(eq(piece.hi, q(1, 3)));
  CHECK(eq(c.piece_diameter({0, 1}), q(1, 9)));
}

TEST_CASE("json round trip") {
  nlohmann::json spec;
  spec["maps"] = {{{"ratio", "1/3"}, {"offset", "0"}},
                  {{"ratio", "1/3"}, {"offset", "2/3"}}};
  const IFS1D c = IFS1D::from_json(spec, kRat);
  CHECK(c.size() == 2);
  CHECK(eq(c.map(1).offset, q(2, 3)));
  const nlohmann::ordered_json out = c.to_json();
  CHECK(out["maps"][1]["offset"] == "2/3");
  CHECK_THROWS_AS(IFS1D::from_json(nlohmann::json::object(), kRat), SpecError);
}

TEST_CASE("scale cut of the word tree, frozen examples") {
  const IFS1D c = cantor();
  // r = 1/4: pieces of length 1/9 < 1/4 <= 1/3.
  const std::vector<std::vector<long>> cut = scale_cut_words(c, q(1, 4));
  const std::vector<std::vector<long>> expect = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  CHECK(cut == expect);

  // r just below the diameter: the very first cut.
  const std::vector<std::vector<long>> first =
      scale_cut_words(c, q(99, 100));
  CHECK(first == std::vector<std::vector<long>>{{0}, {1}});

  // Mixed ratios produce a mixed-length cut set, lexicographically.
  const std::vector<std::vector<long>> mixed =
      scale_cut_words(mixed_pair(), q(1, 5));
  const std::vector<std::vector<long>> expect_mixed = {
      {0, 0, 0}, {0, 0, 1}, {0, 1}, {1, 0}, {1, 1}};
  CHECK(mixed == expect_mixed);

  // Cut-set property: every emitted piece is below scale, its parent not.
  for (const std::vector<long>& w : mixed) {
    CHECK(definitely(Scalar::lt(mixed_pair().piece_diameter(w), q(1, 5))));
    std::vector<long> parent(w.begin(), w.end() - 1);
    CHECK(definitely(Scalar::ge(mixed_pair().piece_diameter(parent), q(1, 5))));
  }

  CHECK_THROWS_AS(scale_cut_words(c, q(0)), SpecError);
  CHECK_THROWS_AS(scale_cut_words(c, q(2)), SpecError);
}

TEST_CASE("greedy disjoint selection keeps everything under strong separation") {
  const Subsystem sub = maximal_disjoint(cantor(), q(1, 4));
  CHECK(sub.words == sub.cut_words);
  CHECK(sub.words.size() == 4);
  CHECK(eq(sub.separation, q(1, 9)));
}

TEST_CASE("greedy disjoint selection thins a touching family") {
  // At r = 1/16 the cut is the 16 length-4 words with piece hulls
  // [k/32, (k+1)/32], k = 0..15; the lexicographic greedy keeps the even
  // k's, with gap 1/32 between kept neighbours.
  const IFS1D ifs = touching_pair();
  const Subsystem sub = maximal_disjoint(ifs, q(1, 16));
  CHECK(sub.cut_words.size() == 16);
  CHECK(sub.words.size() == 8);
  CHECK(eq(sub.separation, q(1, 32)));
  for (std::size_t k = 0; k < sub.words.size(); ++k) {
    const Interval h = ifs.piece_hull(sub.words[k]);
    CHECK(eq(h.lo, q(static_cast<long>(2 * k), 32)));
  }
}

TEST_CASE("moran root solves the similarity equation") {
  CHECK(std::abs(absgame::moran_root({1.0 / 3, 1.0 / 3}) -
                 std::log(2.0) / std::log(3.0)) < 1e-11);
  // x + x^2 = 1 at x = 2^-t: t = log2(golden ratio).
  CHECK(std::abs(absgame::moran_root({0.5, 0.25}) -
                 std::log((1 + std::sqrt(5.0)) / 2) / std::log(2.0)) < 1e-9);
  CHECK(std::abs(absgame::moran_root({0.2, 0.2, 0.2}) -
                 std::log(3.0) / std::log(5.0)) < 1e-11);
  CHECK_THROWS_AS(absgame::moran_root({}), SpecError);
  CHECK_THROWS_AS(absgame::moran_root({1.5}), SpecError);
}

TEST_CASE("dimension bounds, frozen values") {
  // Cantor at r = 3^-k: 2^(k+1) pieces, scale floor 3^-(k+1), so the
  // certified exponent is exactly log2/log3 for every k, as is the
  // similarity dimension.
  const double cantor_dim = std::log(2.0) / std::log(3.0);
  double prev = 0;
  for (unsigned long k = 4; k <= 8; ++k) {
    mpz_class den = 1;
    for (unsigned long i = 0; i < k; ++i) den *= 3;
    const Scalar r = Scalar::from_mpq(mpq_class(mpz_class(1), den), kRat);
    const Subsystem sub = maximal_disjoint(cantor(), r);
    CHECK(sub.words.size() == (2ull << k));
    const absgame::DimensionBound dim = subsystem_dimension(cantor(), sub);
    CHECK(std::abs(dim.lower - cantor_dim) < 1e-12);
    CHECK(dim.lower >= prev - 1e-12);  // nondecreasing in k
    prev = dim.lower;
    REQUIRE(dim.similarity.has_value());
    CHECK(std::abs(*dim.similarity - cantor_dim) < 1e-11);
  }

  // Touching pair at r = 1/16: 8 kept pieces, floor (1/2)(1/16) = 1/32,
  // exponent log8/log32 = 3/5 exactly; no similarity value without strong
  // separation.
  const absgame::DimensionBound thin =
      subsystem_dimension(touching_pair(), maximal_disjoint(touching_pair(), q(1, 16)));
  CHECK(std::abs(thin.lower - 0.6) < 1e-12);
  CHECK(!thin.similarity.has_value());

  Subsystem empty;
  empty.r = q(1, 4);
  empty.separation = q(0);
  CHECK_THROWS_AS(subsystem_dimension(cantor(), empty), SpecError);
  empty.words = {{0, 0}};
  CHECK_THROWS_AS(subsystem_dimension(cantor(), empty), SpecError);
}

TEST_CASE("subsystem measure recursion is exact on aligned intervals") {
  const Subsystem sub = maximal_disjoint(cantor(), q(1, 4));
  CHECK(absgame::subsystem_mass_upper(cantor(), sub,
                                      Interval::closed(q(0), q(1))) == 1);
  CHECK(absgame::subsystem_mass_upper(cantor(), sub,
                                      Interval::closed(q(2), q(3))) == 0);
  CHECK(absgame::subsystem_mass_upper(cantor(), sub,
                                      Interval::closed(q(0), q(1, 9))) ==
        mpq_class(1, 4));
  CHECK(absgame::subsystem_mass_upper(cantor(), sub,
                                      Interval::closed(q(0), q(1, 3))) ==
        mpq_class(1, 2));
  // One level down: piece (0,0)(0,0) carries 1/16.
  CHECK(absgame::subsystem_mass_upper(cantor(), sub,
                                      Interval::closed(q(0), q(1, 81))) ==
        mpq_class(1, 16));
}

TEST_CASE("nested pieces separate at the certified rate") {
  // Depth-n pieces of the subsystem must be at least sep * (c2 r)^n apart;
  // exhaustive over pairs for n <= 3 at r = 1/9.
  const IFS1D c = cantor();
  const Subsystem sub = maximal_disjoint(c, q(1, 9));
  const Scalar floor_base = c.min_ratio() * sub.r;
  std::vector<AffineContraction> level;
  level.push_back(AffineContraction{q(1), q(0)});
  Scalar rate = sub.separation;
  for (unsigned long depth = 1; depth <= 3; ++depth) {
    std::vector<AffineContraction> next;
    for (const AffineContraction& g : level) {
      for (const std::vector<long>& w : sub.words) {
        const AffineContraction f = c.composite(w);
        next.push_back(
            AffineContraction{g.ratio * f.ratio, g.ratio * f.offset + g.offset});
      }
    }
    level = std::move(next);
    rate = rate * floor_base;
    for (std::size_t i = 0; i < level.size(); ++i) {
      const Interval a = Interval::closed(
          level[i].offset, level[i].ratio + level[i].offset);
      for (std::size_t j = i + 1; j < level.size(); ++j) {
        const Interval b = Interval::closed(
            level[j].offset, level[j].ratio + level[j].offset);
        const Scalar gap =
            Scalar::max(b.lo - a.hi, a.lo - b.hi);
        CHECK(definitely(Scalar::ge(gap, rate)));
      }
    }
  }
}

TEST_CASE("mass distribution bound holds on sampled intervals") {
  const absgame::MassCheckResult cantor_check = absgame::mass_distribution_check(
      cantor(), maximal_disjoint(cantor(), q(1, 81)), 500, 17);
  CHECK(cantor_check.samples == 500);
  CHECK(cantor_check.passed);
  CHECK(cantor_check.max_ratio <= 1.0 + 1e-6);
  CHECK(cantor_check.max_ratio > 0.0);

  const absgame::MassCheckResult pair_check = absgame::mass_distribution_check(
      touching_pair(), maximal_disjoint(touching_pair(), q(1, 16)), 500, 29);
  CHECK(pair_check.passed);
}

}  // TEST_SUITE
