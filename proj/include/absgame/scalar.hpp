#ifndef ABSGAME_SCALAR_HPP
#define ABSGAME_SCALAR_HPP

#include <gmpxx.h>
#include <mpfr.h>

#include <string>
#include <utility>

#include "absgame/errors.hpp"

namespace absgame {

// Three-way comparison that admits "cannot tell at this precision".
enum class Order { lt, eq, gt, indeterminate };

// Decidable-with-uncertainty predicate result.
enum class Ternary { yes, no, indeterminate };

inline bool definitely(Ternary t) { return t == Ternary::yes; }

// Three-valued logic: `no` is certain falsity, `yes` certain truth.
inline Ternary ternary_and(Ternary a, Ternary b) {
  if (a == Ternary::no || b == Ternary::no) return Ternary::no;
  if (a == Ternary::yes && b == Ternary::yes) return Ternary::yes;
  return Ternary::indeterminate;
}
inline Ternary ternary_or(Ternary a, Ternary b) {
  if (a == Ternary::yes || b == Ternary::yes) return Ternary::yes;
  if (a == Ternary::no && b == Ternary::no) return Ternary::no;
  return Ternary::indeterminate;
}
inline Ternary ternary_not(Ternary a) {
  if (a == Ternary::yes) return Ternary::no;
  if (a == Ternary::no) return Ternary::yes;
  return Ternary::indeterminate;
}

// Numeric mode of an experiment: exact rational arithmetic, or MPFR balls
// (center rounded to nearest, error radius accumulated upward). "double"
// parses as a tracked 53-bit ball; untracked hardware floats would silently
// resolve comparisons that are in truth too close to call.
struct Mode {
  enum class Kind { rational, bigfloat };
  Kind kind = Kind::rational;
  mpfr_prec_t precision = 0;  // significand bits; bigfloat only

  static Mode rational() { return Mode{Kind::rational, 0}; }
  static Mode bigfloat(mpfr_prec_t bits);
  // "rational" | "double" | "bigfloat:<bits>"
  static Mode parse(const std::string& text);
  std::string str() const;
  bool operator==(const Mode&) const = default;
};

namespace detail {

// RAII wrapper around mpfr_t.
class Mpfr {
 public:
  explicit Mpfr(mpfr_prec_t prec) {
    mpfr_init2(x_, prec);
    mpfr_set_zero(x_, 1);
  }
  Mpfr(const Mpfr& o) {
    mpfr_init2(x_, mpfr_get_prec(o.x_));
    mpfr_set(x_, o.x_, MPFR_RNDN);  // same precision: exact
  }
  Mpfr(Mpfr&& o) noexcept {
    mpfr_init2(x_, 2);
    mpfr_swap(x_, o.x_);
  }
  Mpfr& operator=(const Mpfr& o) {
    if (this != &o) {
      mpfr_set_prec(x_, mpfr_get_prec(o.x_));
      mpfr_set(x_, o.x_, MPFR_RNDN);
    }
    return *this;
  }
  Mpfr& operator=(Mpfr&& o) noexcept {
    mpfr_swap(x_, o.x_);
    return *this;
  }
  ~Mpfr() { mpfr_clear(x_); }

  mpfr_ptr get() { return x_; }
  mpfr_srcptr get() const { return x_; }

 private:
  mpfr_t x_;
};

}  // namespace detail

// A number in one of two representations:
//   - exact rational (GMP), used whenever the whole experiment is rational;
//   - ball (MPFR center + upper-bounded error radius). Every operation
//     accounts for its own rounding, so a ball always contains the true
//     value of the expression that produced it.
// Operations never mix representations or precisions; that is a config
// error, not a silent promotion.
class Scalar {
 public:
  Scalar() : Scalar(from_long(0, Mode::rational())) {}

  static Scalar from_mpq(const mpq_class& q, const Mode& mode);
  static Scalar from_long(long n, const Mode& mode);
  // Accepts "p/q", "p", and decimal forms ("0.25", "-1.5e-3"); all exact.
  static Scalar parse(const std::string& text, const Mode& mode);
  static Scalar zero(const Mode& mode) { return from_long(0, mode); }
  static Scalar one(const Mode& mode) { return from_long(1, mode); }
  // Ball containing sqrt(n) (bigfloat modes only).
  static Scalar sqrt_ulong(unsigned long n, const Mode& mode);

  const Mode& mode() const { return mode_; }
  bool is_rational() const { return mode_.kind == Mode::Kind::rational; }
  // True when the value is known exactly (rational, or ball of radius 0).
  bool is_point() const;

  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator/(const Scalar& o) const;
  Scalar operator-() const;

  Scalar operator+(long n) const { return *this + from_long(n, mode_); }
  Scalar operator-(long n) const { return *this - from_long(n, mode_); }
  Scalar operator*(long n) const { return *this * from_long(n, mode_); }
  Scalar operator/(long n) const { return *this / from_long(n, mode_); }

  Scalar abs() const;
  Scalar pow_ui(unsigned long e) const;

  // Interval-hull minimum/maximum (exact on points and rationals).
  static Scalar min(const Scalar& a, const Scalar& b);
  static Scalar max(const Scalar& a, const Scalar& b);

  static Order compare(const Scalar& a, const Scalar& b);
  // One-sided tests; `yes`/`no` are certain, overlap is indeterminate.
  static Ternary lt(const Scalar& a, const Scalar& b);
  static Ternary le(const Scalar& a, const Scalar& b);
  static Ternary gt(const Scalar& a, const Scalar& b) { return lt(b, a); }
  static Ternary ge(const Scalar& a, const Scalar& b) { return le(b, a); }
  Order sign() const;

  // floor of the value as an integer; throws PrecisionExhausted when the
  // ball straddles an integer (used for branch digit extraction).
  mpz_class floor_integer() const;

  // Exact point at or below the lower bound / at or above the upper bound.
  // On rationals these return the value itself. These are how strategies and
  // policies materialize safe-side move data so that legality checks stay
  // determinate in ball mode.
  Scalar lower_point() const;
  Scalar upper_point() const;
  Scalar midpoint_point() const;

  // Exact value of a point scalar as a rational (ball centers are dyadic).
  mpq_class point_mpq() const;

  // Serialization: base-10 "p" or "p/q", always exact (ball radii are not
  // serialized; they are re-accumulated on replay).
  std::string str() const;
  double to_double() const;  // diagnostics/CSV only

 private:
  struct Ball {
    detail::Mpfr value;
    detail::Mpfr radius;  // nonnegative, 64-bit, rounded up
    explicit Ball(mpfr_prec_t prec) : value(prec), radius(64) {}
  };

  explicit Scalar(Mode mode) : mode_(mode) {}

  Mode mode_;
  // Exactly one of these is active, per mode_.kind.
  mpq_class rat_;
  // Ball storage; lazily sized. Kept by value for value semantics.
  Ball ball_{2};

  friend class ScalarOps;
};

// Convenience: r * q for mpq without leaving rational fast paths.
inline Scalar operator*(long n, const Scalar& s) { return s * n; }

// (1 + sqrt 5) / 2 as a ball (bigfloat modes only).
Scalar golden_ratio(const Mode& mode);

}  // namespace absgame

#endif  // ABSGAME_SCALAR_HPP
