#include "absgame/scalar.hpp"

#include <cctype>
#include <cstdlib>

namespace absgame {

Mode Mode::bigfloat(mpfr_prec_t bits) {
  if (bits < MPFR_PREC_MIN || bits > 1'000'000) {
    throw SpecError("bigfloat precision out of range: " + std::to_string(bits));
  }
  return Mode{Kind::bigfloat, bits};
}

Mode Mode::parse(const std::string& text) {
  if (text == "rational") return rational();
  if (text == "double") return bigfloat(53);
  const std::string prefix = "bigfloat:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string digits = text.substr(prefix.size());
    if (digits.empty()) throw SpecError("mode \"" + text + "\": missing bit count");
    for (char c : digits) {
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        throw SpecError("mode \"" + text + "\": bit count must be an integer");
      }
    }
    return bigfloat(static_cast<mpfr_prec_t>(std::strtol(digits.c_str(), nullptr, 10)));
  }
  throw SpecError("unknown numeric mode \"" + text +
                  "\" (expected rational, double, or bigfloat:<bits>)");
}

std::string Mode::str() const {
  if (kind == Kind::rational) return "rational";
  return "bigfloat:" + std::to_string(precision);
}

// All ball bookkeeping lives here; Scalar befriends this class so the
// rounding-error accounting is in one place and auditable top to bottom.
class ScalarOps {
 public:
  using Ball = Scalar::Ball;

  static void require_same_mode(const Scalar& a, const Scalar& b) {
    if (!(a.mode_ == b.mode_)) {
      throw SpecError("mixed numeric modes in one expression: " +
                      a.mode_.str() + " vs " + b.mode_.str());
    }
  }

  static Scalar make_rational(mpq_class q, const Mode& mode) {
    Scalar s(mode);
    s.rat_ = std::move(q);
    return s;
  }

  static Scalar make_ball(const Mode& mode) {
    Scalar s(mode);
    s.ball_ = Ball(mode.precision);
    return s;
  }

  // One ulp of v at its own precision: 2^(exp(v) - prec). A rounded result
  // of zero can only be inexact after underflow, i.e. the true value fell
  // below every representable scale; fabricating a 2^(emin) bound would
  // poison later arithmetic with astronomical exponents, so give up instead.
  static void bump_radius_ulp(Ball& b) {
    if (mpfr_zero_p(b.value.get())) {
      throw PrecisionExhausted("ball arithmetic underflowed");
    }
    detail::Mpfr ulp(64);
    mpfr_set_ui_2exp(ulp.get(), 1,
                     mpfr_get_exp(b.value.get()) - mpfr_get_prec(b.value.get()),
                     MPFR_RNDU);
    mpfr_add(b.radius.get(), b.radius.get(), ulp.get(), MPFR_RNDU);
  }

  static void absorb_ternary(Ball& b, int inexact) {
    if (inexact != 0) bump_radius_ulp(b);
  }

  // Directed endpoint of a ball, rounded outward at the value's precision.
  static detail::Mpfr ball_lo(const Ball& b) {
    detail::Mpfr out(mpfr_get_prec(b.value.get()));
    mpfr_sub(out.get(), b.value.get(), b.radius.get(), MPFR_RNDD);
    return out;
  }
  static detail::Mpfr ball_hi(const Ball& b) {
    detail::Mpfr out(mpfr_get_prec(b.value.get()));
    mpfr_add(out.get(), b.value.get(), b.radius.get(), MPFR_RNDU);
    return out;
  }

  static mpq_class mpfr_to_mpq(mpfr_srcptr x) {
    if (mpfr_zero_p(x)) return mpq_class(0);
    mpz_class m;
    mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), x);
    mpq_class q(m);
    if (e >= 0) {
      mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
    } else {
      mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
    }
    q.canonicalize();
    return q;
  }

  static Scalar point_from_mpfr(mpfr_srcptr x, const Mode& mode) {
    Scalar s = make_ball(mode);
    mpfr_set(s.ball_.value.get(), x, MPFR_RNDN);  // same precision: exact
    mpfr_set_zero(s.ball_.radius.get(), 1);
    return s;
  }

  static const Ball& ball(const Scalar& s) { return s.ball_; }
  static Ball& ball(Scalar& s) { return s.ball_; }
  static const mpq_class& rat(const Scalar& s) { return s.rat_; }
};

namespace {

using Ball = ScalarOps::Ball;

// radius += |extra| rounded up (64-bit radius arithmetic, always RNDU).
void radius_add(Ball& b, mpfr_srcptr extra) {
  mpfr_add(b.radius.get(), b.radius.get(), extra, MPFR_RNDU);
}

}  // namespace

Scalar Scalar::from_mpq(const mpq_class& q, const Mode& mode) {
  if (mode.kind == Mode::Kind::rational) {
    mpq_class c(q);
    c.canonicalize();
    return ScalarOps::make_rational(std::move(c), mode);
  }
  Scalar s = ScalarOps::make_ball(mode);
  Ball& b = ScalarOps::ball(s);
  int t = mpfr_set_q(b.value.get(), q.get_mpq_t(), MPFR_RNDN);
  ScalarOps::absorb_ternary(b, t);
  return s;
}

Scalar Scalar::from_long(long n, const Mode& mode) {
  if (mode.kind == Mode::Kind::rational) {
    return ScalarOps::make_rational(mpq_class(n), mode);
  }
  Scalar s = ScalarOps::make_ball(mode);
  Ball& b = ScalarOps::ball(s);
  int t = mpfr_set_si(b.value.get(), n, MPFR_RNDN);
  ScalarOps::absorb_ternary(b, t);
  return s;
}

Scalar Scalar::parse(const std::string& text, const Mode& mode) {
  if (text.empty()) throw SpecError("empty numeric literal");
  auto fail = [&]() -> void {
    throw SpecError("cannot parse numeric literal \"" + text + "\"");
  };

  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    // "p/q" with optional leading sign on p; both parts plain integers.
    const std::string num = text.substr(0, slash);
    const std::string den = text.substr(slash + 1);
    auto is_int = [](const std::string& s, bool sign_ok) {
      std::size_t i = 0;
      if (sign_ok && i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
      if (i == s.size()) return false;
      for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
      }
      return true;
    };
    if (!is_int(num, true) || !is_int(den, false)) fail();
    mpq_class q;
    if (mpq_set_str(q.get_mpq_t(), text.c_str(), 10) != 0) fail();
    if (mpz_sgn(mpq_denref(q.get_mpq_t())) == 0) {
      throw SpecError("zero denominator in \"" + text + "\"");
    }
    q.canonicalize();
    return from_mpq(q, mode);
  }

  // Decimal form: [sign] digits [. digits] [ (e|E) [sign] digits ],
  // converted exactly to digits * 10^(exponent - fraction length).
  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') {
    negative = (text[i] == '-');
    ++i;
  }
  std::string digits;
  long frac_len = 0;
  bool saw_digit = false;
  for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
    digits += text[i];
    saw_digit = true;
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      digits += text[i];
      ++frac_len;
      saw_digit = true;
    }
  }
  if (!saw_digit) fail();
  long exp10 = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      exp_neg = (text[i] == '-');
      ++i;
    }
    if (i == text.size()) fail();
    std::string exp_digits;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      exp_digits += text[i];
    }
    if (exp_digits.size() > 6) throw SpecError("exponent too large in \"" + text + "\"");
    exp10 = std::strtol(exp_digits.c_str(), nullptr, 10);
    if (exp_neg) exp10 = -exp10;
  }
  if (i != text.size()) fail();

  mpz_class mantissa(digits.empty() ? "0" : digits, 10);
  mpq_class q(mantissa);
  long shift = exp10 - frac_len;
  mpz_class pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  if (shift >= 0) {
    q *= mpq_class(pow10);
  } else {
    q /= mpq_class(pow10);
  }
  if (negative) q = -q;
  q.canonicalize();
  return from_mpq(q, mode);
}

Scalar Scalar::sqrt_ulong(unsigned long n, const Mode& mode) {
  if (mode.kind == Mode::Kind::rational) {
    throw SpecError("sqrt is not available in rational mode");
  }
  Scalar s = ScalarOps::make_ball(mode);
  Ball& b = ScalarOps::ball(s);
  detail::Mpfr t(mode.precision);
  mpfr_set_ui(t.get(), n, MPFR_RNDN);  // exact for any sane n
  int in = mpfr_sqrt(b.value.get(), t.get(), MPFR_RNDN);
  ScalarOps::absorb_ternary(b, in);
  return s;
}

bool Scalar::is_point() const {
  if (is_rational()) return true;
  return mpfr_zero_p(ball_.radius.get()) != 0;
}

Scalar Scalar::operator+(const Scalar& o) const {
  ScalarOps::require_same_mode(*this, o);
  if (is_rational()) return ScalarOps::make_rational(rat_ + o.rat_, mode_);
  Scalar out = ScalarOps::make_ball(mode_);
  Ball& b = ScalarOps::ball(out);
  int t = mpfr_add(b.value.get(), ball_.value.get(), o.ball_.value.get(), MPFR_RNDN);
  mpfr_add(b.radius.get(), ball_.radius.get(), o.ball_.radius.get(), MPFR_RNDU);
  ScalarOps::absorb_ternary(b, t);
  return out;
}

Scalar Scalar::operator-(const Scalar& o) const {
  ScalarOps::require_same_mode(*this, o);
  if (is_rational()) return ScalarOps::make_rational(rat_ - o.rat_, mode_);
  Scalar out = ScalarOps::make_ball(mode_);
  Ball& b = ScalarOps::ball(out);
  int t = mpfr_sub(b.value.get(), ball_.value.get(), o.ball_.value.get(), MPFR_RNDN);
  mpfr_add(b.radius.get(), ball_.radius.get(), o.ball_.radius.get(), MPFR_RNDU);
  ScalarOps::absorb_ternary(b, t);
  return out;
}

Scalar Scalar::operator*(const Scalar& o) const {
  ScalarOps::require_same_mode(*this, o);
  if (is_rational()) return ScalarOps::make_rational(rat_ * o.rat_, mode_);
  Scalar out = ScalarOps::make_ball(mode_);
  Ball& b = ScalarOps::ball(out);
  int t = mpfr_mul(b.value.get(), ball_.value.get(), o.ball_.value.get(), MPFR_RNDN);
  // |ab' - a'b'| <= |a||rb| + |b||ra| + ra rb, each term rounded up.
  detail::Mpfr term(64);
  detail::Mpfr mag(64);
  mpfr_abs(mag.get(), ball_.value.get(), MPFR_RNDU);
  mpfr_mul(term.get(), mag.get(), o.ball_.radius.get(), MPFR_RNDU);
  radius_add(b, term.get());
  mpfr_abs(mag.get(), o.ball_.value.get(), MPFR_RNDU);
  mpfr_mul(term.get(), mag.get(), ball_.radius.get(), MPFR_RNDU);
  radius_add(b, term.get());
  mpfr_mul(term.get(), ball_.radius.get(), o.ball_.radius.get(), MPFR_RNDU);
  radius_add(b, term.get());
  ScalarOps::absorb_ternary(b, t);
  return out;
}

Scalar Scalar::operator/(const Scalar& o) const {
  ScalarOps::require_same_mode(*this, o);
  if (is_rational()) {
    if (o.rat_ == 0) throw SpecError("division by exact zero");
    return ScalarOps::make_rational(rat_ / o.rat_, mode_);
  }
  // The divisor ball must exclude zero.
  if (mpfr_zero_p(o.ball_.value.get()) ||
      mpfr_cmpabs(o.ball_.value.get(), o.ball_.radius.get()) <= 0) {
    throw PrecisionExhausted("division by a ball that may contain zero");
  }
  Scalar out = ScalarOps::make_ball(mode_);
  Ball& b = ScalarOps::ball(out);
  int t = mpfr_div(b.value.get(), ball_.value.get(), o.ball_.value.get(), MPFR_RNDN);
  // |a/b - a'/b'| <= (ra + |a/b| rb) / (|b'| - rb); we bound |a/b| by the
  // rounded quotient plus one ulp when rounding was inexact (an exact
  // quotient needs no pad, and an inexact zero would be an underflow), and
  // the denominator from below with RNDD.
  detail::Mpfr quot_mag(64);
  mpfr_abs(quot_mag.get(), b.value.get(), MPFR_RNDU);
  if (t != 0) {
    if (mpfr_zero_p(b.value.get())) {
      throw PrecisionExhausted("ball arithmetic underflowed");
    }
    detail::Mpfr ulp(64);
    mpfr_set_ui_2exp(ulp.get(), 1,
                     mpfr_get_exp(b.value.get()) - mpfr_get_prec(b.value.get()),
                     MPFR_RNDU);
    mpfr_add(quot_mag.get(), quot_mag.get(), ulp.get(), MPFR_RNDU);
  }

  detail::Mpfr numer(64);
  mpfr_mul(numer.get(), quot_mag.get(), o.ball_.radius.get(), MPFR_RNDU);
  mpfr_add(numer.get(), numer.get(), ball_.radius.get(), MPFR_RNDU);

  detail::Mpfr denom(64);
  detail::Mpfr omag(64);
  mpfr_abs(omag.get(), o.ball_.value.get(), MPFR_RNDD);
  mpfr_sub(denom.get(), omag.get(), o.ball_.radius.get(), MPFR_RNDD);
  if (mpfr_sgn(denom.get()) <= 0) {
    throw PrecisionExhausted("division by a ball that may contain zero");
  }
  detail::Mpfr extra(64);
  mpfr_div(extra.get(), numer.get(), denom.get(), MPFR_RNDU);
  radius_add(b, extra.get());
  ScalarOps::absorb_ternary(b, t);
  return out;
}

Scalar Scalar::operator-() const {
  if (is_rational()) return ScalarOps::make_rational(-rat_, mode_);
  Scalar out = ScalarOps::make_ball(mode_);
  Ball& b = ScalarOps::ball(out);
  mpfr_neg(b.value.get(), ball_.value.get(), MPFR_RNDN);  // exact
  mpfr_set(b.radius.get(), ball_.radius.get(), MPFR_RNDU);
  return out;
}

Scalar Scalar::abs() const {
  if (is_rational()) return ScalarOps::make_rational(::abs(rat_), mode_);
  // |x| for x in [v-r, v+r] lies inside [|v|-r, |v|+r], so the same radius
  // around |v| is a valid (if not minimal) enclosure.
  Scalar out = ScalarOps::make_ball(mode_);
  Ball& b = ScalarOps::ball(out);
  mpfr_abs(b.value.get(), ball_.value.get(), MPFR_RNDN);  // exact
  mpfr_set(b.radius.get(), ball_.radius.get(), MPFR_RNDU);
  return out;
}

Scalar Scalar::pow_ui(unsigned long e) const {
  Scalar acc = one(mode_);
  Scalar base = *this;
  // Square-and-multiply with ball-correct products.
  while (e > 0) {
    if (e & 1ul) acc = acc * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return acc;
}

Scalar Scalar::min(const Scalar& a, const Scalar& b) {
  ScalarOps::require_same_mode(a, b);
  Order c = compare(a, b);
  if (c == Order::lt || c == Order::eq) return a;
  if (c == Order::gt) return b;
  // Overlapping balls: return the hull-endpoint ball [min lo, min hi].
  detail::Mpfr lo_a = ScalarOps::ball_lo(ScalarOps::ball(a));
  detail::Mpfr lo_b = ScalarOps::ball_lo(ScalarOps::ball(b));
  detail::Mpfr hi_a = ScalarOps::ball_hi(ScalarOps::ball(a));
  detail::Mpfr hi_b = ScalarOps::ball_hi(ScalarOps::ball(b));
  mpfr_srcptr lo = mpfr_less_p(lo_a.get(), lo_b.get()) ? lo_a.get() : lo_b.get();
  mpfr_srcptr hi = mpfr_less_p(hi_a.get(), hi_b.get()) ? hi_a.get() : hi_b.get();
  Scalar out = ScalarOps::make_ball(a.mode());
  Ball& o = ScalarOps::ball(out);
  int t = mpfr_add(o.value.get(), lo, hi, MPFR_RNDN);
  int t2 = mpfr_div_2ui(o.value.get(), o.value.get(), 1, MPFR_RNDN);
  detail::Mpfr half(64);
  mpfr_sub(half.get(), hi, lo, MPFR_RNDU);
  mpfr_div_2ui(half.get(), half.get(), 1, MPFR_RNDU);
  mpfr_set(o.radius.get(), half.get(), MPFR_RNDU);
  ScalarOps::absorb_ternary(o, t | t2);
  return out;
}

Scalar Scalar::max(const Scalar& a, const Scalar& b) {
  Scalar neg = min(-a, -b);
  return -neg;
}

Order Scalar::compare(const Scalar& a, const Scalar& b) {
  ScalarOps::require_same_mode(a, b);
  if (a.is_rational()) {
    int c = cmp(a.rat_, b.rat_);
    return c < 0 ? Order::lt : (c > 0 ? Order::gt : Order::eq);
  }
  const bool points = a.is_point() && b.is_point();
  if (points) {
    int c = mpfr_cmp(a.ball_.value.get(), b.ball_.value.get());
    return c < 0 ? Order::lt : (c > 0 ? Order::gt : Order::eq);
  }
  detail::Mpfr a_hi = ScalarOps::ball_hi(a.ball_);
  detail::Mpfr b_lo = ScalarOps::ball_lo(b.ball_);
  if (mpfr_less_p(a_hi.get(), b_lo.get())) return Order::lt;
  detail::Mpfr a_lo = ScalarOps::ball_lo(a.ball_);
  detail::Mpfr b_hi = ScalarOps::ball_hi(b.ball_);
  if (mpfr_greater_p(a_lo.get(), b_hi.get())) return Order::gt;
  return Order::indeterminate;
}

Ternary Scalar::lt(const Scalar& a, const Scalar& b) {
  ScalarOps::require_same_mode(a, b);
  if (a.is_rational()) {
    return cmp(a.rat_, b.rat_) < 0 ? Ternary::yes : Ternary::no;
  }
  detail::Mpfr a_hi = ScalarOps::ball_hi(a.ball_);
  detail::Mpfr b_lo = ScalarOps::ball_lo(b.ball_);
  if (mpfr_less_p(a_hi.get(), b_lo.get())) return Ternary::yes;
  detail::Mpfr a_lo = ScalarOps::ball_lo(a.ball_);
  detail::Mpfr b_hi = ScalarOps::ball_hi(b.ball_);
  if (mpfr_greaterequal_p(a_lo.get(), b_hi.get())) return Ternary::no;
  return Ternary::indeterminate;
}

Ternary Scalar::le(const Scalar& a, const Scalar& b) {
  ScalarOps::require_same_mode(a, b);
  if (a.is_rational()) {
    return cmp(a.rat_, b.rat_) <= 0 ? Ternary::yes : Ternary::no;
  }
  detail::Mpfr a_hi = ScalarOps::ball_hi(a.ball_);
  detail::Mpfr b_lo = ScalarOps::ball_lo(b.ball_);
  if (mpfr_lessequal_p(a_hi.get(), b_lo.get())) return Ternary::yes;
  detail::Mpfr a_lo = ScalarOps::ball_lo(a.ball_);
  detail::Mpfr b_hi = ScalarOps::ball_hi(b.ball_);
  if (mpfr_greater_p(a_lo.get(), b_hi.get())) return Ternary::no;
  return Ternary::indeterminate;
}

Order Scalar::sign() const {
  return compare(*this, zero(mode_));
}

mpz_class Scalar::floor_integer() const {
  if (is_rational()) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), mpq_numref(rat_.get_mpq_t()),
               mpq_denref(rat_.get_mpq_t()));
    return q;
  }
  detail::Mpfr lo = ScalarOps::ball_lo(ball_);
  detail::Mpfr hi = ScalarOps::ball_hi(ball_);
  mpfr_floor(lo.get(), lo.get());
  mpfr_floor(hi.get(), hi.get());
  if (!mpfr_equal_p(lo.get(), hi.get())) {
    throw PrecisionExhausted("floor is ambiguous: ball straddles an integer");
  }
  mpz_class out;
  mpfr_get_z(out.get_mpz_t(), lo.get(), MPFR_RNDN);  // integral: exact
  return out;
}

Scalar Scalar::lower_point() const {
  if (is_rational()) return *this;
  detail::Mpfr lo = ScalarOps::ball_lo(ball_);
  return ScalarOps::point_from_mpfr(lo.get(), mode_);
}

Scalar Scalar::upper_point() const {
  if (is_rational()) return *this;
  detail::Mpfr hi = ScalarOps::ball_hi(ball_);
  return ScalarOps::point_from_mpfr(hi.get(), mode_);
}

Scalar Scalar::midpoint_point() const {
  if (is_rational()) return *this;
  return ScalarOps::point_from_mpfr(ball_.value.get(), mode_);
}

mpq_class Scalar::point_mpq() const {
  if (is_rational()) return rat_;
  if (!is_point()) {
    throw PrecisionExhausted("point_mpq on a ball with nonzero radius");
  }
  return ScalarOps::mpfr_to_mpq(ball_.value.get());
}

std::string Scalar::str() const {
  mpq_class q = is_rational() ? rat_ : ScalarOps::mpfr_to_mpq(ball_.value.get());
  return q.get_str();
}

double Scalar::to_double() const {
  if (is_rational()) return rat_.get_d();
  return mpfr_get_d(ball_.value.get(), MPFR_RNDN);
}

Scalar golden_ratio(const Mode& mode) {
  return (Scalar::sqrt_ulong(5, mode) + 1) / 2;
}

}  // namespace absgame
