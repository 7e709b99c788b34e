#pragma once

// Validated interval arithmetic over IEEE doubles.
//
// Every operation returns an interval that contains the exact real result
// for all selections of the operands.  Directed rounding is done by bumping
// each natively rounded endpoint one ulp outward (nextafter), so no global
// FP mode is touched and results are identical across threads and platforms
// with IEEE round-to-nearest.  Non-finite endpoints are an error: a proof
// must never rest on an enclosure that silently widened to infinity.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vkam {

class interval_error : public std::runtime_error {
public:
  explicit interval_error(const std::string& what) : std::runtime_error(what) {}
};

class domain_error : public interval_error {
public:
  explicit domain_error(const std::string& what) : interval_error(what) {}
};

class overflow_error : public interval_error {
public:
  explicit overflow_error(const std::string& what) : interval_error(what) {}
};

namespace detail {

inline double down(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }
inline double up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }

inline void require_finite(double lo, double hi, const char* op) {
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw overflow_error(std::string("non-finite endpoint in ") + op);
}

}  // namespace detail

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  // Point interval; the double is taken as exact.
  explicit Interval(double x) : lo(x), hi(x) { detail::require_finite(lo, hi, "point"); }
  Interval(double l, double h) : lo(l), hi(h) {
    detail::require_finite(lo, hi, "ctor");
    if (lo > hi) throw interval_error("interval with lo > hi");
  }

  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  bool contains_zero() const { return lo <= 0.0 && 0.0 <= hi; }
  bool is_zero() const { return lo == 0.0 && hi == 0.0; }
  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  // Magnitude (largest |x|) and mignitude (smallest |x|) over the interval.
  double mag() const { return std::max(std::fabs(lo), std::fabs(hi)); }
  double mig() const { return contains_zero() ? 0.0 : std::min(std::fabs(lo), std::fabs(hi)); }
};

inline Interval hull(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}

inline Interval intersect(const Interval& a, const Interval& b) {
  double l = std::max(a.lo, b.lo), h = std::min(a.hi, b.hi);
  if (l > h) throw interval_error("empty intersection");
  return Interval(l, h);
}

inline Interval operator-(const Interval& a) { return Interval(-a.hi, -a.lo); }

inline Interval operator+(const Interval& a, const Interval& b) {
  double l = detail::down(a.lo + b.lo);
  double h = detail::up(a.hi + b.hi);
  detail::require_finite(l, h, "add");
  return Interval(l, h);
}

inline Interval operator-(const Interval& a, const Interval& b) {
  double l = detail::down(a.lo - b.hi);
  double h = detail::up(a.hi - b.lo);
  detail::require_finite(l, h, "sub");
  return Interval(l, h);
}

inline Interval operator*(const Interval& a, const Interval& b) {
  const double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  double l = detail::down(std::min(std::min(p1, p2), std::min(p3, p4)));
  double h = detail::up(std::max(std::max(p1, p2), std::max(p3, p4)));
  // 0 * inf from overflowed partials would give NaN; rejected here either way.
  detail::require_finite(l, h, "mul");
  return Interval(l, h);
}

inline Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains_zero()) throw domain_error("division by interval containing zero");
  const double q1 = a.lo / b.lo, q2 = a.lo / b.hi, q3 = a.hi / b.lo, q4 = a.hi / b.hi;
  double l = detail::down(std::min(std::min(q1, q2), std::min(q3, q4)));
  double h = detail::up(std::max(std::max(q1, q2), std::max(q3, q4)));
  detail::require_finite(l, h, "div");
  return Interval(l, h);
}

inline Interval& operator+=(Interval& a, const Interval& b) { a = a + b; return a; }
inline Interval& operator-=(Interval& a, const Interval& b) { a = a - b; return a; }
inline Interval& operator*=(Interval& a, const Interval& b) { a = a * b; return a; }

// Exact scaling by a power of two (no rounding, overflow checked).
inline Interval mul_pow2(const Interval& a, int e) {
  double l = std::ldexp(a.lo, e), h = std::ldexp(a.hi, e);
  detail::require_finite(l, h, "mul_pow2");
  return Interval(l, h);
}

// Multiplication by a small exact integer.
inline Interval mul_int(const Interval& a, long long n) {
  return a * Interval(static_cast<double>(n));
}

// Clip the lower endpoint at zero for quantities that are nonnegative by
// construction (norms, squares); sound because the true value is >= 0.
inline Interval nonneg(const Interval& a) {
  if (a.hi < 0.0) throw interval_error("nonneg applied to certainly negative interval");
  return Interval(std::max(0.0, a.lo), a.hi);
}

inline Interval abs(const Interval& a) {
  if (a.lo >= 0.0) return a;
  if (a.hi <= 0.0) return -a;
  return Interval(0.0, a.mag());
}

inline Interval min(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo, b.lo), std::min(a.hi, b.hi));
}

inline Interval max(const Interval& a, const Interval& b) {
  return Interval(std::max(a.lo, b.lo), std::max(a.hi, b.hi));
}

// a.hi < b.lo: every x in a is below every y in b.
inline bool certainly_less(const Interval& a, const Interval& b) { return a.hi < b.lo; }

inline Interval sqr(const Interval& a) {
  double m = a.mag(), mg = a.mig();
  double l = detail::down(mg * mg);
  double h = detail::up(m * m);
  if (mg == 0.0) l = 0.0;
  detail::require_finite(l, h, "sqr");
  return Interval(std::max(l, 0.0), h);
}

inline Interval sqrt(const Interval& a) {
  if (a.lo < 0.0) throw domain_error("sqrt of interval with negative lower bound");
  // IEEE sqrt is correctly rounded, one ulp outward is enough.
  double l = a.lo == 0.0 ? 0.0 : std::max(0.0, detail::down(std::sqrt(a.lo)));
  double h = detail::up(std::sqrt(a.hi));
  return Interval(l, h);
}

// Integer power by exponentiation on endpoints with parity handling.
inline Interval pow_int(const Interval& a, long long n) {
  if (n == 0) return Interval(1.0);
  if (n < 0) return Interval(1.0) / pow_int(a, -n);
  auto pos_pow = [](double x, long long k, bool round_up) {
    // x >= 0; directed product chain.
    double acc = 1.0, base = x;
    while (k > 0) {
      if (k & 1) acc = round_up ? detail::up(acc * base) : detail::down(acc * base);
      k >>= 1;
      if (k) base = round_up ? detail::up(base * base) : detail::down(base * base);
    }
    return acc;
  };
  if ((n & 1) == 0) {
    double m = a.mag(), mg = a.mig();
    double l = mg == 0.0 ? 0.0 : std::max(0.0, pos_pow(mg, n, false));
    double h = pos_pow(m, n, true);
    detail::require_finite(l, h, "pow_int");
    return Interval(l, h);
  }
  // Odd power: monotone.
  auto signed_pow = [&](double x, bool round_up) {
    if (x >= 0.0) return pos_pow(x, n, round_up);
    return -pos_pow(-x, n, !round_up);
  };
  double l = signed_pow(a.lo, false), h = signed_pow(a.hi, true);
  detail::require_finite(l, h, "pow_int");
  return Interval(l, h);
}

namespace detail {

// Largest c with c^n <= x (downward n-th root of a nonnegative double).
inline double root_down(double x, long long n) {
  if (x == 0.0) return 0.0;
  double c = std::pow(x, 1.0 / static_cast<double>(n));
  // Verify with rigorous interval power; bump until valid.
  for (int guard = 0; guard < 64; ++guard) {
    if (pow_int(Interval(c), n).hi <= x) return c;
    c = down(c);
  }
  throw interval_error("root_down failed to verify");
}

inline double root_up(double x, long long n) {
  if (x == 0.0) return 0.0;
  double c = std::pow(x, 1.0 / static_cast<double>(n));
  for (int guard = 0; guard < 64; ++guard) {
    if (pow_int(Interval(c), n).lo >= x) return c;
    c = up(c);
  }
  throw interval_error("root_up failed to verify");
}

}  // namespace detail

// n-th root, n >= 1, of a nonnegative interval.
inline Interval root(const Interval& a, long long n) {
  if (n < 1) throw domain_error("root order must be >= 1");
  if (a.lo < 0.0) throw domain_error("root of interval with negative lower bound");
  if (n == 1) return a;
  return Interval(detail::root_down(a.lo, n), detail::root_up(a.hi, n));
}

namespace detail {

// exp on a point within [-0.5, 0.5] by Taylor series with a Lagrange
// remainder: |R_N| <= 2 |y|^{N+1} / (N+1)!  for |y| <= 1/2.
inline Interval exp_small(const Interval& y) {
  Interval sum(1.0), term(1.0);
  int used = 0;
  double fact = 1.0;
  for (int k = 1; k <= 22; ++k) {
    term = term * y / Interval(static_cast<double>(k));
    used = k;
    fact *= k + 1;
    if (term.mag() == 0.0) return sum;  // argument exactly zero
    sum += term;
    if (term.mag() < 1e-22 * sum.mig()) break;
  }
  Interval rem = mul_pow2(pow_int(abs(y), used + 1) / Interval(fact), 1);
  return sum + Interval(-rem.hi, rem.hi);
}

}  // namespace detail

inline Interval exp(const Interval& a) {
  if (a.is_zero()) return Interval(1.0);
  if (a.hi > 709.0 || a.lo < -745.0) {
    if (a.hi > 709.0) throw overflow_error("exp overflow");
    // Deep negative arguments underflow toward zero; [0, up(exp(hi))] is sound.
  }
  // Scale so |a / 2^m| <= 1/2, evaluate the series, then square m times.
  int m = 0;
  double amax = a.mag();
  while (std::ldexp(amax, -m) > 0.5) ++m;
  Interval y = mul_pow2(a, -m);
  Interval r = detail::exp_small(y);
  for (int i = 0; i < m; ++i) r = sqr(r);
  if (r.lo < 0.0) r.lo = 0.0;
  detail::require_finite(r.lo, r.hi, "exp");
  return r;
}

namespace constants {

// Tight two-ulp enclosures around the nearest double; verified in tests.
inline Interval pi() {
  const double n = 3.14159265358979323846;
  return Interval(detail::down(n), detail::up(n));
}
inline Interval ln2() {
  const double n = 0.69314718055994530942;
  return Interval(detail::down(n), detail::up(n));
}
inline Interval ln10() {
  const double n = 2.30258509299404568402;
  return Interval(detail::down(n), detail::up(n));
}
// e^{pi^2/3}, a constant of the KAM threshold formulas.
inline Interval exp_pi2_over_3() { return exp(sqr(pi()) / Interval(3.0)); }

}  // namespace constants

// Natural logarithm: x = f * 2^k with f in [sqrt(1/2), sqrt(2)),
// ln f = 2 atanh t with t = (f-1)/(f+1), |t| <= 0.1716...
inline Interval log(const Interval& a) {
  if (a.lo <= 0.0) throw domain_error("log of interval reaching 0 or below");
  auto log_point = [](double x) {
    int k = 0;
    double f = std::frexp(x, &k);  // f in [0.5, 1)
    if (f < 0.70710678118654752440) { f *= 2.0; k -= 1; }
    Interval fi(f);
    Interval t = (fi - Interval(1.0)) / (fi + Interval(1.0));
    Interval t2 = sqr(t);
    Interval sum = t, pw = t;
    const int N = 12;
    for (int j = 1; j <= N; ++j) {
      pw = pw * t2;
      sum += pw / Interval(static_cast<double>(2 * j + 1));
    }
    // Remainder of the atanh series: sum_{j>N} t^{2j+1}/(2j+1)
    //   <= |t|^{2N+3} / ((2N+3)(1-t^2)).
    Interval tail = pow_int(abs(t), 2 * N + 3) /
                    (Interval(static_cast<double>(2 * N + 3)) * (Interval(1.0) - t2));
    sum += Interval(-tail.hi, tail.hi);
    return mul_pow2(sum, 1) + mul_int(constants::ln2(), k);
  };
  Interval l = log_point(a.lo), h = log_point(a.hi);
  return Interval(l.lo, h.hi);
}

inline Interval log10(const Interval& a) { return log(a) / constants::ln10(); }

// --- Decimal parsing -------------------------------------------------------

namespace detail {

// Exact-value fast path: m * 10^e representable as a double gives a point
// interval, everything else gets the strtod value widened one ulp each way.
inline bool decimal_exact(long long m, int e, double& out) {
  if (m == 0) { out = 0.0; return true; }
  bool neg = m < 0;
  unsigned long long um = neg ? static_cast<unsigned long long>(-(m + 1)) + 1ull
                              : static_cast<unsigned long long>(m);
  __int128 v = um;
  int twos = e;
  if (e > 0) {
    for (int i = 0; i < e; ++i) {
      v *= 5;
      if (v > (__int128)1 << 100) return false;
    }
  } else if (e < 0) {
    for (int i = 0; i < -e; ++i) {
      if (v % 5 != 0) return false;
      v /= 5;
    }
  }
  // Value is v * 2^twos; exact iff v fits in 53 bits after stripping twos.
  while (v != 0 && (v & 1) == 0) { v >>= 1; ++twos; }
  if (v >= (__int128)1 << 53) return false;
  double d = std::ldexp(static_cast<double>((long long)v), twos);
  if (!std::isfinite(d)) return false;
  out = neg ? -d : d;
  return true;
}

}  // namespace detail

// Enclosure of a signed decimal literal; width <= 2 ulp, exact when the
// value is representable.
inline Interval iv_from_decimal(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw domain_error("empty decimal literal");
  // Manual scan: sign, digits, optional fraction, optional exponent.
  size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') { neg = s[i] == '-'; ++i; }
  long long mant = 0;
  int frac_digits = 0, ndigits = 0;
  bool overflow = false, seen_digit = false;
  for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i) {
    seen_digit = true;
    if (!overflow && (mant > 922337203685477579ll)) overflow = true;
    if (!overflow) { mant = mant * 10 + (s[i] - '0'); ++ndigits; }
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i) {
      seen_digit = true;
      if (!overflow && (mant > 922337203685477579ll)) overflow = true;
      if (!overflow) { mant = mant * 10 + (s[i] - '0'); ++frac_digits; ++ndigits; }
    }
  }
  int exp10 = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) { eneg = s[i] == '-'; ++i; }
    if (i >= s.size()) throw domain_error("malformed exponent in decimal literal");
    int ev = 0;
    for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i) {
      ev = ev * 10 + (s[i] - '0');
      if (ev > 5000) throw domain_error("decimal exponent out of range");
    }
    exp10 = eneg ? -ev : ev;
  }
  if (!seen_digit || i != s.size()) throw domain_error("malformed decimal literal: '" + s + "'");

  if (!overflow) {
    double exact = 0.0;
    long long sm = neg ? -mant : mant;
    if (detail::decimal_exact(sm, exp10 - frac_digits, exact))
      return Interval(exact);
  }
  char* end = nullptr;
  double d = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw domain_error("malformed decimal literal: '" + s + "'");
  detail::require_finite(d, d, "iv_from_decimal");
  return Interval(detail::down(d), detail::up(d));
}

// --- Serialization ---------------------------------------------------------
// Endpoints are printed with 17 significant digits, which round-trips every
// double exactly; reading back never shrinks the interval.

inline std::string to_string(const Interval& a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g %.17g", a.lo, a.hi);
  return buf;
}

inline Interval iv_parse_pair(std::string_view text) {
  std::string s(text);
  char* end = nullptr;
  double lo = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw domain_error("bad interval text: '" + s + "'");
  char* end2 = nullptr;
  double hi = std::strtod(end, &end2);
  if (end2 == end) throw domain_error("bad interval text: '" + s + "'");
  return Interval(lo, hi);
}

}  // namespace vkam
