#pragma once

// Noble frequencies and their Diophantine constants.
//
// A noble target is built from two Farey-neighbour rationals n1/d1, n2/d2 as
//   omega = (n1 + sigma n2) / (d1 + sigma d2),   sigma = (sqrt 5 + 1)/2.
//
// Working in Z[sigma] (sigma^2 = sigma + 1) keeps the continued fraction of
// omega exact: every remainder is (A + B sigma)/(C + D sigma) with integer
// entries, partial quotients come from exact sign tests, and the moment the
// remainder state equals sigma itself the expansion is provably all ones from
// there on.  That closes the tail of the Diophantine scan rigorously.

#include <cstdint>
#include <string>
#include <vector>

#include "vkam/interval.hpp"

namespace vkam {

class precision_error : public interval_error {
public:
  explicit precision_error(const std::string& what) : interval_error(what) {}
};

struct Rational {
  long long num = 0;
  long long den = 1;
};

namespace detail {

inline long long checked_ll(long long a, long long b, char op) {
  long long r = 0;
  bool ovf = op == '+' ? __builtin_add_overflow(a, b, &r)
            : op == '-' ? __builtin_sub_overflow(a, b, &r)
                        : __builtin_mul_overflow(a, b, &r);
  if (ovf) throw precision_error("integer overflow in exact noble arithmetic");
  return r;
}

// sign of u + v*sigma, exact.  sigma = (1+sqrt5)/2, so
// 2(u + v sigma) = (2u + v) + v sqrt5.
inline int sign_u_v_sigma(long long u, long long v) {
  long long a = checked_ll(checked_ll(2, u, '*'), v, '+');  // 2u + v
  if (v == 0) return a > 0 ? 1 : a < 0 ? -1 : 0;
  if (a == 0) return v > 0 ? 1 : -1;
  if (a > 0 && v > 0) return 1;
  if (a < 0 && v < 0) return -1;
  // Opposite signs: compare a^2 with 5 v^2 in 128 bits.
  __int128 a2 = (__int128)a * a;
  __int128 v5 = 5 * (__int128)v * v;
  if (a2 == v5) throw precision_error("rational noble input (sqrt5 cancelled)");
  bool abs_a_wins = a2 > v5;
  // |a| > sqrt5 |v|: the sign of a decides; otherwise sqrt5 v decides.
  return abs_a_wins ? (a > 0 ? 1 : -1) : (v > 0 ? 1 : -1);
}

}  // namespace detail

// Enclosure of sigma = (sqrt 5 + 1)/2.
inline Interval golden_sigma() {
  return mul_pow2(sqrt(Interval(5.0)) + Interval(1.0), -1);
}

struct NobleFrequency {
  Rational first;   // n1/d1
  Rational second;  // n2/d2

  NobleFrequency(Rational a, Rational b) : first(a), second(b) {
    if (a.den <= 0 || b.den <= 0) throw domain_error("noble: denominators must be positive");
  }

  // (n1 + sigma n2) / (d1 + sigma d2)
  Interval value() const {
    Interval s = golden_sigma();
    Interval num = Interval(double(first.num)) + s * Interval(double(second.num));
    Interval den = Interval(double(first.den)) + s * Interval(double(second.den));
    return num / den;
  }

  double value_mid() const { return value().mid(); }
};

// The noble mediant as a plain double (frequency-map side).
inline double noble_mediant(const Rational& a, const Rational& b) {
  return NobleFrequency(a, b).value_mid();
}

namespace detail {

// Continued-fraction state in Z[sigma]: x = (A + B sigma)/(C + D sigma),
// denominator normalized positive.
struct SigmaCF {
  long long A, B, C, D;

  void normalize_sign() {
    if (sign_u_v_sigma(C, D) < 0) { A = -A; B = -B; C = -C; D = -D; }
  }

  // x - n >= 0 ?
  bool at_least(long long n) const {
    long long u = checked_ll(A, checked_ll(n, C, '*'), '-');
    long long v = checked_ll(B, checked_ll(n, D, '*'), '-');
    return sign_u_v_sigma(u, v) >= 0;
  }

  long long exact_floor(double approx) const {
    long long n = (long long)std::floor(approx);
    while (!at_least(n)) --n;
    while (at_least(n + 1)) ++n;
    return n;
  }

  bool is_golden() const { return A == D && B == C + D; }
};

}  // namespace detail

struct ConvergentScan {
  std::vector<long long> partial_quotients;
  std::vector<std::pair<long long, long long>> convergents;  // (p, q)
  int golden_from = -1;  // index into partial_quotients where the all-ones tail starts
};

// Exact continued fraction of a noble frequency, stopped once the remainder
// equals sigma (all-ones tail certified).
inline ConvergentScan noble_continued_fraction(const NobleFrequency& w, int max_steps = 200) {
  detail::SigmaCF x{w.first.num, w.second.num, w.first.den, w.second.den};
  x.normalize_sign();
  if (detail::sign_u_v_sigma(x.A, x.B) <= 0)
    throw domain_error("noble frequency must be positive");
  ConvergentScan out;
  Interval s = golden_sigma();
  long long pprev = 0, qprev = 1, p = 1, q = 0;
  double approx = w.value_mid();
  for (int k = 0; k < max_steps; ++k) {
    long long a = x.exact_floor(approx);
    out.partial_quotients.push_back(a);
    if (k > 0 && a < 1) throw precision_error("continued fraction with nonpositive quotient");
    long long pn = detail::checked_ll(detail::checked_ll(a, p, '*'), pprev, '+');
    long long qn = detail::checked_ll(detail::checked_ll(a, q, '*'), qprev, '+');
    pprev = p; qprev = q; p = pn; q = qn;
    out.convergents.emplace_back(p, q);
    // remainder: 1/(x - a)
    long long A2 = detail::checked_ll(x.A, detail::checked_ll(a, x.C, '*'), '-');
    long long B2 = detail::checked_ll(x.B, detail::checked_ll(a, x.D, '*'), '-');
    x = detail::SigmaCF{x.C, x.D, A2, B2};
    x.normalize_sign();
    if (x.is_golden()) {
      out.golden_from = k + 1;
      return out;
    }
    // refresh the floating hint
    {
      Interval rem = (Interval(double(x.A)) + s * Interval(double(x.B))) /
                     (Interval(double(x.C)) + s * Interval(double(x.D)));
      approx = rem.mid();
    }
  }
  throw precision_error("noble continued fraction did not reach the golden tail");
}

// Rigorous Diophantine constant: gamma such that
//   |k1 omega + k2| >= gamma / max(|k1|, |k2|)^tau   for all (k1,k2) != (0,0),
// which implies the same bound with the (|k1|+|k2|)^tau weight.  Only tau = 1
// (constant-type noble targets) is supported.
inline Interval diophantine_gamma(const NobleFrequency& w, int tau = 1) {
  if (tau != 1) throw domain_error("diophantine_gamma: only tau = 1 is implemented");
  ConvergentScan cf = noble_continued_fraction(w);
  Interval s = golden_sigma();
  Interval den = Interval(double(w.first.den)) + s * Interval(double(w.second.den));
  Interval omega = (Interval(double(w.first.num)) + s * Interval(double(w.second.num))) / den;
  if (omega.lo <= 0.0 || omega.hi >= 1.0)
    throw domain_error("diophantine_gamma expects omega in (0,1)");

  // k1 = 0 row: |k2| * |k2| >= 1.  Non-nearest k2 rows: >= 1/2.
  Interval best(1.0);
  best = min(best, Interval(0.5));

  // Convergent candidates q_n * |q_n omega - p_n| evaluated exactly in
  // Z[sigma]; for k1 in [q_n, q_{n+1}) the best-approximation property
  // bounds the whole block from below by this value.
  for (auto [p, q] : cf.convergents) {
    long long u = detail::checked_ll(detail::checked_ll(q, w.first.num, '*'),
                                     detail::checked_ll(p, w.first.den, '*'), '-');
    long long v = detail::checked_ll(detail::checked_ll(q, w.second.num, '*'),
                                     detail::checked_ll(p, w.second.den, '*'), '-');
    Interval err = abs(Interval(double(u)) + s * Interval(double(v))) / den;
    Interval cand = Interval(double(std::max(p, q))) * err;
    best = min(best, cand);
  }

  // All-ones tail: q_n |q_n omega - p_n| = 1/(x_{n+1} + q_{n-1}/q_n) with
  // x_{n+1} = sigma exactly, so >= 1/(sigma + 1).
  Interval tail = Interval(1.0) / (s + Interval(1.0));
  best = min(best, tail);
  return nonneg(best);
}

// Parse "43/74" style fractions.
inline Rational parse_rational(std::string_view text) {
  std::string t(text);
  auto slash = t.find('/');
  Rational r;
  try {
    if (slash == std::string::npos) {
      r.num = std::stoll(t);
      r.den = 1;
    } else {
      r.num = std::stoll(t.substr(0, slash));
      r.den = std::stoll(t.substr(slash + 1));
    }
  } catch (const std::exception&) {
    throw domain_error("bad rational: '" + t + "'");
  }
  if (r.den <= 0) throw domain_error("bad rational (nonpositive denominator): '" + t + "'");
  return r;
}

}  // namespace vkam
