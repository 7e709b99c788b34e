#pragma once

// Taylor-Fourier polynomials with interval coefficients:
//
//   g = sum over (l, k1, k2) of  psi^l (c cos(k1 th + k2 ph) + s sin(k1 th + k2 ph))
//
// stored as a sparse vector sorted by (l, k1, k2) on the canonical half
// lattice (k1 > 0, or k1 == 0 and k2 >= 0).  Real-valuedness is structural;
// the sin coefficient of (0,0) is identically absent.

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "vkam/interval.hpp"

namespace vkam {

class resonance_error : public interval_error {
public:
  resonance_error(int k1, int k2)
      : interval_error("small divisor not separated from zero at harmonic (" +
                       std::to_string(k1) + "," + std::to_string(k2) + ")"),
        k1(k1), k2(k2) {}
  int k1, k2;
};

struct Harmonic {
  int k1 = 0;
  int k2 = 0;
  bool canonical() const { return k1 > 0 || (k1 == 0 && k2 >= 0); }
  int degree() const { return std::max(std::abs(k1), std::abs(k2)); }
  friend bool operator==(const Harmonic&, const Harmonic&) = default;
};

struct TFTerm {
  int l = 0;
  Harmonic k;
  Interval c;  // cos coefficient
  Interval s;  // sin coefficient; exactly zero on (0,0)

  bool key_less(const TFTerm& o) const {
    if (l != o.l) return l < o.l;
    if (k.k1 != o.k.k1) return k.k1 < o.k.k1;
    return k.k2 < o.k.k2;
  }
  bool key_equal(const TFTerm& o) const { return l == o.l && k == o.k; }
};

class TFSeries {
public:
  TFSeries() = default;

  static TFSeries zero() { return {}; }

  // c * psi^l cos(k1 th + k2 ph) + s * psi^l sin(...), any sign of (k1,k2).
  static TFSeries term(int l, int k1, int k2, Interval c, Interval s = Interval(0.0)) {
    TFSeries g;
    g.add_term(l, k1, k2, c, s);
    g.normalize();
    return g;
  }

  bool empty() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }
  const std::vector<TFTerm>& terms() const { return terms_; }

  int degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, t.k.degree());
    return d;
  }

  int max_l() const {
    int m = 0;
    for (const auto& t : terms_) m = std::max(m, t.l);
    return m;
  }

  // Coefficient pair at (l, k1, k2); (0,0) if absent.  (k1,k2) in any sign,
  // fetched through the canonical representative.
  std::pair<Interval, Interval> coeff(int l, int k1, int k2) const {
    bool flip = !Harmonic{k1, k2}.canonical();
    if (flip) { k1 = -k1; k2 = -k2; }
    TFTerm probe;
    probe.l = l;
    probe.k = {k1, k2};
    auto it = std::lower_bound(terms_.begin(), terms_.end(), probe,
                               [](const TFTerm& a, const TFTerm& b) { return a.key_less(b); });
    if (it == terms_.end() || !it->key_equal(probe)) return {Interval(0.0), Interval(0.0)};
    return {it->c, flip ? -it->s : it->s};
  }

  void add_term(int l, int k1, int k2, Interval c, Interval s = Interval(0.0)) {
    if (!Harmonic{k1, k2}.canonical()) {
      k1 = -k1;
      k2 = -k2;
      s = -s;
    }
    if (k1 == 0 && k2 == 0) {
      // sin(0) vanishes identically; the sin part carries no content.
      s = Interval(0.0);
    }
    TFTerm t;
    t.l = l;
    t.k = {k1, k2};
    t.c = c;
    t.s = s;
    terms_.push_back(t);
    dirty_ = true;
  }

  // Sort by key and fold duplicate keys (deterministic left-to-right sums).
  void normalize() {
    if (!dirty_) return;
    std::stable_sort(terms_.begin(), terms_.end(),
                     [](const TFTerm& a, const TFTerm& b) { return a.key_less(b); });
    std::vector<TFTerm> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) {
      if (!out.empty() && out.back().key_equal(t)) {
        out.back().c += t.c;
        out.back().s += t.s;
      } else {
        out.push_back(t);
      }
    }
    std::erase_if(out, [](const TFTerm& t) { return t.c.is_zero() && t.s.is_zero(); });
    terms_ = std::move(out);
    dirty_ = false;
  }

  TFSeries& operator+=(const TFSeries& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    dirty_ = true;
    normalize();
    return *this;
  }

  friend TFSeries operator+(TFSeries a, const TFSeries& b) { a += b; return a; }

  TFSeries scaled(const Interval& f) const {
    if (f.is_zero()) return {};
    TFSeries g = *this;
    for (auto& t : g.terms_) {
      t.c = t.c * f;
      t.s = t.s * f;
    }
    return g;
  }

  TFSeries negated() const { return scaled(Interval(-1.0)); }

  // Remove and return the term with the given key (zero pair if absent).
  std::pair<Interval, Interval> extract(int l, int k1, int k2) {
    normalize();
    TFTerm probe;
    probe.l = l;
    probe.k = {k1, k2};
    auto it = std::lower_bound(terms_.begin(), terms_.end(), probe,
                               [](const TFTerm& a, const TFTerm& b) { return a.key_less(b); });
    if (it == terms_.end() || !it->key_equal(probe)) return {Interval(0.0), Interval(0.0)};
    auto res = std::make_pair(it->c, it->s);
    terms_.erase(it);
    return res;
  }

private:
  std::vector<TFTerm> terms_;
  bool dirty_ = false;
};

// a + f*b, coefficient-wise.
inline TFSeries tf_add_scaled(const TFSeries& a, const TFSeries& b, const Interval& f) {
  TFSeries g = a;
  g += b.scaled(f);
  return g;
}

enum class Var { theta, phi, psi };

inline TFSeries tf_derivative(const TFSeries& g, Var v) {
  TFSeries out;
  for (const auto& t : g.terms()) {
    switch (v) {
      case Var::theta:
        if (t.k.k1 != 0)
          out.add_term(t.l, t.k.k1, t.k.k2, mul_int(t.s, t.k.k1), mul_int(t.c, -t.k.k1));
        break;
      case Var::phi:
        if (t.k.k2 != 0)
          out.add_term(t.l, t.k.k1, t.k.k2, mul_int(t.s, t.k.k2), mul_int(t.c, -t.k.k2));
        break;
      case Var::psi:
        if (t.l > 0)
          out.add_term(t.l - 1, t.k.k1, t.k.k2, mul_int(t.c, t.l), mul_int(t.s, t.l));
        break;
    }
  }
  out.normalize();
  return out;
}

// Product with optional trig-degree cap; the norms of dropped terms are
// accumulated into *tail (per psi-degree) when given.
inline TFSeries tf_multiply(const TFSeries& a, const TFSeries& b,
                            int degree_cap = std::numeric_limits<int>::max(),
                            std::vector<Interval>* tail = nullptr) {
  TFSeries out;
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      // (c1 cosA + s1 sinA)(c2 cosB + s2 sinB) expands over A+B and A-B.
      Interval cc = ta.c * tb.c, ss = ta.s * tb.s;
      Interval cs = ta.c * tb.s, sc = ta.s * tb.c;
      int l = ta.l + tb.l;
      int p1 = ta.k.k1 + tb.k.k1, p2 = ta.k.k2 + tb.k.k2;  // A+B
      int m1 = ta.k.k1 - tb.k.k1, m2 = ta.k.k2 - tb.k.k2;  // A-B
      Interval c_plus = mul_pow2(cc - ss, -1), s_plus = mul_pow2(cs + sc, -1);
      Interval c_minus = mul_pow2(cc + ss, -1), s_minus = mul_pow2(sc - cs, -1);
      auto emit = [&](int k1, int k2, const Interval& c, const Interval& s) {
        if (Harmonic{k1, k2}.degree() > degree_cap) {
          if (tail) {
            if ((int)tail->size() <= l) tail->resize(l + 1, Interval(0.0));
            Interval mod = sqrt(nonneg(sqr(c) + sqr(s)));
            (*tail)[l] += Interval(0.0, mod.hi);
          }
          return;
        }
        out.add_term(l, k1, k2, c, s);
      };
      emit(p1, p2, c_plus, s_plus);
      emit(m1, m2, c_minus, s_minus);
    }
  }
  out.normalize();
  return out;
}

// Poisson bracket L_F G for series that do not depend on the dummy momentum:
// L_F G = dF/dth dG/dpsi - dG/dth dF/dpsi.  (The dP terms vanish; callers
// handle the linear part omega*psi + P explicitly.)
inline TFSeries tf_poisson(const TFSeries& F, const TFSeries& G,
                           int degree_cap = std::numeric_limits<int>::max(),
                           std::vector<Interval>* tail = nullptr) {
  TFSeries r = tf_multiply(tf_derivative(F, Var::theta), tf_derivative(G, Var::psi),
                           degree_cap, tail);
  r += tf_multiply(tf_derivative(G, Var::theta), tf_derivative(F, Var::psi),
                   degree_cap, tail).negated();
  return r;
}

// (omega d/dth + d/dph) applied to g.
inline TFSeries tf_omega_derivative(const TFSeries& g, const Interval& omega) {
  TFSeries r = tf_derivative(g, Var::theta).scaled(omega);
  r += tf_derivative(g, Var::phi);
  return r;
}

// Fundamental solution X of the homological equation
//   (omega d/dth + d/dph) X + g = 0
// for zero-average g.  Harmonic-wise, with divisor d = k1 omega + k2:
// (c, s) maps to (s/d, -c/d).  Divisor enclosures touching zero raise
// resonance_error; a positive guard additionally enforces |d| >= guard.
inline TFSeries tf_gamma(const TFSeries& g, const Interval& omega,
                         double guard = 0.0) {
  TFSeries out;
  for (const auto& t : g.terms()) {
    if (t.k.k1 == 0 && t.k.k2 == 0) {
      if (!t.c.contains_zero())
        throw domain_error("tf_gamma applied to series with nonzero average");
      continue;  // enclosure of the structurally zero average
    }
    Interval d = mul_int(omega, t.k.k1) + Interval(static_cast<double>(t.k.k2));
    if (d.contains_zero() || d.mig() < guard) throw resonance_error(t.k.k1, t.k.k2);
    out.add_term(t.l, t.k.k1, t.k.k2, t.s / d, -(t.c / d));
  }
  out.normalize();
  return out;
}

// Norm of eq-type sum_k |g_{l,k}| in the complex-exponential basis: each
// cos/sin pair contributes sqrt(c^2+s^2), the average contributes |c|.
// Upper endpoint additionally clipped by the |c|+|s| bound.
inline Interval tf_norm(const TFSeries& g) {
  Interval acc(0.0);
  for (const auto& t : g.terms()) {
    if (t.k.k1 == 0 && t.k.k2 == 0) {
      acc += abs(t.c);
    } else {
      Interval m = sqrt(nonneg(sqr(t.c) + sqr(t.s)));
      Interval cheap = abs(t.c) + abs(t.s);
      if (cheap.hi < m.hi) m.hi = std::max(cheap.hi, m.lo);
      acc += m;
    }
  }
  return acc;
}

// Angular average of the psi^l part: the (l, 0, 0) cos coefficient.
inline Interval tf_average(const TFSeries& g, int l) {
  return g.coeff(l, 0, 0).first;
}

// Drop harmonics with degree > D; their norms accumulate into *tail per
// psi-degree when given (definitional truncation otherwise).
inline TFSeries tf_truncate(const TFSeries& g, int D, std::vector<Interval>* tail = nullptr) {
  TFSeries out;
  for (const auto& t : g.terms()) {
    if (t.k.degree() > D) {
      if (tail) {
        if ((int)tail->size() <= t.l) tail->resize(t.l + 1, Interval(0.0));
        Interval m = (t.k.k1 == 0 && t.k.k2 == 0) ? abs(t.c) : sqrt(nonneg(sqr(t.c) + sqr(t.s)));
        (*tail)[t.l] += Interval(0.0, m.hi);
      }
      continue;
    }
    out.add_term(t.l, t.k.k1, t.k.k2, t.c, t.s);
  }
  out.normalize();
  return out;
}

// Drop terms whose coefficient magnitudes both lie below the floor; their
// norms accumulate into *tail when given.  Used by stages whose truncations
// are definitional.
inline TFSeries tf_prune(const TFSeries& g, double floor_mag,
                         std::vector<Interval>* tail = nullptr) {
  if (floor_mag <= 0.0) return g;
  TFSeries out;
  for (const auto& t : g.terms()) {
    if (t.c.mag() < floor_mag && t.s.mag() < floor_mag) {
      if (tail) {
        if ((int)tail->size() <= t.l) tail->resize(t.l + 1, Interval(0.0));
        Interval m = (t.k.k1 == 0 && t.k.k2 == 0) ? abs(t.c) : sqrt(nonneg(sqr(t.c) + sqr(t.s)));
        (*tail)[t.l] += Interval(0.0, m.hi);
      }
      continue;
    }
    out.add_term(t.l, t.k.k1, t.k.k2, t.c, t.s);
  }
  out.normalize();
  return out;
}

// Restrict to one psi-degree.
inline TFSeries tf_select_l(const TFSeries& g, int l) {
  TFSeries out;
  for (const auto& t : g.terms())
    if (t.l == l) out.add_term(t.l, t.k.k1, t.k.k2, t.c, t.s);
  out.normalize();
  return out;
}

// True when every coefficient pair encloses zero (used to verify residuals).
inline bool tf_encloses_zero(const TFSeries& g) {
  for (const auto& t : g.terms())
    if (!t.c.contains_zero() || !t.s.contains_zero()) return false;
  return true;
}

}  // namespace vkam
