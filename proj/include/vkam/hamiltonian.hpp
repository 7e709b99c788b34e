#pragma once

// Hamiltonian state for the normalization pipeline:
//
//   H = omega psi + P + sum_{l,s} blocks[l][s]
//
// with blocks[l][s] in P_{l, s K} (psi-degree l, trig degree <= s K).  The
// frequency omega and the unit coefficient of the dummy momentum P are kept
// apart from the block table and are never touched by the series algebra.
//
// Lie transforms track the (l, s) grading exactly: a generator of order r
// maps block (l, s) into (l - j, s + j r) (angle-type chi1) or (l, s + j r)
// (psi-linear chi2).  Content pushed past order_cap is dropped with its norm
// accumulated into tail_norms[l]; blocks at kept orders stay exact.

#include <vector>

#include "vkam/tfseries.hpp"

namespace vkam {

class nondegeneracy_error : public interval_error {
public:
  explicit nondegeneracy_error(const std::string& what) : interval_error(what) {}
};

struct HamiltonianState {
  Interval omega;
  int lmax = 4;
  int K = 3;
  int R_I = 1;
  int order_cap = 1;      // highest stored order s
  int trunc_degree = 6;   // trig-degree cap, default 2 K R_I

  // blocks[l][s], l = 0..lmax, s = 0..order_cap
  std::vector<std::vector<TFSeries>> blocks;
  // Norm accumulators (per psi-degree) for content dropped past the caps.
  std::vector<Interval> tail_norms;
  bool tail_valid = true;
  // Lie chains stop once the term norm falls below this (remainder spilled
  // rigorously); 0 disables.  The prep stage sets it: its truncations are
  // definitional.  The normalizer leaves it at 0.
  double chain_break_norm = 0.0;
  // Coefficients below this magnitude are dropped on insertion (norms
  // spilled).  Only the definitional prep stage enables it.
  double prune_floor = 0.0;

  HamiltonianState() = default;
  HamiltonianState(Interval omega_, int lmax_, int K_, int R_I_, int order_cap_ = -1,
                   int trunc_degree_ = -1)
      : omega(omega_), lmax(lmax_), K(K_), R_I(R_I_) {
    order_cap = order_cap_ >= 0 ? order_cap_ : R_I_;
    trunc_degree = trunc_degree_ >= 0 ? trunc_degree_ : 2 * K_ * R_I_;
    blocks.assign(lmax + 1, std::vector<TFSeries>(order_cap + 1));
    tail_norms.assign(lmax + 1, Interval(0.0));
  }

  TFSeries& block(int l, int s) { return blocks[l][s]; }
  const TFSeries& block(int l, int s) const { return blocks[l][s]; }

  void add_to_block(int l, int s, const TFSeries& g) {
    if (g.empty()) return;
    if (s > order_cap) {
      spill(l, tf_norm(g));
      return;
    }
    if (prune_floor > 0.0) {
      blocks[l][s] = tf_prune(blocks[l][s] + g, prune_floor, &tail_norms);
      return;
    }
    blocks[l][s] += g;
  }

  void spill(int l, const Interval& norm_bound) {
    if (norm_bound.hi == 0.0) return;
    tail_norms[l] += Interval(0.0, norm_bound.hi);
  }

  // All stored content of one psi-degree, orders collapsed.
  TFSeries collapse_l(int l) const {
    TFSeries g;
    for (int s = 0; s <= order_cap; ++s) g += blocks[l][s];
    return g;
  }

  // Class membership: every term of block (l, s) has psi-degree l and trig
  // degree <= min(s K, trunc_degree).
  bool classes_ok() const {
    for (int l = 0; l <= lmax; ++l)
      for (int s = 0; s <= order_cap; ++s) {
        for (const auto& t : blocks[l][s].terms()) {
          if (t.l != l) return false;
          if (t.k.degree() > s * K || t.k.degree() > trunc_degree) return false;
        }
      }
    return true;
  }
};

namespace detail {

inline long long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

// --- chi1-type transform: generator X(theta, phi) of order r ---------------
// exp(L_X) with L_X g = dX/dth * dg/dpsi; terminates after lmax applications.
// The action on the linear part (-(om dth + dph)X at order r, psi-degree 0)
// is NOT added here; the normalization step handles it structurally.
inline void lie_apply_angle(HamiltonianState& H, const TFSeries& X, int r) {
  if (X.empty()) return;
  TFSeries dX = tf_derivative(X, Var::theta);
  auto snapshot = H.blocks;
  for (int l = 1; l <= H.lmax; ++l) {
    for (int s = 0; s <= H.order_cap; ++s) {
      const TFSeries& B = snapshot[l][s];
      if (B.empty()) continue;
      TFSeries T = B;
      for (int j = 1; j <= l; ++j) {
        // T_j = (1/j) L_X T_{j-1}
        T = tf_multiply(dX, tf_derivative(T, Var::psi), H.trunc_degree, &H.tail_norms)
                .scaled(Interval(1.0) / Interval(static_cast<double>(j)));
        T = tf_prune(T, H.prune_floor, &H.tail_norms);
        H.add_to_block(l - j, s + j * r, T);
        if (T.empty()) break;
      }
    }
  }
}

// --- translation psi -> psi + xi (generator xi * theta, order r) -----------
// Exact polynomial recentring of every block.
inline void lie_apply_translation(HamiltonianState& H, const Interval& xi, int r) {
  if (xi.is_zero()) return;
  auto snapshot = H.blocks;
  for (int l = 1; l <= H.lmax; ++l) {
    for (int s = 0; s <= H.order_cap; ++s) {
      const TFSeries& B = snapshot[l][s];
      if (B.empty()) continue;
      TFSeries T = B;
      for (int j = 1; j <= l; ++j) {
        T = tf_prune(tf_derivative(T, Var::psi)
                         .scaled(xi / Interval(static_cast<double>(j))),
                     H.prune_floor, &H.tail_norms);
        if (T.empty()) break;
        H.add_to_block(l - j, s + j * r, T);
      }
    }
  }
}

// --- chi2-type transform: psi-linear generator of order r ------------------
// exp(L_chi2) preserves psi-degree and raises the order by r per application;
// the series is cut at order_cap and the dropped remainder is bounded by the
// factorised product estimate and pushed into tail_norms.
inline void lie_apply_linear(HamiltonianState& H, const TFSeries& chi2, int r) {
  if (chi2.empty()) return;
  Interval g21 = tf_norm(tf_derivative(chi2, Var::theta));
  Interval g22 = tf_norm(tf_derivative(chi2, Var::psi));
  auto snapshot = H.blocks;
  for (int l = 0; l <= H.lmax; ++l) {
    for (int s = 0; s <= H.order_cap; ++s) {
      const TFSeries& B = snapshot[l][s];
      if (B.empty()) continue;
      TFSeries T = B;
      int j = 1;
      bool cut = false;
      for (; s + j * r <= H.order_cap; ++j) {
        T = tf_prune(tf_poisson(chi2, T, H.trunc_degree, &H.tail_norms)
                         .scaled(Interval(1.0) / Interval(static_cast<double>(j))),
                     H.prune_floor, &H.tail_norms);
        if (T.empty()) break;
        if (tf_norm(T).hi < H.chain_break_norm) { cut = true; break; }
        H.add_to_block(l, s + j * r, T);
      }
      if (!T.empty() && (cut || s + j * r > H.order_cap)) {
        // Remainder sum_{i >= j} (1/i!) L^i B, bounded term-by-term by
        //   t_{i+1} = t_i * (l g21 + (s + i r) K g22) / (i + 1).
        Interval t = tf_norm(T);  // bound for the last computed term (index j-1)
        Interval l_iv(static_cast<double>(l));
        Interval K_iv(static_cast<double>(H.K));
        Interval tail(0.0);
        bool ok = false;
        for (int i = j - 1; i < j + 64; ++i) {
          Interval ratio = (l_iv * g21 +
                            Interval(static_cast<double>(s + i * r)) * K_iv * g22) /
                           Interval(static_cast<double>(i + 1));
          Interval limit_ratio = Interval(static_cast<double>(r)) * K_iv * g22;
          Interval q = max(ratio, limit_ratio);  // sup of ratios from i on
          if (q.hi < 1.0) {
            t = t * ratio;  // bound on term i+1
            tail += t / (Interval(1.0) - q);
            ok = true;
            break;
          }
          t = t * ratio;
          tail += t;
        }
        if (!ok) H.tail_valid = false;
        H.spill(l, tail);
      }
    }
  }
}

// Target-term series from the homological trick: after chi2 erases the block
// D (psi-linear, order r), the linear part regenerates
//   sum_{j >= 1} j/(j+1)! L_chi2^j D
// whose j-th term lands at (1, (j+1) r).
inline void lie_apply_chi2_target(HamiltonianState& H, const TFSeries& chi2,
                                  const TFSeries& target, int r) {
  if (chi2.empty() || target.empty()) return;
  Interval g21 = tf_norm(tf_derivative(chi2, Var::theta));
  Interval g22 = tf_norm(tf_derivative(chi2, Var::psi));
  TFSeries U = target;  // U_j = (1/j!) L^j target
  int j = 1;
  bool cut = false;
  for (; (j + 1) * r <= H.order_cap; ++j) {
    U = tf_prune(tf_poisson(chi2, U, H.trunc_degree, &H.tail_norms)
                     .scaled(Interval(1.0) / Interval(static_cast<double>(j))),
                 H.prune_floor, &H.tail_norms);
    if (U.empty()) break;
    if (tf_norm(U).hi < H.chain_break_norm) { cut = true; break; }
    H.add_to_block(1, (j + 1) * r,
                   U.scaled(Interval(static_cast<double>(j)) /
                            Interval(static_cast<double>(j + 1))));
  }
  if (!U.empty() && (cut || (j + 1) * r > H.order_cap)) {
    Interval t = tf_norm(U);
    Interval K_iv(static_cast<double>(H.K));
    Interval tail(0.0);
    bool ok = false;
    for (int i = j - 1; i < j + 64; ++i) {
      Interval ratio = (g21 + Interval(static_cast<double>(r + i * r)) * K_iv * g22) /
                       Interval(static_cast<double>(i + 1));
      Interval q = max(ratio, Interval(static_cast<double>(r)) * K_iv * g22);
      if (q.hi < 1.0) {
        t = t * ratio;
        tail += t / (Interval(1.0) - q);
        ok = true;
        break;
      }
      t = t * ratio;
      tail += t;
    }
    if (!ok) H.tail_valid = false;
    H.spill(1, tail);
  }
}

// Public entry matching the spec's lie-transform surface: apply exp(L_gen)
// for an angle-type generator, or the exact translation for gen = xi * theta.
struct LieGenerator {
  enum class Kind { angle, translation, psi_linear } kind;
  TFSeries series;  // angle or psi-linear generator
  Interval xi;      // translation amount
  int order = 1;
};

inline void tf_lie_transform(HamiltonianState& H, const LieGenerator& gen) {
  switch (gen.kind) {
    case LieGenerator::Kind::angle: lie_apply_angle(H, gen.series, gen.order); break;
    case LieGenerator::Kind::translation: lie_apply_translation(H, gen.xi, gen.order); break;
    case LieGenerator::Kind::psi_linear: lie_apply_linear(H, gen.series, gen.order); break;
  }
}

}  // namespace vkam
