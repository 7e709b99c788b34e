#pragma once

// Physical model of the magnetic-field-line Hamiltonian and construction of
// the controlled, recentred, truncated input Hamiltonian for the proof
// pipeline.
//
// Safety-factor profile   1/q(psi) = (2 - psi)(2 - 2 psi + psi^2)/4
// Poloidal flux           H(psi)   = psi - 3/4 psi^2 + 1/3 psi^3 - 1/16 psi^4
// Tearing perturbation    v        = eps (cos(2th - ph) + cos(3th - 2ph))
// Control term            f        = -1/2 H''(Psi) (d/dth Gamma v)^2
//
// The prep pipeline applies exp(L_chi2) exp(L_{xi th}) exp(L_X) to the
// autonomized H + v + f, retargets the frequency to omega_target, truncates
// harmonics above R_I * K, and rebins terms into the (l, s) grading used by
// the normalization stage.  The truncation is definitional: the proof is
// stated for the truncated Hamiltonian.

#include <array>
#include <cmath>
#include <functional>

#include "vkam/hamiltonian.hpp"
#include "vkam/noble.hpp"
#include "vkam/tfseries.hpp"

namespace vkam {

struct ModelConfig {
  Interval epsilon;
  Interval Psi;
  Interval omega_target;
  int K = 3;
  int lmax = 4;
  int R_I = 12;

  ModelConfig(Interval eps, Interval psi, Interval omega_t, int R_I_)
      : epsilon(eps), Psi(psi), omega_target(omega_t), R_I(R_I_) {
    if (epsilon.lo < 0.0) throw domain_error("epsilon must be nonnegative");
    if (Psi.lo <= 0.0 || Psi.hi >= 1.0) throw domain_error("Psi must lie in (0,1)");
    if (R_I < 1) throw domain_error("R_I must be >= 1");
    check_nonresonant(omega_target, K);
  }

  static void check_nonresonant(const Interval& omega, int K) {
    for (int k1 = -K; k1 <= K; ++k1)
      for (int k2 = -K; k2 <= K; ++k2) {
        if (k1 == 0 && k2 == 0) continue;
        Interval d = mul_int(omega, k1) + Interval(double(k2));
        if (d.contains_zero()) throw resonance_error(k1, k2);
      }
  }
};

struct NewtonConfig {
  double dx = 1e-3;
  double tol = 1e-8;  // the Xi threshold on |delta xi|
  int max_iters = 16;
};

// 1/q(psi) = H'(psi) as an interval polynomial evaluation.
inline Interval inverse_q(const Interval& psi) {
  // (2 - psi)(2 - 2 psi + psi^2)/4
  Interval a = Interval(2.0) - psi;
  Interval b = Interval(2.0) - mul_pow2(psi, 1) + sqr(psi);
  return mul_pow2(a * b, -2);
}

struct Equilibrium {
  Interval omega_tilde;  // H'(Psi) = 1/q(Psi)
  TFSeries h_blocks;     // h_l psi^l, l = 2..4 (constant term dropped)
  Interval h2, h3, h4;   // the Taylor coefficients H^(l)(Psi)/l!
};

// Taylor expansion of H(Psi + psi) around the localization action.
inline Equilibrium build_equilibrium(const Interval& Psi) {
  Equilibrium eq;
  eq.omega_tilde = inverse_q(Psi);
  // H'' = -3/2 + 2 psi - 3/4 psi^2 ; H''' = 2 - 3/2 psi ; H'''' = -3/2
  Interval h2x2 = Interval(-1.5) + mul_pow2(Psi, 1) - Interval(0.75) * sqr(Psi);
  Interval h3x6 = Interval(2.0) - Interval(1.5) * Psi;
  eq.h2 = mul_pow2(h2x2, -1);
  eq.h3 = h3x6 / Interval(6.0);
  eq.h4 = Interval(-0.0625);
  eq.h_blocks = TFSeries::term(2, 0, 0, eq.h2) + TFSeries::term(3, 0, 0, eq.h3) +
                TFSeries::term(4, 0, 0, eq.h4);
  return eq;
}

// v = eps (cos(2 th - ph) + cos(3 th - 2 ph)); trig degree K = 3.
inline TFSeries build_perturbation(const Interval& epsilon) {
  if (epsilon.is_zero()) return TFSeries::zero();
  return TFSeries::term(0, 2, -1, epsilon) + TFSeries::term(0, 3, -2, epsilon);
}

// f = -1/2 (d^2 h2/dpsi^2)|_Psi (d/dth Gamma v)^2, angles only, zero average.
// Harmonics present: (1,-1), (4,-2), (5,-3), (6,-4).
inline TFSeries build_control(const Interval& omega_tilde, const Interval& h2_coeff,
                              const TFSeries& v) {
  if (v.empty()) return TFSeries::zero();
  TFSeries X = tf_gamma(v, omega_tilde);
  TFSeries dX = tf_derivative(X, Var::theta);
  // d^2 h2/dpsi^2 = 2 h2_coeff; prefactor -1/2 * 2 h2 = -h2.
  TFSeries f = tf_multiply(dX, dX).scaled(-h2_coeff);
  f.extract(0, 0, 0);  // constant part dropped
  return f;
}

// --- Prep pipeline (H_c construction) ---------------------------------------

struct PrepResult {
  HamiltonianState state;    // full prep state before definitional truncation
  Interval freq_residual;    // <dH/dpsi>|0 - omega_target, stored at block (1,1)
  Interval chi2_dropped;     // norm of the low-degree psi-linear remnant dropped
};

// One full construction of H_c = exp(L_chi2) exp(L_{xi th}) exp(L_X) (H~ + f)
// with the frequency retargeted to omega_target before the chi2 stage.
inline PrepResult prep_controlled_hamiltonian(const ModelConfig& cfg, const Equilibrium& eq,
                                              const TFSeries& v, const TFSeries& f,
                                              const Interval& xi) {
  const int prep_cap = 48;
  HamiltonianState H(eq.omega_tilde, cfg.lmax, cfg.K, cfg.R_I, prep_cap,
                     2 * cfg.K * cfg.R_I);
  // Everything the prep drops is definitional, so chains may stop early
  // and negligible coefficients may be pruned.
  H.chain_break_norm = 1e-45;
  H.prune_floor = 1e-50;
  H.add_to_block(2, 0, TFSeries::term(2, 0, 0, eq.h2));
  H.add_to_block(3, 0, TFSeries::term(3, 0, 0, eq.h3));
  H.add_to_block(4, 0, TFSeries::term(4, 0, 0, eq.h4));
  // v is never materialized: exp(L_X) cancels it against the linear part.
  H.add_to_block(0, 2, f);

  if (!v.empty()) {
    TFSeries X = tf_gamma(v, eq.omega_tilde);
    lie_apply_angle(H, X, 1);
  }
  lie_apply_translation(H, xi, 1);

  // Frequency retarget: collect the full psi-linear average, declare
  // omega_target as the torus frequency, park the residual at block (1,1)
  // where the first normalization step removes it.
  Interval lin_avg = eq.omega_tilde;
  for (int s = 0; s <= H.order_cap; ++s) {
    Interval a = tf_average(H.block(1, s), 1);
    if (!(a.is_zero())) {
      H.block(1, s).extract(1, 0, 0);
      lin_avg += a;
    }
  }
  Interval residual = lin_avg - cfg.omega_target;
  H.omega = cfg.omega_target;
  H.add_to_block(1, 1, TFSeries::term(1, 0, 0, residual));

  // chi2 stage: remove psi-linear harmonics with 0 < deg <= K.  Each pass
  // regenerates O(||chi2||^2) low-degree terms through the target series, so
  // the solve is iterated until the extracted content is negligible; the
  // final remnant is dropped as part of the definitional truncation.
  Interval dropped(0.0);
  for (int pass = 0; pass < 12; ++pass) {
    TFSeries target;
    for (int s = 0; s <= H.order_cap; ++s) {
      TFSeries& B = H.block(1, s);
      TFSeries keep;
      for (const auto& t : B.terms()) {
        if (t.k.degree() >= 1 && t.k.degree() <= cfg.K)
          target.add_term(t.l, t.k.k1, t.k.k2, t.c, t.s);
        else
          keep.add_term(t.l, t.k.k1, t.k.k2, t.c, t.s);
      }
      keep.normalize();
      B = keep;
    }
    target.normalize();
    if (target.empty()) break;
    Interval n = tf_norm(target);
    if (n.hi < 1e-60 || pass == 11) {
      dropped += n;
      break;
    }
    TFSeries chi2 = tf_gamma(target, H.omega);
    lie_apply_linear(H, chi2, 1);
    lie_apply_chi2_target(H, chi2, target, 1);
  }

  PrepResult out{std::move(H), residual};
  out.chi2_dropped = dropped;
  return out;
}

// <dH_c/dpsi>|_{psi=0} for a trial shift xi, as a midpoint double.
inline double prep_frequency_at_zero(const ModelConfig& cfg, const Equilibrium& eq,
                                     const TFSeries& v, const TFSeries& f, double xi) {
  PrepResult pr = prep_controlled_hamiltonian(cfg, eq, v, f, Interval(xi));
  Interval b = cfg.omega_target;
  for (int s = 0; s <= pr.state.order_cap; ++s) b += tf_average(pr.state.block(1, s), 1);
  return b.mid();
}

struct NewtonResult {
  Interval xi_init;
  int iterations = 0;
  double final_delta = 0.0;
};

// Newton determination of the initial action shift: drives
// B(xi) = <dH_c/dpsi>|0 to omega_target.  The iteration runs in plain
// floating point; only the final xi is promoted to an interval.
inline NewtonResult newton_xi_init(const ModelConfig& cfg, const Equilibrium& eq,
                                   const TFSeries& v, const TFSeries& f,
                                   const NewtonConfig& nc = {}) {
  auto B = [&](double xi) { return prep_frequency_at_zero(cfg, eq, v, f, xi); };
  const double omega_t = cfg.omega_target.mid();
  // Seed: omega_tilde + d2<h2>/dpsi2 * xi0 = omega_target.
  double hpp = mul_pow2(eq.h2, 1).mid();
  if (hpp == 0.0) throw nondegeneracy_error("newton_xi_init: vanishing quadratic part");
  double xi = (omega_t - eq.omega_tilde.mid()) / hpp;
  NewtonResult out;
  for (int it = 1; it <= nc.max_iters; ++it) {
    double b = B(xi);
    double step = xi != 0.0 ? xi * nc.dx : nc.dx;
    double slope = (B(xi + step) - b) / step;
    if (slope == 0.0 || !std::isfinite(slope))
      throw nondegeneracy_error("newton_xi_init: vanishing slope");
    double delta = (omega_t - b) / slope;
    xi += delta;
    out.iterations = it;
    out.final_delta = std::fabs(delta);
    if (std::fabs(delta) < nc.tol) {
      out.xi_init = Interval(xi);
      return out;
    }
  }
  throw nondegeneracy_error("newton_xi_init: no convergence within max_iters");
}

// Definitional truncation and rebinning of the prep state into the (l, s)
// grading: keep harmonics with degree <= R_I K, bin at s = ceil(deg / K);
// the zero-degree psi-linear residual sits at s = 1, constants are dropped.
inline HamiltonianState truncate_to_H0(const ModelConfig& cfg, const HamiltonianState& prep) {
  HamiltonianState H0(prep.omega, cfg.lmax, cfg.K, cfg.R_I, cfg.R_I, 2 * cfg.K * cfg.R_I);
  for (int l = 0; l <= prep.lmax; ++l) {
    TFSeries all = prep.collapse_l(l);
    for (const auto& t : all.terms()) {
      int deg = t.k.degree();
      if (deg > cfg.R_I * cfg.K) continue;  // definitional cut
      int s = (deg + cfg.K - 1) / cfg.K;
      if (l == 0 && deg == 0) continue;  // constant
      if (l == 1 && deg == 0) s = 1;     // frequency residual
      H0.block(l, s).add_term(l, t.k.k1, t.k.k2, t.c, t.s);
    }
  }
  for (int l = 0; l <= H0.lmax; ++l)
    for (int s = 0; s <= H0.order_cap; ++s) H0.block(l, s).normalize();
  return H0;
}

struct H0Result {
  HamiltonianState H0;
  Interval xi_init;
  int newton_iterations = 0;
};

// Full input-Hamiltonian construction for the proof pipeline.
inline H0Result build_H0(const ModelConfig& cfg, const NewtonConfig& nc = {}) {
  Equilibrium eq = build_equilibrium(cfg.Psi);
  TFSeries v = build_perturbation(cfg.epsilon);
  TFSeries f = build_control(eq.omega_tilde, eq.h2, v);
  NewtonResult nr = newton_xi_init(cfg, eq, v, f, nc);
  PrepResult pr = prep_controlled_hamiltonian(cfg, eq, v, f, nr.xi_init);
  H0Result out{truncate_to_H0(cfg, pr.state), nr.xi_init, nr.iterations};
  return out;
}

}  // namespace vkam
