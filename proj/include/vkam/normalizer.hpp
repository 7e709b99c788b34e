#pragma once

// Explicit Kolmogorov normalization, steps r = 1..R_I.
//
// One step applies three Lie transforms to H^(r-1):
//
//   1. X^(r)    = Gamma-solution for block (0, r); erases it against the
//                 linear part.
//   2. xi^(r)   = translation removing the average of block (1, r), with
//                 C^(r) = sum_{s<=r} d2/dpsi2 <h2^(r-1,s)>.  The averages of
//                 the quadratic blocks with s <= r are removed before the
//                 translation and re-added unchanged afterwards; the
//                 psi-linear averages the translation would create sum to
//                 exactly -<D1^(r-1,r)>, so both sides of that cancellation
//                 are dropped structurally.
//   3. chi2^(r) = Gamma-solution for the zero-average block (1, r); erases
//                 it, and the linear part regenerates the target series
//                 sum_{j>=1} j/(j+1)! L^j of the erased block.
//
// Blocks are stored for orders s <= R_I; everything pushed beyond spills
// into per-l tail accumulators.  The estimate-iteration stage re-majorizes
// all content beyond order R_I from the exported data, so the spilled tails
// are diagnostic, not proof inputs.

#include <ostream>
#include <string>
#include <vector>

#include "vkam/hamiltonian.hpp"
#include "vkam/io.hpp"

namespace vkam {

struct StepArtifacts {
  int r = 0;
  TFSeries X;        // first generator, in P_{0, rK}
  Interval xi;       // translation
  TFSeries chi2;     // third generator, in P_{1, rK}
  TFSeries target;   // the erased zero-average block (1, r)
  Interval C;        // twist scalar of the translation equation
  Interval g11, g12, g21, g22;
};

// The twist scalar C^(r) of the current state (uses blocks (2, s), s <= r).
inline Interval twist_scalar(const HamiltonianState& H, int r) {
  Interval C(0.0);
  for (int s = 0; s <= std::min(r, H.order_cap); ++s)
    C += mul_pow2(tf_average(H.block(2, s), 2), 1);
  return C;
}

// xi^(r) from C^(r) xi + <f1^(r-1,r)> = 0 (scalar inversion).
inline std::pair<Interval, Interval> solve_translation(const HamiltonianState& H, int r) {
  Interval C = twist_scalar(H, r);
  if (C.contains_zero())
    throw nondegeneracy_error("twist scalar C^(r) not separated from zero at r = " +
                              std::to_string(r));
  Interval f1avg = r <= H.order_cap ? tf_average(H.block(1, r), 1) : Interval(0.0);
  return {-(f1avg / C), C};
}

namespace detail {

// chi1 half: X^(r) plus the translation with the average dance.
inline void kam_step_chi1(HamiltonianState& H, int r, StepArtifacts& art) {
  art.r = r;
  TFSeries D0 = H.block(0, r);
  D0.extract(0, 0, 0);  // constant average, safely ignored
  H.block(0, r) = TFSeries::zero();
  if (!D0.empty()) {
    art.X = tf_gamma(D0, H.omega);
    lie_apply_angle(H, art.X, r);
  }
  art.g11 = tf_norm(tf_derivative(art.X, Var::theta));

  auto [xi, C] = solve_translation(H, r);
  art.xi = xi;
  art.C = C;
  art.g12 = abs(xi);
  std::vector<Interval> qavg(r + 1, Interval(0.0));
  for (int s = 0; s <= r; ++s) qavg[s] = H.block(2, s).extract(2, 0, 0).first;
  H.block(1, r).extract(1, 0, 0);  // cancelled by the translation, exactly
  lie_apply_translation(H, xi, r);
  for (int s = 0; s <= r; ++s) {
    if (!qavg[s].is_zero()) H.block(2, s).add_term(2, 0, 0, qavg[s]);
    H.block(2, s).normalize();
  }
}

// chi2 half: erase the zero-average block (1, r) and re-add its target series.
inline void kam_step_chi2(HamiltonianState& H, int r, StepArtifacts& art) {
  art.target = H.block(1, r);
  Interval resid = art.target.coeff(1, 0, 0).first;
  if (!resid.contains_zero())
    throw nondegeneracy_error("block (1,r) average did not cancel at r = " +
                              std::to_string(r));
  art.target.extract(1, 0, 0);  // structural zero
  H.block(1, r) = TFSeries::zero();
  if (!art.target.empty()) {
    art.chi2 = tf_gamma(art.target, H.omega);
    lie_apply_linear(H, art.chi2, r);
    lie_apply_chi2_target(H, art.chi2, art.target, r);
  }
  art.g21 = tf_norm(tf_derivative(art.chi2, Var::theta));
  art.g22 = tf_norm(tf_derivative(art.chi2, Var::psi));
}

}  // namespace detail

inline StepArtifacts kam_step(HamiltonianState& H, int r) {
  if (r < 1 || r > H.order_cap) throw domain_error("kam_step: r out of range");
  StepArtifacts art;
  detail::kam_step_chi1(H, r, art);
  detail::kam_step_chi2(H, r, art);
  if (!H.block(0, r).empty() || !H.block(1, r).empty())
    throw nondegeneracy_error("post-step blocks D0/D1 not erased at r = " + std::to_string(r));
  return art;
}

struct NormalizeResult {
  HamiltonianState H;  // H^(R_I)
  ExplicitLedger ledger;
  std::vector<StepArtifacts> steps;
};

// Run steps 1..R_I, recording the ledger: generator constants, block norms
// of H^(r) and of the intermediate Hamiltonians, spilled tails, and the
// signed twist sum at R_I.  Optional JSON-lines step log.
inline NormalizeResult normalize(HamiltonianState H0, std::ostream* step_log = nullptr) {
  const int R = H0.R_I;
  if (H0.order_cap < R) throw domain_error("normalize: order_cap below R_I");
  NormalizeResult out{std::move(H0), {}, {}};
  HamiltonianState& H = out.H;
  ExplicitLedger& L = out.ledger;
  L.init(H.lmax, H.K, R);

  auto record_norms = [&](int r, bool hat) {
    auto& arr = hat ? L.theta_hat : L.theta;
    for (int l = 0; l <= H.lmax; ++l)
      for (int s = 0; s <= R; ++s) arr[l][r][s] = nonneg(tf_norm(H.block(l, s)));
  };
  record_norms(0, false);

  for (int r = 1; r <= R; ++r) {
    StepArtifacts art;
    detail::kam_step_chi1(H, r, art);
    record_norms(r, true);  // intermediate Hamiltonian
    detail::kam_step_chi2(H, r, art);
    record_norms(r, false);
    L.G[r - 1] = {nonneg(art.g11), nonneg(art.g12), nonneg(art.g21), nonneg(art.g22)};

    if (!H.block(0, r).empty() || !H.block(1, r).empty())
      throw nondegeneracy_error("post-step blocks D0/D1 not erased at r = " +
                                std::to_string(r));
    if (step_log) {
      (*step_log) << "{\"r\":" << r << ",\"norm_X\":" << tf_norm(art.X).hi
                  << ",\"xi\":" << art.xi.mid() << ",\"norm_chi2\":" << tf_norm(art.chi2).hi
                  << ",\"norm_D1\":" << tf_norm(art.target).hi << "}\n";
    }
    out.steps.push_back(std::move(art));
  }

  if (!H.classes_ok())
    throw nondegeneracy_error("class membership P_{l,sK} violated after normalization");

  L.C_sum = twist_scalar(H, R);
  L.tails = H.tail_norms;
  L.tails.resize(H.lmax + 1, Interval(0.0));
  for (auto& t : L.tails) t = nonneg(t);
  L.tail_valid = H.tail_valid;
  return out;
}

}  // namespace vkam
