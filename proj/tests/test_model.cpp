#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "vkam/model.hpp"
#include "vkam/noble.hpp"

using namespace vkam;

namespace {

Interval psi_default() { return iv_from_decimal("0.35"); }

NobleFrequency omega_D() { return NobleFrequency({43, 74}, {18, 31}); }

}  // namespace

TEST_CASE("safety factor and equilibrium expansion") {
  // 1/q(0) = (2*2)/4 = 1
  CHECK(inverse_q(Interval(0.0)).contains(1.0));

  // omega_tilde(0.35) = 0.58678125 (exact decimal), equal to H'(0.35)
  Equilibrium eq = build_equilibrium(psi_default());
  CHECK(eq.omega_tilde.contains(0.58678125));
  CHECK(eq.omega_tilde.width() < 1e-14);

  // <h2> = H''(0.35)/2 = -0.4459375
  CHECK(eq.h2.contains(-0.4459375));
  CHECK(eq.h3.contains(1.475 / 6.0));
  CHECK(eq.h4.contains(-0.0625));
  CHECK(tf_average(eq.h_blocks, 2).contains(-0.4459375));

  // resonant surfaces: q = 3/2 near psi = 0.266 and q = 2 near psi = 0.456,
  // located by sign change of 1/q - 1/q_res across a bracketing pair.
  auto bracket = [](double target_inv_q, double a, double b) {
    double fa = inverse_q(Interval(a)).mid() - target_inv_q;
    double fb = inverse_q(Interval(b)).mid() - target_inv_q;
    return fa * fb < 0.0;
  };
  CHECK(bracket(2.0 / 3.0, 0.265, 0.267));
  CHECK(bracket(0.5, 0.455, 0.457));
}

TEST_CASE("tearing-mode perturbation") {
  CHECK(build_perturbation(Interval(0.0)).empty());

  Interval eps = iv_from_decimal("0.003");
  TFSeries v = build_perturbation(eps);
  CHECK(v.coeff(0, 2, -1).first.contains(0.003));
  CHECK(v.coeff(0, 3, -2).first.contains(0.003));
  CHECK(v.size() == 2);
  CHECK(tf_norm(v).contains(0.006));
  CHECK(v.degree() == 3);
}

TEST_CASE("control term from the operator form") {
  Equilibrium eq = build_equilibrium(psi_default());
  CHECK(build_control(eq.omega_tilde, eq.h2, TFSeries::zero()).empty());

  Interval eps = iv_from_decimal("0.003");
  TFSeries v = build_perturbation(eps);
  TFSeries f = build_control(eq.omega_tilde, eq.h2, v);

  // harmonics present: exactly (1,-1), (4,-2), (5,-3), (6,-4)
  REQUIRE(f.size() == 4);
  for (const auto& t : f.terms()) CHECK(t.l == 0);
  CHECK(!f.coeff(0, 1, -1).first.contains_zero());
  CHECK(!f.coeff(0, 4, -2).first.contains_zero());
  CHECK(!f.coeff(0, 5, -3).first.contains_zero());
  CHECK(!f.coeff(0, 6, -4).first.contains_zero());

  // Scalar oracle: with D1 = 2 wt - 1, D2 = 3 wt - 2, c = H''(0.35),
  //   f = -(c/2) eps^2 [ 2 cos(4th-2ph)/D1^2
  //                      + 6 (cos(th-ph) + cos(5th-3ph))/(D1 D2)
  //                      + 9 cos(6th-4ph)/(2 D2^2) ].
  const double wt = 0.58678125, c = -0.891875, e2 = 0.003 * 0.003;
  const double D1 = 2 * wt - 1, D2 = 3 * wt - 2;
  CHECK(f.coeff(0, 4, -2).first.contains(-(c / 2) * 2 / (D1 * D1) * e2));
  CHECK(f.coeff(0, 1, -1).first.contains(-(c / 2) * 6 / (D1 * D2) * e2));
  CHECK(f.coeff(0, 5, -3).first.contains(-(c / 2) * 6 / (D1 * D2) * e2));
  CHECK(f.coeff(0, 6, -4).first.contains(-(c / 2) * 9 / (2 * D2 * D2) * e2));
  // frozen magnitudes of the divisor-bearing coefficients
  CHECK(f.coeff(0, 4, -2).first.contains(29.60684951455115 * e2));
  CHECK(f.coeff(0, 1, -1).first.contains(-64.32511756571277 * e2));
  CHECK(f.coeff(0, 6, -4).first.contains(34.93888084756507 * e2));

  // sin parts vanish
  for (const auto& t : f.terms()) CHECK(t.s.contains_zero());
}

TEST_CASE("control term cancels the order-2 angular block of H_c") {
  // In the prep state, f + (1/2) L_X^2 h2 must enclose zero: that is the
  // defining property of the control term.
  Interval eps = iv_from_decimal("0.003");
  ModelConfig cfg(eps, psi_default(), omega_D().value(), 4);
  Equilibrium eq = build_equilibrium(cfg.Psi);
  TFSeries v = build_perturbation(eps);
  TFSeries f = build_control(eq.omega_tilde, eq.h2, v);
  PrepResult pr = prep_controlled_hamiltonian(cfg, eq, v, f, Interval(0.0));
  TFSeries block = pr.state.block(0, 2);
  block.extract(0, 0, 0);  // dynamically irrelevant constant
  CHECK(tf_encloses_zero(block));
  CHECK(block.degree() <= 2 * cfg.K);
}

TEST_CASE("newton determination of the initial shift") {
  Interval eps = iv_from_decimal("0.003");
  Equilibrium eq = build_equilibrium(psi_default());
  TFSeries v = build_perturbation(eps);
  TFSeries f = build_control(eq.omega_tilde, eq.h2, v);

  SECTION("fixed point at omega_target = omega_tilde") {
    ModelConfig cfg(eps, psi_default(), eq.omega_tilde, 4);
    NewtonResult nr = newton_xi_init(cfg, eq, v, f);
    // the O(eps^2) average shifts displace the root slightly from 0
    CHECK(std::fabs(nr.xi_init.mid()) < 1e-3);
    double b = prep_frequency_at_zero(cfg, eq, v, f, nr.xi_init.mid());
    CHECK(std::fabs(b - eq.omega_tilde.mid()) < 1e-7);
  }

  SECTION("targeting omega_D converges within three iterations") {
    ModelConfig cfg(eps, psi_default(), omega_D().value(), 4);
    NewtonResult nr = newton_xi_init(cfg, eq, v, f);
    CHECK(nr.iterations <= 3);
    // seed oracle: (omega_D - omega_tilde)/H''(0.35) = 0.0065887...
    CHECK(std::fabs(nr.xi_init.mid() - 0.006588676986218087) < 2e-3);
    // and the achieved frequency really is omega_D to the Newton tolerance
    double b = prep_frequency_at_zero(cfg, eq, v, f, nr.xi_init.mid());
    CHECK(std::fabs(b - omega_D().value_mid()) < 1e-7);
  }
}

TEST_CASE("H^(0) construction") {
  SECTION("eps = 0: recentred integrable polynomial, no harmonics") {
    Equilibrium eq = build_equilibrium(psi_default());
    ModelConfig cfg(Interval(0.0), psi_default(), eq.omega_tilde, 4);
    H0Result h0 = build_H0(cfg);
    for (int l = 0; l <= h0.H0.lmax; ++l) CHECK(h0.H0.collapse_l(l).degree() == 0);
    // the quadratic average survives untouched
    CHECK(tf_average(h0.H0.block(2, 0), 2).contains(-0.4459375));
    CHECK(std::fabs(h0.xi_init.mid()) < 1e-6);
  }

  SECTION("eps = 0.003 targeting omega_D") {
    Interval eps = iv_from_decimal("0.003");
    ModelConfig cfg(eps, psi_default(), omega_D().value(), 6);
    H0Result h0 = build_H0(cfg);
    const HamiltonianState& H = h0.H0;

    CHECK(H.classes_ok());
    CHECK(H.omega.contains(omega_D().value()));

    // chi2 postcondition: no psi-linear harmonic with 0 < deg <= K
    TFSeries lin = H.collapse_l(1);
    for (const auto& t : lin.terms())
      CHECK((t.k.degree() == 0 || t.k.degree() > cfg.K));

    // frequency condition: <dH/dpsi>|0 = omega + residual, residual below
    // the Newton tolerance scale
    Interval res = tf_average(H.block(1, 1), 1);
    CHECK(std::fabs(res.mid()) < 1e-6);

    // truncation rule: nothing beyond R_I K
    for (int l = 0; l <= H.lmax; ++l) CHECK(H.collapse_l(l).degree() <= cfg.R_I * cfg.K);

    // norms decay with the order
    double n2 = tf_norm(H.block(0, 2)).hi;
    double n4 = tf_norm(H.block(0, 4)).hi;
    double n6 = tf_norm(H.block(0, 6)).hi;
    CHECK(n4 < n2);
    CHECK(n6 < n4);
    CHECK(n6 < 1e-9);
  }
}

TEST_CASE("model config validation") {
  CHECK_THROWS_AS(ModelConfig(Interval(-0.1), psi_default(), Interval(0.58), 4),
                  domain_error);
  CHECK_THROWS_AS(ModelConfig(Interval(0.0), Interval(1.5), Interval(0.58), 4),
                  domain_error);
  // resonant target rejected: omega = 1/2 hits (2,-1) at degree <= K
  CHECK_THROWS_AS(ModelConfig(Interval(0.001), psi_default(), Interval(0.5), 4),
                  resonance_error);
}
