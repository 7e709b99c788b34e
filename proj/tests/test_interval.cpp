#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "vkam/interval.hpp"

using vkam::Interval;
using vkam::iv_from_decimal;

TEST_CASE("point and decimal construction") {
  CHECK(Interval(1.0).lo == 1.0);
  CHECK(Interval(1.0).hi == 1.0);

  // "1" is representable: exact point interval.
  Interval one = iv_from_decimal("1");
  CHECK(one.lo == 1.0);
  CHECK(one.hi == 1.0);

  // "0.35" is not representable: enclosure of width <= 2 ulp.
  Interval x = iv_from_decimal("0.35");
  CHECK(x.lo <= 0.35);
  CHECK(x.hi >= 0.35);
  CHECK(x.width() <= 2 * std::nextafter(0.35, 1.0) - 2 * 0.35);

  Interval eps = iv_from_decimal("0.003");
  CHECK(eps.contains(0.003));
  CHECK(eps.width() < 1e-18);

  CHECK(iv_from_decimal("0.5").width() == 0.0);
  CHECK(iv_from_decimal("-2.25e2").lo == -225.0);
  CHECK(iv_from_decimal("1e3").lo == 1000.0);

  CHECK_THROWS_AS(iv_from_decimal("abc"), vkam::domain_error);
  CHECK_THROWS_AS(iv_from_decimal("1.2.3"), vkam::domain_error);
  CHECK_THROWS_AS(iv_from_decimal(""), vkam::domain_error);
}

TEST_CASE("arithmetic containment basics") {
  Interval a(1, 2), b(3, 4);
  Interval s = a + b;
  CHECK(s.contains(Interval(4, 6)));

  Interval m = Interval(-1, 2) * Interval(3, 4);
  CHECK(m.contains(Interval(-4, 8)));

  Interval q = Interval(1.0) / Interval(3.0);
  CHECK(q.lo < 1.0 / 3.0 + 1e-18);
  CHECK(q.contains(0.3333333333333333333));
  CHECK(q.lo < q.hi);

  CHECK_THROWS_AS(Interval(1.0) / Interval(-1, 1), vkam::domain_error);
}

TEST_CASE("containment fuzz over the four operations") {
  std::mt19937_64 rng(20240817u);
  std::uniform_real_distribution<double> mag(-50.0, 50.0);
  std::uniform_real_distribution<double> wid(0.0, 1.0);
  int n_div_skipped = 0;
  for (int it = 0; it < 200000; ++it) {
    double ac = mag(rng), bc = mag(rng);
    Interval a(ac - wid(rng), ac + wid(rng));
    Interval b(bc - wid(rng), bc + wid(rng));
    std::uniform_real_distribution<double> ina(a.lo, a.hi), inb(b.lo, b.hi);
    double x = ina(rng), y = inb(rng);
    REQUIRE((a + b).contains(x + y));
    REQUIRE((a - b).contains(x - y));
    REQUIRE((a * b).contains(x * y));
    if (!b.contains_zero())
      REQUIRE((a / b).contains(x / y));
    else
      ++n_div_skipped;
  }
  CHECK(n_div_skipped < 200000);
}

TEST_CASE("monotone widening") {
  Interval a(1.0, 2.0), wide_a(0.5, 2.5), b(-3.0, 4.0);
  Interval p = a * b, pw = wide_a * b;
  CHECK(pw.contains(p));
  Interval s = a + b, sw = wide_a + b;
  CHECK(sw.contains(s));
}

TEST_CASE("elementary functions") {
  CHECK(vkam::exp(Interval(0.0)).contains(1.0));
  CHECK(vkam::exp(Interval(0.0)).width() == 0.0);

  Interval e1 = vkam::exp(Interval(1.0));
  CHECK(e1.contains(2.718281828459045235));
  CHECK(e1.width() < 1e-13);

  Interval r = vkam::root(Interval(16.0), 4);
  CHECK(r.contains(2.0));
  CHECK(r.width() < 1e-14);

  // e^{pi^2/3} = 26.83932422006293...
  Interval c = vkam::constants::exp_pi2_over_3();
  CHECK(c.contains(26.83932422006293076));
  CHECK(c.lo > 26.83);
  CHECK(c.hi < 26.85);

  // The hardcoded constants really do enclose their values.
  CHECK(vkam::exp(vkam::constants::ln2()).contains(2.0));
  CHECK(vkam::exp(vkam::constants::ln10()).contains(10.0));
  CHECK(vkam::constants::pi().contains(3.14159265358979323846));

  Interval lg = vkam::log(Interval(10.0));
  CHECK(lg.contains(2.302585092994045684));
  CHECK(lg.width() < 1e-14);
  CHECK(vkam::log10(Interval(1000.0)).contains(3.0));
  CHECK_THROWS_AS(vkam::log(Interval(-1.0, 1.0)), vkam::domain_error);

  CHECK(vkam::pow_int(Interval(2.0), 10).contains(1024.0));
  CHECK(vkam::pow_int(Interval(-2.0, 3.0), 2).contains(Interval(0.0, 9.0)));
  CHECK(vkam::pow_int(Interval(2.0), -2).contains(0.25));
  CHECK(vkam::pow_int(Interval(-3.0, -2.0), 3).contains(-27.0));
  CHECK(vkam::pow_int(Interval(-3.0, -2.0), 3).contains(-8.0));

  CHECK(vkam::abs(Interval(-3.0, 2.0)).contains(Interval(0.0, 3.0)));
  CHECK(Interval(-3.0, 2.0).mag() == 3.0);
  CHECK(Interval(-3.0, 2.0).mig() == 0.0);
  CHECK(Interval(2.0, 3.0).mig() == 2.0);
}

TEST_CASE("exp/log/pow fuzz against libm") {
  std::mt19937_64 rng(7u);
  std::uniform_real_distribution<double> xr(-20.0, 20.0);
  for (int it = 0; it < 20000; ++it) {
    double x = xr(rng);
    REQUIRE(vkam::exp(Interval(x)).contains(std::exp(x)));
    double p = std::fabs(x) + 1e-8;
    REQUIRE(vkam::log(Interval(p)).contains(std::log(p)));
    REQUIRE(vkam::sqrt(Interval(p)).contains(std::sqrt(p)));
    REQUIRE(vkam::root(Interval(p), 7).contains(std::pow(p, 1.0 / 7.0)));
  }
}

TEST_CASE("overflow policy: non-finite endpoints abort") {
  Interval big(1e308);
  CHECK_THROWS_AS(big * big, vkam::overflow_error);
  CHECK_THROWS_AS(big + big, vkam::overflow_error);
  CHECK_THROWS_AS(vkam::exp(Interval(800.0)), vkam::overflow_error);
}

TEST_CASE("serialization round trip never shrinks") {
  std::mt19937_64 rng(99u);
  std::uniform_real_distribution<double> mag(-1e12, 1e12);
  for (int it = 0; it < 5000; ++it) {
    double c = mag(rng);
    Interval a(c, c + std::fabs(mag(rng)) * 1e-9);
    Interval back = vkam::iv_parse_pair(vkam::to_string(a));
    REQUIRE(back.lo == a.lo);
    REQUIRE(back.hi == a.hi);
  }
  Interval t(0.1, 0.3);
  CHECK(vkam::iv_parse_pair(vkam::to_string(t)).contains(t));
}
