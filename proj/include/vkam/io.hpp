#pragma once

// ASCII file formats of the pipeline.  All interval endpoints are printed
// with 17 significant digits, so reading back reproduces each double exactly
// and a round trip never shrinks an enclosure.
//
//   TFH v1            Taylor-Fourier Hamiltonian
//     TFH v1
//     <lmax> <K> <RI>
//     <l> <k1> <k2> <c_lo> <c_hi> <s_lo> <s_hi>      one line per term
//
//   freq intervals    two interval lines: omega enclosure, then exactly [1,1]
//
//   LEDGER v1         explicit-stage bound ledger
//     LEDGER v1
//     <lmax> <K> <RI>
//     G <r> <i> <j> <lo> <hi>          generator constants, r = 1..RI
//     H <hat> <l> <r> <s> <lo> <hi>    block norms (hat = 1: intermediate)
//     TAIL <l> <lo> <hi>               norm spilled past the caps (diagnostic)
//     M <lo> <hi>                      sum_s d2<h2^(RI,s)>/dpsi2, signed

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vkam/hamiltonian.hpp"

namespace vkam {

class io_error : public std::runtime_error {
public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw io_error("cannot write '" + path + "'");
  f.precision(17);
  return f;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw io_error("cannot read '" + path + "'");
  return f;
}

}  // namespace detail

// --- TFH v1 ------------------------------------------------------------------

inline void write_tfh(const std::string& path, const HamiltonianState& H) {
  auto f = detail::open_out(path);
  f << "TFH v1\n" << H.lmax << ' ' << H.K << ' ' << H.R_I << '\n';
  for (int l = 0; l <= H.lmax; ++l) {
    TFSeries all = H.collapse_l(l);
    for (const auto& t : all.terms())
      f << t.l << ' ' << t.k.k1 << ' ' << t.k.k2 << ' ' << to_string(t.c) << ' '
        << to_string(t.s) << '\n';
  }
}

struct TFHFile {
  int lmax = 4, K = 3, R_I = 1;
  TFSeries terms;
};

inline TFHFile read_tfh(const std::string& path) {
  auto f = detail::open_in(path);
  std::string header;
  std::getline(f, header);
  if (header != "TFH v1") throw io_error(path + ": not a TFH v1 file");
  TFHFile out;
  f >> out.lmax >> out.K >> out.R_I;
  if (!f || out.lmax < 0 || out.K < 1 || out.R_I < 1)
    throw io_error(path + ": malformed TFH header line");
  int l, k1, k2;
  double clo, chi, slo, shi;
  while (f >> l >> k1 >> k2 >> clo >> chi >> slo >> shi) {
    if (l < 0 || l > out.lmax) throw io_error(path + ": term with l out of range");
    out.terms.add_term(l, k1, k2, Interval(clo, chi), Interval(slo, shi));
  }
  out.terms.normalize();
  return out;
}

// Rebin a TFH term list into the (l, s) grading: s = ceil(deg / K), the
// zero-degree psi-linear residual at s = 1, constants dropped.
inline HamiltonianState assemble_state(const TFHFile& tfh, const Interval& omega) {
  HamiltonianState H(omega, tfh.lmax, tfh.K, tfh.R_I, tfh.R_I, 2 * tfh.K * tfh.R_I);
  for (const auto& t : tfh.terms.terms()) {
    int deg = t.k.degree();
    if (deg > tfh.R_I * tfh.K)
      throw io_error("TFH term beyond the R_I K truncation degree");
    int s = (deg + tfh.K - 1) / tfh.K;
    if (t.l == 0 && deg == 0) continue;
    if (t.l == 1 && deg == 0) s = 1;
    H.block(t.l, s).add_term(t.l, t.k.k1, t.k.k2, t.c, t.s);
  }
  for (int l = 0; l <= H.lmax; ++l)
    for (int s = 0; s <= H.order_cap; ++s) H.block(l, s).normalize();
  return H;
}

// --- frequency file ----------------------------------------------------------

inline void write_freq(const std::string& path, const Interval& omega) {
  auto f = detail::open_out(path);
  f << to_string(omega) << '\n' << to_string(Interval(1.0)) << '\n';
}

inline Interval read_freq(const std::string& path) {
  auto f = detail::open_in(path);
  std::string line;
  if (!std::getline(f, line)) throw io_error(path + ": empty frequency file");
  Interval omega = iv_parse_pair(line);
  if (!std::getline(f, line)) throw io_error(path + ": missing second frequency line");
  Interval unit = iv_parse_pair(line);
  if (!unit.contains(1.0)) throw io_error(path + ": second frequency must enclose 1");
  return omega;
}

// --- LEDGER v1 ---------------------------------------------------------------

struct ExplicitLedger {
  int lmax = 4, K = 3, R_I = 1;
  // G[r-1][idx]: idx 0..3 = g11, g12, g21, g22
  std::vector<std::array<Interval, 4>> G;
  // norms[hat][l][r][s]: r = 0..R_I (hat rows start at r = 1), s = 0..R_I
  std::vector<std::vector<std::vector<Interval>>> theta, theta_hat;
  std::vector<Interval> tails;
  Interval C_sum;  // signed twist sum at step R_I
  bool tail_valid = true;

  void init(int lmax_, int K_, int R_I_) {
    lmax = lmax_;
    K = K_;
    R_I = R_I_;
    G.assign(R_I, {Interval(0.0), Interval(0.0), Interval(0.0), Interval(0.0)});
    theta.assign(lmax + 1,
                 std::vector<std::vector<Interval>>(R_I + 1, std::vector<Interval>(R_I + 1, Interval(0.0))));
    theta_hat = theta;
    tails.assign(lmax + 1, Interval(0.0));
    C_sum = Interval(0.0);
  }
};

inline void write_ledger(const std::string& path, const ExplicitLedger& L) {
  auto f = detail::open_out(path);
  f << "LEDGER v1\n" << L.lmax << ' ' << L.K << ' ' << L.R_I << '\n';
  for (int r = 1; r <= L.R_I; ++r) {
    static const int ij[4][2] = {{1, 1}, {1, 2}, {2, 1}, {2, 2}};
    for (int t = 0; t < 4; ++t)
      f << "G " << r << ' ' << ij[t][0] << ' ' << ij[t][1] << ' ' << to_string(L.G[r - 1][t])
        << '\n';
  }
  for (int hat = 0; hat <= 1; ++hat) {
    const auto& arr = hat ? L.theta_hat : L.theta;
    for (int l = 0; l <= L.lmax; ++l)
      for (int r = hat ? 1 : 0; r <= L.R_I; ++r)
        for (int s = 0; s <= L.R_I; ++s) {
          const Interval& v = arr[l][r][s];
          if (v.is_zero()) continue;
          f << "H " << hat << ' ' << l << ' ' << r << ' ' << s << ' ' << to_string(v) << '\n';
        }
  }
  for (int l = 0; l <= L.lmax; ++l)
    if (!L.tails[l].is_zero()) f << "TAIL " << l << ' ' << to_string(L.tails[l]) << '\n';
  if (!L.tail_valid) f << "TAIL -1 inf inf\n";
  f << "M " << to_string(L.C_sum) << '\n';
}

inline ExplicitLedger read_ledger(const std::string& path) {
  auto f = detail::open_in(path);
  std::string header;
  std::getline(f, header);
  if (header != "LEDGER v1") throw io_error(path + ": not a LEDGER v1 file");
  int lmax, K, R_I;
  f >> lmax >> K >> R_I;
  if (!f || R_I < 1) throw io_error(path + ": malformed ledger header");
  ExplicitLedger L;
  L.init(lmax, K, R_I);
  std::string tag;
  bool saw_m = false;
  while (f >> tag) {
    if (tag == "G") {
      int r, i, j;
      double lo, hi;
      f >> r >> i >> j >> lo >> hi;
      if (!f || r < 1 || r > R_I || i < 1 || i > 2 || j < 1 || j > 2)
        throw io_error(path + ": bad G record");
      L.G[r - 1][(i - 1) * 2 + (j - 1)] = Interval(lo, hi);
    } else if (tag == "H") {
      int hat, l, r, s;
      double lo, hi;
      f >> hat >> l >> r >> s >> lo >> hi;
      if (!f || l < 0 || l > lmax || r < 0 || r > R_I || s < 0 || s > R_I)
        throw io_error(path + ": bad H record");
      (hat ? L.theta_hat : L.theta)[l][r][s] = Interval(lo, hi);
    } else if (tag == "TAIL") {
      int l;
      std::string lo, hi;
      f >> l >> lo >> hi;
      if (l == -1) {
        L.tail_valid = false;
      } else {
        if (l < 0 || l > lmax) throw io_error(path + ": bad TAIL record");
        L.tails[l] = iv_parse_pair(lo + " " + hi);
      }
    } else if (tag == "M") {
      double lo, hi;
      f >> lo >> hi;
      if (!f) throw io_error(path + ": bad M record");
      L.C_sum = Interval(lo, hi);
      saw_m = true;
    } else {
      throw io_error(path + ": unknown record tag '" + tag + "'");
    }
  }
  if (!saw_m) throw io_error(path + ": missing M record");
  return L;
}

}  // namespace vkam
