#pragma once

// Exact parity-resolved Jordan-Wigner solution of the finite cyclic
// first-neighbor anisotropic XY chain in a transverse field:
//   H = B sum_i s_iz - sum_i (Jx s_ix s_i+1x + Jy s_iy s_i+1y),  cyclic.
// Even parity uses antiperiodic fermion modes (half-integer k), odd parity
// periodic modes (integer k). Pair reduced density matrices follow from
// Wick's theorem with L x L determinants; factorizing-field closed forms
// and the strong-field expansion are included.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qcorr/xstate.hpp"

namespace qcorr {

struct ChainParams {
  int n = 0;       // sites, even, >= 4
  double jx = 1;   // coupling along x, > 0 (energy unit)
  double jy = 0;   // |jy| <= jx
  double b = 0;    // transverse field, >= 0 after normalization
  bool b_negated = false;  // true if the input field was negative

  // The spectrum is invariant under B -> -B (global spin flip), so
  // negative fields are mapped to |B| and flagged.
  static ChainParams make(int n, double jx, double jy, double b) {
    ChainParams p;
    p.n = n;
    p.jx = jx;
    p.jy = jy;
    p.b_negated = b < 0.0;
    p.b = std::abs(b);
    p.validate();
    return p;
  }

  void validate() const {
    if (n < 4 || n % 2 != 0)
      throw std::invalid_argument("ChainParams: n must be even and >= 4");
    if (!(jx > 0.0))
      throw std::invalid_argument("ChainParams: Jx must be positive");
    if (std::abs(jy) > jx)
      throw std::invalid_argument("ChainParams: |Jy| must not exceed Jx");
    if (b < 0.0) throw std::invalid_argument("ChainParams: B must be >= 0");
  }

  double chi() const { return jy / jx; }
  double j_plus() const { return 0.5 * (jx + jy); }
  double j_minus() const { return 0.5 * (jx - jy); }
};

struct FermionMode {
  double k = 0;       // half-integer (even sector) or integer (odd sector)
  double omega = 0;   // 2 pi k / n
  double lambda = 0;  // quasiparticle energy; signed J+ - B at k = 0
  double v2 = 0;      // <c'+_k c'_k> occupation in the sector vacuum
  double uv = 0;      // anomalous amplitude u_k v_k
  bool gapless = false;
};

struct SectorSolution {
  int parity = +1;  // +1 even (P_z = +1), -1 odd
  int n = 0;
  std::vector<FermionMode> modes;
  double vacuum_energy = 0.0;
  bool gapless = false;  // some k != 0 mode has lambda = 0 (XX limit only)
};

// All modes of one parity sector with BCS amplitudes and the vacuum energy
// E = -1/2 sum_k lambda_k. The odd-sector k = 0 mode carries the signed
// lambda_0 = J+ - B with v_0^2 = 1, so the vacuum always has odd parity.
inline SectorSolution mode_energies(const ChainParams& p, int parity) {
  p.validate();
  if (parity != +1 && parity != -1)
    throw std::invalid_argument("mode_energies: parity must be +-1");
  const double jp = p.j_plus(), jm = p.j_minus();
  const double gap_tol = 1e-12 * (p.jx + p.b + 1.0);
  SectorSolution s;
  s.parity = parity;
  s.n = p.n;
  s.modes.reserve(p.n);
  double esum = 0.0;
  for (int i = 0; i < p.n; ++i) {
    FermionMode m;
    m.k = parity == +1 ? i + 0.5 : double(i);
    m.omega = 2.0 * M_PI * m.k / p.n;
    const double eps = p.b - jp * std::cos(m.omega);
    const double delta = jm * std::sin(m.omega);
    if (parity == -1 && i == 0) {
      m.lambda = jp - p.b;  // signed by convention
      m.v2 = 1.0;
      m.uv = 0.0;
    } else {
      m.lambda = std::hypot(eps, delta);
      if (m.lambda < gap_tol) {
        // gapless mode (XX limit): occupation from the B -> B+ side
        m.v2 = 0.0;
        m.uv = 0.0;
        m.gapless = true;
        s.gapless = true;
      } else {
        m.v2 = 0.5 * (1.0 - eps / m.lambda);
        m.uv = 0.5 * delta / m.lambda;
      }
    }
    esum += m.lambda;
    s.modes.push_back(m);
  }
  s.vacuum_energy = -0.5 * esum;
  return s;
}

struct GroundSector {
  int parity = +1;  // parity of the lower vacuum; +1 at exact degeneracy
  double energy_even = 0.0;
  double energy_odd = 0.0;
  bool degenerate = false;
};

inline GroundSector ground_sector(const ChainParams& p) {
  GroundSector g;
  g.energy_even = mode_energies(p, +1).vacuum_energy;
  g.energy_odd = mode_energies(p, -1).vacuum_energy;
  const double scale =
      std::max({1.0, std::abs(g.energy_even), std::abs(g.energy_odd)});
  g.degenerate = std::abs(g.energy_even - g.energy_odd) <= 1e-10 * scale;
  g.parity = g.energy_even <= g.energy_odd ? +1 : -1;
  if (g.degenerate) g.parity = +1;
  return g;
}

// Basic fermionic contractions of the sector vacuum:
//   <c+_i c_j>   = f_L + delta_L0 / 2,  f_L = (1/n) sum_k cos(w_k L) v_k^2 - d/2
//   <c+_i c+_j>  = g_L = (1/n) sum_k sin(w_k L) u_k v_k
// for L = 0..lmax. Imaginary parts cancel by the k <-> n-k symmetry and are
// checked against 1e-10.
struct PairCorrelations {
  std::vector<double> f, g;
};

inline PairCorrelations pair_correlators(const SectorSolution& s, int lmax) {
  if (lmax < 0 || lmax > s.n / 2)
    throw std::invalid_argument("pair_correlators: need 0 <= Lmax <= n/2");
  PairCorrelations c;
  c.f.resize(lmax + 1);
  c.g.resize(lmax + 1);
  for (int L = 0; L <= lmax; ++L) {
    double fre = 0.0, fim = 0.0, gre = 0.0, gim = 0.0;
    for (const FermionMode& m : s.modes) {
      const double cw = std::cos(m.omega * L), sw = std::sin(m.omega * L);
      fre += cw * m.v2;
      fim -= sw * m.v2;
      gre += sw * m.uv;
      gim += cw * m.uv;
    }
    if (std::abs(fim) / s.n >= 1e-10 || std::abs(gim) / s.n >= 1e-10)
      throw std::runtime_error(
          "pair_correlators: residual imaginary part exceeds tolerance");
    c.f[L] = fre / s.n - (L == 0 ? 0.5 : 0.0);
    c.g[L] = gre / s.n;
  }
  return c;
}

namespace detail {

// f_{-L} = f_L, g_{-L} = -g_L.
inline double f_at(const PairCorrelations& c, int idx) {
  return c.f[std::abs(idx)];
}
inline double g_at(const PairCorrelations& c, int idx) {
  return idx >= 0 ? c.g[idx] : -c.g[-idx];
}

}  // namespace detail

// Reduced density matrix of a spin pair at separation L built from
// precomputed contractions (must cover indices up to L). Wick's theorem:
//   <s_z> = f_0,  <s_iz s_jz> = f_0^2 - f_L^2 + g_L^2,
//   <s_i- s_j-+> = [det(A+_L) -+ det(A-_L)]/4,
// with (A^pm_L)_{ij} = 2(f_{i-j pm 1} + g_{i-j pm 1}).
inline XState pair_rdm_from(const PairCorrelations& c, int L) {
  if (L < 1 || L + 1 > int(c.f.size()))
    throw std::invalid_argument("pair_rdm_from: contractions too short");

  Eigen::MatrixXd a_plus(L, L), a_minus(L, L);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      a_plus(i, j) =
          2.0 * (detail::f_at(c, i - j + 1) + detail::g_at(c, i - j + 1));
      a_minus(i, j) =
          2.0 * (detail::f_at(c, i - j - 1) + detail::g_at(c, i - j - 1));
    }
  const double det_p = L == 1 ? a_plus(0, 0) : a_plus.determinant();
  const double det_m = L == 1 ? a_minus(0, 0) : a_minus.determinant();
  if (!std::isfinite(det_p) || !std::isfinite(det_m))
    throw std::runtime_error("pair_rdm: determinant evaluation failed");

  const double f0 = c.f[0];
  const double szsz = f0 * f0 - c.f[L] * c.f[L] + c.g[L] * c.g[L];
  XState x;
  x.a_plus = 0.25 + f0 + szsz;
  x.a_minus = 0.25 - f0 + szsz;
  x.c_plus = 0.25 - szsz;
  x.c_minus = 0.25 - szsz;
  x.beta = 0.25 * (det_p - det_m);
  x.alpha = 0.25 * (det_p + det_m);
  x.validate();
  return x;
}

// Pair reduced density matrix in the requested parity sector's vacuum.
inline XState pair_rdm(const ChainParams& p, int parity, int L) {
  if (L < 1 || L > p.n / 2)
    throw std::invalid_argument("pair_rdm: need 1 <= L <= n/2");
  return pair_rdm_from(pair_correlators(mode_energies(p, parity), L), L);
}

// Factorizing field B_s = sqrt(Jx Jy), defined for 0 < Jy < Jx.
inline double factorizing_field(const ChainParams& p) {
  if (!(p.jy > 0.0) || !(p.jy < p.jx))
    throw std::domain_error("factorizing_field: needs 0 < Jy < Jx");
  return std::sqrt(p.jx * p.jy);
}

// Common separation-independent pair state at the factorizing field
// (overlap between the two product ground states neglected):
// a_pm = (1 pm cos t)^2/4, alpha = beta = c = sin^2(t)/4, cos t = sqrt(chi).
struct FactorizedPairState {
  double chi = 0.0;
  double theta = 0.0;
  XState state;
};

inline FactorizedPairState factorized_pair_state(double chi) {
  if (!(chi > 0.0) || !(chi < 1.0))
    throw std::domain_error("factorized_pair_state: needs 0 < chi < 1");
  FactorizedPairState f;
  f.chi = chi;
  const double ct = std::sqrt(chi);
  f.theta = std::acos(ct);
  const double s2 = 1.0 - chi;  // sin^2 theta
  f.state.a_plus = 0.25 * (1.0 + ct) * (1.0 + ct);
  f.state.a_minus = 0.25 * (1.0 - ct) * (1.0 - ct);
  f.state.c_plus = f.state.c_minus = 0.25 * s2;
  f.state.alpha = f.state.beta = 0.25 * s2;
  f.state.validate();
  return f;
}

// Quadratic deficit at the factorizing field (thermodynamic limit):
// (1-chi)^2/2 for chi >= 1/3 (measurement along z), chi(1+chi)/2 for
// chi <= 1/3 (measurement along x).
inline double i2_at_factorizing(double chi) {
  if (!(chi > 0.0) || !(chi < 1.0))
    throw std::domain_error("i2_at_factorizing: needs 0 < chi < 1");
  if (chi >= 1.0 / 3.0) return 0.5 * (1.0 - chi) * (1.0 - chi);
  return 0.5 * chi * (1.0 + chi);
}

struct SideLimits {
  double left = 0.0;   // B -> Bs-
  double right = 0.0;  // B -> Bs+
};

// Finite-n side limits of I_2 at B_s (valid for chi >~ 1/3):
// (1-chi)^2/2 (1+chi^(n-2))/(1 pm chi^(n/2))^2, + for the right limit.
inline SideLimits i2_side_limits(double chi, int n) {
  if (!(chi > 0.0) || !(chi < 1.0))
    throw std::domain_error("i2_side_limits: needs 0 < chi < 1");
  if (chi < 1.0 / 3.0 - 1e-12)
    throw std::domain_error("i2_side_limits: formula valid for chi >= 1/3");
  if (n < 4 || n % 2 != 0)
    throw std::invalid_argument("i2_side_limits: n must be even and >= 4");
  const double base = 0.5 * (1.0 - chi) * (1.0 - chi);
  const double num = 1.0 + std::pow(chi, n - 2);
  const double h = std::pow(chi, n / 2);
  SideLimits s;
  s.left = base * num / ((1.0 - h) * (1.0 - h));
  s.right = base * num / ((1.0 + h) * (1.0 + h));
  return s;
}

// Concurrence side limits at B_s: chi^(n/2-1)(1-chi)/(1 pm chi^(n/2)).
inline SideLimits concurrence_side_limits(double chi, int n) {
  if (!(chi > 0.0) || !(chi < 1.0))
    throw std::domain_error("concurrence_side_limits: needs 0 < chi < 1");
  if (n < 4 || n % 2 != 0)
    throw std::invalid_argument("concurrence_side_limits: n even, >= 4");
  const double num = std::pow(chi, n / 2 - 1) * (1.0 - chi);
  const double h = std::pow(chi, n / 2);
  return {num / (1.0 - h), num / (1.0 + h)};
}

// First-neighbor strong-field estimates with eta = (Jx - Jy)/(8B):
// C ~ 2(eta - eta^2), I2 ~ 4 eta^2, I1 ~ eta^2 (log2 e - log2 eta^2),
// D ~ eta^2 (log2 e - log2 eta^2 - 2).
struct StrongFieldAsymptotics {
  double c = 0.0, i2 = 0.0, i1 = 0.0, d = 0.0;
  double eta = 0.0;
  bool field_weak_warning = false;  // set when B < 5 Jx
};

inline StrongFieldAsymptotics strong_field_asymptotics(const ChainParams& p) {
  p.validate();
  if (!(p.b > 0.0))
    throw std::domain_error("strong_field_asymptotics: needs B > 0");
  StrongFieldAsymptotics a;
  a.field_weak_warning = p.b < 5.0 * p.jx;
  a.eta = (p.jx - p.jy) / (8.0 * p.b);
  if (a.eta == 0.0) return a;
  const double e2 = a.eta * a.eta;
  a.c = 2.0 * (a.eta - e2);
  a.i2 = 4.0 * e2;
  a.i1 = e2 * (LOG2E - log2_safe(e2));
  a.d = e2 * (LOG2E - log2_safe(e2) - 2.0);
  return a;
}

}  // namespace qcorr
