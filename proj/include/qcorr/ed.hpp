#pragma once

// Brute-force ground truth for the chain solver and the measurement
// optimizers: dense exact diagonalization of the full 2^n Hamiltonian,
// built sector-blocked in the S_z parity eigenbasis, partial trace to spin
// pairs, and full-sphere grid minimization of measurement-based measures
// evaluated through dense 4x4 algebra (independent of the closed-form
// post-measurement spectrum used by the fast paths).

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "qcorr/chain.hpp"
#include "qcorr/measures.hpp"
#include "qcorr/xstate.hpp"

namespace qcorr::ed {

inline constexpr int kMaxSites = 12;

struct DenseState {
  Eigen::VectorXd amplitudes;  // full 2^n vector, real
  int n = 0;
  int parity = +1;
  double energy = 0.0;
  bool degenerate_resolved = false;  // sector minimum was degenerate
};

namespace detail {

inline int popcount_bits(unsigned s) { return std::popcount(s); }

// Site bit = 1 means spin down; even parity = even number of up spins,
// which for even n is an even number of down spins.
inline int state_parity(unsigned s, int /*n*/) {
  return popcount_bits(s) % 2 == 0 ? +1 : -1;
}

}  // namespace detail

// Lowest eigenvector of one parity sector. Degenerate sector minima (XX
// limit at special fields) are resolved deterministically by picking the
// minimal total-S_z eigenvector of the degenerate subspace, matching the
// B -> B+ limit of the chain solver's occupation convention.
inline DenseState ground_state_sector(const ChainParams& p, int parity) {
  p.validate();
  if (p.n > kMaxSites)
    throw std::runtime_error("ed: n > 12 exceeds the dense oracle guard");
  const unsigned dim = 1u << p.n;
  std::vector<unsigned> basis;
  basis.reserve(dim / 2);
  for (unsigned s = 0; s < dim; ++s)
    if (detail::state_parity(s, p.n) == parity) basis.push_back(s);
  std::vector<int> pos(dim, -1);
  for (std::size_t i = 0; i < basis.size(); ++i) pos[basis[i]] = int(i);

  const int d = int(basis.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
  const double hop = -0.5 * p.j_plus();   // |01> <-> |10| bond element
  const double pair = -0.5 * p.j_minus();  // |00> <-> |11| bond element
  for (int a = 0; a < d; ++a) {
    const unsigned s = basis[a];
    h(a, a) = p.b * (0.5 * p.n - detail::popcount_bits(s));
    for (int i = 0; i < p.n; ++i) {
      const int j = (i + 1) % p.n;
      const unsigned mi = 1u << i, mj = 1u << j;
      const bool bi = s & mi, bj = s & mj;
      const unsigned t = s ^ (mi | mj);
      h(pos[t], a) += (bi == bj) ? pair : hop;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double gap_tol = 1e-9 * std::max(1.0, std::abs(ev(0)));
  int ndeg = 1;
  while (ndeg < d && ev(ndeg) - ev(0) < gap_tol) ++ndeg;

  Eigen::VectorXd vec;
  bool resolved = false;
  if (ndeg == 1) {
    vec = es.eigenvectors().col(0);
  } else {
    // minimize total S_z within the degenerate subspace
    Eigen::MatrixXd sz = Eigen::MatrixXd::Zero(ndeg, ndeg);
    for (int a = 0; a < ndeg; ++a)
      for (int b = a; b < ndeg; ++b) {
        double acc = 0.0;
        for (int r = 0; r < d; ++r)
          acc += es.eigenvectors()(r, a) * es.eigenvectors()(r, b) *
                 (0.5 * p.n - detail::popcount_bits(basis[r]));
        sz(a, b) = sz(b, a) = acc;
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> szs(sz);
    vec = es.eigenvectors().leftCols(ndeg) * szs.eigenvectors().col(0);
    resolved = true;
  }

  // canonical sign: largest-magnitude amplitude positive
  int imax = 0;
  for (int r = 1; r < d; ++r)
    if (std::abs(vec(r)) > std::abs(vec(imax))) imax = r;
  if (vec(imax) < 0.0) vec = -vec;

  DenseState st;
  st.n = p.n;
  st.parity = parity;
  st.energy = ev(0);
  st.degenerate_resolved = resolved;
  st.amplitudes = Eigen::VectorXd::Zero(dim);
  for (int r = 0; r < d; ++r) st.amplitudes(basis[r]) = vec(r);
  return st;
}

struct GroundSolution {
  DenseState even, odd;
  int ground_parity = +1;  // +1 at exact cross-sector degeneracy
  bool degenerate = false;

  const DenseState& global() const {
    return ground_parity == +1 ? even : odd;
  }
};

inline GroundSolution ground_state_exact(const ChainParams& p) {
  GroundSolution g;
  g.even = ground_state_sector(p, +1);
  g.odd = ground_state_sector(p, -1);
  const double scale =
      std::max({1.0, std::abs(g.even.energy), std::abs(g.odd.energy)});
  g.degenerate = std::abs(g.even.energy - g.odd.energy) <= 1e-9 * scale;
  g.ground_parity =
      (g.degenerate || g.even.energy <= g.odd.energy) ? +1 : -1;
  return g;
}

// Partial trace onto the (i, j) pair, asserting the X structure enforced
// by parity symmetry (off-X entries below 1e-10).
inline XState reduce_pair(const DenseState& s, int i, int j) {
  if (!(0 <= i && i < j && j < s.n))
    throw std::invalid_argument("reduce_pair: need 0 <= i < j < n");
  const unsigned dim = 1u << s.n;
  const unsigned mi = 1u << i, mj = 1u << j;
  Eigen::Matrix4d rho = Eigen::Matrix4d::Zero();
  for (unsigned a = 0; a < dim; ++a) {
    const double amp = s.amplitudes(a);
    if (amp == 0.0) continue;
    const int pa = 2 * bool(a & mi) + bool(a & mj);
    const unsigned base = a & ~(mi | mj);
    for (int pb = 0; pb < 4; ++pb) {
      const unsigned b = base | (pb & 2 ? mi : 0u) | (pb & 1 ? mj : 0u);
      rho(pa, pb) += amp * s.amplitudes(b);
    }
  }
  rho = 0.5 * (rho + rho.transpose()).eval();
  const double off = std::max({std::abs(rho(0, 1)), std::abs(rho(0, 2)),
                               std::abs(rho(1, 3)), std::abs(rho(2, 3))});
  if (off >= 1e-10)
    throw std::runtime_error("reduce_pair: non-X structure (parity bug?)");
  XState x;
  x.a_plus = rho(0, 0);
  x.c_plus = rho(1, 1);
  x.c_minus = rho(2, 2);
  x.a_minus = rho(3, 3);
  x.beta = rho(0, 3);
  x.alpha = rho(1, 2);
  x.validate();
  return x;
}

// ---- dense measure evaluation (grid-search oracle) ----

namespace detail {

using qcorr::detail::kron2;
using qcorr::detail::Mat2c;
using qcorr::detail::Mat4c;
using qcorr::detail::measured_state;
using qcorr::detail::spin_projector;

inline Spectrum dense_spectrum4(const Mat4c& rho) {
  Eigen::SelfAdjointEigenSolver<Mat4c> es(rho);
  Spectrum s;
  s.probs.assign(es.eigenvalues().data(), es.eigenvalues().data() + 4);
  s.validate();
  return s;
}

inline Spectrum dense_spectrum2(const Mat2c& rho) {
  Eigen::SelfAdjointEigenSolver<Mat2c> es(rho);
  Spectrum s;
  s.probs.assign(es.eigenvalues().data(), es.eigenvalues().data() + 2);
  s.validate();
  return s;
}

inline Mat2c trace_out_b(const Mat4c& rho) {
  Mat2c r = Mat2c::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) r(a, b) += rho(2 * a + c, 2 * b + c);
  return r;
}

inline Mat2c trace_out_a(const Mat4c& rho) {
  Mat2c r = Mat2c::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) r(a, b) += rho(2 * c + a, 2 * c + b);
  return r;
}

}  // namespace detail

// S_f(rho'(k)) - S_f(rho) evaluated entirely through dense diagonalization.
inline double dense_deficit_objective(const XState& x,
                                      const Eigen::Vector3d& k,
                                      const EntropyFunctional& f) {
  const detail::Mat4c rho = x.dense().cast<std::complex<double>>();
  const double s0 = eval_entropy(detail::dense_spectrum4(rho), f);
  const detail::Mat4c rhop = detail::measured_state(rho, k.normalized());
  return eval_entropy(detail::dense_spectrum4(rhop), f) - s0;
}

// sum_nu p_nu S(rho_{A/nu}) through dense projector algebra.
inline double dense_conditional_entropy(const XState& x,
                                        const Eigen::Vector3d& k) {
  const detail::Mat4c rho = x.dense().cast<std::complex<double>>();
  const detail::Mat2c id = detail::Mat2c::Identity();
  const auto vn = EntropyFunctional::von_neumann();
  double acc = 0.0;
  for (int sgn : {+1, -1}) {
    const detail::Mat4c proj =
        detail::kron2(id, detail::spin_projector(k.normalized(), sgn));
    const detail::Mat4c out = proj * rho * proj;
    const double pn = out.trace().real();
    if (pn <= 1e-15) continue;
    acc += pn * eval_entropy(detail::dense_spectrum2(detail::trace_out_b(out) / pn), vn);
  }
  return acc;
}

struct GridMeasure {
  bool discord = false;
  EntropyFunctional f = EntropyFunctional::von_neumann();

  static GridMeasure discord_measure() { return {true, EntropyFunctional::von_neumann()}; }
  static GridMeasure deficit(const EntropyFunctional& func) { return {false, func}; }
};

// Exhaustive minimization over measurement directions: Fibonacci lattice
// on the half-sphere (k and -k are the same projective measurement), two
// shrinking local product-grid stages, then a coordinate golden polish.
inline MeasureOutcome grid_minimize_measure(const XState& x,
                                            const GridMeasure& which,
                                            int resolution = 64) {
  if (resolution < 64)
    throw std::invalid_argument("grid_minimize_measure: resolution >= 64");
  x.validate();
  const detail::Mat4c rho = x.dense().cast<std::complex<double>>();
  const auto vn = EntropyFunctional::von_neumann();
  double baseline;
  if (which.discord) {
    baseline = eval_entropy(detail::dense_spectrum4(rho), vn) -
               eval_entropy(detail::dense_spectrum2(detail::trace_out_a(rho)), vn);
  } else {
    baseline = 0.0;  // dense_deficit_objective subtracts S_f(rho) itself
  }
  auto objective = [&](double gamma, double phi) {
    const Eigen::Vector3d k(std::sin(gamma) * std::cos(phi),
                            std::sin(gamma) * std::sin(phi), std::cos(gamma));
    return which.discord ? dense_conditional_entropy(x, k)
                         : dense_deficit_objective(x, k, which.f);
  };

  const int npts = resolution * resolution / 2;
  constexpr double golden_frac = 0.6180339887498949;
  double best_g = 0.0, best_p = 0.0;
  double best_v = objective(0.0, 0.0);
  for (int i = 0; i < npts; ++i) {
    const double z = (i + 0.5) / npts;
    const double gamma = std::acos(z);
    const double phi = 2.0 * M_PI * std::fmod(i * golden_frac, 1.0);
    const double v = objective(gamma, phi);
    if (v < best_v) {
      best_v = v;
      best_g = gamma;
      best_p = phi;
    }
  }

  double w = 1.6 * std::sqrt(2.0 * M_PI / npts);
  for (int stage = 0; stage < 2; ++stage) {
    const int m = 8;
    double bg = best_g, bp = best_p;
    for (int a = -m; a <= m; ++a)
      for (int b = -m; b <= m; ++b) {
        const double g = bg + w * a / m, p = bp + w * b / m;
        const double v = objective(g, p);
        if (v < best_v) {
          best_v = v;
          best_g = g;
          best_p = p;
        }
      }
    w /= 6.0;
  }
  for (int round = 0; round < 8 && w > 1e-10; ++round, w /= 5.0) {
    auto along_g = [&](double g) { return objective(g, best_p); };
    auto mg = qcorr::detail::golden_section(along_g, best_g - w, best_g + w,
                                            along_g(best_g - w),
                                            along_g(best_g + w), 1e-10);
    if (mg.fx < best_v) {
      best_v = mg.fx;
      best_g = mg.x;
    }
    auto along_p = [&](double p) { return objective(best_g, p); };
    auto mp = qcorr::detail::golden_section(along_p, best_p - w, best_p + w,
                                            along_p(best_p - w),
                                            along_p(best_p + w), 1e-10);
    if (mp.fx < best_v) {
      best_v = mp.fx;
      best_p = mp.x;
    }
  }

  MeasureOutcome out;
  const Eigen::Vector3d k(std::sin(best_g) * std::cos(best_p),
                          std::sin(best_g) * std::sin(best_p),
                          std::cos(best_g));
  out.dir = MeasurementDir::from_unit(k);
  out.value = std::max(best_v - baseline, 0.0);
  const BlochForm bf = to_bloch(x);
  out.residual = which.discord
                     ? stationarity_residual_discord(bf, out.dir)
                     : stationarity_residual(bf, out.dir, which.f);
  return out;
}

}  // namespace qcorr::ed
