#pragma once

// Correlation measures of two-qubit X states: Wootters concurrence and
// entanglement of formation, quantum discord, generalized information
// deficits I_f, and the analytic quadratic deficit I_2 (geometric discord).
// Measurement minimizations run over the coordinate plane spanned by e_z
// and the dominant transverse correlation axis; for X states this plane
// provably contains the global optimum (the objective is monotone in
// j_x^2 k_x^2 + j_y^2 k_y^2 at fixed k_z).

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "qcorr/entropy.hpp"
#include "qcorr/xstate.hpp"

namespace qcorr {

// Result of a measurement minimization: optimal value, minimizing
// direction, stationarity residual of the direction, degeneracy flag.
struct MeasureOutcome {
  double value = 0.0;
  MeasurementDir dir;
  double residual = 0.0;
  bool degenerate = false;
};

struct OptimizationError : std::runtime_error {
  OptimizationError(const std::string& what, MeasureOutcome best_iterate)
      : std::runtime_error(what), best(best_iterate) {}
  MeasureOutcome best;
};

namespace detail {

// ---- 1-D minimization: coarse scan + golden-section refinement ----

struct ScalarMin {
  double x = 0.0;
  double fx = 0.0;
};

template <typename Fn>
ScalarMin golden_section(Fn&& fn, double a, double b, double fa, double fb,
                         double tol) {
  constexpr double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = fn(x1), f2 = fn(x2);
  int iter = 0;
  while (b - a > tol && ++iter < 200) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = fn(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = fn(x2);
    }
  }
  ScalarMin best{x1, f1};
  if (f2 < best.fx) best = {x2, f2};
  if (fa < best.fx) best = {a, fa};
  if (fb < best.fx) best = {b, fb};
  if (iter >= 200)
    throw OptimizationError("golden section did not converge",
                            MeasureOutcome{best.fx, {best.x, 0.0}, 0.0});
  return best;
}

// Minimize over gamma in [0, pi/2]: 64-point scan, then golden-section
// refinement of every local basin (the objective can have two minima near
// the measurement transition).
template <typename Fn>
ScalarMin minimize_gamma(Fn&& fn, int n_scan = 64, double tol = 1e-8) {
  const double hi = M_PI_2;
  std::vector<double> g(n_scan), v(n_scan);
  for (int i = 0; i < n_scan; ++i) {
    g[i] = hi * i / (n_scan - 1);
    v[i] = fn(g[i]);
  }
  ScalarMin best{g[0], v[0]};
  for (int i = 0; i < n_scan; ++i) {
    const bool left_ok = (i == 0) || v[i] <= v[i - 1];
    const bool right_ok = (i == n_scan - 1) || v[i] <= v[i + 1];
    if (!(left_ok && right_ok)) continue;
    const int lo = std::max(i - 1, 0), up = std::min(i + 1, n_scan - 1);
    ScalarMin m = golden_section(fn, g[lo], g[up], v[lo], v[up], tol);
    if (m.fx < best.fx) best = m;
  }
  return best;
}

// Transverse axis with the larger |j|: phi = 0 (x-z plane) or pi/2.
inline double dominant_plane_phi(const BlochForm& b) {
  return std::abs(b.j(0, 0)) >= std::abs(b.j(1, 1)) ? 0.0 : M_PI_2;
}

// ---- dense two-qubit helpers (used by the second-order expansion) ----

using cd = std::complex<double>;
using Mat2c = Eigen::Matrix2cd;
using Mat4c = Eigen::Matrix4cd;

inline Mat2c pauli(int mu) {
  Mat2c m;
  switch (mu) {
    case 0: m << 0, 1, 1, 0; break;
    case 1: m << 0, cd(0, -1), cd(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

inline Mat4c kron2(const Mat2c& a, const Mat2c& b) {
  Mat4c r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return r;
}

inline Mat4c bloch_to_dense(const BlochForm& b) {
  const Mat2c id = Mat2c::Identity();
  Mat4c rho = kron2(id, id);
  for (int mu = 0; mu < 3; ++mu) {
    rho += b.r_a(mu) * kron2(pauli(mu), id);
    rho += b.r_b(mu) * kron2(id, pauli(mu));
    for (int nu = 0; nu < 3; ++nu)
      if (b.j(mu, nu) != 0.0)
        rho += b.j(mu, nu) * kron2(pauli(mu), pauli(nu));
  }
  return 0.25 * rho;
}

// Projector (1 + s k.sigma)/2 on the B qubit.
inline Mat2c spin_projector(const Eigen::Vector3d& k, int s) {
  Mat2c m = Mat2c::Identity();
  for (int mu = 0; mu < 3; ++mu) m += double(s) * k(mu) * pauli(mu);
  return 0.5 * m;
}

// rho' = sum_s (I x P_s) rho (I x P_s).
inline Mat4c measured_state(const Mat4c& rho, const Eigen::Vector3d& k) {
  const Mat2c id = Mat2c::Identity();
  Mat4c out = Mat4c::Zero();
  for (int s : {+1, -1}) {
    Mat4c p = kron2(id, spin_projector(k, s));
    out += p * rho * p;
  }
  return out;
}

inline double clamped_fprime(const EntropyFunctional& f, double p) {
  return f.fprime(std::max(p, 1e-12));
}

// Divided difference of f' with the -f'' limit for near-degenerate pairs.
inline double fprime_divided_diff(const EntropyFunctional& f, double a,
                                  double b) {
  if (std::abs(a - b) < 1e-9)
    return -f.fsecond(std::max(0.5 * (a + b), 1e-12));
  return (clamped_fprime(f, a) - clamped_fprime(f, b)) / (b - a);
}

// Gradient of S_f(rho'(k)) wrt k (Lagrange term along k removed by the
// caller). The discord flag replaces f by the von Neumann conditional
// objective S(rho') - S(rho'_B).
inline Eigen::Vector3d measurement_gradient(const BlochForm& b,
                                            const Eigen::Vector3d& k,
                                            const EntropyFunctional& f,
                                            bool discord) {
  const double rbk = b.r_b.dot(k);
  const Eigen::Vector3d jk = b.j * k;
  const Eigen::Vector3d jt_ra = b.j.transpose() * b.r_a;
  const Eigen::Vector3d jtjk = b.j.transpose() * jk;

  double a1 = 0.0;
  Eigen::Vector3d grad = Eigen::Vector3d::Zero();
  double trq = 0.0;  // Tr rho'^q, for the Renyi rescaling
  for (int nu : {+1, -1}) {
    const double d = (b.r_a + nu * jk).norm();
    const double pp = 0.25 * (1.0 + nu * rbk + d);
    const double pm = 0.25 * (1.0 + nu * rbk - d);
    a1 += 0.25 * nu * (clamped_fprime(f, pp) + clamped_fprime(f, pm));
    // (f'(p+) - f'(p-))/d = -DD/2 with DD the divided difference
    const double half_dd =
        -0.5 * fprime_divided_diff(f, std::max(pp, 0.0), std::max(pm, 0.0));
    grad += 0.25 * half_dd * (nu * jt_ra + jtjk);
    if (f.kind() == EntropyKind::Renyi)
      trq += std::pow(std::max(pp, 0.0), f.q()) +
             std::pow(std::max(pm, 0.0), f.q());
  }
  if (discord) {
    const double pbp = std::max(0.5 * (1.0 + rbk), 1e-12);
    const double pbm = std::max(0.5 * (1.0 - rbk), 1e-12);
    a1 -= 0.5 * log2_safe(pbm / pbp);
  }
  grad += a1 * b.r_b;
  if (f.kind() == EntropyKind::Renyi && !f.von_neumann_branch()) {
    // S_q^R is a positive monotone rescaling of S_q at fixed spectrum sum
    grad *= -f.cq() / ((1.0 - f.q()) * std::max(trq, 1e-300)) * LOG2E;
  }
  return grad;
}

}  // namespace detail

// Norm of the component of the measurement-stationarity vector orthogonal
// to k; zero at stationary measurement directions.
inline double stationarity_residual(const BlochForm& b,
                                    const MeasurementDir& dir,
                                    const EntropyFunctional& f) {
  const Eigen::Vector3d k = dir.unit();
  const Eigen::Vector3d v = detail::measurement_gradient(b, k, f, false);
  return (v - v.dot(k) * k).norm();
}

inline double stationarity_residual_discord(const BlochForm& b,
                                            const MeasurementDir& dir) {
  const Eigen::Vector3d k = dir.unit();
  const Eigen::Vector3d v = detail::measurement_gradient(
      b, k, EntropyFunctional::von_neumann(), true);
  return (v - v.dot(k) * k).norm();
}

// Conditional von Neumann entropy after measuring B along k:
// sum_nu p_nu S(rho_{A/nu}), with p_nu = (1 + nu r_B.k)/2 and rho_{A/nu}
// the qubit with Bloch vector (r_A + nu J k)/(1 + nu r_B.k).
inline double conditional_entropy_after(const BlochForm& b,
                                        const MeasurementDir& dir) {
  if (b.d_a != 2)
    throw std::invalid_argument("conditional_entropy_after: needs d_a = 2");
  const Eigen::Vector3d k = dir.unit();
  const double rbk = b.r_b.dot(k);
  const Eigen::Vector3d jk = b.j * k;
  double acc = 0.0;
  for (int nu : {+1, -1}) {
    const double p = 0.5 * (1.0 + nu * rbk);
    if (p <= 1e-15) continue;  // zero-probability branch contributes 0
    const double r = std::min((b.r_a + nu * jk).norm() / (2.0 * p), 1.0);
    acc += p * binary_entropy(0.5 * (1.0 + r));
  }
  return acc;
}

// Wootters concurrence of an X state, C = 2 max(|beta| - sqrt(c+ c-),
// |alpha| - sqrt(a+ a-), 0), with the entanglement type.
enum class EntanglementType { None, Parallel, Antiparallel };

struct ConcurrenceResult {
  double value = 0.0;
  EntanglementType type = EntanglementType::None;
};

inline ConcurrenceResult concurrence(const XState& x) {
  x.validate();
  const double par = std::abs(x.beta) - std::sqrt(std::max(x.c_plus * x.c_minus, 0.0));
  const double anti = std::abs(x.alpha) - std::sqrt(std::max(x.a_plus * x.a_minus, 0.0));
  ConcurrenceResult r;
  if (par > 0.0 && par >= anti) {
    r.value = 2.0 * par;
    r.type = EntanglementType::Parallel;
  } else if (anti > 0.0) {
    r.value = 2.0 * anti;
    r.type = EntanglementType::Antiparallel;
  }
  r.value = std::min(r.value, 1.0);
  return r;
}

// Entanglement of formation from the concurrence:
// E = h((1 + sqrt(1 - C^2))/2), h the binary entropy.
inline double entanglement_of_formation(double c) {
  if (c < -1e-12 || c > 1.0 + 1e-12)
    throw std::domain_error("entanglement_of_formation: C outside [0,1]");
  c = std::clamp(c, 0.0, 1.0);
  return binary_entropy(0.5 * (1.0 + std::sqrt(1.0 - c * c)));
}

namespace detail {

template <typename Objective>
MeasureOutcome minimize_measurement(const BlochForm& b, Objective&& obj) {
  const double phi = dominant_plane_phi(b);
  auto line = [&](double gamma) { return obj(MeasurementDir{gamma, phi}); };
  ScalarMin m = minimize_gamma(line);
  MeasureOutcome out;
  out.dir = MeasurementDir{m.x, phi};
  out.value = m.fx;
  return out;
}

}  // namespace detail

// Quantum discord under projective measurements on B:
// D = min_k S(A|B_k) - [S(rho_AB) - S(rho_B)].
inline MeasureOutcome quantum_discord(const XState& x) {
  const BlochForm b = to_bloch(x);
  const auto vn = EntropyFunctional::von_neumann();
  const double s_ab = eval_entropy(x_state_spectrum(x), vn);
  const double s_b = eval_entropy(marginal_b_spectrum(x), vn);
  auto obj = [&](const MeasurementDir& k) {
    return conditional_entropy_after(b, k);
  };
  MeasureOutcome out = detail::minimize_measurement(b, obj);
  // For weakly correlated states the objective flattens below the floating
  // point resolution and the located angle is noise. The transverse axis
  // stays the exact minimizer (it is a stationary symmetry point), so snap
  // to it whenever it ties within resolution.
  const double fx = obj(MeasurementDir{M_PI_2, out.dir.phi});
  if (fx <= out.value + 1e-13 * std::max(1.0, std::abs(out.value))) {
    out.value = std::min(out.value, fx);
    out.dir.gamma = M_PI_2;
  }
  out.value -= s_ab - s_b;
  if (out.value < -1e-10)
    throw OptimizationError("quantum_discord: negative value", out);
  out.value = std::max(out.value, 0.0);
  out.residual = stationarity_residual_discord(b, out.dir);
  return out;
}

// Generalized one-way information deficit
// I_f = min_k [S_f(rho'(k)) - S_f(rho)] for any entropy functional
// (von Neumann, Tsallis(q) or Renyi(q)).
inline MeasureOutcome info_deficit(const XState& x,
                                   const EntropyFunctional& f) {
  const BlochForm b = to_bloch(x);
  const double s_f = eval_entropy(x_state_spectrum(x), f);
  MeasureOutcome out =
      detail::minimize_measurement(b, [&](const MeasurementDir& k) {
        return eval_entropy(post_measurement_spectrum(b, k), f);
      });
  out.value -= s_f;
  if (out.value < -1e-10)
    throw OptimizationError("info_deficit: negative value", out);
  out.value = std::max(out.value, 0.0);
  out.residual = stationarity_residual(b, out.dir, f);
  return out;
}

// Quadratic deficit (geometric discord): I_2 = (Tr M_2 - lambda_1)/d_A
// with M_2 = r_B r_B^t + J^t J; the minimizing measurement is the leading
// eigenvector of M_2. Exact for any qudit-qubit state.
inline MeasureOutcome geometric_deficit_I2(const BlochForm& b) {
  const Eigen::Matrix3d m2 =
      b.r_b * b.r_b.transpose() + b.j.transpose() * b.j;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m2);
  const Eigen::Vector3d ev = es.eigenvalues();  // ascending
  MeasureOutcome out;
  out.value = std::max((ev(0) + ev(1)) / b.d_a, 0.0);
  out.degenerate = (ev(2) - ev(1)) <= 1e-12 * std::max(1.0, ev(2));
  Eigen::Vector3d k = es.eigenvectors().col(2);
  if (out.degenerate) {
    // deterministic tie-break: prefer the field axis when it is optimal
    const Eigen::Vector3d ez(0.0, 0.0, 1.0);
    if (ez.dot(m2 * ez) >= ev(2) - 1e-11 * std::max(1.0, ev(2))) k = ez;
    out.residual = 0.0;
    out.dir = MeasurementDir::from_unit(k);
    return out;
  }
  out.dir = MeasurementDir::from_unit(k);
  out.residual =
      stationarity_residual(b, out.dir, EntropyFunctional::tsallis(2.0));
  return out;
}

inline MeasureOutcome geometric_deficit_I2(const XState& x) {
  return geometric_deficit_I2(to_bloch(x));
}

// Second-order estimate of the measurement entropy cost:
// sum_{m<n} [(f'(p'_m) - f'(p'_n))/(p'_n - p'_m)] |<n'|rho|m'>|^2 in the
// eigenbasis of the post-measurement state (degenerate pairs use -f'').
// Exact for Tsallis(2).
inline double deficit_second_order(const BlochForm& b,
                                   const MeasurementDir& dir,
                                   const EntropyFunctional& f) {
  if (!f.trace_form())
    throw std::invalid_argument("deficit_second_order: needs a trace-form f");
  const detail::Mat4c rho = detail::bloch_to_dense(b);
  const detail::Mat4c rhop = detail::measured_state(rho, dir.unit());
  Eigen::SelfAdjointEigenSolver<detail::Mat4c> es(rhop);
  const Eigen::Vector4d p = es.eigenvalues().cwiseMax(0.0);
  const detail::Mat4c t =
      es.eigenvectors().adjoint() * rho * es.eigenvectors();
  double acc = 0.0;
  for (int m = 0; m < 4; ++m)
    for (int n = m + 1; n < 4; ++n) {
      const double w = detail::fprime_divided_diff(f, p(m), p(n));
      acc += w * std::norm(t(m, n));
    }
  return acc;
}

}  // namespace qcorr
