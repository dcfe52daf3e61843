#pragma once

// Parity-symmetric two-qubit states (X states), their Bloch-vector /
// correlation-matrix form, and the closed-form spectrum after a local
// projective spin measurement on side B.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "qcorr/entropy.hpp"

namespace qcorr {

// X state in the standard basis {|00>,|01>,|10>,|11>}: diagonal
// (a+, c+, c-, a-), anti-diagonal (beta, alpha, alpha, beta), all real.
struct XState {
  double a_plus = 0, a_minus = 0, c_plus = 0, c_minus = 0;
  double alpha = 0, beta = 0;

  void validate() const {
    const double tr = a_plus + a_minus + c_plus + c_minus;
    if (std::abs(tr - 1.0) > 1e-10)
      throw std::invalid_argument("XState: trace " + std::to_string(tr));
    for (double d : {a_plus, a_minus, c_plus, c_minus})
      if (d < -1e-12)
        throw std::domain_error("XState: negative diagonal entry");
    if (std::abs(alpha) > std::sqrt(std::max(c_plus * c_minus, 0.0)) + 1e-12)
      throw std::domain_error("XState: |alpha| violates positivity");
    if (std::abs(beta) > std::sqrt(std::max(a_plus * a_minus, 0.0)) + 1e-12)
      throw std::domain_error("XState: |beta| violates positivity");
  }

  Eigen::Matrix4d dense() const {
    Eigen::Matrix4d r = Eigen::Matrix4d::Zero();
    r(0, 0) = a_plus;
    r(1, 1) = c_plus;
    r(2, 2) = c_minus;
    r(3, 3) = a_minus;
    r(0, 3) = r(3, 0) = beta;
    r(1, 2) = r(2, 1) = alpha;
    return r;
  }

  static XState bell_phi_plus() { return {0.5, 0.5, 0, 0, 0, 0.5}; }
  static XState maximally_mixed() { return {0.25, 0.25, 0.25, 0.25, 0, 0}; }
};

// Bloch form: local vectors r_A, r_B and correlation matrix J. For a
// qudit-qubit system J is m x 3 in an orthogonal operator basis normalized
// to Tr sigma_mu sigma_nu = d delta_mu_nu; d_a is the left dimension.
struct BlochForm {
  Eigen::Vector3d r_a = Eigen::Vector3d::Zero();
  Eigen::Vector3d r_b = Eigen::Vector3d::Zero();
  Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
  int d_a = 2;
};

// Measurement direction on the B qubit: unit vector
// k = (sin g cos f, sin g sin f, cos g), g in [0,pi], f in [0,2pi).
struct MeasurementDir {
  double gamma = 0.0;
  double phi = 0.0;

  Eigen::Vector3d unit() const {
    return {std::sin(gamma) * std::cos(phi), std::sin(gamma) * std::sin(phi),
            std::cos(gamma)};
  }
  static MeasurementDir along_z() { return {0.0, 0.0}; }
  static MeasurementDir along_x() { return {M_PI_2, 0.0}; }
  static MeasurementDir from_unit(const Eigen::Vector3d& k) {
    Eigen::Vector3d u = k.normalized();
    // k and -k define the same measurement; canonicalize to z >= 0 and,
    // on the equator, to x >= 0.
    if (u.z() < 0.0 || (u.z() == 0.0 && (u.x() < 0.0 || (u.x() == 0.0 && u.y() < 0.0))))
      u = -u;
    MeasurementDir d;
    d.gamma = std::acos(std::clamp(u.z(), -1.0, 1.0));
    d.phi = std::atan2(u.y(), u.x());
    if (d.phi < 0.0) d.phi += 2.0 * M_PI;
    if (u.x() == 0.0 && u.y() == 0.0) d.phi = 0.0;
    return d;
  }
};

// Eigenvalues of an X state: each 2x2 block (outer a+/a-/beta, inner
// c+/c-/alpha) contributes mean +- sqrt(half-gap^2 + offdiag^2).
inline Spectrum x_state_spectrum(const XState& x) {
  x.validate();
  const double ha = 0.5 * (x.a_plus + x.a_minus);
  const double da = 0.5 * (x.a_plus - x.a_minus);
  const double ra = std::sqrt(da * da + x.beta * x.beta);
  const double hc = 0.5 * (x.c_plus + x.c_minus);
  const double dc = 0.5 * (x.c_plus - x.c_minus);
  const double rc = std::sqrt(dc * dc + x.alpha * x.alpha);
  Spectrum s({ha + ra, ha - ra, hc + rc, hc - rc});
  s.validate();
  return s;
}

// r_A, r_B along z; J = diag(2(alpha+beta), 2(alpha-beta), a+ + a- - c+ - c-).
inline BlochForm to_bloch(const XState& x) {
  x.validate();
  BlochForm b;
  b.r_a.z() = x.a_plus + x.c_plus - x.c_minus - x.a_minus;
  b.r_b.z() = x.a_plus + x.c_minus - x.c_plus - x.a_minus;
  b.j(0, 0) = 2.0 * (x.alpha + x.beta);
  b.j(1, 1) = 2.0 * (x.alpha - x.beta);
  b.j(2, 2) = x.a_plus + x.a_minus - x.c_plus - x.c_minus;
  b.d_a = 2;
  return b;
}

// Inverse of to_bloch for diagonal-J forms with r vectors along z.
inline XState from_bloch(const BlochForm& b) {
  XState x;
  const double jz = b.j(2, 2);
  x.a_plus = 0.25 * (1.0 + jz + b.r_a.z() + b.r_b.z());
  x.a_minus = 0.25 * (1.0 + jz - b.r_a.z() - b.r_b.z());
  x.c_plus = 0.25 * (1.0 - jz + b.r_a.z() - b.r_b.z());
  x.c_minus = 0.25 * (1.0 - jz - b.r_a.z() + b.r_b.z());
  x.alpha = 0.25 * (b.j(0, 0) + b.j(1, 1));
  x.beta = 0.25 * (b.j(0, 0) - b.j(1, 1));
  return x;
}

// Spectrum of the post-measurement state after measuring spin-B along k:
// p_{mu,nu} = (1 + nu r_B.k + mu |r_A + nu J k|)/4, mu,nu = +-1.
inline Spectrum post_measurement_spectrum(const BlochForm& b,
                                          const MeasurementDir& dir) {
  if (b.d_a != 2)
    throw std::invalid_argument("post_measurement_spectrum: needs d_a = 2");
  const Eigen::Vector3d k = dir.unit();
  const double rbk = b.r_b.dot(k);
  const Eigen::Vector3d jk = b.j * k;
  Spectrum s;
  s.probs.reserve(4);
  for (int nu : {+1, -1}) {
    const double d = (b.r_a + nu * jk).norm();
    for (int mu : {+1, -1})
      s.probs.push_back(0.25 * (1.0 + nu * rbk + mu * d));
  }
  s.validate();
  return s;
}

// Marginal qubit spectra of an X state.
inline Spectrum marginal_a_spectrum(const XState& x) {
  return Spectrum({x.a_plus + x.c_plus, x.a_minus + x.c_minus});
}
inline Spectrum marginal_b_spectrum(const XState& x) {
  return Spectrum({x.a_plus + x.c_minus, x.a_minus + x.c_plus});
}

}  // namespace qcorr
