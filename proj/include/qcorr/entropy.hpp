#pragma once

// Generalized trace-form entropies S_f(rho) = sum_i f(p_i) on probability
// spectra, majorization queries and the Tsallis <-> Renyi conversion.
// All logarithms are base 2 (LOG2E below is the single switch).

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcorr {

inline constexpr double LOG2E = 1.4426950408889634074;  // 1/ln(2)

inline double log2_safe(double x) { return std::log(x) * LOG2E; }

// 0*log(0) := 0
inline double plog2p(double p) { return p > 0.0 ? p * log2_safe(p) : 0.0; }

// Binary entropy h(p) = -p log2 p - (1-p) log2(1-p), clamped domain.
inline double binary_entropy(double p) {
  p = std::clamp(p, 0.0, 1.0);
  return -plog2p(p) - plog2p(1.0 - p);
}

// Probability spectrum (eigenvalues of a density operator).
// Entries >= -1e-12 are clamped to zero on validation; the sum must be 1
// within 1e-10. Not auto-sorted: callers keep their basis bookkeeping,
// majorizes() sorts internally.
struct Spectrum {
  std::vector<double> probs;

  Spectrum() = default;
  explicit Spectrum(std::vector<double> p) : probs(std::move(p)) {}
  Spectrum(std::initializer_list<double> p) : probs(p) {}

  void validate() {
    double sum = 0.0;
    for (double& p : probs) {
      if (p < 0.0) {
        if (p < -1e-12)
          throw std::domain_error("Spectrum: negative eigenvalue " +
                                  std::to_string(p));
        p = 0.0;
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-10)
      throw std::invalid_argument("Spectrum: not normalized, sum = " +
                                  std::to_string(sum));
  }

  bool is_pure(double tol = 1e-12) const {
    for (double p : probs)
      if (p > tol && p < 1.0 - tol) return false;
    return true;
  }
};

enum class EntropyKind { VonNeumann, Tsallis, Renyi };

// Entropic functional: von Neumann, Tsallis(q) or Renyi(q), q > 0.
// q = 1 (within 1e-6) is evaluated on the von Neumann branch. Tsallis(2)
// is the linear entropy S_2 = 2(1 - sum p^2).
class EntropyFunctional {
 public:
  static EntropyFunctional von_neumann() {
    return EntropyFunctional(EntropyKind::VonNeumann, 1.0);
  }
  static EntropyFunctional tsallis(double q) {
    return EntropyFunctional(EntropyKind::Tsallis, q);
  }
  static EntropyFunctional renyi(double q) {
    return EntropyFunctional(EntropyKind::Renyi, q);
  }
  static EntropyFunctional linear() { return tsallis(2.0); }

  EntropyKind kind() const { return kind_; }
  double q() const { return q_; }

  // Prefactor c_q = 1 - 2^(1-q) in the Tsallis normalization.
  double cq() const { return 1.0 - std::exp2(1.0 - q_); }

  bool von_neumann_branch() const {
    return kind_ == EntropyKind::VonNeumann || std::abs(q_ - 1.0) < 1e-6;
  }
  // Trace-form functionals admit pointwise f, f', f''. Renyi does not.
  bool trace_form() const { return kind_ != EntropyKind::Renyi; }

  // f(p) with f(0) = f(1) = 0, strictly concave on [0,1].
  double f(double p) const {
    if (von_neumann_branch()) return -plog2p(p);
    return (p - pow_q(p)) / cq();
  }
  // f'(p), p in (0,1].
  double fprime(double p) const {
    if (von_neumann_branch()) return -(log2_safe(p) + LOG2E);
    return (1.0 - q_ * std::pow(p, q_ - 1.0)) / cq();
  }
  // f''(p) < 0, p in (0,1].
  double fsecond(double p) const {
    if (von_neumann_branch()) return -LOG2E / p;
    return -q_ * (q_ - 1.0) * std::pow(p, q_ - 2.0) / cq();
  }

  std::string name() const {
    switch (kind_) {
      case EntropyKind::VonNeumann: return "von-neumann";
      case EntropyKind::Tsallis: return "tsallis(" + std::to_string(q_) + ")";
      case EntropyKind::Renyi: return "renyi(" + std::to_string(q_) + ")";
    }
    return "?";
  }

 private:
  EntropyFunctional(EntropyKind k, double q) : kind_(k), q_(q) {
    if (k != EntropyKind::VonNeumann && !(q > 0.0))
      throw std::domain_error("EntropyFunctional: q must be positive");
  }

  double pow_q(double p) const { return p > 0.0 ? std::pow(p, q_) : 0.0; }

  EntropyKind kind_;
  double q_;
};

// S_f of a spectrum. Von Neumann: -sum p log2 p. Tsallis:
// (1 - sum p^q)/(1 - 2^(1-q)). Renyi: log2(sum p^q)/(1-q).
inline double eval_entropy(Spectrum s, const EntropyFunctional& f) {
  s.validate();
  if (f.von_neumann_branch()) {
    double acc = 0.0;
    for (double p : s.probs) acc -= plog2p(p);
    return std::max(acc, 0.0);
  }
  double trq = 0.0;
  for (double p : s.probs)
    if (p > 0.0) trq += std::pow(p, f.q());
  if (f.kind() == EntropyKind::Renyi)
    return std::max(log2_safe(trq) / (1.0 - f.q()), 0.0);
  return std::max((1.0 - trq) / f.cq(), 0.0);
}

// True iff a majorizes b: all partial sums of a (decreasing order) are >=
// those of b. Spectra are padded with zeros to equal length.
inline bool majorizes(Spectrum a, Spectrum b) {
  a.validate();
  b.validate();
  std::size_t d = std::max(a.probs.size(), b.probs.size());
  a.probs.resize(d, 0.0);
  b.probs.resize(d, 0.0);
  std::sort(a.probs.begin(), a.probs.end(), std::greater<>());
  std::sort(b.probs.begin(), b.probs.end(), std::greater<>());
  double sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i + 1 < d; ++i) {
    sa += a.probs[i];
    sb += b.probs[i];
    if (sa + 1e-12 < sb) return false;
  }
  return true;
}

// Renyi value from the Tsallis value at the same q:
// S_q^R = log2(1 - c_q S_q)/(1 - q).
inline double tsallis_to_renyi(double sq, double q) {
  if (!(q > 0.0) || std::abs(q - 1.0) < 1e-6)
    throw std::domain_error("tsallis_to_renyi: need q > 0, q != 1");
  const double arg = 1.0 - (1.0 - std::exp2(1.0 - q)) * sq;
  if (arg <= 0.0)
    throw std::domain_error("tsallis_to_renyi: invalid S_q for this q");
  return log2_safe(arg) / (1.0 - q);
}

}  // namespace qcorr
