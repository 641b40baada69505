#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpc/mub.hpp"

namespace gpc {

// Spectrum of a generalized Pauli channel: the d+1 real eigenvalues
// lambda_1..lambda_{d+1} attached to the unitary eigenoperators. The trivial
// eigenvalue lambda_0 = 1 (trace preservation) is implicit and never stored.
struct ChannelSpectrum {
  int d = 0;
  std::vector<double> lambdas;  // size d+1
};

// Mixing probabilities p_0..p_{d+1} of the channel's mixed-unitary form.
struct ProbabilityVector {
  int d = 0;
  std::vector<double> probs;  // size d+2
};

// Fujiwara-Algoet complete-positivity test result. Both margins are >= 0
// exactly when the eigenvalues describe a completely positive map:
//   lower_margin = sum(lambda) + 1/(d-1)
//   upper_margin = 1 + d*min(lambda) - sum(lambda)
struct CpReport {
  bool holds = false;
  double lower_margin = 0.0;
  double upper_margin = 0.0;
};

inline constexpr double kDefaultCpTol = 1e-9;

inline void validate_probability_vector(const ProbabilityVector& p, double tol = 1e-12) {
  if (p.d < 2) throw std::invalid_argument("ProbabilityVector: d must be >= 2");
  if (p.probs.size() != static_cast<std::size_t>(p.d) + 2)
    throw std::invalid_argument("ProbabilityVector: expected d+2 entries");
  double sum = 0.0;
  for (double v : p.probs) {
    if (!std::isfinite(v)) throw std::invalid_argument("ProbabilityVector: non-finite entry");
    if (v < -tol) throw std::invalid_argument("ProbabilityVector: negative probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("ProbabilityVector: entries must sum to 1");
}

inline void validate_spectrum_shape(const ChannelSpectrum& s) {
  if (s.d < 2) throw std::invalid_argument("ChannelSpectrum: d must be >= 2");
  if (s.lambdas.size() != static_cast<std::size_t>(s.d) + 1)
    throw std::invalid_argument("ChannelSpectrum: expected d+1 eigenvalues");
  for (double v : s.lambdas)
    if (!std::isfinite(v)) throw std::invalid_argument("ChannelSpectrum: non-finite eigenvalue");
}

// lambda_alpha = [d (p_0 + p_alpha) - 1] / (d - 1)
inline ChannelSpectrum spectrum_from_probs(const ProbabilityVector& p) {
  validate_probability_vector(p);
  ChannelSpectrum s;
  s.d = p.d;
  s.lambdas.resize(p.d + 1);
  for (int a = 1; a <= p.d + 1; ++a)
    s.lambdas[a - 1] = (p.d * (p.probs[0] + p.probs[a]) - 1.0) / (p.d - 1.0);
  return s;
}

struct SpectrumInversion {
  ProbabilityVector probs;
  bool cp_valid = false;  // all probabilities >= -tol
};

// Inverse of spectrum_from_probs:
//   p_0     = [1 + (d-1) sum(lambda)] / d^2
//   p_alpha = (d-1) [1 + d lambda_alpha - sum(lambda)] / d^2
// Entries may come out negative exactly when the spectrum is not completely
// positive; they are returned unclamped with cp_valid flagging the result,
// so callers can probe non-CP regions.
inline SpectrumInversion probs_from_spectrum(const ChannelSpectrum& s,
                                             double tol = kDefaultCpTol) {
  validate_spectrum_shape(s);
  const double d = s.d;
  const double sum = std::accumulate(s.lambdas.begin(), s.lambdas.end(), 0.0);
  SpectrumInversion out;
  out.probs.d = s.d;
  out.probs.probs.resize(s.d + 2);
  out.probs.probs[0] = (1.0 + (d - 1.0) * sum) / (d * d);
  for (int a = 1; a <= s.d + 1; ++a)
    out.probs.probs[a] = (d - 1.0) * (1.0 + d * s.lambdas[a - 1] - sum) / (d * d);
  out.cp_valid = std::all_of(out.probs.probs.begin(), out.probs.probs.end(),
                             [tol](double v) { return v >= -tol; });
  return out;
}

inline CpReport check_cp(const ChannelSpectrum& s, double tol = kDefaultCpTol) {
  validate_spectrum_shape(s);
  const double sum = std::accumulate(s.lambdas.begin(), s.lambdas.end(), 0.0);
  const double min = *std::min_element(s.lambdas.begin(), s.lambdas.end());
  CpReport rep;
  rep.lower_margin = sum + 1.0 / (s.d - 1.0);
  rep.upper_margin = 1.0 + s.d * min - sum;
  rep.holds = rep.lower_margin >= -tol && rep.upper_margin >= -tol;
  return rep;
}

// Applies the mixed-unitary channel
//   X -> p_0 X + (d-1)^{-1} sum_alpha p_alpha sum_{k>=1} U_alpha^k X U_alpha^k+
// to an arbitrary operator X.
inline Eigen::MatrixXcd apply_channel(const ProbabilityVector& p, const MubFamily& mubs,
                                      const Eigen::MatrixXcd& x) {
  validate_probability_vector(p);
  if (mubs.d != p.d) throw std::invalid_argument("apply_channel: dimension mismatch");
  if (x.rows() != p.d || x.cols() != p.d)
    throw std::invalid_argument("apply_channel: operator must be d x d");
  Eigen::MatrixXcd out = p.probs[0] * x;
  for (int a = 1; a <= p.d + 1; ++a) {
    if (p.probs[a] == 0.0) continue;
    Eigen::MatrixXcd conj = Eigen::MatrixXcd::Zero(p.d, p.d);
    for (int k = 1; k < p.d; ++k) {
      const Eigen::MatrixXcd& u = mubs.unitaries[a - 1][k];
      conj += u * x * u.adjoint();
    }
    out += (p.probs[a] / (p.d - 1.0)) * conj;
  }
  return out;
}

// Max-entry residual of the eigenvalue equations Lambda[U_alpha^k] =
// lambda_alpha U_alpha^k (k >= 1) and Lambda[I] = I, with lambda derived
// from the probabilities. A brute-force consistency check of the whole
// channel construction.
inline double verify_eigenaction(const ProbabilityVector& p, const MubFamily& mubs) {
  const ChannelSpectrum s = spectrum_from_probs(p);
  if (mubs.d != p.d) throw std::invalid_argument("verify_eigenaction: dimension mismatch");
  double residual =
      (apply_channel(p, mubs, Eigen::MatrixXcd::Identity(p.d, p.d)) -
       Eigen::MatrixXcd::Identity(p.d, p.d))
          .cwiseAbs()
          .maxCoeff();
  for (int a = 1; a <= p.d + 1; ++a)
    for (int k = 1; k < p.d; ++k) {
      const Eigen::MatrixXcd& u = mubs.unitaries[a - 1][k];
      const double r = (apply_channel(p, mubs, u) - s.lambdas[a - 1] * u).cwiseAbs().maxCoeff();
      residual = std::max(residual, r);
    }
  return residual;
}

}  // namespace gpc
