#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpc {

// Maximal family of d+1 mutually unbiased bases of C^d (prime d) together
// with the d^2-1 derived eigenoperators
//
//   U_alpha^k = sum_l omega^{kl} |psi_l^(alpha)><psi_l^(alpha)|,
//   omega = exp(2 pi i / d),
//
// which diagonalize every generalized Pauli channel. Bases are stored as
// d x d matrices whose columns are the basis vectors; `unitaries[alpha][k]`
// covers k = 0..d-1, with k = 0 the identity. alpha = 0 is the computational
// basis; the remaining bases follow in construction order. Global phases of
// the basis vectors are a free convention: compare projectors or overlap
// magnitudes, never raw column entries.
struct MubFamily {
  int d = 0;
  std::vector<Eigen::MatrixXcd> bases;                    // d+1 entries
  std::vector<std::vector<Eigen::MatrixXcd>> unitaries;   // [alpha][k]
};

inline bool is_prime(int n) {
  if (n < 2) return false;
  for (int q = 2; q * q <= n; ++q)
    if (n % q == 0) return false;
  return true;
}

namespace detail {

inline std::complex<double> root_of_unity(int d, long long exponent) {
  // Reduce mod d first so the angle stays small.
  long long e = exponent % d;
  if (e < 0) e += d;
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(e) /
                             static_cast<double>(d));
}

inline void require_mub_inputs(const std::vector<Eigen::MatrixXcd>& bases) {
  if (bases.empty()) throw std::invalid_argument("build_unitaries: no bases given");
  const int d = static_cast<int>(bases.front().rows());
  constexpr double tol = 1e-10;
  for (const auto& b : bases) {
    if (b.rows() != d || b.cols() != d)
      throw std::invalid_argument("build_unitaries: bases must be d x d");
    if (((b.adjoint() * b) - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() > tol)
      throw std::invalid_argument("build_unitaries: basis not orthonormal");
  }
  for (std::size_t a = 0; a < bases.size(); ++a)
    for (std::size_t b = a + 1; b < bases.size(); ++b) {
      const Eigen::MatrixXcd overlaps = bases[a].adjoint() * bases[b];
      if ((overlaps.cwiseAbs2().array() - 1.0 / d).abs().maxCoeff() > tol)
        throw std::invalid_argument("build_unitaries: bases not mutually unbiased");
    }
}

}  // namespace detail

// U_alpha^k = sum_l omega^{kl} P_l^(alpha) for every basis; k = 0 gives the
// identity and is included so that indexing matches k = 0..d-1.
inline std::vector<std::vector<Eigen::MatrixXcd>> build_unitaries(
    const std::vector<Eigen::MatrixXcd>& bases) {
  detail::require_mub_inputs(bases);
  const int d = static_cast<int>(bases.front().rows());
  std::vector<std::vector<Eigen::MatrixXcd>> out(bases.size());
  for (std::size_t a = 0; a < bases.size(); ++a) {
    out[a].reserve(d);
    for (int k = 0; k < d; ++k) {
      Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(d, d);
      for (int l = 0; l < d; ++l) {
        const Eigen::VectorXcd v = bases[a].col(l);
        u += detail::root_of_unity(d, static_cast<long long>(k) * l) * (v * v.adjoint());
      }
      out[a].push_back(std::move(u));
    }
  }
  return out;
}

// Builds the maximal MUB family for prime d. d = 2 uses the Pauli
// eigenbases; odd primes use the computational basis plus the d bases with
// components d^{-1/2} omega^{a l^2 + k l}, whose pairwise overlaps are
// quadratic Gauss sums of magnitude sqrt(d). Deterministic: the same d
// always produces bit-identical output.
inline MubFamily build_mub_family(int d) {
  if (d < 2 || !is_prime(d))
    throw std::invalid_argument(
        "build_mub_family: d=" + std::to_string(d) +
        " is unsupported; the maximal construction requires a prime dimension >= 2");

  MubFamily fam;
  fam.d = d;
  if (d == 2) {
    const std::complex<double> i(0.0, 1.0);
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXcd z = Eigen::MatrixXcd::Identity(2, 2);
    Eigen::MatrixXcd x(2, 2), y(2, 2);
    x << s, s, s, -s;
    y << s, s, i * s, -i * s;
    fam.bases = {z, x, y};
  } else {
    fam.bases.reserve(d + 1);
    fam.bases.push_back(Eigen::MatrixXcd::Identity(d, d));
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    for (int a = 0; a < d; ++a) {
      Eigen::MatrixXcd b(d, d);
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
          b(l, k) = norm * detail::root_of_unity(
                               d, static_cast<long long>(a) * l * l +
                                      static_cast<long long>(k) * l);
      fam.bases.push_back(std::move(b));
    }
  }
  fam.unitaries = build_unitaries(fam.bases);
  return fam;
}

}  // namespace gpc
