#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpc/channel.hpp"

namespace gpc {

// How a classical-capacity value was obtained. The two exact families and
// the depolarizing case have closed forms; everything else only yields the
// single-letter lower bound, which is nevertheless exact for d = 2.
enum class CapacityKind { kExactNegative, kExactPositive, kDepolarizing, kLowerBound };

struct CapacityResult {
  double value = 0.0;  // nats
  CapacityKind kind = CapacityKind::kLowerBound;
  int argmax_alpha = 0;  // 1-based eigenvalue index attaining the value
};

inline constexpr double kPatternRelTol = 1e-9;

namespace detail {
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }
}  // namespace detail

// Single-eigenvalue capacity contribution, in nats:
//   c(lambda) = [1+(d-1)lambda]/d ln[1+(d-1)lambda] + (d-1)/d (1-lambda) ln(1-lambda)
// defined on lambda in [-1/(d-1), 1] with the convention 0 ln 0 = 0 at both
// endpoints. Equals ln d minus the entropy of the distribution
// {[1+(d-1)lambda]/d, (1-lambda)/d x(d-1)}, hence lies in [0, ln d].
inline double c_alpha(double lambda, int d) {
  if (d < 2) throw std::invalid_argument("c_alpha: d must be >= 2");
  const double lo = -1.0 / (d - 1.0);
  if (!(lambda >= lo - 1e-9 && lambda <= 1.0 + 1e-9))
    throw std::domain_error("c_alpha: lambda=" + std::to_string(lambda) +
                            " outside [" + std::to_string(lo) + ", 1]");
  lambda = std::clamp(lambda, lo, 1.0);
  const double a = 1.0 + (d - 1.0) * lambda;
  const double b = 1.0 - lambda;
  const double v = (detail::xlogx(a) + (d - 1.0) * detail::xlogx(b)) / d;
  return std::max(v, 0.0);
}

// Detects the eigenvalue degeneracy patterns with exactly known capacity:
//   all equal                                      -> kDepolarizing
//   all <= 0, d equal maxima and one minimum       -> kExactNegative
//   all >= 0, one maximum and d equal minima       -> kExactPositive
//   anything else                                  -> kLowerBound
inline CapacityKind pattern_match_exact(const ChannelSpectrum& s,
                                        double rel_tol = kPatternRelTol) {
  validate_spectrum_shape(s);
  std::vector<double> sorted = s.lambdas;
  std::sort(sorted.begin(), sorted.end());
  double scale = 1.0;
  for (double v : sorted) scale = std::max(scale, std::abs(v));
  const double tol = rel_tol * scale;

  const double min = sorted.front(), max = sorted.back();
  if (max - min <= tol) return CapacityKind::kDepolarizing;
  // Closed-form scenario spectra are exactly degenerate; the tolerance only
  // absorbs float noise.
  if (max <= tol && sorted[1] - min > tol && max - sorted[1] <= tol)
    return CapacityKind::kExactNegative;
  if (min >= -tol && max - sorted[s.d - 1] > tol && sorted[s.d - 1] - min <= tol)
    return CapacityKind::kExactPositive;
  return CapacityKind::kLowerBound;
}

// Classical capacity of the channel with the given spectrum. Exact for the
// recognized patterns and for every d = 2 channel; otherwise the value is
// the max_alpha c(lambda_alpha) lower bound and kind reports that honestly.
inline CapacityResult classify_and_compute(const ChannelSpectrum& s) {
  const CapacityKind kind = pattern_match_exact(s);
  CapacityResult res;
  res.kind = kind;
  auto index_of = [&s](bool want_min) {
    const auto it = want_min ? std::min_element(s.lambdas.begin(), s.lambdas.end())
                             : std::max_element(s.lambdas.begin(), s.lambdas.end());
    return static_cast<int>(it - s.lambdas.begin()) + 1;
  };
  switch (kind) {
    case CapacityKind::kDepolarizing:
      res.argmax_alpha = 1;
      res.value = c_alpha(s.lambdas[0], s.d);
      break;
    case CapacityKind::kExactNegative:
      res.argmax_alpha = index_of(true);
      res.value = c_alpha(s.lambdas[res.argmax_alpha - 1], s.d);
      break;
    case CapacityKind::kExactPositive:
      res.argmax_alpha = index_of(false);
      res.value = c_alpha(s.lambdas[res.argmax_alpha - 1], s.d);
      break;
    case CapacityKind::kLowerBound: {
      res.argmax_alpha = 1;
      res.value = c_alpha(s.lambdas[0], s.d);
      for (int a = 2; a <= s.d + 1; ++a) {
        const double c = c_alpha(s.lambdas[a - 1], s.d);
        if (c > res.value) {
          res.value = c;
          res.argmax_alpha = a;
        }
      }
      break;
    }
  }
  return res;
}

}  // namespace gpc
