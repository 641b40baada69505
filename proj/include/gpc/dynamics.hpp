#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpc/channel.hpp"
#include "gpc/grid.hpp"

namespace gpc {

// One scalar kernel eigenvalue split into its local and non-local parts:
//   kappa(t) = delta_weight * delta(t) + smooth(t).
struct KernelFunction {
  double delta_weight = 0.0;
  std::function<double(double)> smooth;  // may be empty (== 0)
};

// Scalar eigenvalue trajectory lambda(t_i) on a uniform grid, lambda(0) = 1.
struct EigenTrajectory {
  UniformGrid grid;
  std::vector<double> values;
};

// Integrates the scalar memory-kernel equation
//
//   lambda'(t) = delta_weight * lambda(t) + int_0^t smooth(t-tau) lambda(tau) dtau,
//   lambda(0) = 1,
//
// with product-trapezoid convolution quadrature and one Heun
// predictor-corrector pass per step. Global error O(h^2). The local (delta)
// part enters the time stepping directly, never the convolution sum.
inline EigenTrajectory solve_nakajima_zwanzig(const KernelFunction& kernel,
                                              const UniformGrid& grid) {
  const double h = grid.dt();
  const double w = kernel.delta_weight;
  const std::size_t n = grid.size();

  std::vector<double> smooth(n, 0.0);
  if (kernel.smooth) {
    for (std::size_t i = 0; i < n; ++i) {
      smooth[i] = kernel.smooth(grid.time(i));
      if (!std::isfinite(smooth[i]))
        throw std::runtime_error("solve_nakajima_zwanzig: non-finite kernel value at t=" +
                                 std::to_string(grid.time(i)));
    }
  }

  EigenTrajectory traj;
  traj.grid = grid;
  traj.values.assign(n, 0.0);
  std::vector<double>& lam = traj.values;
  lam[0] = 1.0;
  double conv = 0.0;              // trapezoid convolution at the current node
  double f = w * lam[0] + conv;   // right-hand side at the current node

  for (std::size_t i = 0; i + 1 < n; ++i) {
    // History part of the convolution at t_{i+1}: endpoint j=i+1 excluded.
    double s = 0.5 * smooth[i + 1] * lam[0];
    for (std::size_t j = 1; j <= i; ++j) s += smooth[i + 1 - j] * lam[j];
    s *= h;

    const double predicted = lam[i] + h * f;
    const double f_pred = w * predicted + s + 0.5 * h * smooth[0] * predicted;
    lam[i + 1] = lam[i] + 0.5 * h * (f + f_pred);
    conv = s + 0.5 * h * smooth[0] * lam[i + 1];
    f = w * lam[i + 1] + conv;
  }
  return traj;
}

// Trapezoid-cumulative integrals Gamma_alpha(t_i) of tabulated rates.
inline std::vector<std::vector<double>> cumulative_rate_integrals(
    const std::vector<std::vector<double>>& rates, const UniformGrid& grid) {
  const std::size_t n = grid.size();
  if (rates.size() < 3)
    throw std::invalid_argument("cumulative_rate_integrals: need d+1 >= 3 rate rows");
  for (const auto& row : rates) {
    if (row.size() != n)
      throw std::invalid_argument("cumulative_rate_integrals: rate table does not match grid");
    for (double v : row)
      if (!std::isfinite(v))
        throw std::invalid_argument("cumulative_rate_integrals: non-finite rate");
  }
  const double h = grid.dt();
  std::vector<std::vector<double>> big(rates.size(), std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < rates.size(); ++a)
    for (std::size_t i = 1; i < n; ++i)
      big[a][i] = big[a][i - 1] + 0.5 * h * (rates[a][i - 1] + rates[a][i]);
  return big;
}

// Solves the time-local master equation for tabulated decoherence rates
// gamma_alpha(t_i), alpha = 1..d+1: lambda_alpha = exp(Gamma_alpha - Gamma_0)
// with Gamma_alpha the trapezoid-cumulative rate integrals and
// Gamma_0 = sum_alpha Gamma_alpha.
inline std::vector<EigenTrajectory> timelocal_solve(
    const std::vector<std::vector<double>>& rates, const UniformGrid& grid) {
  const auto big = cumulative_rate_integrals(rates, grid);
  const std::size_t n = grid.size();
  const std::size_t m = rates.size();
  std::vector<EigenTrajectory> out(m);
  for (std::size_t a = 0; a < m; ++a) {
    out[a].grid = grid;
    out[a].values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double gamma0 = 0.0;
      for (std::size_t b = 0; b < m; ++b) gamma0 += big[b][i];
      out[a].values[i] = std::exp(big[a][i] - gamma0);
    }
  }
  return out;
}

// Complete positivity of a time-local solution, stated on the integrated
// rates at one instant: sum_alpha e^{Gamma_alpha} <= e^{Gamma_0} + d min_beta
// e^{Gamma_beta}, where Gamma_0 = sum_alpha Gamma_alpha.
inline bool timelocal_cp_check(const std::vector<double>& big_gammas, int d,
                               double tol = kDefaultCpTol) {
  if (big_gammas.size() != static_cast<std::size_t>(d) + 1)
    throw std::invalid_argument("timelocal_cp_check: need d+1 Gamma values");
  double sum_exp = 0.0, sum = 0.0, min_exp = std::exp(big_gammas[0]);
  for (double g : big_gammas) {
    if (!std::isfinite(g)) throw std::invalid_argument("timelocal_cp_check: non-finite Gamma");
    const double e = std::exp(g);
    sum_exp += e;
    min_exp = std::min(min_exp, e);
    sum += g;
  }
  return sum_exp <= std::exp(sum) + d * min_exp + tol;
}

// Composition of commuting generalized Pauli maps: eigenvalues multiply.
inline ChannelSpectrum product_spectrum(const ChannelSpectrum& a, const ChannelSpectrum& b) {
  validate_spectrum_shape(a);
  validate_spectrum_shape(b);
  if (a.d != b.d) throw std::invalid_argument("product_spectrum: dimension mismatch");
  ChannelSpectrum out;
  out.d = a.d;
  out.lambdas.resize(a.lambdas.size());
  for (std::size_t i = 0; i < a.lambdas.size(); ++i)
    out.lambdas[i] = a.lambdas[i] * b.lambdas[i];
  return out;
}

struct LaplaceValue {
  double value = 0.0;
  bool tail_ok = true;  // truncated tail estimated below 1e-8
};

// Truncated Laplace transform int_0^T lambda(t) e^{-st} dt by trapezoid
// quadrature. Diagnostic instrument only; tail_ok warns when the discarded
// tail could exceed 1e-8.
inline LaplaceValue numeric_laplace(const EigenTrajectory& traj, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("numeric_laplace: s must be > 0");
  if (traj.values.size() != traj.grid.size())
    throw std::invalid_argument("numeric_laplace: trajectory does not match its grid");
  const double h = traj.grid.dt();
  double sum = 0.0;
  double max_abs = 0.0;
  const std::size_t n = traj.grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double f = traj.values[i] * std::exp(-s * traj.grid.time(i));
    sum += (i == 0 || i + 1 == n) ? 0.5 * f : f;
    max_abs = std::max(max_abs, std::abs(traj.values[i]));
  }
  LaplaceValue out;
  out.value = h * sum;
  out.tail_ok = max_abs * std::exp(-s * traj.grid.t_max) / s < 1e-8;
  return out;
}

struct CompositionCheck {
  double max_residual = 0.0;
  bool tail_ok = true;
};

// Checks the Laplace-domain composition law relating a map to its Markov and
// noise factors,
//   L = LM * LN / (LM + LN - s LM LN),
// on the given s samples; all three trajectories must share one grid.
inline CompositionCheck composition_law_check(const EigenTrajectory& markov,
                                              const EigenTrajectory& noise,
                                              const EigenTrajectory& combined,
                                              const std::vector<double>& s_samples) {
  if (markov.grid.size() != noise.grid.size() ||
      markov.grid.size() != combined.grid.size() ||
      std::abs(markov.grid.t_max - combined.grid.t_max) > 1e-12)
    throw std::invalid_argument("composition_law_check: trajectories must share a grid");
  CompositionCheck out;
  for (double s : s_samples) {
    const LaplaceValue lm = numeric_laplace(markov, s);
    const LaplaceValue ln = numeric_laplace(noise, s);
    const LaplaceValue lc = numeric_laplace(combined, s);
    out.tail_ok = out.tail_ok && lm.tail_ok && ln.tail_ok && lc.tail_ok;
    const double rhs = lm.value * ln.value / (lm.value + ln.value - s * lm.value * ln.value);
    out.max_residual = std::max(out.max_residual, std::abs(lc.value - rhs));
  }
  return out;
}

}  // namespace gpc
