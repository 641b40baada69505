#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gpc/channel.hpp"
#include "gpc/dynamics.hpp"
#include "gpc/grid.hpp"

namespace gpc {

// ---------------------------------------------------------------------------
// Scenario parameter sets
// ---------------------------------------------------------------------------
//
// Three engineered kernel families, each splitting the full kernel into a
// local Markovian part and a purely non-local noise part, plus a custom
// variant for user-supplied kernel eigenvalues. Rates are in 1/s. In the
// families with a noise-free eigenvalue, alpha_star (1-based) selects it;
// the capacity depends only on the eigenvalue multiset, so the default
// alpha_star = d+1 is pure convention.

struct ConstantIsotropicParams {
  double gamma = 0.0;
  double omega = 0.0;
};

struct ExpDecayParams {
  double gamma = 0.0;
  double z = 0.0;
  double omega = 0.0;
  int d = 2;
  int alpha_star = 0;  // 0 -> d+1
};

struct BeyondSemigroupParams {
  double r = 0.0;
  double omega = 0.0;
  int d = 2;
  int alpha_star = 0;  // 0 -> d+1
};

struct CustomKernelParams {
  int d = 2;
  std::vector<double> delta_weights;                  // per alpha, size d+1
  std::vector<std::function<double(double)>> smooth;  // per alpha, size d+1
};

using ScenarioSpec = std::variant<ConstantIsotropicParams, ExpDecayParams,
                                  BeyondSemigroupParams, CustomKernelParams>;

enum class ScenarioFamily { kConstantIsotropic, kExpDecay, kBeyondSemigroup, kCustom };

inline ScenarioFamily family_of(const ScenarioSpec& spec) {
  switch (spec.index()) {
    case 0: return ScenarioFamily::kConstantIsotropic;
    case 1: return ScenarioFamily::kExpDecay;
    case 2: return ScenarioFamily::kBeyondSemigroup;
    default: return ScenarioFamily::kCustom;
  }
}

inline const char* family_name(ScenarioFamily f) {
  switch (f) {
    case ScenarioFamily::kConstantIsotropic: return "constant-isotropic";
    case ScenarioFamily::kExpDecay: return "exp-decay";
    case ScenarioFamily::kBeyondSemigroup: return "beyond-semigroup";
    default: return "custom";
  }
}

inline std::optional<ScenarioFamily> parse_family(std::string_view name) {
  if (name == "constant-isotropic") return ScenarioFamily::kConstantIsotropic;
  if (name == "exp-decay") return ScenarioFamily::kExpDecay;
  if (name == "beyond-semigroup") return ScenarioFamily::kBeyondSemigroup;
  if (name == "custom") return ScenarioFamily::kCustom;
  return std::nullopt;
}

inline int scenario_dim(const ScenarioSpec& spec) {
  return std::visit(
      [](const auto& p) -> int {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ConstantIsotropicParams>)
          return 2;
        else
          return p.d;
      },
      spec);
}

inline int resolved_alpha_star(int alpha_star, int d) {
  return alpha_star == 0 ? d + 1 : alpha_star;
}

inline void validate_scenario(const ScenarioSpec& spec) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ConstantIsotropicParams>) {
          if (!(p.gamma > 0.0)) throw std::invalid_argument("constant-isotropic: gamma must be > 0");
          if (!(p.omega > 0.0)) throw std::invalid_argument("constant-isotropic: omega must be > 0");
          if (!(p.gamma < 2.0 * p.omega))
            throw std::invalid_argument(
                "constant-isotropic: gamma < 2*omega required (oscillation condition, "
                "necessary for complete positivity)");
        } else if constexpr (std::is_same_v<T, ExpDecayParams>) {
          if (!(p.gamma > 0.0)) throw std::invalid_argument("exp-decay: gamma must be > 0");
          if (!(p.z > 0.0)) throw std::invalid_argument("exp-decay: z must be > 0");
          if (!(p.omega > 0.0)) throw std::invalid_argument("exp-decay: omega must be > 0");
          if (p.d < 2) throw std::invalid_argument("exp-decay: d must be >= 2");
          const int as = resolved_alpha_star(p.alpha_star, p.d);
          if (as < 1 || as > p.d + 1)
            throw std::invalid_argument("exp-decay: alpha_star out of range 1..d+1");
          if (!(4.0 * p.omega * p.omega > (p.gamma - p.z) * (p.gamma - p.z)))
            throw std::invalid_argument("exp-decay: 4*omega^2 > (gamma-z)^2 required");
          if (!(4.0 * p.omega * p.omega > p.z * p.z))
            throw std::invalid_argument("exp-decay: 4*omega^2 > z^2 required");
        } else if constexpr (std::is_same_v<T, BeyondSemigroupParams>) {
          if (!(p.r > 0.0)) throw std::invalid_argument("beyond-semigroup: r must be > 0");
          if (!(p.omega > 0.0)) throw std::invalid_argument("beyond-semigroup: omega must be > 0");
          if (p.d < 2) throw std::invalid_argument("beyond-semigroup: d must be >= 2");
          const int as = resolved_alpha_star(p.alpha_star, p.d);
          if (as < 1 || as > p.d + 1)
            throw std::invalid_argument("beyond-semigroup: alpha_star out of range 1..d+1");
          if (!(4.0 * p.omega * p.omega > p.r * p.r))
            throw std::invalid_argument("beyond-semigroup: 4*omega^2 > r^2 required");
          const double dp1 = p.d + 1.0;
          if (!(dp1 * dp1 * p.omega * p.omega > p.d * p.r * p.r))
            throw std::invalid_argument("beyond-semigroup: (d+1)^2*omega^2 > d*r^2 required");
        } else {
          if (p.d < 2) throw std::invalid_argument("custom: d must be >= 2");
          if (p.delta_weights.size() != static_cast<std::size_t>(p.d) + 1 ||
              p.smooth.size() != static_cast<std::size_t>(p.d) + 1)
            throw std::invalid_argument("custom: need d+1 delta weights and smooth parts");
        }
      },
      spec);
}

// Per-time eigenvalues of the Markov, noise and combined maps.
struct ScenarioSpectra {
  double t = 0.0;
  ChannelSpectrum markov;
  ChannelSpectrum noise;
  ChannelSpectrum combined;
};

namespace detail {
inline ChannelSpectrum uniform_spectrum(int d, double v) {
  return ChannelSpectrum{d, std::vector<double>(static_cast<std::size_t>(d) + 1, v)};
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Closed-form evaluation
// ---------------------------------------------------------------------------

// Constant isotropic qubit scenario: semigroup rate gamma on all three
// eigenvalues, constant noise kernel -omega^2 on the first two.
//   markov   : e^{-gamma t} (x3)
//   noise    : (cos omega t, cos omega t, 1)
//   combined : (2w/P) e^{-gamma t/2} cos(Pt/2 + atan(gamma/P)) twice, then
//              e^{-gamma t};  P = sqrt(4 omega^2 - gamma^2)
inline ScenarioSpectra eval_constant_scenario(double gamma, double omega, double t) {
  validate_scenario(ConstantIsotropicParams{gamma, omega});
  if (!(t >= 0.0)) throw std::invalid_argument("eval_constant_scenario: t must be >= 0");
  if (t == 0.0)  // exact initial condition: all maps are the identity
    return {0.0, detail::uniform_spectrum(2, 1.0), detail::uniform_spectrum(2, 1.0),
            detail::uniform_spectrum(2, 1.0)};
  const double p = std::sqrt(4.0 * omega * omega - gamma * gamma);
  const double osc =
      (2.0 * omega / p) * std::exp(-gamma * t / 2.0) * std::cos(p * t / 2.0 + std::atan(gamma / p));
  ScenarioSpectra out;
  out.t = t;
  out.markov = detail::uniform_spectrum(2, std::exp(-gamma * t));
  out.noise = ChannelSpectrum{2, {std::cos(omega * t), std::cos(omega * t), 1.0}};
  out.combined = ChannelSpectrum{2, {osc, osc, std::exp(-gamma * t)}};
  return out;
}

// Exponentially decaying noise kernel -omega^2 e^{-zt} on every alpha except
// alpha_star, on top of the isotropic semigroup with rate gamma. The noise
// and combined oscillators differ by the sign in front of the arctangent as
// well as by z -> gamma - z.
inline ScenarioSpectra eval_expdecay_scenario(double gamma, double z, double omega, int d,
                                              int alpha_star, double t) {
  ExpDecayParams params{gamma, z, omega, d, alpha_star};
  validate_scenario(ScenarioSpec{params});
  if (!(t >= 0.0)) throw std::invalid_argument("eval_expdecay_scenario: t must be >= 0");
  if (t == 0.0)
    return {0.0, detail::uniform_spectrum(d, 1.0), detail::uniform_spectrum(d, 1.0),
            detail::uniform_spectrum(d, 1.0)};
  const int as = resolved_alpha_star(alpha_star, d);
  const double p = std::sqrt(4.0 * omega * omega - z * z);
  const double r = std::sqrt(4.0 * omega * omega - (gamma - z) * (gamma - z));
  const double noise_osc =
      (2.0 * omega / p) * std::exp(-z * t / 2.0) * std::cos(p * t / 2.0 - std::atan(z / p));
  const double comb_osc = (2.0 * omega / r) * std::exp(-(gamma + z) * t / 2.0) *
                          std::cos(r * t / 2.0 + std::atan((gamma - z) / r));
  ScenarioSpectra out;
  out.t = t;
  out.markov = detail::uniform_spectrum(d, std::exp(-gamma * t));
  out.noise = detail::uniform_spectrum(d, noise_osc);
  out.noise.lambdas[as - 1] = 1.0;
  out.combined = detail::uniform_spectrum(d, comb_osc);
  out.combined.lambdas[as - 1] = std::exp(-gamma * t);
  return out;
}

// Markovian part generated by the time-local rates r/(d+e^{rt}) (not a
// semigroup); noise kernel as in the exponential-decay family with the
// decay constant fixed to z = r/(d+1).
//   markov   : (1 + d e^{-rt})/(d+1) on every alpha
//   noise    : (2w/P) e^{-rt/(2(d+1))} cos(Pt/2 - atan(r/(P(d+1)))),
//              P = sqrt(4 omega^2 - r^2/(d+1)^2); 1 at alpha_star
//   combined : (2X/((d+1)Y)) e^{-rt/2} cos(Yt/2 + atan(r(d-1)/(Y(d+1)))),
//              Y = sqrt(4 omega^2 - r^2), X = sqrt((d+1)^2 omega^2 - d r^2);
//              the Markov value at alpha_star
inline ScenarioSpectra eval_beyond_scenario(double r, double omega, int d, int alpha_star,
                                            double t) {
  BeyondSemigroupParams params{r, omega, d, alpha_star};
  validate_scenario(ScenarioSpec{params});
  if (!(t >= 0.0)) throw std::invalid_argument("eval_beyond_scenario: t must be >= 0");
  if (t == 0.0)
    return {0.0, detail::uniform_spectrum(d, 1.0), detail::uniform_spectrum(d, 1.0),
            detail::uniform_spectrum(d, 1.0)};
  const int as = resolved_alpha_star(alpha_star, d);
  const double dp1 = d + 1.0;
  const double p = std::sqrt(4.0 * omega * omega - r * r / (dp1 * dp1));
  const double y = std::sqrt(4.0 * omega * omega - r * r);
  const double x = std::sqrt(dp1 * dp1 * omega * omega - d * r * r);
  const double markov = (1.0 + d * std::exp(-r * t)) / dp1;
  const double noise_osc = (2.0 * omega / p) * std::exp(-r * t / (2.0 * dp1)) *
                           std::cos(p * t / 2.0 - std::atan(r / (p * dp1)));
  const double comb_osc = (2.0 * x / (dp1 * y)) * std::exp(-r * t / 2.0) *
                          std::cos(y * t / 2.0 + std::atan(r * (d - 1.0) / (y * dp1)));
  ScenarioSpectra out;
  out.t = t;
  out.markov = detail::uniform_spectrum(d, markov);
  out.noise = detail::uniform_spectrum(d, noise_osc);
  out.noise.lambdas[as - 1] = 1.0;
  out.combined = detail::uniform_spectrum(d, comb_osc);
  out.combined.lambdas[as - 1] = markov;
  return out;
}

// Dispatch over the closed-form families; custom kernels have no closed form
// and must be integrated numerically (see engineering::capacity_trajectory).
inline ScenarioSpectra eval_scenario(const ScenarioSpec& spec, double t) {
  return std::visit(
      [t](const auto& p) -> ScenarioSpectra {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ConstantIsotropicParams>)
          return eval_constant_scenario(p.gamma, p.omega, t);
        else if constexpr (std::is_same_v<T, ExpDecayParams>)
          return eval_expdecay_scenario(p.gamma, p.z, p.omega, p.d, p.alpha_star, t);
        else if constexpr (std::is_same_v<T, BeyondSemigroupParams>)
          return eval_beyond_scenario(p.r, p.omega, p.d, p.alpha_star, t);
        else
          throw std::invalid_argument(
              "eval_scenario: custom kernels have no closed form; solve numerically");
      },
      spec);
}

// ---------------------------------------------------------------------------
// Kernel eigenvalues
// ---------------------------------------------------------------------------

enum class MapComponent { kMarkov, kNoise, kCombined };

// Per-alpha kernel eigenvalue functions (delta weight + smooth part) for the
// selected component of the scenario kernel. The Markovian part of the
// beyond-semigroup family is itself non-local:
//   kappa^M(t) = -(dr/(d+1)) delta(t) + (dr/(d+1))(r/(d+1)) e^{-rt/(d+1)}.
inline std::vector<KernelFunction> kernel_functions(const ScenarioSpec& spec,
                                                    MapComponent part = MapComponent::kCombined) {
  validate_scenario(spec);
  const int d = scenario_dim(spec);
  std::vector<KernelFunction> out(static_cast<std::size_t>(d) + 1);
  const bool markov = part != MapComponent::kNoise;
  const bool noise = part != MapComponent::kMarkov;

  if (const auto* p = std::get_if<ConstantIsotropicParams>(&spec)) {
    const double w2 = p->omega * p->omega;
    for (int a = 0; a <= d; ++a) {
      if (markov) out[a].delta_weight = -p->gamma;
      if (noise && a < 2) out[a].smooth = [w2](double) { return -w2; };
    }
  } else if (const auto* p = std::get_if<ExpDecayParams>(&spec)) {
    const int as = resolved_alpha_star(p->alpha_star, d);
    const double w2 = p->omega * p->omega, z = p->z;
    for (int a = 0; a <= d; ++a) {
      if (markov) out[a].delta_weight = -p->gamma;
      if (noise && a != as - 1)
        out[a].smooth = [w2, z](double t) { return -w2 * std::exp(-z * t); };
    }
  } else if (const auto* p = std::get_if<BeyondSemigroupParams>(&spec)) {
    const int as = resolved_alpha_star(p->alpha_star, d);
    const double dp1 = d + 1.0;
    const double local = p->r * d / dp1;          // magnitude of the delta weight
    const double rev = local * p->r / dp1;        // Markov kernel's smooth prefactor
    const double w2 = p->omega * p->omega;
    const double decay = p->r / dp1;
    for (int a = 0; a <= d; ++a) {
      if (markov) out[a].delta_weight = -local;
      const double noise_part = (noise && a != as - 1) ? -w2 : 0.0;
      const double markov_part = markov ? rev : 0.0;
      if (markov_part != 0.0 || noise_part != 0.0)
        out[a].smooth = [markov_part, noise_part, decay](double t) {
          return (markov_part + noise_part) * std::exp(-decay * t);
        };
    }
  } else {
    const auto& custom = std::get<CustomKernelParams>(spec);
    for (int a = 0; a <= d; ++a) {
      if (markov) out[a].delta_weight = custom.delta_weights[a];
      if (noise) out[a].smooth = custom.smooth[a];
    }
  }
  return out;
}

struct KernelEigenvalueSample {
  double delta_weight = 0.0;
  double smooth = 0.0;
};

// Full-kernel eigenvalue split evaluated at one time.
inline std::vector<KernelEigenvalueSample> kernel_eigenvalues(const ScenarioSpec& spec,
                                                              double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("kernel_eigenvalues: t must be >= 0");
  const auto funcs = kernel_functions(spec, MapComponent::kCombined);
  std::vector<KernelEigenvalueSample> out(funcs.size());
  for (std::size_t a = 0; a < funcs.size(); ++a) {
    out[a].delta_weight = funcs[a].delta_weight;
    out[a].smooth = funcs[a].smooth ? funcs[a].smooth(t) : 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sufficient complete-positivity conditions
// ---------------------------------------------------------------------------

// One evaluated sufficient condition: the Fujiwara-Algoet lower bound tested
// at the first local minimum of the scenario's cosine, t_star. `geq` records
// the direction of the inequality as stated (lhs >= rhs vs lhs <= rhs).
struct CpSufficiencyReport {
  double t_star = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool geq = true;
  bool holds = false;
};

struct ScenarioCpSufficiency {
  CpSufficiencyReport combined;
  std::optional<CpSufficiencyReport> noise;  // families with a pure noise condition
};

namespace detail {
inline CpSufficiencyReport make_report(double t_star, double lhs, double rhs, bool geq) {
  CpSufficiencyReport rep;
  rep.t_star = t_star;
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.geq = geq;
  rep.holds = geq ? lhs >= rhs : lhs <= rhs;
  return rep;
}

// Noise-map condition e^{z t*/2} >= 2(d-1) omega / P with
// t* = (2/P)(pi + atan(z/P)), P = sqrt(4 omega^2 - z^2).
inline CpSufficiencyReport noise_decay_condition(double z, double omega, int d) {
  const double p = std::sqrt(4.0 * omega * omega - z * z);
  const double t_star = (2.0 / p) * (std::numbers::pi + std::atan(z / p));
  return make_report(t_star, std::exp(z * t_star / 2.0), 2.0 * (d - 1.0) * omega / p, true);
}
}  // namespace detail

// Evaluates the scenario's sufficient legitimacy condition(s) at the first
// cosine minimum. These are sufficient, not necessary: a failing report only
// means the closed-form argument gives no guarantee, and the pointwise
// Fujiwara-Algoet margins decide (see engineering::full_cp_validation).
inline ScenarioCpSufficiency cp_sufficient(const ScenarioSpec& spec) {
  validate_scenario(spec);
  ScenarioCpSufficiency out;
  if (const auto* p = std::get_if<ConstantIsotropicParams>(&spec)) {
    const double pp = std::sqrt(4.0 * p->omega * p->omega - p->gamma * p->gamma);
    const double t_star = (2.0 / pp) * (std::numbers::pi - std::atan(p->gamma / pp));
    out.combined = detail::make_report(t_star, std::cosh(p->gamma * t_star / 2.0),
                                       2.0 * p->omega / pp, true);
  } else if (const auto* p = std::get_if<ExpDecayParams>(&spec)) {
    const double r = std::sqrt(4.0 * p->omega * p->omega - (p->gamma - p->z) * (p->gamma - p->z));
    const double t_star = (2.0 / r) * (std::numbers::pi - std::atan((p->gamma - p->z) / r));
    const double lhs = 2.0 * p->d * (p->d - 1.0) * p->omega / r;
    const double rhs = std::exp(p->z * t_star / 2.0) *
                       ((p->d - 1.0) * std::exp(-p->gamma * t_star / 2.0) +
                        std::exp(p->gamma * t_star / 2.0));
    out.combined = detail::make_report(t_star, lhs, rhs, false);
    out.noise = detail::noise_decay_condition(p->z, p->omega, p->d);
  } else if (const auto* p = std::get_if<BeyondSemigroupParams>(&spec)) {
    const double dp1 = p->d + 1.0;
    const double y = std::sqrt(4.0 * p->omega * p->omega - p->r * p->r);
    const double x = std::sqrt(dp1 * dp1 * p->omega * p->omega - p->d * p->r * p->r);
    const double t_star =
        (2.0 / y) * (std::numbers::pi - std::atan((p->d - 1.0) * p->r / (dp1 * y)));
    const double rhs = std::exp(p->r * t_star / 2.0) / (p->d - 1.0) +
                       0.5 * std::exp(-p->r * t_star / 2.0);
    out.combined = detail::make_report(t_star, x / y, rhs, false);
    out.noise = detail::noise_decay_condition(p->r / dp1, p->omega, p->d);
  } else {
    throw std::invalid_argument(
        "cp_sufficient: no closed-form condition for custom kernels; use the pointwise "
        "Fujiwara-Algoet margins instead");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Memory-kernel admissibility
// ---------------------------------------------------------------------------

// Legitimacy report for tabulated ell_alpha(t) with lambda_alpha = 1 - int ell.
// The kernel is admissible iff, at every time,
//   L_alpha(t) >= 0,   d L_alpha(t) <= sum_beta L_beta(t) <= d^2/(d-1),
// which is the pointwise Fujiwara-Algoet condition plus lambda <= 1.
struct AdmissibilityReport {
  bool pass = false;
  std::optional<double> nonneg_violation;     // first t with L_alpha < 0
  std::optional<double> dominance_violation;  // first t with d L_alpha > sum L
  std::optional<double> sum_bound_violation;  // first t with sum L > d^2/(d-1)
  std::vector<std::vector<double>> integrated;  // L_alpha per grid point
  std::vector<std::vector<double>> lambdas;     // 1 - L_alpha
};

inline AdmissibilityReport kernel_admissibility(const std::vector<std::vector<double>>& ell,
                                                const UniformGrid& grid, int d,
                                                double tol = kDefaultCpTol) {
  if (d < 2) throw std::invalid_argument("kernel_admissibility: d must be >= 2");
  if (ell.size() != static_cast<std::size_t>(d) + 1)
    throw std::invalid_argument("kernel_admissibility: need d+1 ell rows");
  const std::size_t n = grid.size();
  for (const auto& row : ell) {
    if (row.size() != n)
      throw std::invalid_argument("kernel_admissibility: ell table does not match grid");
    for (double v : row)
      if (!std::isfinite(v)) throw std::invalid_argument("kernel_admissibility: non-finite ell");
  }

  AdmissibilityReport rep;
  const double h = grid.dt();
  rep.integrated.assign(ell.size(), std::vector<double>(n, 0.0));
  rep.lambdas.assign(ell.size(), std::vector<double>(n, 1.0));
  for (std::size_t a = 0; a < ell.size(); ++a)
    for (std::size_t i = 1; i < n; ++i) {
      rep.integrated[a][i] = rep.integrated[a][i - 1] + 0.5 * h * (ell[a][i - 1] + ell[a][i]);
      rep.lambdas[a][i] = 1.0 - rep.integrated[a][i];
    }

  const double sum_cap = d * d / (d - 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0, max = rep.integrated[0][i], min = rep.integrated[0][i];
    for (std::size_t a = 0; a < ell.size(); ++a) {
      sum += rep.integrated[a][i];
      max = std::max(max, rep.integrated[a][i]);
      min = std::min(min, rep.integrated[a][i]);
    }
    const double t = grid.time(i);
    if (!rep.nonneg_violation && min < -tol) rep.nonneg_violation = t;
    if (!rep.dominance_violation && d * max > sum + tol) rep.dominance_violation = t;
    if (!rep.sum_bound_violation && sum > sum_cap + tol) rep.sum_bound_violation = t;
  }
  rep.pass = !rep.nonneg_violation && !rep.dominance_violation && !rep.sum_bound_violation;
  return rep;
}

// ---------------------------------------------------------------------------
// Map-kernel (null space) behaviour of a single eigenvalue trajectory
// ---------------------------------------------------------------------------

struct MapKernelReport {
  bool is_invertible = true;           // no zero of lambda in the interior
  bool is_kernel_nondecreasing = true; // once |lambda| < tol it stays there
  std::vector<double> zero_crossings;  // sign changes and zero-plateau onsets
};

inline MapKernelReport kernel_nondecreasing_check(const std::vector<double>& lambda,
                                                  const UniformGrid& grid, double tol) {
  if (lambda.size() != grid.size())
    throw std::invalid_argument("kernel_nondecreasing_check: values do not match grid");
  MapKernelReport rep;
  const std::size_t n = lambda.size();
  bool seen_zero = false;
  for (std::size_t i = 0; i < n; ++i) {
    const bool below = std::abs(lambda[i]) < tol;
    if (below && (i == 0 || std::abs(lambda[i - 1]) >= tol))
      rep.zero_crossings.push_back(grid.time(i));  // onset of a zero plateau
    if (seen_zero && !below) rep.is_kernel_nondecreasing = false;  // revived
    if (below) seen_zero = true;
    if (!below && i + 1 < n && std::abs(lambda[i + 1]) >= tol &&
        std::signbit(lambda[i]) != std::signbit(lambda[i + 1])) {
      // Interpolated sign change strictly between grid points.
      const double f0 = lambda[i], f1 = lambda[i + 1];
      rep.zero_crossings.push_back(grid.time(i) + grid.dt() * f0 / (f0 - f1));
      seen_zero = true;
    }
  }
  rep.is_invertible = !seen_zero;
  std::sort(rep.zero_crossings.begin(), rep.zero_crossings.end());
  return rep;
}

}  // namespace gpc
